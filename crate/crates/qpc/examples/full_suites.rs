//! Runs every verification suite across several seeds; exits nonzero on any
//! failure. Handy as a pre-release sweep beyond the default acceptance seed.

use qpc::verifier::{run_suite, suite_ids, SuiteConfig};

fn main() {
    let seeds: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("seeds are integers"))
        .collect();
    let seeds = if seeds.is_empty() { vec![0x0b5eca11] } else { seeds };
    let t0 = std::time::Instant::now();
    let mut all_ok = true;
    for seed in seeds {
        let config = SuiteConfig { trials: 100, dims: vec![2, 3, 4], seed };
        for id in suite_ids() {
            let r = run_suite(id, &config).unwrap();
            if !r.passed() {
                println!(
                    "seed {seed} suite {id}: FAIL {}",
                    r.failures[0].description
                );
                all_ok = false;
            }
        }
        println!("seed {seed}: done");
    }
    println!("total {:?} all_ok={all_ok}", t0.elapsed());
    if !all_ok {
        std::process::exit(1);
    }
}
