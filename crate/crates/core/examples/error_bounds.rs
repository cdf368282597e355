// Choosing sampling parameters for a target relative error and confidence.

use std::error::Error;

use temporal_butterfly::bounds::{
    chebyshev_interval_samples, es_ns_variance_bound, is_variance_bound, min_interval_samples, min_probability,
    ApproximationParams,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let m = 101;
    for (epsilon, delta) in [(0.5, 0.1), (0.2, 0.1), (0.1, 0.05)] {
        let params = ApproximationParams::new(epsilon, delta)?;
        println!(
            "eps {epsilon:<4} delta {delta:<4}  p >= {:.5}  s >= {} (Bennett) / {} (Chebyshev)",
            min_probability(params),
            min_interval_samples(params, m),
            chebyshev_interval_samples(params, m),
        );
    }
    let count = 1_000.0;
    println!("Var bound, edge/node p=0.5: {}", es_ns_variance_bound(count, 0.5)?);
    println!("Var bound, interval s=100, m={m}: {}", is_variance_bound(count, m, 100)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
