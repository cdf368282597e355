// The three sampling estimators side by side against the exact counts.

use std::error::Error;

use temporal_butterfly::bench::mape;
use temporal_butterfly::counting::exact_count;
use temporal_butterfly::graph::{generate_synthetic, Layer};
use temporal_butterfly::sampling::{estimate, SamplingConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let graph = generate_synthetic(20, 20, 5_000, 100_000, 3)?;
    let tau = 2_000;
    let exact = exact_count(&graph, tau)?;
    println!("exact            {exact}");

    let configs = [
        ("edge p=0.2", SamplingConfig::es(0.2, 1)),
        ("node p=0.2", SamplingConfig::ns(0.2, Layer::Upper, 1)),
        ("interval s=200", SamplingConfig::is(200, 1.0, 1)),
    ];
    for (name, config) in configs {
        let est = estimate(&graph, tau, &config)?;
        let err = mape(&est, &exact).unwrap_or(0.0);
        println!("{name:<16} {est}  MAPE {:.1}%", err * 100.0);
        assert!(est.0.iter().all(|v| *v >= 0.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
