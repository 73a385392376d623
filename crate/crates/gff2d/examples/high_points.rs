//! Counting eta-high points across sizes and fitting the exponent
//! against the prediction 2(1−η²).
//!
//! ```bash
//! cargo run --example high_points
//! ```

use gff2d::harness::{run_experiment, Experiment, ExperimentConfig};

fn main() {
    let mut config = ExperimentConfig::new(Experiment::HighCount);
    config.params.eta = 0.5;
    config.ns = vec![64, 128, 256, 512];
    config.replicas = 50;
    config.master_seed = 7;
    let report = run_experiment(&config).unwrap();
    print!("{}", report.summary.render_text());
    println!("\nraw rows: {} (schema n,l,replica,statistic,parameters,value)", report.rows.len());
}
