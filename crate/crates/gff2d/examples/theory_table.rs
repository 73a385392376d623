//! Closed-form exponent predictions, plus a look at the constrained
//! minimization behind the pair exponent.
//!
//! ```bash
//! cargo run --example theory_table
//! ```

use gff2d::theory::{
    self, max_admissible_tilt, optimal_tilt, pair_exponent, prediction_table, tilt_cost,
    TheoryParams,
};

fn main() {
    let params = TheoryParams { alpha: 0.5, beta: 0.5, eta: 0.5, ..Default::default() };
    let table = prediction_table(&params).unwrap();
    println!("predictions at alpha=0.5, beta=0.5, eta=0.5:");
    println!("{}", serde_json::to_string_pretty(&table).unwrap());

    // The pair exponent minimizes a quadratic tilt cost over an interval
    // [0, 1/alpha]; the unconstrained optimum 2/(2-beta) wins until alpha
    // pushes the admissible edge below it.
    println!("\ntilt cost at beta=0.5 (optimum 2/(2-beta) = {:.4}):", optimal_tilt(0.5).unwrap());
    for i in 0..=10 {
        let gamma = i as f64 * 0.2;
        println!("  cost({gamma:.1}) = {:.4}", tilt_cost(2.0, 0.5, gamma).unwrap());
    }

    println!("\npair exponent across the constraint switch (beta=0.5):");
    for &alpha in &[0.3, 0.5, 0.7, 0.75, 0.8, 0.9, 0.99] {
        let edge = max_admissible_tilt(alpha).unwrap();
        let binding = if edge < optimal_tilt(0.5).unwrap() { "edge binds" } else { "interior" };
        println!(
            "  alpha={alpha:<4} rho={:.4}  (admissible tilt up to {:.3}, {binding})",
            pair_exponent(alpha, 0.5).unwrap(),
            edge
        );
    }

    println!("\ng = 2/pi = {:.12}", theory::G);
}
