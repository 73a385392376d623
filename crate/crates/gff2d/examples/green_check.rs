//! Three independent routes to the covariance agree: the direct linear
//! solve, the spectral mode sum, and a Monte Carlo random-walk estimate.
//!
//! ```bash
//! cargo run --example green_check
//! ```

use gff2d::green::{green_matrix, green_walk_oracle};
use gff2d::lattice::{GridDomain, Point};
use gff2d::sampler::spectral_covariance;
use gff2d::theory;

fn main() {
    let d = GridDomain::new(16, 1, 4).unwrap();
    let table = green_matrix(&d).unwrap();

    let mut worst = 0.0f64;
    for x in d.interior_sites() {
        for y in d.interior_sites() {
            worst = worst.max((spectral_covariance(&d, x, y) - table.value_at(x, y)).abs());
        }
    }
    println!("N=16: max |spectral - solve| over all interior pairs = {worst:.3e}");

    println!("\nwalk oracle vs solve (10^6 walks each):");
    for (x, y) in [
        (Point::new(8, 8), Point::new(8, 8)),
        (Point::new(8, 8), Point::new(9, 8)),
        (Point::new(4, 5), Point::new(10, 11)),
        (Point::new(2, 2), Point::new(2, 2)),
    ] {
        let est = green_walk_oracle(&d, x, y, 1_000_000, 11).unwrap();
        let exact = table.value_at(x, y);
        println!(
            "  G(({},{}),({},{})) = {exact:.5}  walk {:.5} ± {:.5}  ({:+.2} se)",
            x.x,
            x.y,
            y.x,
            y.y,
            est.mean,
            est.stderr,
            (est.mean - exact) / est.stderr
        );
    }

    println!("\ncentral variance against g log N:");
    for n in [8i64, 16, 32, 64] {
        let d = GridDomain::new(n, 1, 4).unwrap();
        let t = green_matrix(&d).unwrap();
        let c = Point::new(n / 2, n / 2);
        let v = t.variance_at(c);
        println!("  N={n:<3} Var = {v:.4}   g log N = {:.4}", theory::G * (n as f64).ln());
    }
}
