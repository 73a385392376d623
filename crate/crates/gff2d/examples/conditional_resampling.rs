//! The domain Markov property in action: given a box frame, the inside
//! splits into the harmonic extension of the frame values plus an
//! independent zero-boundary field.
//!
//! ```bash
//! cargo run --example conditional_resampling
//! ```

use gff2d::lattice::{BoxSpec, GridDomain, Point};
use gff2d::sampler::{coarse_value, harmonic_extension, sample_conditional, sample_spectral};

fn main() {
    let d = GridDomain::new(32, 1, 4).unwrap();
    let field = sample_spectral(&d, 5);
    let bx = BoxSpec::square_centered(Point::new(16, 16), 12);

    let ext = harmonic_extension(&field, &bx).unwrap();
    println!(
        "box {}x{} at ({},{}): field at center {:+.4}, coarse value {:+.4}",
        bx.width(),
        bx.height(),
        bx.anchor().x,
        bx.anchor().y,
        field.value(bx.center()),
        ext.coarse
    );

    // resampling changes the inside, fixes everything else
    let resampled = sample_conditional(&field, &bx, 99).unwrap();
    let outside_moved = d
        .sites()
        .filter(|&p| !bx.contains(p) || bx.is_box_boundary(p))
        .any(|p| field.value(p) != resampled.value(p));
    println!(
        "after resampling: center {:+.4} (was {:+.4}); any outside site moved: {outside_moved}",
        resampled.value(bx.center()),
        field.value(bx.center())
    );

    // the coarse value is a frame functional, so it survives resampling
    let c0 = coarse_value(&field, &bx).unwrap().value;
    let c1 = coarse_value(&resampled, &bx).unwrap().value;
    println!("coarse value before {c0:+.6} and after {c1:+.6} (frame untouched)");

    // Monte Carlo: conditional mean at the center equals the harmonic
    // extension there
    let k = 2000;
    let mut acc = 0.0;
    for seed in 0..k {
        acc += sample_conditional(&field, &bx, 1000 + seed).unwrap().value(bx.center());
    }
    println!(
        "mean of {k} conditional resamples at center: {:+.4} vs harmonic {:+.4}",
        acc / k as f64,
        ext.coarse
    );
}
