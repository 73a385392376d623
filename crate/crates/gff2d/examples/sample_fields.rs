//! Exact field samples from both routes, with binary dumps.
//!
//! ```bash
//! cargo run --example sample_fields
//! ```

use gff2d::green::green_matrix;
use gff2d::lattice::{GridDomain, Point};
use gff2d::sampler::{sample_dense, Field, SpectralSampler};

fn main() {
    let d = GridDomain::new(32, 1, 4).unwrap();

    // covariance factorization route (desk sizes)
    let table = green_matrix(&d).unwrap();
    let dense = sample_dense(&d, &table, 42).unwrap();
    println!(
        "dense sample    : center {:+.4}, inner mean {:+.4}, inner max {:+.4}",
        dense.value(Point::new(16, 16)),
        dense.mean_inner(),
        dense.max_inner()
    );

    // spectral route (scales to large N; plans are cached across replicas)
    let mut sampler = SpectralSampler::new(&d);
    for seed in [42u64, 43, 44] {
        let f = sampler.sample(seed);
        println!(
            "spectral seed {seed}: center {:+.4}, inner mean {:+.4}, inner max {:+.4}",
            f.value(Point::new(16, 16)),
            f.mean_inner(),
            f.max_inner()
        );
    }

    // dump / reload round trip
    let f = sampler.sample(7);
    let path = std::env::temp_dir().join("gff2d-field.bin");
    let mut file = std::fs::File::create(&path).unwrap();
    f.write_to(&mut file, 0).unwrap();
    let mut file = std::fs::File::open(&path).unwrap();
    let (back, _sweeps) = Field::read_from(&mut file).unwrap();
    println!(
        "dumped {} bytes to {} and read back identical: {}",
        std::fs::metadata(&path).unwrap().len(),
        path.display(),
        back == f
    );
    std::fs::remove_file(&path).ok();
}
