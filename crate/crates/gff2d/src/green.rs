//! The killed-walk Green's function `G_N` and its diagnostics.
//!
//! `G_N(x, y)` is the expected number of visits to `y` (counting time 0) of
//! a simple random walk started at `x` and stopped on first hitting `∂V_N`.
//! Columns of `G_N` solve `(I − P) g = e_y` on the interior with zero
//! boundary values, so the table is built from one factorization of the
//! interior operator reused for every column. A direct Monte Carlo walk
//! estimator serves as an independent oracle.

use crate::dirichlet::DirichletSolver;
use crate::lattice::{GridDomain, Point};
use crate::stream::substream;
use crate::theory;
use std::io::{Read, Write};
use thiserror::Error;

/// Interiors larger than this refuse to build a dense table.
pub const DEFAULT_DENSE_CAP: usize = 65_536;

/// Required relative residual of every table column.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("interior has {interior} sites, above the dense-size cap {cap}")]
    TooLarge { interior: usize, cap: usize },
    #[error("site {0:?} is not in the interior of the domain")]
    OutsideInterior(Point),
    #[error("column {column} solved to relative residual {residual:.3e}, above {SOLVE_TOLERANCE:.1e}")]
    Residual { column: usize, residual: f64 },
    #[error("table file does not match: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dense symmetric Green's function over interior sites, stored as a packed
/// lower triangle (column-major). Entries are expected visit counts.
#[derive(Debug, Clone)]
pub struct GreenTable {
    domain: GridDomain,
    n: usize,
    packed: Vec<f64>,
}

impl GreenTable {
    fn col_offset(&self, j: usize) -> usize {
        j * (2 * self.n - j + 1) / 2
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    /// Number of interior sites.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry by interior indices.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.packed[self.col_offset(lo) + (hi - lo)]
    }

    /// Entry by lattice points; zero whenever either argument is on `∂V_N`.
    pub fn value_at(&self, x: Point, y: Point) -> f64 {
        if !self.domain.is_interior(x) || !self.domain.is_interior(y) {
            return 0.0;
        }
        self.value(self.domain.interior_index(x), self.domain.interior_index(y))
    }

    pub fn variance_at(&self, x: Point) -> f64 {
        self.value_at(x, x)
    }

    /// Full dense matrix, row-major `n × n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in j..n {
                let v = self.packed[self.col_offset(j) + (i - j)];
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// Binary dump: header `(N, l numerator, l denominator, site count)` as
    /// little-endian u64, then the full row-major matrix as f64.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), GreenError> {
        let (ln, ld) = self.domain.l();
        w.write_all(&(self.domain.n() as u64).to_le_bytes())?;
        w.write_all(&ln.to_le_bytes())?;
        w.write_all(&ld.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for j in 0..self.n {
            for i in 0..self.n {
                w.write_all(&self.value(i, j).to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, GreenError> {
        let mut u = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64, GreenError> {
            r.read_exact(&mut u)?;
            Ok(u64::from_le_bytes(u))
        };
        let n_side = next(r)? as i64;
        let ln = next(r)?;
        let ld = next(r)?;
        let count = next(r)? as usize;
        let domain = GridDomain::new(n_side, ln, ld)
            .map_err(|e| GreenError::Format(e.to_string()))?;
        if domain.interior_len() != count {
            return Err(GreenError::Format(format!(
                "site count {count} does not match interior of V_{n_side}"
            )));
        }
        let mut packed = vec![0.0; count * (count + 1) / 2];
        let mut buf = [0u8; 8];
        let mut table = GreenTable { domain, n: count, packed: Vec::new() };
        for j in 0..count {
            for i in 0..count {
                r.read_exact(&mut buf)?;
                let v = f64::from_le_bytes(buf);
                if i >= j {
                    packed[table.col_offset(j) + (i - j)] = v;
                }
            }
        }
        table.packed = packed;
        Ok(table)
    }
}

/// Builds the Green's function table with the default dense-size cap.
pub fn green_matrix(domain: &GridDomain) -> Result<GreenTable, GreenError> {
    green_matrix_with_cap(domain, DEFAULT_DENSE_CAP)
}

/// Builds the table, refusing interiors above `cap` sites. Every column is
/// solved directly from one banded factorization; a spread of columns is
/// verified against [`SOLVE_TOLERANCE`].
pub fn green_matrix_with_cap(domain: &GridDomain, cap: usize) -> Result<GreenTable, GreenError> {
    let n = domain.interior_len();
    if n > cap {
        return Err(GreenError::TooLarge { interior: n, cap });
    }
    let m = (domain.n() - 2) as usize;
    let solver = DirichletSolver::new(m, m);
    let mut table = GreenTable { domain: domain.clone(), n, packed: vec![0.0; n * (n + 1) / 2] };
    let mut col = vec![0.0; n];
    for j in 0..n {
        solver.solve_unit_tail(j, &mut col);
        let off = table.col_offset(j);
        table.packed[off..off + (n - j)].copy_from_slice(&col[j..]);
    }
    // Verify a spread of full columns against the operator.
    let step = (n / 5).max(1);
    let mut ax = vec![0.0; n];
    for j in (0..n).step_by(step) {
        let full: Vec<f64> = (0..n).map(|i| table.value(i, j)).collect();
        solver.apply(&full, &mut ax);
        let mut num = 0.0;
        for (i, &v) in ax.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            num += (v - want) * (v - want);
        }
        let residual = num.sqrt();
        if residual > SOLVE_TOLERANCE {
            return Err(GreenError::Residual { column: j, residual });
        }
    }
    Ok(table)
}

/// Monte Carlo estimate of `G_N(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Estimates `G_N(x, y)` by simulating simple random walks from `x` and
/// counting visits to `y` (including time 0) before the first boundary
/// hit. The stream is derived from `(seed, x, y)`, so the estimate is
/// reproducible bit for bit.
pub fn green_walk_oracle(
    domain: &GridDomain,
    x: Point,
    y: Point,
    trials: u64,
    seed: u64,
) -> Result<WalkEstimate, GreenError> {
    if !domain.is_interior(x) {
        return Err(GreenError::OutsideInterior(x));
    }
    if !domain.is_interior(y) {
        return Err(GreenError::OutsideInterior(y));
    }
    assert!(trials >= 1);
    let mut rng = substream(seed, "green-walk", &[
        domain.n() as u64,
        x.x as u64,
        x.y as u64,
        y.x as u64,
        y.y as u64,
    ]);
    use rand::Rng;

    let n = domain.n();
    let mut sum: u64 = 0;
    let mut sum_sq: u128 = 0;
    let mut bits: u64 = 0;
    let mut bits_left = 0u32;
    for _ in 0..trials {
        let (mut px, mut py) = (x.x, x.y);
        let mut visits: u64 = 0;
        loop {
            if px == y.x && py == y.y {
                visits += 1;
            }
            if bits_left == 0 {
                bits = rng.random();
                bits_left = 32;
            }
            let dir = bits & 0b11;
            bits >>= 2;
            bits_left -= 1;
            match dir {
                0 => px += 1,
                1 => px -= 1,
                2 => py += 1,
                _ => py -= 1,
            }
            if px == 1 || px == n || py == 1 || py == n {
                break;
            }
        }
        sum += visits;
        sum_sq += (visits as u128) * (visits as u128);
    }
    let mean = sum as f64 / trials as f64;
    let stderr = if trials > 1 {
        let var = (sum_sq as f64 - (sum as f64) * mean) / (trials - 1) as f64;
        (var.max(0.0) / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(WalkEstimate { mean, stderr, trials })
}

/// Measured deviations of the table from the logarithmic covariance
/// profile `g·log N` (variances) and `g·(log N − log|y−x|)` (off-diagonal)
/// over the inner region.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    pub n: i64,
    pub g_log_n: f64,
    /// `sup_{x ∈ V_N^l} |G(x,x) − g log N|`.
    pub diag_sup: f64,
    /// `sup_{x≠y ∈ V_N^l} |G(x,y) − g(log N − log|y−x|)|`; `None` when the
    /// inner region has fewer than two sites.
    pub pair_sup: Option<f64>,
}

pub fn covariance_deviation(domain: &GridDomain, table: &GreenTable) -> CovarianceReport {
    assert_eq!(domain, table.domain(), "table was built for a different domain");
    let g = theory::G;
    let log_n = (domain.n() as f64).ln();
    let inner: Vec<Point> = domain.inner_sites().collect();
    let idx: Vec<usize> = inner.iter().map(|&p| domain.interior_index(p)).collect();

    let mut diag_sup: f64 = 0.0;
    for &i in &idx {
        diag_sup = diag_sup.max((table.value(i, i) - g * log_n).abs());
    }
    let mut pair_sup = None;
    for a in 0..inner.len() {
        for b in a + 1..inner.len() {
            let d = (inner[a].dist2(inner[b]) as f64).sqrt();
            let dev = (table.value(idx[a], idx[b]) - g * (log_n - d.ln())).abs();
            pair_sup = Some(pair_sup.map_or(dev, |s: f64| s.max(dev)));
        }
    }
    CovarianceReport { n: domain.n(), g_log_n: g * log_n, diag_sup, pair_sup }
}
