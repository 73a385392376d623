//! Exact samplers for the zero-boundary field, harmonic extension, and
//! conditional resampling of sub-boxes.
//!
//! Two independent exact routes produce the same law:
//!
//! - [`DenseSampler`]: lower-triangular factorization `G = LLᵀ` of the
//!   Green's function table, field = `L·z`.
//! - [`SpectralSampler`]: sum of Dirichlet sine modes with weights chosen
//!   so the implied covariance is `G` exactly; costs `O(N² log N)` per
//!   field through the fast sine transform.
//!
//! Given a sub-box, the field splits into the discrete harmonic extension
//! of its boundary values plus an independent zero-boundary field inside;
//! [`sample_conditional`] resamples the inside that way.

use crate::dirichlet::DirichletSolver;
use crate::dst::Dst2d;
use crate::green::GreenTable;
use crate::lattice::{BoxSpec, GridDomain, Point};
use crate::stream::{substream, Stream};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("covariance factorization failed: table is not numerically positive definite")]
    FactorizationFailure,
    #[error("box {0}x{1} has empty interior")]
    DegenerateBox(i64, i64),
    #[error("box is not contained in the domain")]
    BoxOutsideDomain,
    #[error("field file does not match: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a field realization was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Dense,
    Spectral,
    Conditional,
    Chain,
}

impl Provenance {
    fn tag(self) -> u8 {
        match self {
            Provenance::Dense => 0,
            Provenance::Spectral => 1,
            Provenance::Conditional => 2,
            Provenance::Chain => 3,
        }
    }

    fn from_tag(t: u8) -> Option<Self> {
        Some(match t {
            0 => Provenance::Dense,
            1 => Provenance::Spectral,
            2 => Provenance::Conditional,
            3 => Provenance::Chain,
            _ => return None,
        })
    }
}

/// One realization of the field over all of `V_N`, immutable after
/// creation. Boundary values are exactly zero for sampled provenances.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    domain: GridDomain,
    values: Vec<f64>,
    provenance: Provenance,
    seed: u64,
}

impl Field {
    /// The all-zero field.
    pub fn zero(domain: GridDomain, provenance: Provenance, seed: u64) -> Self {
        let n = (domain.n() * domain.n()) as usize;
        Field { domain, values: vec![0.0; n], provenance, seed }
    }

    /// Wraps externally produced values (row-major over `V_N`). All `N²`
    /// entries must be finite.
    pub fn from_values(
        domain: GridDomain,
        values: Vec<f64>,
        provenance: Provenance,
        seed: u64,
    ) -> Result<Self, SamplerError> {
        let expect = (domain.n() * domain.n()) as usize;
        if values.len() != expect {
            return Err(SamplerError::Format(format!(
                "expected {expect} values for V_{}, got {}",
                domain.n(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(SamplerError::Format("field values must be finite".into()));
        }
        Ok(Field { domain, values, provenance, seed })
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, p: Point) -> f64 {
        self.values[self.domain.site_index(p)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest value over the inner region.
    pub fn max_inner(&self) -> f64 {
        self.domain
            .inner_sites()
            .map(|p| self.value(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean over the inner region.
    pub fn mean_inner(&self) -> f64 {
        let s: f64 = self.domain.inner_sites().map(|p| self.value(p)).sum();
        s / self.domain.inner_len() as f64
    }

    /// Binary dump: header `(N, l numerator, l denominator)` as u64,
    /// provenance tag byte, seed and sweep count as u64, then all `N²`
    /// values row-major as f64. Sweep count is meaningful for chain states
    /// and zero otherwise.
    pub fn write_to<W: Write>(&self, w: &mut W, sweep_count: u64) -> Result<(), SamplerError> {
        let (ln, ld) = self.domain.l();
        w.write_all(&(self.domain.n() as u64).to_le_bytes())?;
        w.write_all(&ln.to_le_bytes())?;
        w.write_all(&ld.to_le_bytes())?;
        w.write_all(&[self.provenance.tag()])?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&sweep_count.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<(Self, u64), SamplerError> {
        let mut u = [0u8; 8];
        let mut next = |r: &mut R| -> Result<u64, SamplerError> {
            r.read_exact(&mut u)?;
            Ok(u64::from_le_bytes(u))
        };
        let n = next(r)? as i64;
        let ln = next(r)?;
        let ld = next(r)?;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let provenance = Provenance::from_tag(tag[0])
            .ok_or_else(|| SamplerError::Format(format!("unknown provenance tag {}", tag[0])))?;
        let seed = next(r)?;
        let sweep_count = next(r)?;
        let domain = GridDomain::new(n, ln, ld).map_err(|e| SamplerError::Format(e.to_string()))?;
        let mut values = vec![0.0; (n * n) as usize];
        let mut buf = [0u8; 8];
        for v in &mut values {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok((Field { domain, values, provenance, seed }, sweep_count))
    }
}

/// Samples by factoring the Green's function table once.
pub struct DenseSampler {
    domain: GridDomain,
    factor: nalgebra::DMatrix<f64>,
}

impl DenseSampler {
    pub fn new(table: &GreenTable) -> Result<Self, SamplerError> {
        let n = table.len();
        let dense = nalgebra::DMatrix::from_row_slice(n, n, &table.to_dense());
        let chol = dense.cholesky().ok_or(SamplerError::FactorizationFailure)?;
        Ok(DenseSampler { domain: table.domain().clone(), factor: chol.l() })
    }

    pub fn sample(&self, seed: u64) -> Field {
        let n = self.factor.nrows();
        let mut rng = substream(seed, "dense-field", &[self.domain.n() as u64]);
        let z = nalgebra::DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let interior = &self.factor * z;
        let mut field = Field::zero(self.domain.clone(), Provenance::Dense, seed);
        for idx in 0..n {
            let p = self.domain.interior_point(idx);
            let site = self.domain.site_index(p);
            field.values[site] = interior[idx];
        }
        field
    }
}

/// Interior values with the exact field covariance, synthesized from sine
/// modes with independent standard normal coefficients.
fn spectral_interior(m1: usize, m2: usize, dst: &mut Dst2d, rng: &mut Stream) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let norm = 2.0 / (((m1 + 1) * (m2 + 1)) as f64).sqrt();
    let mut grid = vec![0.0; m1 * m2];
    for k in 1..=m2 {
        let ck = (pi * k as f64 / (m2 + 1) as f64).cos();
        for j in 1..=m1 {
            let cj = (pi * j as f64 / (m1 + 1) as f64).cos();
            let lambda = 0.5 * (cj + ck);
            let z: f64 = rng.sample(StandardNormal);
            grid[(k - 1) * m1 + (j - 1)] = z * norm / (1.0 - lambda).sqrt();
        }
    }
    dst.apply(&mut grid);
    grid
}

/// Samples through the sine basis; plans are cached, so replicas are cheap.
pub struct SpectralSampler {
    domain: GridDomain,
    dst: Dst2d,
}

impl SpectralSampler {
    pub fn new(domain: &GridDomain) -> Self {
        let m = (domain.n() - 2) as usize;
        SpectralSampler { domain: domain.clone(), dst: Dst2d::new(m, m) }
    }

    pub fn sample(&mut self, seed: u64) -> Field {
        let m = (self.domain.n() - 2) as usize;
        let mut rng = substream(seed, "spectral-field", &[self.domain.n() as u64]);
        let interior = spectral_interior(m, m, &mut self.dst, &mut rng);
        let mut field = Field::zero(self.domain.clone(), Provenance::Spectral, seed);
        let n = self.domain.n();
        for v in 0..m {
            let row = (v as i64 + 1) * n + 1;
            field.values[row as usize..row as usize + m].copy_from_slice(&interior[v * m..(v + 1) * m]);
        }
        field
    }
}

/// One field from the factorized-covariance route.
pub fn sample_dense(domain: &GridDomain, table: &GreenTable, seed: u64) -> Result<Field, SamplerError> {
    assert_eq!(domain, table.domain());
    Ok(DenseSampler::new(table)?.sample(seed))
}

/// One field from the spectral route.
pub fn sample_spectral(domain: &GridDomain, seed: u64) -> Field {
    SpectralSampler::new(domain).sample(seed)
}

/// Covariance implied by the spectral weights, by direct summation over
/// modes. Deterministic; agrees with the Green's function table entrywise.
pub fn spectral_covariance(domain: &GridDomain, x: Point, y: Point) -> f64 {
    if !domain.is_interior(x) || !domain.is_interior(y) {
        return 0.0;
    }
    let m = (domain.n() - 2) as usize;
    let pi = std::f64::consts::PI;
    let denom = (m + 1) as f64;
    let (ux, vx) = ((x.x - 1) as f64, (x.y - 1) as f64);
    let (uy, vy) = ((y.x - 1) as f64, (y.y - 1) as f64);
    let mut sum = 0.0;
    for k in 1..=m {
        let ck = (pi * k as f64 / denom).cos();
        let sk = (pi * k as f64 * vx / denom).sin() * (pi * k as f64 * vy / denom).sin();
        for j in 1..=m {
            let cj = (pi * j as f64 / denom).cos();
            let sj = (pi * j as f64 * ux / denom).sin() * (pi * j as f64 * uy / denom).sin();
            sum += sj * sk / (1.0 - 0.5 * (cj + ck));
        }
    }
    sum * 4.0 / (denom * denom)
}

/// Discrete harmonic extension of a field's values on a box frame into the
/// box interior, and the coarse value at the box center.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    pub bx: BoxSpec,
    /// Row-major over the box interior.
    pub interior: Vec<f64>,
    /// Extension evaluated at the box center `x_B`.
    pub coarse: f64,
}

impl HarmonicExtension {
    pub fn value(&self, p: Point) -> f64 {
        let a = self.bx.anchor();
        let (w, _) = self.bx.interior_dims();
        let u = p.x - a.x - 1;
        let v = p.y - a.y - 1;
        assert!(u >= 0 && v >= 0 && u < w, "{p:?} is not in the box interior");
        self.interior[(v * w + u) as usize]
    }
}

/// Solves the box Dirichlet problem with the field's boundary values.
pub fn harmonic_extension(field: &Field, bx: &BoxSpec) -> Result<HarmonicExtension, SamplerError> {
    let domain = field.domain();
    if !domain.contains(bx.anchor()) || !domain.contains(bx.max_corner()) {
        return Err(SamplerError::BoxOutsideDomain);
    }
    let (w, h) = bx.interior_dims();
    if w == 0 || h == 0 {
        return Err(SamplerError::DegenerateBox(bx.width(), bx.height()));
    }
    let (w, h) = (w as usize, h as usize);
    let solver = DirichletSolver::new(w, h);
    let a = bx.anchor();
    let mut rhs = vec![0.0; w * h];
    for v in 0..h {
        for u in 0..w {
            let p = Point::new(a.x + 1 + u as i64, a.y + 1 + v as i64);
            let mut s = 0.0;
            for q in p.neighbors() {
                if bx.is_box_boundary(q) {
                    s += field.value(q);
                }
            }
            rhs[v * w + u] = 0.25 * s;
        }
    }
    solver.solve_in_place(&mut rhs);
    let c = bx.center();
    let coarse = rhs[((c.y - a.y - 1) * w as i64 + (c.x - a.x - 1)) as usize];
    Ok(HarmonicExtension { bx: *bx, interior: rhs, coarse })
}

/// The coarse value `Φ_B`: conditional mean of the field at the box center
/// given the box frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseValue {
    pub bx: BoxSpec,
    pub value: f64,
}

pub fn coarse_value(field: &Field, bx: &BoxSpec) -> Result<CoarseValue, SamplerError> {
    Ok(CoarseValue { bx: *bx, value: harmonic_extension(field, bx)?.coarse })
}

/// Resamples the interior of `bx` from its conditional law given the rest
/// of the field: harmonic extension of the frame values plus an
/// independent zero-boundary field on the box. Values outside the box
/// interior are untouched.
pub fn sample_conditional(field: &Field, bx: &BoxSpec, seed: u64) -> Result<Field, SamplerError> {
    let ext = harmonic_extension(field, bx)?;
    let (w, h) = bx.interior_dims();
    let (w, h) = (w as usize, h as usize);
    let mut rng = substream(seed, "conditional-field", &[
        field.domain().n() as u64,
        bx.anchor().x as u64,
        bx.anchor().y as u64,
        bx.width() as u64,
        bx.height() as u64,
    ]);
    let mut dst = Dst2d::new(w, h);
    let noise = spectral_interior(w, h, &mut dst, &mut rng);

    let mut out = field.clone();
    out.provenance = Provenance::Conditional;
    out.seed = seed;
    let a = bx.anchor();
    for v in 0..h {
        for u in 0..w {
            let p = Point::new(a.x + 1 + u as i64, a.y + 1 + v as i64);
            let site = field.domain().site_index(p);
            out.values[site] = ext.interior[v * w + u] + noise[v * w + u];
        }
    }
    Ok(out)
}
