//! Direct solver for the interior random-walk operator on a rectangle.
//!
//! The operator is `A = I − P` acting on functions over the interior of an
//! `(m1+2) × (m2+2)` rectangle, where `P` averages the four neighbors and
//! everything outside the interior is zero (Dirichlet condition). `A` is
//! symmetric positive definite with bandwidth `m1` in row-major ordering,
//! so one banded Cholesky factorization serves every right-hand side.
//!
//! `A⁻¹` is exactly the Green's function of the walk killed on the
//! rectangle frame, and `A` itself is the precision matrix of the free
//! field restricted to the interior.

/// Banded Cholesky factorization of `I − P` on an `m1 × m2` interior grid.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    m1: usize,
    m2: usize,
    bw: usize,
    n: usize,
    /// Lower band by columns: `band[j*(bw+1) + k] = L[j+k][j]`.
    band: Vec<f64>,
}

impl DirichletSolver {
    pub fn new(m1: usize, m2: usize) -> Self {
        assert!(m1 >= 1 && m2 >= 1, "interior must be nonempty");
        let n = m1 * m2;
        DirichletSolver { m1, m2, bw: 0, n, band: Vec::new() }.factor()
    }

    fn factor(mut self) -> Self {
        let (m1, n) = (self.m1, self.n);
        let bw = if n == 1 { 0 } else { m1 };
        self.bw = bw;
        let w = bw + 1;
        let mut band = vec![0.0f64; n * w];
        // Fill the lower band of A: unit diagonal, −1/4 to the left
        // neighbor (same row) and to the neighbor one grid row down.
        for j in 0..n {
            band[j * w] = 1.0;
            let u = j % m1;
            if u + 1 < m1 && j + 1 < n {
                band[j * w + 1] = -0.25;
            }
            if bw >= m1 && j + m1 < n {
                band[j * w + bw] = -0.25;
            }
        }
        // In-place banded Cholesky (left-looking).
        for j in 0..n {
            let start = j.saturating_sub(bw);
            for m in start..j {
                let ljm = band[m * w + (j - m)];
                if ljm == 0.0 {
                    continue;
                }
                let top = (m + bw).min(n - 1);
                for i in j..=top {
                    band[j * w + (i - j)] -= band[m * w + (i - m)] * ljm;
                }
            }
            let d = band[j * w];
            assert!(d > 0.0, "interior walk operator lost positive definiteness");
            let d = d.sqrt();
            band[j * w] = d;
            let top = (j + bw).min(n - 1);
            for i in j + 1..=top {
                band[j * w + (i - j)] /= d;
            }
        }
        self.band = band;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (w, bw, n) = (self.bw + 1, self.bw, self.n);
        // forward: L y = b
        for i in 0..n {
            let start = i.saturating_sub(bw);
            let mut s = b[i];
            for m in start..i {
                s -= self.band[m * w + (i - m)] * b[m];
            }
            b[i] = s / self.band[i * w];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let top = (i + bw).min(n - 1);
            let mut s = b[i];
            for m in i + 1..=top {
                s -= self.band[i * w + (m - i)] * b[m];
            }
            b[i] = s / self.band[i * w];
        }
    }

    /// Solves `A x = e_j` but only computes `x[j..]`, which is all a
    /// symmetric inverse needs. Entries of `x` below `j` are left as-is.
    pub fn solve_unit_tail(&self, j: usize, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let (w, bw, n) = (self.bw + 1, self.bw, self.n);
        // forward from j: y_i = 0 for i < j
        x[j] = 1.0 / self.band[j * w];
        for i in j + 1..n {
            let start = i.saturating_sub(bw).max(j);
            let mut s = 0.0;
            for m in start..i {
                s -= self.band[m * w + (i - m)] * x[m];
            }
            x[i] = s / self.band[i * w];
        }
        // backward, stopping at row j
        for i in (j..n).rev() {
            let top = (i + bw).min(n - 1);
            let mut s = x[i];
            for m in i + 1..=top {
                s -= self.band[i * w + (m - i)] * x[m];
            }
            x[i] = s / self.band[i * w];
        }
    }

    /// Applies the operator: `out = (I − P) x`. Matrix-free.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        let (m1, m2) = (self.m1, self.m2);
        for v in 0..m2 {
            for u in 0..m1 {
                let r = v * m1 + u;
                let mut s = x[r];
                if u > 0 {
                    s -= 0.25 * x[r - 1];
                }
                if u + 1 < m1 {
                    s -= 0.25 * x[r + 1];
                }
                if v > 0 {
                    s -= 0.25 * x[r - m1];
                }
                if v + 1 < m2 {
                    s -= 0.25 * x[r + m1];
                }
                out[r] = s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(solver: &DirichletSolver, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        solver.apply(x, &mut ax);
        let num: f64 = ax.iter().zip(b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|b| b * b).sum::<f64>().sqrt();
        num / den
    }

    #[test]
    fn single_site() {
        let s = DirichletSolver::new(1, 1);
        let mut b = vec![3.0];
        s.solve_in_place(&mut b);
        assert_eq!(b, vec![3.0]);
    }

    #[test]
    fn solve_matches_dense_lu() {
        for (m1, m2) in [(2, 2), (3, 5), (7, 4), (6, 6)] {
            let n = m1 * m2;
            let s = DirichletSolver::new(m1, m2);
            // dense A assembled independently
            let a = nalgebra::DMatrix::<f64>::from_fn(n, n, |r, c| {
                if r == c {
                    1.0
                } else {
                    let (ru, rv) = (r % m1, r / m1);
                    let (cu, cv) = (c % m1, c / m1);
                    let adj = (ru as i64 - cu as i64).abs() + (rv as i64 - cv as i64).abs() == 1;
                    if adj {
                        -0.25
                    } else {
                        0.0
                    }
                }
            });
            let b_vec: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
            let dense = a
                .clone()
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&b_vec))
                .unwrap();
            let mut x = b_vec.clone();
            s.solve_in_place(&mut x);
            for i in 0..n {
                assert!((x[i] - dense[i]).abs() < 1e-12, "({m1},{m2}) entry {i}");
            }
            assert!(residual(&s, &x, &b_vec) < 1e-13);
        }
    }

    #[test]
    fn unit_tail_agrees_with_full_solve() {
        let (m1, m2) = (5, 4);
        let n = m1 * m2;
        let s = DirichletSolver::new(m1, m2);
        for j in [0, 3, 7, n - 1] {
            let mut full = vec![0.0; n];
            full[j] = 1.0;
            s.solve_in_place(&mut full);
            let mut tail = vec![f64::NAN; n];
            s.solve_unit_tail(j, &mut tail);
            for i in j..n {
                assert!((tail[i] - full[i]).abs() < 1e-14);
            }
        }
    }
}
