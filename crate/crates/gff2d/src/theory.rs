//! Closed-form predictions for every exponent the experiments measure.
//!
//! All formulas use the natural logarithm and the constant `g = 2/π`. The
//! pair-count exponent comes from a constrained minimization of a quadratic
//! tilt cost; monotonicity reduces it to evaluating the cost at the smaller
//! of the unconstrained minimizer and the admissibility edge, and the tests
//! confirm that reduction against grid-search and bisection oracles.

use serde::Serialize;
use thiserror::Error;

/// `g = 2/π`, the variance growth rate per `log N`.
pub const G: f64 = std::f64::consts::FRAC_2_PI;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("{name} = {value} outside required range {range}")]
    DomainError { name: &'static str, value: f64, range: &'static str },
    #[error("algebraic identity violated: {0}")]
    IdentityViolation(String),
}

fn check(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<(), TheoryError> {
    if !(value > lo && value < hi) {
        return Err(TheoryError::DomainError { name, value, range });
    }
    Ok(())
}

/// Threshold `2√g · η · log N` defining η-high points.
pub fn high_level(eta: f64, n: i64) -> f64 {
    2.0 * G.sqrt() * eta * (n as f64).ln()
}

/// Threshold `2√g · (1−η) · log N` defining the low set of the wall-
/// conditioned field.
pub fn low_level(eta: f64, n: i64) -> f64 {
    2.0 * G.sqrt() * (1.0 - eta) * (n as f64).ln()
}

/// Quadratic tilt cost `γ²(1−β) + h(1 − γ(1−β))²/β`.
pub fn tilt_cost(h: f64, beta: f64, gamma: f64) -> Result<f64, TheoryError> {
    check("beta", beta, 0.0, 1.0, "(0, 1)")?;
    if gamma < 0.0 {
        return Err(TheoryError::DomainError { name: "gamma", value: gamma, range: "[0, ∞)" });
    }
    if h < 0.0 {
        return Err(TheoryError::DomainError { name: "h", value: h, range: "[0, ∞)" });
    }
    let a = 1.0 - gamma * (1.0 - beta);
    Ok(gamma * gamma * (1.0 - beta) + h * a * a / beta)
}

/// Unconstrained minimizer `2/(2−β)` of the `h = 2` tilt cost; the cost at
/// the minimizer equals the minimizer itself.
pub fn optimal_tilt(beta: f64) -> Result<f64, TheoryError> {
    check("beta", beta, 0.0, 1.0, "(0, 1)")?;
    Ok(2.0 / (2.0 - beta))
}

/// Largest admissible tilt `1/α`: the edge of
/// `{γ ≥ 0 : 2 − 2β − 2α²γ²(1−β) ≥ 0}`, which is independent of β.
pub fn max_admissible_tilt(alpha: f64) -> Result<f64, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    Ok(1.0 / alpha)
}

/// Pair-count exponent `2 + 2β − 2α²·cost(min(γ*, γ₊))`.
pub fn pair_exponent(alpha: f64, beta: f64) -> Result<f64, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    let gamma = optimal_tilt(beta)?.min(max_admissible_tilt(alpha)?);
    Ok(2.0 + 2.0 * beta - 2.0 * alpha * alpha * tilt_cost(2.0, beta, gamma)?)
}

/// Mean-pair exponent: the unconstrained version, governing the expected
/// (rather than typical) number of close pairs. Never below
/// [`pair_exponent`].
pub fn mean_pair_exponent(alpha: f64, beta: f64) -> Result<f64, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    let g_star = optimal_tilt(beta)?;
    Ok(2.0 + 2.0 * beta - 2.0 * alpha * alpha * tilt_cost(2.0, beta, g_star)?)
}

/// Count exponent `2(1−η²)` for η-high points.
pub fn high_count_exponent(eta: f64) -> Result<f64, TheoryError> {
    check("eta", eta, 0.0, 1.0, "(0, 1)")?;
    Ok(2.0 * (1.0 - eta * eta))
}

/// Count exponent `2(1−η²)` for the low set of the conditioned field.
pub fn low_count_exponent(eta: f64) -> Result<f64, TheoryError> {
    high_count_exponent(eta)
}

/// Exponent `2β(1 − (α/β)²)` for α-high points in a disk of radius `N^β`
/// around an arbitrary center; requires `α < β`.
pub fn disk_count_exponent(alpha: f64, beta: f64) -> Result<f64, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    check("beta", beta, 0.0, 1.0, "(0, 1)")?;
    if alpha >= beta {
        return Err(TheoryError::DomainError {
            name: "alpha",
            value: alpha,
            range: "(0, beta)",
        });
    }
    let r = alpha / beta;
    Ok(2.0 * beta * (1.0 - r * r))
}

/// Exponent `2β(1 − α²)` for α-high points in a disk of radius `N^β`
/// around a point conditioned to be α-high itself.
pub fn conditional_disk_count_exponent(alpha: f64, beta: f64) -> Result<f64, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    check("beta", beta, 0.0, 1.0, "(0, 1)")?;
    Ok(2.0 * beta * (1.0 - alpha * alpha))
}

/// Width exponent `1/2 − η/2` of the largest square kept uniformly on one
/// side of the η level; the same formula serves the free field's high
/// square and the conditioned field's downward spike.
pub fn square_width_exponent(eta: f64) -> Result<f64, TheoryError> {
    check("eta", eta, -1.0, 1.0, "(-1, 1)")?;
    Ok(0.5 - eta / 2.0)
}

/// Coefficients of the tilted pair combination `a(Φ_x + Φ_y) + bΦ_B` and
/// the coefficient of `g log N` bounding its variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairVarianceCoefficients {
    pub a: f64,
    pub b: f64,
    pub variance_coeff: f64,
}

/// Computes `a = 1 − γ(1−β)`, `b = γ(2−β) − 2`, and the variance
/// coefficient `β(2a + b − ab)`, verifying two algebraic identities that
/// tie them back to the tilt cost. `alpha` only fixes the regime and is
/// range-checked.
pub fn pair_variance_coefficients(
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<PairVarianceCoefficients, TheoryError> {
    check("alpha", alpha, 0.0, 1.0, "(0, 1)")?;
    check("beta", beta, 0.0, 1.0, "(0, 1)")?;
    if gamma < 0.0 {
        return Err(TheoryError::DomainError { name: "gamma", value: gamma, range: "[0, ∞)" });
    }
    let a = 1.0 - gamma * (1.0 - beta);
    let b = gamma * (2.0 - beta) - 2.0;
    let coeff = beta * (2.0 * a + b - a * b);

    let f = 2.0 * a * a * (2.0 - beta) + b * b * (1.0 - beta) + 4.0 * (1.0 - beta) * a * b;
    if (f - coeff).abs() > 1e-12 * (1.0 + f.abs()) {
        return Err(TheoryError::IdentityViolation(format!(
            "quadratic form {f} != β(2a+b−ab) = {coeff}"
        )));
    }
    let cost = tilt_cost(2.0, beta, gamma)?;
    if (beta * cost - (2.0 * a + b - a * b)).abs() > 1e-12 * (1.0 + (beta * cost).abs()) {
        return Err(TheoryError::IdentityViolation(format!(
            "β·cost = {} != 2a+b−ab = {}",
            beta * cost,
            2.0 * a + b - a * b
        )));
    }
    Ok(PairVarianceCoefficients { a, b, variance_coeff: coeff })
}

/// Interval `2√g(α(1−β) ± ε) log N` where the coarse box value
/// concentrates when its center is an α-high point.
pub fn coarse_field_interval(alpha: f64, beta: f64, epsilon: f64, n: i64) -> (f64, f64) {
    assert!(n >= 3);
    assert!(epsilon >= 0.0);
    let base = 2.0 * G.sqrt() * (n as f64).ln();
    (base * (alpha * (1.0 - beta) - epsilon), base * (alpha * (1.0 - beta) + epsilon))
}

/// Parameter bundle for prediction tables and experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryParams {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub h: f64,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams { alpha: 0.5, beta: 0.5, eta: 0.5, gamma: 1.0, h: 2.0 }
    }
}

/// Every prediction at once, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionTable {
    pub high_count_exponent: f64,
    pub low_count_exponent: f64,
    pub disk_count_exponent: Option<f64>,
    pub conditional_disk_count_exponent: f64,
    pub high_square_exponent: f64,
    pub low_square_exponent: f64,
    pub pair_exponent: f64,
    pub mean_pair_exponent: f64,
}

/// Evaluates all predictions; the disk-count entry is present only when
/// `α < β`, the regime where that exponent is defined.
pub fn prediction_table(p: &TheoryParams) -> Result<PredictionTable, TheoryError> {
    Ok(PredictionTable {
        high_count_exponent: high_count_exponent(p.eta)?,
        low_count_exponent: low_count_exponent(p.eta)?,
        disk_count_exponent: if p.alpha < p.beta {
            Some(disk_count_exponent(p.alpha, p.beta)?)
        } else {
            None
        },
        conditional_disk_count_exponent: conditional_disk_count_exponent(p.alpha, p.beta)?,
        high_square_exponent: square_width_exponent(p.eta)?,
        low_square_exponent: square_width_exponent(p.eta)?,
        pair_exponent: pair_exponent(p.alpha, p.beta)?,
        mean_pair_exponent: mean_pair_exponent(p.alpha, p.beta)?,
    })
}
