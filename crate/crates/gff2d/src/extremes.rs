//! Extreme-level statistics: level sets over the inner region, counts in
//! disks, close-pair counts, maximal uniform squares, and log-log slope
//! fits against predicted exponents.

use crate::lattice::Point;
use crate::sampler::Field;
use crate::stream::substream;
use crate::theory;
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExtremesError {
    #[error("need at least 3 sizes with positive statistics, got {0} usable")]
    InsufficientSizes(usize),
    #[error("sizes must be strictly increasing")]
    UnsortedSizes,
    #[error("no accepted samples within the budget of {0} trials")]
    NoAcceptedSamples(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Above,
    Below,
}

/// Sites of the inner region on one side of a level.
#[derive(Debug, Clone)]
pub struct HighSet {
    pub level: f64,
    pub direction: Direction,
    points: Vec<Point>,
    n: i64,
}

impl HighSet {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> i64 {
        self.n
    }
}

/// Inner-region sites with `Φ ≥ level` (or `≤` for [`Direction::Below`]),
/// in row-major order.
pub fn level_set(field: &Field, level: f64, direction: Direction) -> HighSet {
    let points = field
        .domain()
        .inner_sites()
        .filter(|&p| match direction {
            Direction::Above => field.value(p) >= level,
            Direction::Below => field.value(p) <= level,
        })
        .collect();
    HighSet { level, direction, points, n: field.domain().n() }
}

/// The η-high points: `Φ ≥ 2√g·η·log N` over the inner region.
pub fn high_set(field: &Field, eta: f64) -> HighSet {
    level_set(field, theory::high_level(eta, field.domain().n()), Direction::Above)
}

/// Number of set points within Euclidean distance `N^beta` of `x`.
pub fn count_in_disk(hs: &HighSet, x: Point, beta: f64) -> usize {
    assert!(beta > 0.0 && beta < 1.0);
    let rho = (hs.n as f64).powf(beta);
    let rho2 = rho * rho;
    hs.points.iter().filter(|p| (p.dist2(x) as f64) <= rho2).count()
}

/// Per-pair record of the rejection-conditioned disk counts.
#[derive(Debug, Clone)]
pub struct ConditionalDiskCounts {
    /// `(replica, center, count)` for each accepted pair.
    pub accepted: Vec<(usize, Point, usize)>,
    pub tried: u64,
    pub budget: u64,
}

/// Counts α-high points within `N^beta` of centers that are themselves
/// α-high. Conditioning is by rejection: random `(replica, center)` pairs
/// are drawn and kept when the center is high; fails when the budget is
/// exhausted with nothing accepted.
pub fn count_in_disk_given_high(
    fields: &[Field],
    alpha: f64,
    beta: f64,
    budget: u64,
    seed: u64,
) -> Result<ConditionalDiskCounts, ExtremesError> {
    assert!(!fields.is_empty());
    assert!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0);
    let domain = fields[0].domain().clone();
    let n = domain.n();
    let level = theory::high_level(alpha, n);
    let rho = (n as f64).powf(beta);
    let (lo, hi) = domain.inner_bounds();
    let mut rng = substream(seed, "disk-given-high", &[n as u64]);
    let mut accepted = Vec::new();
    for t in 0..budget {
        let r = rng.random_range(0..fields.len());
        let center = Point::new(rng.random_range(lo..=hi), rng.random_range(lo..=hi));
        if fields[r].value(center) < level {
            continue;
        }
        let f = &fields[r];
        let count = domain
            .disk(center, rho)
            .into_iter()
            .filter(|&p| domain.is_inner(p) && f.value(p) >= level)
            .count();
        accepted.push((r, center, count));
        let _ = t;
    }
    if accepted.is_empty() {
        return Err(ExtremesError::NoAcceptedSamples(budget));
    }
    Ok(ConditionalDiskCounts { accepted, tried: budget, budget })
}

/// Ordered pairs `(x, y)`, `x ≠ y`, of set points with `d(x, y) ≤ N^beta`.
/// Points are bucketed into cells of side `⌈N^beta⌉` and only the 3×3
/// neighborhood of each point's cell is scanned.
pub fn pair_count(hs: &HighSet, beta: f64) -> u64 {
    assert!(beta > 0.0 && beta < 1.0);
    let rho = (hs.n as f64).powf(beta);
    pair_count_within(hs.points(), rho)
}

/// Cell-scan pair count at an explicit radius.
pub fn pair_count_within(points: &[Point], rho: f64) -> u64 {
    if points.len() < 2 || rho < 0.0 {
        return 0;
    }
    let rho2 = rho * rho;
    let cell = (rho.ceil() as i64).max(1);
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        cells.entry((p.x.div_euclid(cell), p.y.div_euclid(cell))).or_default().push(i);
    }
    let mut count = 0u64;
    for (i, p) in points.iter().enumerate() {
        let (cx, cy) = (p.x.div_euclid(cell), p.y.div_euclid(cell));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = cells.get(&(cx + dx, cy + dy)) {
                    for &j in bucket {
                        if j != i && (points[j].dist2(*p) as f64) <= rho2 {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// Reference double loop for the cell scan.
pub fn pair_count_brute(points: &[Point], rho: f64) -> u64 {
    if rho < 0.0 {
        return 0;
    }
    let rho2 = rho * rho;
    let mut count = 0u64;
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && (p.dist2(*q) as f64) <= rho2 {
                count += 1;
            }
        }
    }
    count
}

/// Largest square of true cells whose center lies in the inner block.
///
/// The classic dynamic program gives, per bottom-right corner, the largest
/// all-true square ending there; the admissible side range per corner then
/// comes from requiring the square's (possibly half-integer) center to sit
/// inside the inner block. `O(N²)` total.
fn max_square(grid: &[bool], n: i64, block: (i64, i64)) -> i64 {
    let (lo, hi) = block;
    let idx = |x: i64, y: i64| ((y - 1) * n + (x - 1)) as usize;
    let mut side = vec![0i64; (n * n) as usize];
    let mut best = 0i64;
    for y in 1..=n {
        for x in 1..=n {
            if !grid[idx(x, y)] {
                continue;
            }
            let s = if x == 1 || y == 1 {
                1
            } else {
                1 + side[idx(x - 1, y)].min(side[idx(x, y - 1)]).min(side[idx(x - 1, y - 1)])
            };
            side[idx(x, y)] = s;
            // center constraint per axis: lo ≤ c − (s−1)/2 ≤ hi for the
            // bottom-right corner c, i.e. 2c − 2hi + 1 ≤ s ≤ 2c − 2lo + 1
            let s_hi = s.min(2 * x - 2 * lo + 1).min(2 * y - 2 * lo + 1);
            let s_lo = 1.max(2 * x - 2 * hi + 1).max(2 * y - 2 * hi + 1);
            if s_hi >= s_lo {
                best = best.max(s_hi);
            }
        }
    }
    best
}

fn field_grid(field: &Field, pred: impl Fn(f64) -> bool) -> Vec<bool> {
    field.values().iter().map(|&v| pred(v)).collect()
}

/// Side of the biggest square on which the field stays at or above
/// `level`, among squares centered in the inner region.
pub fn max_square_min_above(field: &Field, level: f64) -> i64 {
    let d = field.domain();
    max_square(&field_grid(field, |v| v >= level), d.n(), d.inner_bounds())
}

/// Mirror image: the field stays at or below `level`.
pub fn max_square_max_below(field: &Field, level: f64) -> i64 {
    let d = field.domain();
    max_square(&field_grid(field, |v| v <= level), d.n(), d.inner_bounds())
}

/// Exhaustive reference for [`max_square`]-style queries, for tests and
/// spot checks. Quadratic in the area times the side.
pub fn max_square_brute(grid: &[bool], n: i64, block: (i64, i64)) -> i64 {
    let (lo, hi) = block;
    let idx = |x: i64, y: i64| ((y - 1) * n + (x - 1)) as usize;
    let mut best = 0i64;
    for s in 1..=n {
        for y0 in 1..=(n - s + 1) {
            for x0 in 1..=(n - s + 1) {
                // center at x0 + (s−1)/2 per axis, half-integer allowed
                let ok_center = 2 * x0 + s - 1 >= 2 * lo
                    && 2 * x0 + s - 1 <= 2 * hi
                    && 2 * y0 + s - 1 >= 2 * lo
                    && 2 * y0 + s - 1 <= 2 * hi;
                if !ok_center {
                    continue;
                }
                let mut all = true;
                'scan: for y in y0..y0 + s {
                    for x in x0..x0 + s {
                        if !grid[idx(x, y)] {
                            all = false;
                            break 'scan;
                        }
                    }
                }
                if all {
                    best = best.max(s);
                }
            }
        }
    }
    best
}

/// Least-squares slope of `log(statistic)` against `log N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub ns: Vec<i64>,
    pub statistics: Vec<f64>,
    pub slope: f64,
    pub stderr: f64,
    pub predicted: Option<f64>,
    /// Sizes whose statistic was zero or negative, excluded from the fit.
    pub censored: Vec<i64>,
}

/// Fits the slope over at least three sizes; nonpositive statistics are
/// censored (recorded, not fitted).
pub fn exponent_fit(
    ns: &[i64],
    statistics: &[f64],
    predicted: Option<f64>,
) -> Result<ExponentEstimate, ExtremesError> {
    assert_eq!(ns.len(), statistics.len());
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExtremesError::UnsortedSizes);
    }
    if ns.len() < 3 {
        return Err(ExtremesError::InsufficientSizes(ns.len()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut censored = Vec::new();
    for (&n, &s) in ns.iter().zip(statistics) {
        if s > 0.0 {
            xs.push((n as f64).ln());
            ys.push(s.ln());
        } else {
            censored.push(n);
        }
    }
    let k = xs.len();
    if k < 2 {
        return Err(ExtremesError::InsufficientSizes(k));
    }
    let xb = xs.iter().sum::<f64>() / k as f64;
    let yb = ys.iter().sum::<f64>() / k as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xb) * (x - xb)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xb) * (y - yb)).sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let stderr = if k > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (ssr / (k - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(ExponentEstimate {
        ns: ns.to_vec(),
        statistics: statistics.to_vec(),
        slope,
        stderr,
        predicted,
        censored,
    })
}

/// Median of a sample; the mean of the two central order statistics for
/// even lengths. The estimator of choice for in-probability limits, since
/// mean and median counts can have different orders of magnitude here.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
