//! Lattice geometry: the box `V_N`, its inner region, boxes, disks,
//! tilings, and the nested multiscale hierarchy of boxes.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - Sites of `V_N` are `(x, y)` with `1 ≤ x, y ≤ N`; `x` is the column and
//!   `y` the row. Site indexing is row-major: `(y−1)·N + (x−1)`.
//! - `∂V_N` is the frame (sites with a nearest neighbor outside `V_N`);
//!   `int(V_N)` is the rest.
//! - The inner region `V_N^l` keeps the sites whose Chebyshev (L∞) distance
//!   to `∂V_N` is at least `l·N`, with `l` a rational in `(0, 1/2)` so the
//!   margin test is exact integer arithmetic. The region is always a
//!   centered square block.
//! - Disks use the Euclidean norm.

use thiserror::Error;

/// Errors from lattice constructions.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice side must be at least 3, got {0}")]
    InvalidSize(i64),
    #[error("inner margin must satisfy 0 < l < 1/2 with nonempty inner region: {0}")]
    InvalidMargin(String),
    #[error("lattice too small: {0}")]
    TooSmallLattice(String),
    #[error("box has empty interior: {0}")]
    DegenerateBox(String),
}

/// A lattice point. Coordinates may fall outside `V_N`; membership is
/// always checked against a [`GridDomain`] or [`BoxSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance.
    pub fn dist(self, other: Point) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    /// Squared Euclidean distance, exact in integers.
    pub fn dist2(self, other: Point) -> i64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// The four nearest neighbors.
    pub fn neighbors(self) -> [Point; 4] {
        [
            Point::new(self.x + 1, self.y),
            Point::new(self.x - 1, self.y),
            Point::new(self.x, self.y + 1),
            Point::new(self.x, self.y - 1),
        ]
    }
}

/// The box `V_N = {1,…,N}²` together with the inner margin `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridDomain {
    n: i64,
    l_num: u64,
    l_den: u64,
    /// Inner block bounds: `V_N^l = {x : inner_lo ≤ x_i ≤ inner_hi}`.
    inner_lo: i64,
    inner_hi: i64,
}

impl GridDomain {
    /// Builds the domain, checking `N ≥ 3`, `0 < l < 1/2`, and that the
    /// inner region is nonempty.
    pub fn new(n: i64, l_num: u64, l_den: u64) -> Result<Self, LatticeError> {
        if n < 3 {
            return Err(LatticeError::InvalidSize(n));
        }
        if l_num == 0 || l_den == 0 || 2 * l_num >= l_den {
            return Err(LatticeError::InvalidMargin(format!(
                "l = {l_num}/{l_den} is outside (0, 1/2)"
            )));
        }
        // Margin in sites: smallest m with m ≥ l·N, exactly.
        let m = ((l_num as i128 * n as i128 + l_den as i128 - 1) / l_den as i128) as i64;
        let inner_lo = 1 + m;
        let inner_hi = n - m;
        if inner_lo > inner_hi {
            return Err(LatticeError::InvalidMargin(format!(
                "inner region of V_{n} with l = {l_num}/{l_den} is empty"
            )));
        }
        Ok(GridDomain { n, l_num, l_den, inner_lo, inner_hi })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn l(&self) -> (u64, u64) {
        (self.l_num, self.l_den)
    }

    pub fn l_value(&self) -> f64 {
        self.l_num as f64 / self.l_den as f64
    }

    /// Inclusive per-axis bounds of the inner block `V_N^l`.
    pub fn inner_bounds(&self) -> (i64, i64) {
        (self.inner_lo, self.inner_hi)
    }

    /// Side length of the inner block.
    pub fn inner_width(&self) -> i64 {
        self.inner_hi - self.inner_lo + 1
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= 1 && p.x <= self.n && p.y >= 1 && p.y <= self.n
    }

    /// Frame sites: members of `V_N` with a neighbor outside.
    pub fn is_boundary(&self, p: Point) -> bool {
        self.contains(p) && (p.x == 1 || p.x == self.n || p.y == 1 || p.y == self.n)
    }

    pub fn is_interior(&self, p: Point) -> bool {
        self.contains(p) && !self.is_boundary(p)
    }

    pub fn is_inner(&self, p: Point) -> bool {
        p.x >= self.inner_lo && p.x <= self.inner_hi && p.y >= self.inner_lo && p.y <= self.inner_hi
    }

    /// Row-major index of a site of `V_N`.
    pub fn site_index(&self, p: Point) -> usize {
        debug_assert!(self.contains(p));
        ((p.y - 1) * self.n + (p.x - 1)) as usize
    }

    /// Number of interior sites, `(N−2)²`.
    pub fn interior_len(&self) -> usize {
        ((self.n - 2) * (self.n - 2)) as usize
    }

    /// Row-major index among interior sites.
    pub fn interior_index(&self, p: Point) -> usize {
        debug_assert!(self.is_interior(p));
        ((p.y - 2) * (self.n - 2) + (p.x - 2)) as usize
    }

    /// Inverse of [`interior_index`](Self::interior_index).
    pub fn interior_point(&self, idx: usize) -> Point {
        let m = (self.n - 2) as usize;
        Point::new((idx % m) as i64 + 2, (idx / m) as i64 + 2)
    }

    pub fn sites(&self) -> impl Iterator<Item = Point> + '_ {
        (1..=self.n).flat_map(move |y| (1..=self.n).map(move |x| Point::new(x, y)))
    }

    pub fn interior_sites(&self) -> impl Iterator<Item = Point> + '_ {
        (2..self.n).flat_map(move |y| (2..self.n).map(move |x| Point::new(x, y)))
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = Point> + '_ {
        self.sites().filter(move |&p| self.is_boundary(p))
    }

    /// Sites of the inner region `V_N^l`, row-major.
    pub fn inner_sites(&self) -> impl Iterator<Item = Point> + '_ {
        (self.inner_lo..=self.inner_hi)
            .flat_map(move |y| (self.inner_lo..=self.inner_hi).map(move |x| Point::new(x, y)))
    }

    pub fn inner_len(&self) -> usize {
        (self.inner_width() * self.inner_width()) as usize
    }

    /// The disk `D(x, ρ) = {y ∈ V_N : |y − x| ≤ ρ}`, Euclidean norm.
    pub fn disk(&self, center: Point, rho: f64) -> Vec<Point> {
        if rho < 0.0 {
            return Vec::new();
        }
        let r = rho.floor() as i64;
        let rho2 = rho * rho;
        let mut out = Vec::new();
        for y in (center.y - r).max(1)..=(center.y + r).min(self.n) {
            for x in (center.x - r).max(1)..=(center.x + r).min(self.n) {
                let p = Point::new(x, y);
                if p.dist2(center) as f64 <= rho2 {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// An axis-aligned box of sites, usually square. Tiles shrunk to fit the
/// inner region may be rectangular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSpec {
    anchor: Point,
    width: i64,
    height: i64,
}

impl BoxSpec {
    pub fn new(anchor: Point, width: i64, height: i64) -> Self {
        assert!(width >= 1 && height >= 1, "box sides must be positive");
        BoxSpec { anchor, width, height }
    }

    /// Square box of side `side` whose center site is `center`. For even
    /// sides the center is the lower-left of the two central candidates.
    pub fn square_centered(center: Point, side: i64) -> Self {
        assert!(side >= 1, "box side must be positive");
        let off = (side - 1) / 2;
        BoxSpec::new(Point::new(center.x - off, center.y - off), side, side)
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    /// Side length; equals the width (boxes from tilings are square except
    /// possibly at the high-index edge).
    pub fn side(&self) -> i64 {
        self.width
    }

    /// The center site `x_B`: lower-left of the central sites when a side
    /// is even.
    pub fn center(&self) -> Point {
        Point::new(self.anchor.x + (self.width - 1) / 2, self.anchor.y + (self.height - 1) / 2)
    }

    pub fn max_corner(&self) -> Point {
        Point::new(self.anchor.x + self.width - 1, self.anchor.y + self.height - 1)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.anchor.x
            && p.x < self.anchor.x + self.width
            && p.y >= self.anchor.y
            && p.y < self.anchor.y + self.height
    }

    pub fn contains_box(&self, other: &BoxSpec) -> bool {
        self.contains(other.anchor) && self.contains(other.max_corner())
    }

    pub fn len(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sites(&self) -> impl Iterator<Item = Point> + '_ {
        (self.anchor.y..self.anchor.y + self.height)
            .flat_map(move |y| (self.anchor.x..self.anchor.x + self.width).map(move |x| Point::new(x, y)))
    }

    /// Frame of the box: sites of the box with a neighbor outside it.
    pub fn is_box_boundary(&self, p: Point) -> bool {
        self.contains(p)
            && (p.x == self.anchor.x
                || p.x == self.anchor.x + self.width - 1
                || p.y == self.anchor.y
                || p.y == self.anchor.y + self.height - 1)
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = Point> + '_ {
        self.sites().filter(move |&p| self.is_box_boundary(p))
    }

    pub fn interior_sites(&self) -> impl Iterator<Item = Point> + '_ {
        self.sites().filter(move |&p| !self.is_box_boundary(p))
    }

    /// Interior dimensions (width − 2, height − 2), clamped at zero.
    pub fn interior_dims(&self) -> (i64, i64) {
        ((self.width - 2).max(0), (self.height - 2).max(0))
    }

    /// Concentric box with half the side lengths (at least 1).
    pub fn concentric_half(&self) -> BoxSpec {
        let hw = (self.width / 2).max(1);
        let hh = (self.height / 2).max(1);
        BoxSpec::new(
            Point::new(self.anchor.x + (self.width - hw) / 2, self.anchor.y + (self.height - hh) / 2),
            hw,
            hh,
        )
    }
}

/// Rounds a target side length to the nearest even integer ≥ 2.
pub fn even_side(target: f64) -> i64 {
    let half = (target / 2.0).round() as i64;
    (2 * half).max(2)
}

/// Regular grid of tiles covering the inner block: full tiles of side `b`
/// anchored at the low corner, with the last row/column shrunk to fit.
#[derive(Debug, Clone)]
struct TileGrid {
    lo: i64,
    hi: i64,
    side: i64,
    per_axis: i64,
}

impl TileGrid {
    fn new(domain: &GridDomain, side: i64) -> Self {
        let (lo, hi) = domain.inner_bounds();
        let width = hi - lo + 1;
        let per_axis = (width + side - 1) / side;
        TileGrid { lo, hi, side, per_axis }
    }

    fn tile(&self, i: i64, j: i64) -> BoxSpec {
        debug_assert!(i >= 0 && i < self.per_axis && j >= 0 && j < self.per_axis);
        let x0 = self.lo + i * self.side;
        let y0 = self.lo + j * self.side;
        let w = (self.side).min(self.hi - x0 + 1);
        let h = (self.side).min(self.hi - y0 + 1);
        BoxSpec::new(Point::new(x0, y0), w, h)
    }

    fn tiles(&self) -> Vec<BoxSpec> {
        let mut out = Vec::with_capacity((self.per_axis * self.per_axis) as usize);
        for j in 0..self.per_axis {
            for i in 0..self.per_axis {
                out.push(self.tile(i, j));
            }
        }
        out
    }

    /// Tiles fully contained in `rect`.
    fn tiles_within(&self, rect: &BoxSpec) -> Vec<BoxSpec> {
        let lo_idx = |c: i64| -> i64 {
            // first tile index whose low edge is ≥ c
            let d = c - self.lo;
            if d <= 0 {
                0
            } else {
                (d + self.side - 1) / self.side
            }
        };
        let i0 = lo_idx(rect.anchor.x);
        let j0 = lo_idx(rect.anchor.y);
        let mut out = Vec::new();
        let mut j = j0;
        while j < self.per_axis {
            let probe = self.tile(i0.min(self.per_axis - 1), j);
            if probe.anchor.y + probe.height - 1 > rect.max_corner().y {
                break;
            }
            let mut i = i0;
            while i < self.per_axis {
                let t = self.tile(i, j);
                if t.max_corner().x > rect.max_corner().x {
                    break;
                }
                debug_assert!(rect.contains_box(&t));
                out.push(t);
                i += 1;
            }
            j += 1;
        }
        out
    }
}

/// A tiling of the inner region by boxes of side ≈ `N^α`.
#[derive(Debug, Clone)]
pub struct BoxPartition {
    alpha: f64,
    nominal_side: i64,
    boxes: Vec<BoxSpec>,
}

impl BoxPartition {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The even side the tiling aims for (1 for the singleton partition).
    pub fn nominal_side(&self) -> i64 {
        self.nominal_side
    }

    pub fn boxes(&self) -> &[BoxSpec] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

/// Tiles `V_N^l` by adjacent boxes of side ≈ `N^alpha`; `alpha = 0` yields
/// the singleton partition. Leftover space shrinks the high-index edge.
pub fn partition(domain: &GridDomain, alpha: f64) -> BoxPartition {
    assert!((0.0..1.0).contains(&alpha), "tiling exponent must be in [0, 1)");
    let side = if alpha == 0.0 { 1 } else { even_side((domain.n() as f64).powf(alpha)) };
    let grid = TileGrid::new(domain, side);
    BoxPartition { alpha, nominal_side: side, boxes: grid.tiles() }
}

/// One level of the multiscale hierarchy: boxes at scale `N^exponent`,
/// each recording the index of its parent one level up.
#[derive(Debug, Clone)]
pub struct HierarchyLevel {
    pub exponent: f64,
    pub boxes: Vec<BoxSpec>,
    /// Parent indices into the previous level; empty at the first level.
    pub parents: Vec<usize>,
}

/// Nested box collections at geometrically decreasing scales
/// `α_i = α·(K−i+1)/K`, `i = 1..K+1`. The first level is the plain tiling
/// at exponent `α`; each subsequent level keeps the tiles of the next
/// finer tiling that fit inside the concentric half-side square of a
/// parent. The last level has exponent 0 (single sites).
#[derive(Debug, Clone)]
pub struct MultiscaleHierarchy {
    alpha: f64,
    k: u32,
    levels: Vec<HierarchyLevel>,
}

impl MultiscaleHierarchy {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn levels(&self) -> &[HierarchyLevel] {
        &self.levels
    }

    /// Children count per parent at `level` (1-based; level ≥ 2).
    pub fn child_counts(&self, level: usize) -> Vec<usize> {
        let lvl = &self.levels[level - 1];
        let mut counts = vec![0usize; self.levels[level - 2].boxes.len()];
        for &p in &lvl.parents {
            counts[p] += 1;
        }
        counts
    }
}

/// Builds the multiscale hierarchy. Fails when some level's boxes would be
/// smaller than 2 sites across.
pub fn build_hierarchy(
    domain: &GridDomain,
    alpha: f64,
    k: u32,
) -> Result<MultiscaleHierarchy, LatticeError> {
    assert!(alpha > 0.5 && alpha < 1.0, "hierarchy exponent must be in (1/2, 1)");
    assert!(k >= 2, "hierarchy depth must be at least 2");
    let n = domain.n() as f64;
    let exponents: Vec<f64> = (1..=k + 1).map(|i| alpha * (k + 1 - i) as f64 / k as f64).collect();
    for &e in &exponents[..k as usize] {
        if n.powf(e) < 2.0 {
            return Err(LatticeError::TooSmallLattice(format!(
                "boxes at scale N^{e:.4} = {:.3} are narrower than 2 sites",
                n.powf(e)
            )));
        }
    }

    let top = partition(domain, exponents[0]);
    let mut levels = vec![HierarchyLevel {
        exponent: exponents[0],
        boxes: top.boxes().to_vec(),
        parents: Vec::new(),
    }];

    for (i, &expo) in exponents.iter().enumerate().skip(1) {
        let side = if i == k as usize { 1 } else { even_side(n.powf(expo)) };
        let grid = TileGrid::new(domain, side);
        let mut boxes = Vec::new();
        let mut parents = Vec::new();
        for (pi, parent) in levels[i - 1].boxes.iter().enumerate() {
            let half = parent.concentric_half();
            for child in grid.tiles_within(&half) {
                boxes.push(child);
                parents.push(pi);
            }
        }
        levels.push(HierarchyLevel { exponent: expo, boxes, parents });
    }

    Ok(MultiscaleHierarchy { alpha, k, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute-force inner region: sites whose L∞ distance to the frame is
    /// at least l·N.
    fn inner_oracle(n: i64, l_num: u64, l_den: u64) -> Vec<Point> {
        let mut out = Vec::new();
        for y in 1..=n {
            for x in 1..=n {
                let d = (x - 1).min(y - 1).min(n - x).min(n - y);
                if (d as i128) * l_den as i128 >= l_num as i128 * n as i128 {
                    out.push(Point::new(x, y));
                }
            }
        }
        out
    }

    #[test]
    fn tiny_domain_single_inner_site() {
        let d = GridDomain::new(3, 3, 10).unwrap();
        let inner: Vec<Point> = d.inner_sites().collect();
        assert_eq!(inner, vec![Point::new(2, 2)]);
        assert_eq!(inner, inner_oracle(3, 3, 10));
    }

    #[test]
    fn inner_region_matches_brute_force() {
        // Frozen from the oracle: N=8, l=1/4 keeps the 4×4 block {3..6}².
        let d = GridDomain::new(8, 1, 4).unwrap();
        let inner: Vec<Point> = d.inner_sites().collect();
        let oracle = inner_oracle(8, 1, 4);
        assert_eq!(inner.len(), 16);
        assert_eq!(inner, oracle);
        assert_eq!(d.inner_bounds(), (3, 6));

        for n in [5, 9, 17, 33] {
            for (num, den) in [(1, 4), (3, 10), (2, 5)] {
                let d = GridDomain::new(n, num, den).unwrap();
                let got: Vec<Point> = d.inner_sites().collect();
                assert_eq!(got, inner_oracle(n, num, den), "N={n} l={num}/{den}");
            }
        }
    }

    #[test]
    fn margin_out_of_range_rejected() {
        assert!(matches!(GridDomain::new(3, 6, 10), Err(LatticeError::InvalidMargin(_))));
        assert!(matches!(GridDomain::new(3, 5, 10), Err(LatticeError::InvalidMargin(_))));
        assert!(matches!(GridDomain::new(3, 0, 10), Err(LatticeError::InvalidMargin(_))));
        assert!(matches!(GridDomain::new(2, 1, 4), Err(LatticeError::InvalidSize(2))));
        // 0 < l < 1/2 but the margin swallows the whole box.
        assert!(matches!(GridDomain::new(4, 49, 100), Err(LatticeError::InvalidMargin(_))));
    }

    #[test]
    fn boundary_interior_partition_v_n() {
        let d = GridDomain::new(7, 1, 4).unwrap();
        let boundary: HashSet<Point> = d.boundary_sites().collect();
        let interior: HashSet<Point> = d.interior_sites().collect();
        assert_eq!(boundary.len() + interior.len(), 49);
        assert!(boundary.is_disjoint(&interior));
        assert_eq!(boundary.len(), 24);
        for p in d.interior_sites() {
            assert!(p.neighbors().iter().all(|q| d.contains(*q)));
        }
    }

    #[test]
    fn site_indexing_row_major_and_stable() {
        let d = GridDomain::new(5, 1, 5).unwrap();
        let idx: Vec<usize> = d.sites().map(|p| d.site_index(p)).collect();
        assert_eq!(idx, (0..25).collect::<Vec<_>>());
        for (k, p) in d.interior_sites().enumerate() {
            assert_eq!(d.interior_index(p), k);
            assert_eq!(d.interior_point(k), p);
        }
    }

    #[test]
    fn disk_zero_radius_is_center() {
        let d = GridDomain::new(9, 1, 4).unwrap();
        assert_eq!(d.disk(Point::new(5, 5), 0.0), vec![Point::new(5, 5)]);
    }

    #[test]
    fn disk_unit_radius_is_plus_shape() {
        let d = GridDomain::new(9, 1, 4).unwrap();
        let got: HashSet<Point> = d.disk(Point::new(5, 5), 1.0).into_iter().collect();
        let want: HashSet<Point> = [(5, 5), (4, 5), (6, 5), (5, 4), (5, 6)]
            .into_iter()
            .map(|(x, y)| Point::new(x, y))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn disk_count_matches_brute_force() {
        let d = GridDomain::new(16, 1, 4).unwrap();
        let c = Point::new(8, 8);
        let got = d.disk(c, 2.5);
        let brute: Vec<Point> =
            d.sites().filter(|p| (p.dist2(c) as f64).sqrt() <= 2.5).collect();
        assert_eq!(got.len(), 21);
        assert_eq!(got.len(), brute.len());
        assert_eq!(got.iter().collect::<HashSet<_>>(), brute.iter().collect::<HashSet<_>>());
    }

    #[test]
    fn disk_clips_to_domain() {
        let d = GridDomain::new(9, 1, 4).unwrap();
        // corner disk: (1,1), its two axis neighbors, and the diagonal at √2
        let got = d.disk(Point::new(1, 1), 1.5);
        assert!(got.iter().all(|p| d.contains(*p)));
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn singleton_partition() {
        let d = GridDomain::new(12, 1, 4).unwrap();
        let part = partition(&d, 0.0);
        assert_eq!(part.len(), d.inner_len());
        assert!(part.boxes().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn partition_n256_alpha_half() {
        let d = GridDomain::new(256, 1, 4).unwrap();
        assert_eq!(d.inner_width(), 128);
        let part = partition(&d, 0.5);
        assert_eq!(part.nominal_side(), 16);
        assert_eq!(part.len(), 64);
        assert!(part.boxes().iter().all(|b| b.width() == 16 && b.height() == 16));
    }

    #[test]
    fn partition_alpha_near_one_single_box() {
        let d = GridDomain::new(256, 1, 4).unwrap();
        let part = partition(&d, 0.999);
        assert_eq!(part.len(), 1);
        let b = part.boxes()[0];
        assert_eq!((b.width(), b.height()), (128, 128));
        assert_eq!(b.anchor(), Point::new(65, 65));
    }

    #[test]
    fn partition_tiles_inner_region_exactly() {
        for (n, alpha) in [(64, 0.5), (48, 0.55), (96, 0.7), (33, 0.4)] {
            let d = GridDomain::new(n, 1, 4).unwrap();
            let part = partition(&d, alpha);
            let mut seen: Vec<Point> = Vec::new();
            for b in part.boxes() {
                seen.extend(b.sites());
                assert!(b.sites().all(|p| d.is_inner(p)));
            }
            let mut want: Vec<Point> = d.inner_sites().collect();
            seen.sort();
            want.sort();
            assert_eq!(seen.len(), want.len(), "N={n} alpha={alpha}: tiles overlap or miss");
            assert_eq!(seen, want, "N={n} alpha={alpha}");
        }
    }

    #[test]
    fn box_center_round_trip() {
        for side in 1..9 {
            let b = BoxSpec::square_centered(Point::new(40, 40), side);
            assert_eq!(b.center(), Point::new(40, 40), "side {side}");
            assert_eq!(b.len() as i64, side * side);
        }
    }

    #[test]
    fn even_side_rounding() {
        assert_eq!(even_side(1.1), 2);
        assert_eq!(even_side(2.9), 2);
        assert_eq!(even_side(3.0), 4); // ties round up
        assert_eq!(even_side(16.0), 16);
        assert_eq!(even_side(254.6), 254);
    }

    #[test]
    fn hierarchy_level_one_is_partition() {
        let d = GridDomain::new(1024, 1, 4).unwrap();
        let h = build_hierarchy(&d, 0.75, 2).unwrap();
        let part = partition(&d, 0.75);
        assert_eq!(h.levels()[0].boxes, part.boxes().to_vec());
        assert_eq!(h.levels().len(), 3);
    }

    #[test]
    fn hierarchy_counts_and_nesting_n4096() {
        // All scales divide exactly: sides 512, 64, 8, 1 on a 2048-wide
        // inner region, so every parent gets exactly N^(2α/K)/4 = 16
        // children.
        let d = GridDomain::new(4096, 1, 4).unwrap();
        let h = build_hierarchy(&d, 0.75, 3).unwrap();
        assert_eq!(h.levels().len(), 4);
        let expos: Vec<f64> = h.levels().iter().map(|l| l.exponent).collect();
        assert!((expos[0] - 0.75).abs() < 1e-12);
        assert!((expos[1] - 0.50).abs() < 1e-12);
        assert!((expos[2] - 0.25).abs() < 1e-12);
        assert!(expos[3].abs() < 1e-12);

        for level in 2..=4 {
            let counts = h.child_counts(level);
            assert!(
                counts.iter().all(|&c| c == 16),
                "level {level}: counts {:?}",
                &counts[..counts.len().min(8)]
            );
        }

        // Nesting: every child sits inside its parent's concentric
        // half-side square, and inside exactly one such square overall.
        for level in 1..4 {
            let parents = &h.levels()[level - 1];
            let children = &h.levels()[level];
            for (b, &pi) in children.boxes.iter().zip(&children.parents) {
                assert!(parents.boxes[pi].concentric_half().contains_box(b));
                let owners = parents
                    .boxes
                    .iter()
                    .filter(|p| p.concentric_half().contains_box(b))
                    .count();
                assert_eq!(owners, 1);
            }
        }
    }

    #[test]
    fn hierarchy_rejects_too_small_lattice() {
        let d = GridDomain::new(16, 1, 4).unwrap();
        assert!(matches!(
            build_hierarchy(&d, 0.9, 8),
            Err(LatticeError::TooSmallLattice(_))
        ));
    }
}
