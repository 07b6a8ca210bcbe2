//! Training-point distributions on intervals and rectangles.
//!
//! Five strategies are available: equidistant, random (kept in draw order),
//! random sorted, Chebyshev nodes and the sine-based grid, which spaces points
//! equally in arc length along one full sine period of amplitude `(b - a) / 2`.
//! Point order is part of the output and is never changed silently.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("interval needs finite a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: Interval, y: Interval) -> Self {
        Self { x, y }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.x.contains(p[0]) && self.y.contains(p[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Equidistant,
    Random,
    RandomSorted,
    Chebyshev,
    SineBased,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Equidistant,
        Strategy::Random,
        Strategy::RandomSorted,
        Strategy::Chebyshev,
        Strategy::SineBased,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Equidistant => "equidistant",
            Strategy::Random => "random",
            Strategy::RandomSorted => "random_sorted",
            Strategy::Chebyshev => "chebyshev",
            Strategy::SineBased => "sine_based",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Strategy::Random | Strategy::RandomSorted)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::config(format!("unknown strategy {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet1D {
    pub points: Vec<f64>,
    pub strategy: Strategy,
    pub seed: Option<u64>,
}

impl PointSet1D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet2D {
    pub points: Vec<[f64; 2]>,
    pub nx: usize,
    pub ny: usize,
    pub strategy: Strategy,
    pub seeds: Option<(u64, u64)>,
}

pub fn equidistant(iv: Interval, n: usize) -> Result<PointSet1D> {
    if n < 2 {
        return Err(Error::invalid(format!("equidistant grid needs n >= 2, got {n}")));
    }
    let step = iv.len() / (n - 1) as f64;
    let mut points: Vec<f64> = (0..n).map(|i| iv.a + i as f64 * step).collect();
    points[n - 1] = iv.b;
    Ok(PointSet1D { points, strategy: Strategy::Equidistant, seed: None })
}

/// `n` i.i.d. uniform draws on `[a, b]` in draw order.
pub fn random_uniform(iv: Interval, n: usize, seed: u64) -> Result<PointSet1D> {
    if n < 1 {
        return Err(Error::invalid("random grid needs n >= 1"));
    }
    let mut rng = rng::rng_from_seed(seed);
    let points = (0..n).map(|_| iv.a + iv.len() * rng.gen::<f64>()).collect();
    Ok(PointSet1D { points, strategy: Strategy::Random, seed: Some(seed) })
}

pub fn random_sorted(iv: Interval, n: usize, seed: u64) -> Result<PointSet1D> {
    let mut set = random_uniform(iv, n, seed)?;
    set.points.sort_by(f64::total_cmp);
    set.strategy = Strategy::RandomSorted;
    Ok(set)
}

/// Chebyshev nodes `(a+b)/2 + (b-a)/2 cos((2i+1) pi / 2n)` in index order,
/// which is decreasing in `t`.
pub fn chebyshev(iv: Interval, n: usize) -> Result<PointSet1D> {
    if n < 1 {
        return Err(Error::invalid("chebyshev grid needs n >= 1"));
    }
    let mid = 0.5 * (iv.a + iv.b);
    let half = 0.5 * (iv.b - iv.a);
    let points = (0..n)
        .map(|i| mid + half * ((2 * i + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    Ok(PointSet1D { points, strategy: Strategy::Chebyshev, seed: None })
}

const ARC_TOL: f64 = 1e-12;

/// Arc-length density of the unit sine wave `u -> sin(2 pi u) / 2` on `[0, 1]`.
fn unit_arc_density(u: f64) -> f64 {
    let c = (2.0 * PI * u).cos();
    (1.0 + PI * PI * c * c).sqrt()
}

/// Cumulative arc length of the unit wave from 0 to `u`.
fn unit_arc(u: f64) -> f64 {
    quadrature::integrate(unit_arc_density, 0.0, u, ARC_TOL)
}

/// Arc length of one full sine period with amplitude `(b - a) / 2` over `[a, b]`.
///
/// The wave and the interval scale together, so this is `(b - a)` times the
/// unit-interval length.
pub fn arc_length_sine(iv: Interval) -> f64 {
    iv.len() * unit_arc(1.0)
}

/// Solves `unit_arc(u) = target` on `[0, 1]` by Newton steps safeguarded with
/// bisection.
fn invert_unit_arc(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // the density averages ~2.3, so a linear guess is close
    let mut u = target / unit_arc(1.0);
    for _ in 0..200 {
        let r = unit_arc(u) - target;
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let mut next = u - r / unit_arc_density(u);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - u).abs();
        u = next;
        if step < 1e-13 || hi - lo < 1e-13 {
            break;
        }
    }
    u
}

/// Points equally spaced in arc length: `Lambda(t_i) = i / (n - 1) * L_arc`.
pub fn sine_based(iv: Interval, n: usize) -> Result<PointSet1D> {
    if n < 2 {
        return Err(Error::invalid(format!("sine-based grid needs n >= 2, got {n}")));
    }
    let total = unit_arc(1.0);
    let mut points = Vec::with_capacity(n);
    points.push(iv.a);
    for i in 1..n - 1 {
        let u = invert_unit_arc(i as f64 / (n - 1) as f64 * total);
        points.push(iv.a + iv.len() * u);
    }
    points.push(iv.b);
    Ok(PointSet1D { points, strategy: Strategy::SineBased, seed: None })
}

/// Cumulative arc length `Lambda(t)` from `a` for the wave over `iv`.
pub fn cumulative_arc(iv: Interval, t: f64) -> f64 {
    iv.len() * unit_arc((t - iv.a) / iv.len())
}

/// One-dimensional dispatch. `seed` is required for random strategies and
/// ignored otherwise.
pub fn sample_1d(strategy: Strategy, iv: Interval, n: usize, seed: u64) -> Result<PointSet1D> {
    match strategy {
        Strategy::Equidistant => equidistant(iv, n),
        Strategy::Random => random_uniform(iv, n, seed),
        Strategy::RandomSorted => random_sorted(iv, n, seed),
        Strategy::Chebyshev => chebyshev(iv, n),
        Strategy::SineBased => sine_based(iv, n),
    }
}

/// Row-major Cartesian product: `x` varies slowest.
pub fn tensor_grid(xs: &PointSet1D, ys: &PointSet1D) -> Result<PointSet2D> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("tensor grid needs nonempty axes"));
    }
    let points = xs
        .points
        .iter()
        .flat_map(|&x| ys.points.iter().map(move |&y| [x, y]))
        .collect();
    let seeds = match (xs.seed, ys.seed) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    Ok(PointSet2D { points, nx: xs.len(), ny: ys.len(), strategy: xs.strategy, seeds })
}

/// Interior grid on `rect`: each axis sampled independently (sub-seeded
/// `points-x` / `points-y` from `seed`), then tensored.
pub fn sample_rect(strategy: Strategy, rect: Rect, nx: usize, ny: usize, seed: u64) -> Result<PointSet2D> {
    let xs = sample_1d(strategy, rect.x, nx, rng::derive_seed(seed, rng::POINTS_X))?;
    let ys = sample_1d(strategy, rect.y, ny, rng::derive_seed(seed, rng::POINTS_Y))?;
    tensor_grid(&xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    Bottom,
    Top,
    Left,
    Right,
}

impl Edge {
    pub const ORDER: [Edge; 4] = [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub p: [f64; 2],
    pub edge: Edge,
}

/// Applies the 1D strategy along each edge in the order bottom, top, left,
/// right. Random edges use sub-seeds `boundary-e0..e3`.
pub fn boundary_points(rect: Rect, n_per_edge: usize, strategy: Strategy, seed: u64) -> Result<Vec<BoundaryPoint>> {
    let mut out = Vec::with_capacity(4 * n_per_edge);
    for (k, edge) in Edge::ORDER.into_iter().enumerate() {
        let edge_seed = rng::derive_seed(seed, &rng::boundary_tag(k));
        let (iv, fixed) = match edge {
            Edge::Bottom => (rect.x, rect.y.a),
            Edge::Top => (rect.x, rect.y.b),
            Edge::Left => (rect.y, rect.x.a),
            Edge::Right => (rect.y, rect.x.b),
        };
        let along = sample_1d(strategy, iv, n_per_edge, edge_seed)?;
        out.extend(along.points.iter().map(|&s| {
            let p = match edge {
                Edge::Bottom | Edge::Top => [s, fixed],
                Edge::Left | Edge::Right => [fixed, s],
            };
            BoundaryPoint { p, edge }
        }));
    }
    Ok(out)
}
