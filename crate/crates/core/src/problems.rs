//! Benchmark differential equations and their composite losses.
//!
//! | problem    | equation                          | domain     | conditions            |
//! |------------|-----------------------------------|------------|-----------------------|
//! | decay      | `x' + lambda x = 0`               | `[0, 20]`  | `x(0) = x0`           |
//! | oscillator | `x'' + omega^2 x = 0`             | `[0, 10]`  | `x(0) = x0, x'(0) = v0` |
//! | laplace    | `u_xx + u_yy = 0`                 | `[-1, 1]^2`| Dirichlet             |
//! | poisson    | `u_xx + u_yy = (x^2+y^2) e^{xy}`  | `[0, 1]^2` | Dirichlet             |
//!
//! Every loss term is a plain mean of squares, weight one, summed left to
//! right in dataset order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffengine::Jet2;
use crate::error::{Error, Result};
use crate::network::ShallowNet;
use crate::sampler::{BoundaryPoint, Edge, Interval, PointSet1D, PointSet2D, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Decay,
    Oscillator,
    Laplace,
    Poisson,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] =
        [ProblemKind::Decay, ProblemKind::Oscillator, ProblemKind::Laplace, ProblemKind::Poisson];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Decay => "decay",
            ProblemKind::Oscillator => "oscillator",
            ProblemKind::Laplace => "laplace",
            ProblemKind::Poisson => "poisson",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemKind::Decay | ProblemKind::Oscillator => 1,
            ProblemKind::Laplace | ProblemKind::Poisson => 2,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown problem {s:?}")))
    }
}

/// Default decay rate. Not stated with the benchmark; `x(20) = 100 e^-5`.
pub const DEFAULT_DECAY_RATE: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProblemSpec {
    Decay { rate: f64, x0: f64, domain: Interval },
    Oscillator { omega: f64, x0: f64, v0: f64, domain: Interval },
    Laplace { domain: Rect },
    Poisson { domain: Rect },
}

impl ProblemSpec {
    pub fn decay(rate: f64, x0: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::config(format!("decay rate must be positive, got {rate}")));
        }
        Ok(ProblemSpec::Decay { rate, x0, domain: Interval::new(0.0, 20.0)? })
    }

    pub fn oscillator(omega: f64, x0: f64, v0: f64) -> Result<Self> {
        if !(omega.is_finite() && omega != 0.0) {
            return Err(Error::config(format!("angular velocity must be nonzero, got {omega}")));
        }
        Ok(ProblemSpec::Oscillator { omega, x0, v0, domain: Interval::new(0.0, 10.0)? })
    }

    pub fn laplace() -> Self {
        let sq = Interval::new(-1.0, 1.0).expect("valid");
        ProblemSpec::Laplace { domain: Rect::new(sq, sq) }
    }

    pub fn poisson() -> Self {
        let sq = Interval::new(0.0, 1.0).expect("valid");
        ProblemSpec::Poisson { domain: Rect::new(sq, sq) }
    }

    /// Benchmark with its standard parameters.
    pub fn standard(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Decay => ProblemSpec::decay(DEFAULT_DECAY_RATE, 100.0).expect("valid"),
            ProblemKind::Oscillator => ProblemSpec::oscillator(1.0, 1.0, 0.0).expect("valid"),
            ProblemKind::Laplace => ProblemSpec::laplace(),
            ProblemKind::Poisson => ProblemSpec::poisson(),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemSpec::Decay { .. } => ProblemKind::Decay,
            ProblemSpec::Oscillator { .. } => ProblemKind::Oscillator,
            ProblemSpec::Laplace { .. } => ProblemKind::Laplace,
            ProblemSpec::Poisson { .. } => ProblemKind::Poisson,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind().dim()
    }

    pub fn interval(&self) -> Option<Interval> {
        match *self {
            ProblemSpec::Decay { domain, .. } | ProblemSpec::Oscillator { domain, .. } => Some(domain),
            _ => None,
        }
    }

    pub fn rect(&self) -> Option<Rect> {
        match *self {
            ProblemSpec::Laplace { domain } | ProblemSpec::Poisson { domain } => Some(domain),
            _ => None,
        }
    }

    pub fn default_epochs(&self) -> usize {
        default_config(self.kind()).epochs
    }

    /// Input axes whose jets the residual needs.
    pub fn residual_axes(&self) -> &'static [usize] {
        if self.dim() == 1 {
            &[0]
        } else {
            &[0, 1]
        }
    }

    pub fn exact_solution(&self, p: &[f64]) -> f64 {
        match *self {
            ProblemSpec::Decay { rate, x0, .. } => x0 * (-rate * p[0]).exp(),
            ProblemSpec::Oscillator { omega, x0, v0, .. } => {
                x0 * (omega * p[0]).cos() + v0 / omega * (omega * p[0]).sin()
            }
            ProblemSpec::Laplace { .. } => p[0] * p[0] - p[1] * p[1],
            ProblemSpec::Poisson { .. } => (p[0] * p[1]).exp(),
        }
    }

    /// Closed-form solution lifted to a jet along `axis`, built with jet
    /// arithmetic.
    pub fn exact_jet(&self, p: &[f64], axis: usize) -> Jet2 {
        let coord = |k: usize| if k == axis { Jet2::variable(p[k]) } else { Jet2::constant(p[k]) };
        match *self {
            ProblemSpec::Decay { rate, x0, .. } => (coord(0) * -rate).exp() * x0,
            ProblemSpec::Oscillator { omega, x0, v0, .. } => {
                let wt = coord(0) * omega;
                wt.cos() * x0 + wt.sin() * (v0 / omega)
            }
            ProblemSpec::Laplace { .. } => coord(0).square() - coord(1).square(),
            ProblemSpec::Poisson { .. } => (coord(0) * coord(1)).exp(),
        }
    }

    fn source(&self, p: &[f64]) -> f64 {
        match self {
            ProblemSpec::Poisson { .. } => (p[0] * p[0] + p[1] * p[1]) * (p[0] * p[1]).exp(),
            _ => 0.0,
        }
    }

    /// Residual at `p` from the output jets along [`Self::residual_axes`],
    /// plus its sensitivity to each jet component.
    pub fn residual_from_jets(&self, p: &[f64], jets: &[Jet2]) -> (f64, [Jet2; 2]) {
        match *self {
            ProblemSpec::Decay { rate, .. } => {
                let u = jets[0];
                (u.d1 + rate * u.v, [Jet2::new(rate, 1.0, 0.0), Jet2::ZERO])
            }
            ProblemSpec::Oscillator { omega, .. } => {
                let u = jets[0];
                let w2 = omega * omega;
                (u.d2 + w2 * u.v, [Jet2::new(w2, 0.0, 1.0), Jet2::ZERO])
            }
            ProblemSpec::Laplace { .. } | ProblemSpec::Poisson { .. } => {
                let lap = jets[0].d2 + jets[1].d2;
                let s = Jet2::new(0.0, 0.0, 1.0);
                (lap - self.source(p), [s, s])
            }
        }
    }

    /// Dirichlet data on `edge`, taken from the boundary formulas.
    pub fn boundary_value(&self, b: &BoundaryPoint) -> f64 {
        let [x, y] = b.p;
        match self {
            ProblemSpec::Laplace { .. } => match b.edge {
                Edge::Left | Edge::Right => 1.0 - y * y,
                Edge::Bottom | Edge::Top => x * x - 1.0,
            },
            ProblemSpec::Poisson { .. } => match b.edge {
                Edge::Left | Edge::Bottom => 1.0,
                Edge::Right => y.exp(),
                Edge::Top => x.exp(),
            },
            _ => f64::NAN,
        }
    }

    /// Initial-condition targets `(x0, Some(v0))` for ODEs.
    fn initial_targets(&self) -> Option<(f64, Option<f64>)> {
        match *self {
            ProblemSpec::Decay { x0, .. } => Some((x0, None)),
            ProblemSpec::Oscillator { x0, v0, .. } => Some((x0, Some(v0))),
            _ => None,
        }
    }

    pub(crate) fn check_net(&self, net: &ShallowNet) -> Result<()> {
        if net.layout().input_dim() != self.dim() {
            return Err(Error::config(format!(
                "{} is {}-dimensional but the network takes {} inputs",
                self.kind(),
                self.dim(),
                net.layout().input_dim()
            )));
        }
        Ok(())
    }

    /// Differential residual of `net` at `p`.
    pub fn residual(&self, net: &ShallowNet, p: &[f64]) -> Result<f64> {
        self.check_net(net)?;
        let mut jets = [Jet2::ZERO; 2];
        for (k, &axis) in self.residual_axes().iter().enumerate() {
            jets[k] = net.forward_jet(p, axis)?;
        }
        Ok(self.residual_from_jets(p, &jets).0)
    }
}

/// Flat list of points sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn from_1d(ts: &[f64]) -> Self {
        Self { dim: 1, coords: ts.to_vec() }
    }

    pub fn from_2d(ps: &[[f64; 2]]) -> Self {
        Self { dim: 2, coords: ps.iter().flatten().copied().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub p: [f64; 2],
    pub value: f64,
}

/// Residual, initial-condition and boundary training sets.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    pub residual: Points,
    /// Time of the initial condition (ODEs only).
    pub initial: Option<f64>,
    pub boundary: Vec<Target>,
}

impl TrainingData {
    pub fn for_ode(problem: &ProblemSpec, points: &PointSet1D) -> Result<Self> {
        let iv = problem
            .interval()
            .ok_or_else(|| Error::config(format!("{} is not an ODE problem", problem.kind())))?;
        Ok(Self { residual: Points::from_1d(&points.points), initial: Some(iv.a()), boundary: Vec::new() })
    }

    pub fn for_pde(problem: &ProblemSpec, interior: &PointSet2D, boundary: &[BoundaryPoint]) -> Result<Self> {
        if problem.rect().is_none() {
            return Err(Error::config(format!("{} is not a PDE problem", problem.kind())));
        }
        let boundary = boundary
            .iter()
            .map(|b| Target { p: b.p, value: problem.boundary_value(b) })
            .collect();
        Ok(Self { residual: Points::from_2d(&interior.points), initial: None, boundary })
    }

    pub(crate) fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        if self.residual.is_empty() {
            return Err(Error::invalid("empty residual point set"));
        }
        if self.residual.dim() != problem.dim() {
            return Err(Error::config(format!(
                "training points are {}-dimensional, {} needs {}",
                self.residual.dim(),
                problem.kind(),
                problem.dim()
            )));
        }
        match problem.dim() {
            1 if self.initial.is_none() => Err(Error::invalid("ODE training data needs an initial point")),
            2 if self.boundary.is_empty() => Err(Error::invalid("PDE training data needs boundary points")),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossTerms {
    pub residual: f64,
    pub initial: f64,
    pub boundary: f64,
}

impl LossTerms {
    pub fn total(&self) -> f64 {
        self.residual + self.initial + self.boundary
    }
}

pub fn loss_terms(problem: &ProblemSpec, net: &ShallowNet, data: &TrainingData) -> Result<LossTerms> {
    problem.check_net(net)?;
    data.validate(problem)?;
    let axes = problem.residual_axes();

    let mut sum = 0.0;
    let mut jets = [Jet2::ZERO; 2];
    for p in data.residual.iter() {
        for (k, &axis) in axes.iter().enumerate() {
            jets[k] = net.forward_jet(p, axis)?;
        }
        let r = problem.residual_from_jets(p, &jets).0;
        sum += r * r;
    }
    let residual = sum / data.residual.len() as f64;

    let mut initial = 0.0;
    if let (Some(t0), Some((x0, v0))) = (data.initial, problem.initial_targets()) {
        let u = net.forward_jet(&[t0], 0)?;
        let e = u.v - x0;
        initial = e * e;
        if let Some(v0) = v0 {
            let ev = u.d1 - v0;
            initial += ev * ev;
        }
    }

    let mut boundary = 0.0;
    if !data.boundary.is_empty() {
        let mut sum = 0.0;
        for t in &data.boundary {
            let e = net.forward(&t.p)? - t.value;
            sum += e * e;
        }
        boundary = sum / data.boundary.len() as f64;
    }
    Ok(LossTerms { residual, initial, boundary })
}

/// Signed pointwise errors `e_i` with weights `w_i` such that the loss is
/// `sum w_i e_i^2`, in the order the loss accumulates them.
pub fn weighted_errors(problem: &ProblemSpec, net: &ShallowNet, data: &TrainingData) -> Result<Vec<(f64, f64)>> {
    problem.check_net(net)?;
    data.validate(problem)?;
    let axes = problem.residual_axes();
    let mut out = Vec::with_capacity(data.residual.len() + data.boundary.len() + 2);
    let w = 1.0 / data.residual.len() as f64;
    let mut jets = [Jet2::ZERO; 2];
    for p in data.residual.iter() {
        for (k, &axis) in axes.iter().enumerate() {
            jets[k] = net.forward_jet(p, axis)?;
        }
        out.push((problem.residual_from_jets(p, &jets).0, w));
    }
    if let (Some(t0), Some((x0, v0))) = (data.initial, problem.initial_targets()) {
        let u = net.forward_jet(&[t0], 0)?;
        out.push((u.v - x0, 1.0));
        if let Some(v0) = v0 {
            out.push((u.d1 - v0, 1.0));
        }
    }
    if !data.boundary.is_empty() {
        let w = 1.0 / data.boundary.len() as f64;
        for t in &data.boundary {
            out.push((net.forward(&t.p)? - t.value, w));
        }
    }
    Ok(out)
}

pub fn total_loss(problem: &ProblemSpec, net: &ShallowNet, data: &TrainingData) -> Result<f64> {
    loss_terms(problem, net, data).map(|t| t.total())
}

/// Evaluation grid shape: `n` equidistant points in 1D, `n x n` in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalGrid {
    pub per_axis: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefaultConfig {
    pub epochs: usize,
    /// ODE: point counts; PDE: per-axis counts.
    pub training_sizes: Vec<usize>,
    pub eval: EvalGrid,
}

pub fn default_config(kind: ProblemKind) -> DefaultConfig {
    match kind {
        ProblemKind::Decay => DefaultConfig { epochs: 50_000, training_sizes: vec![100, 200, 400], eval: EvalGrid { per_axis: 500 } },
        ProblemKind::Oscillator => {
            DefaultConfig { epochs: 100_000, training_sizes: vec![100, 200, 400], eval: EvalGrid { per_axis: 500 } }
        }
        ProblemKind::Laplace | ProblemKind::Poisson => {
            DefaultConfig { epochs: 50_000, training_sizes: vec![20, 40, 80], eval: EvalGrid { per_axis: 100 } }
        }
    }
}
