//! Exact input derivatives and parameter gradients of the PINN losses.
//!
//! Input derivatives come from second-order forward jets ([`Jet2`]), one
//! direction per input axis. Parameter gradients come from a reverse sweep
//! over the recorded jets ([`JetRecord`]), so terms containing `u_t`, `u_tt`,
//! `u_xx` and `u_yy` are differentiated exactly in the parameters.
//!
//! The loss returned by [`loss_gradient`] is computed with the same
//! operations, in the same order, as [`crate::problems::total_loss`].

mod jet;
mod record;

use std::ops::Deref;

pub use jet::Jet2;
pub use record::JetRecord;

use crate::error::Result;
use crate::network::ShallowNet;
use crate::problems::{weighted_errors, ProblemSpec, TrainingData};

/// Loss gradient in the network's canonical parameter order.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector(Vec<f64>);

impl GradientVector {
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|g| g.is_finite())
    }
}

impl Deref for GradientVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Loss and gradient of the composite loss at `net`.
pub fn loss_gradient(problem: &ProblemSpec, net: &ShallowNet, data: &TrainingData) -> Result<(f64, GradientVector)> {
    let mut eval = LossEvaluator::default();
    let mut grad = vec![0.0; net.theta().len()];
    let loss = eval.evaluate(problem, net, data, &mut grad)?;
    Ok((loss, GradientVector(grad)))
}

/// Scratch space for repeated loss/gradient evaluations.
#[derive(Clone, Debug, Default)]
pub struct LossEvaluator {
    record: JetRecord,
    residuals: Vec<f64>,
}

impl LossEvaluator {
    /// Writes the gradient into `grad` (overwriting it) and returns the loss.
    pub fn evaluate(
        &mut self,
        problem: &ProblemSpec,
        net: &ShallowNet,
        data: &TrainingData,
        grad: &mut [f64],
    ) -> Result<f64> {
        problem.check_net(net)?;
        data.validate(problem)?;
        assert_eq!(grad.len(), net.theta().len(), "gradient buffer has wrong length");
        grad.fill(0.0);

        let axes = problem.residual_axes();
        let n = data.residual.len() as f64;
        let mut jets = [Jet2::ZERO; 2];
        let mut adj = [Jet2::ZERO; 2];

        // residual term: mean of r^2
        self.residuals.clear();
        let mut sum = 0.0;
        for p in data.residual.iter() {
            self.record.forward(net, p, axes);
            for k in 0..axes.len() {
                jets[k] = self.record.output(k);
            }
            let (r, sens) = problem.residual_from_jets(p, &jets[..axes.len()]);
            sum += r * r;
            let scale = 2.0 * r / n;
            for k in 0..axes.len() {
                adj[k] = sens[k].scale(scale);
            }
            self.record.backward(net, 0.0, &adj[..axes.len()], grad);
        }
        let residual = sum / n;

        let mut initial = 0.0;
        if let Some(t0) = data.initial {
            let (x0, v0) = match *problem {
                ProblemSpec::Decay { x0, .. } => (x0, None),
                ProblemSpec::Oscillator { x0, v0, .. } => (x0, Some(v0)),
                _ => unreachable!("validated as ODE"),
            };
            self.record.forward(net, &[t0], &[0]);
            let u = self.record.output(0);
            let e = u.v - x0;
            initial = e * e;
            let mut a = Jet2::new(2.0 * e, 0.0, 0.0);
            if let Some(v0) = v0 {
                let ev = u.d1 - v0;
                initial += ev * ev;
                a.d1 = 2.0 * ev;
            }
            self.record.backward(net, 0.0, &[a], grad);
        }

        let mut boundary = 0.0;
        if !data.boundary.is_empty() {
            let m = data.boundary.len() as f64;
            let mut sum = 0.0;
            for t in &data.boundary {
                self.record.forward(net, &t.p, &[]);
                let e = self.record.value() - t.value;
                sum += e * e;
                self.record.backward(net, 2.0 * e / m, &[], grad);
            }
            boundary = sum / m;
        }

        Ok(residual + initial + boundary)
    }
}

/// Fourth-order central-difference gradient of the loss, used as a reference.
///
/// Loss differences are formed as `sum w (e+ - e-)(e+ + e-)` rather than by
/// subtracting two large loss values, which keeps the cancellation error at
/// the size of the perturbation.
pub fn finite_difference_gradient(problem: &ProblemSpec, net: &ShallowNet, data: &TrainingData, rel_step: f64) -> Result<Vec<f64>> {
    let theta = net.theta().to_vec();
    let mut probe = net.clone();
    let mut errors_at = |i: usize, delta: f64| -> Result<Vec<(f64, f64)>> {
        let mut t = theta.clone();
        t[i] += delta;
        probe.set_theta(t);
        weighted_errors(problem, &probe, data)
    };
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let h = rel_step * theta[i].abs().max(1.0);
        let diff = |plus: &[(f64, f64)], minus: &[(f64, f64)]| -> f64 {
            plus.iter().zip(minus).map(|(&(a, w), &(b, _))| w * (a - b) * (a + b)).sum()
        };
        let (p1, m1) = (errors_at(i, h)?, errors_at(i, -h)?);
        let (p2, m2) = (errors_at(i, 2.0 * h)?, errors_at(i, -2.0 * h)?);
        grad.push((8.0 * diff(&p1, &m1) - diff(&p2, &m2)) / (12.0 * h));
    }
    Ok(grad)
}
