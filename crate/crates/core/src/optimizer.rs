//! Full-batch Adam.

use std::time::Instant;

use crate::diffengine::LossEvaluator;
use crate::error::{Error, Result};
use crate::network::ShallowNet;
use crate::problems::{total_loss, ProblemSpec, TrainingData};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    /// Number of steps taken.
    pub k: u64,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(n: usize, hyper: AdamHyper) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], k: 0, hyper }
    }

    /// One Adam update of `theta` in place. The step counter is incremented
    /// before bias correction, so the first step divides by `1 - beta`.
    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) -> Result<()> {
        if theta.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::invalid(format!(
                "adam state has {} entries, theta {}, gradient {}",
                self.m.len(),
                theta.len(),
                grad.len()
            )));
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::invalid(format!("non-finite gradient component {i}: {}", grad[i])));
        }
        self.k += 1;
        let AdamHyper { lr, beta1, beta2, eps } = self.hyper;
        let c1 = 1.0 - beta1.powf(self.k as f64);
        let c2 = 1.0 - beta2.powf(self.k as f64);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub final_net: ShallowNet,
    /// Loss before each step.
    pub loss_history: Vec<f64>,
    /// Loss at the final parameters.
    pub final_loss: f64,
    pub epochs_run: usize,
    pub wall_time_seconds: f64,
}

impl TrainReport {
    pub fn initial_loss(&self) -> f64 {
        self.loss_history[0]
    }
}

/// Runs exactly `epochs` full-batch Adam steps from `net0`.
pub fn train(problem: &ProblemSpec, net0: &ShallowNet, data: &TrainingData, epochs: usize) -> Result<TrainReport> {
    train_with(problem, net0, data, epochs, AdamHyper::default())
}

pub fn train_with(
    problem: &ProblemSpec,
    net0: &ShallowNet,
    data: &TrainingData,
    epochs: usize,
    hyper: AdamHyper,
) -> Result<TrainReport> {
    if epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    let start = Instant::now();
    let mut net = net0.clone();
    let n = net.theta().len();
    let mut theta = net.theta().to_vec();
    let mut grad = vec![0.0; n];
    let mut state = AdamState::new(n, hyper);
    let mut eval = LossEvaluator::default();
    let mut loss_history = Vec::with_capacity(epochs);

    for epoch in 0..epochs {
        let loss = eval.evaluate(problem, &net, data, &mut grad)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite { what: "loss", epoch });
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { what: "gradient", epoch });
        }
        loss_history.push(loss);
        state.step(&mut theta, &grad)?;
        net.set_theta(theta.clone());
    }

    let final_loss = total_loss(problem, &net, data)?;
    if !final_loss.is_finite() {
        return Err(Error::NonFinite { what: "loss", epoch: epochs });
    }
    Ok(TrainReport {
        final_net: net,
        loss_history,
        final_loss,
        epochs_run: epochs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}
