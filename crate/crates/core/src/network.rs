//! Shallow feed-forward networks with `tanh` hidden layers and a linear output.
//!
//! Parameters live in one flat vector. The canonical order is layer by layer;
//! within a layer each neuron contributes its input weights followed by its
//! bias. The output layer comes last as `rho_1..rho_H, gamma`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::diffengine::{Jet2, JetRecord};
use crate::error::{Error, Result};

/// Input dimension plus one or two hidden widths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetLayout {
    input_dim: usize,
    hidden: Vec<usize>,
}

impl NetLayout {
    pub fn new(input_dim: usize, hidden: Vec<usize>) -> Result<Self> {
        if !(1..=2).contains(&input_dim) {
            return Err(Error::config(format!("input dimension must be 1 or 2, got {input_dim}")));
        }
        if !(1..=2).contains(&hidden.len()) {
            return Err(Error::config(format!(
                "expected 1 or 2 hidden layers, got {}",
                hidden.len()
            )));
        }
        if hidden.contains(&0) {
            return Err(Error::config("hidden widths must be positive"));
        }
        Ok(Self { input_dim, hidden })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    /// `(fan_in, fan_out)` of every affine map, output layer included.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let fan_ins = std::iter::once(self.input_dim).chain(self.hidden.iter().copied());
        let fan_outs = self.hidden.iter().copied().chain(std::iter::once(1));
        fan_ins.zip(fan_outs)
    }

    pub fn param_count(&self) -> usize {
        self.layer_shapes().map(|(i, o)| (i + 1) * o).sum()
    }

    /// Widths joined with `;`, e.g. `50;50`.
    pub fn widths_label(&self) -> String {
        self.hidden.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for NetLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.input_dim, self.widths_label())
    }
}

impl FromStr for NetLayout {
    type Err = Error;

    /// Parses the checkpoint descriptor `input_dim;w1[;w2]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .trim()
            .split(';')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::config(format!("bad layout descriptor {s:?}: {e}")))?;
        match parts.split_first() {
            Some((&d, widths)) => NetLayout::new(d, widths.to_vec()),
            None => Err(Error::config("empty layout descriptor")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShallowNet {
    layout: NetLayout,
    theta: Vec<f64>,
}

impl ShallowNet {
    pub fn from_theta(layout: NetLayout, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != layout.param_count() {
            return Err(Error::config(format!(
                "parameter vector has {} entries, layout {} needs {}",
                theta.len(),
                layout,
                layout.param_count()
            )));
        }
        Ok(Self { layout, theta })
    }

    pub fn zeros(layout: NetLayout) -> Self {
        let n = layout.param_count();
        Self { layout, theta: vec![0.0; n] }
    }

    /// Glorot-uniform weights, zero biases.
    ///
    /// Weights are drawn in canonical order from `U[-L, L]` with
    /// `L = sqrt(6 / (fan_in + fan_out))`.
    pub fn init_glorot(layout: NetLayout, seed: u64) -> Self {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut theta = Vec::with_capacity(layout.param_count());
        for (fan_in, fan_out) in layout.layer_shapes() {
            let limit = glorot_limit(fan_in, fan_out);
            let dist = Uniform::new_inclusive(-limit, limit);
            for _ in 0..fan_out {
                theta.extend((0..fan_in).map(|_| dist.sample(&mut rng)));
                theta.push(0.0);
            }
        }
        Self { layout, theta }
    }

    pub fn layout(&self) -> &NetLayout {
        &self.layout
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn into_theta(self) -> Vec<f64> {
        self.theta
    }

    pub fn set_theta(&mut self, theta: Vec<f64>) {
        assert_eq!(theta.len(), self.theta.len(), "theta length changed");
        self.theta = theta;
    }

    pub(crate) fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.layout.input_dim {
            return Err(Error::config(format!(
                "input has dimension {}, network expects {}",
                x.len(),
                self.layout.input_dim
            )));
        }
        Ok(())
    }

    /// Network output at `x`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut prev: Vec<f64> = x.to_vec();
        let mut next = Vec::new();
        let mut offset = 0;
        for &width in &self.layout.hidden {
            let fan_in = prev.len();
            next.clear();
            for j in 0..width {
                let row = &self.theta[offset + j * (fan_in + 1)..offset + (j + 1) * (fan_in + 1)];
                let mut z = row[fan_in];
                for (w, p) in row[..fan_in].iter().zip(&prev) {
                    z += w * p;
                }
                next.push(z.tanh());
            }
            offset += width * (fan_in + 1);
            std::mem::swap(&mut prev, &mut next);
        }
        let out = &self.theta[offset..];
        let h = prev.len();
        let mut y = out[h];
        for (r, a) in out[..h].iter().zip(&prev) {
            y += r * a;
        }
        Ok(y)
    }

    /// Output jet along input `axis`: value, first and second partial derivative.
    pub fn forward_jet(&self, x: &[f64], axis: usize) -> Result<Jet2> {
        self.check_input(x)?;
        if axis >= self.layout.input_dim {
            return Err(Error::config(format!(
                "axis {axis} out of range for input dimension {}",
                self.layout.input_dim
            )));
        }
        let mut rec = JetRecord::default();
        rec.forward(self, x, &[axis]);
        Ok(rec.output(0))
    }

    /// Writes the plain-text checkpoint: layout line, then one parameter per line.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.layout)?;
        for t in &self.theta {
            writeln!(w, "{t:.16e}")?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::config("empty checkpoint"))?
            .map_err(|e| Error::config(e.to_string()))?;
        let layout: NetLayout = header.parse()?;
        let mut theta = Vec::with_capacity(layout.param_count());
        for line in lines {
            let line = line.map_err(|e| Error::config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            theta.push(
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::config(format!("bad parameter {line:?}: {e}")))?,
            );
        }
        ShallowNet::from_theta(layout, theta)
    }
}

pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_neuron(gamma: f64) -> ShallowNet {
        // nu, eta, rho, gamma
        ShallowNet::from_theta(NetLayout::new(1, vec![1]).unwrap(), vec![1.0, 0.0, 1.0, gamma]).unwrap()
    }

    #[test]
    fn param_counts() {
        assert_eq!(NetLayout::new(2, vec![50, 50]).unwrap().param_count(), 2751);
        assert_eq!(NetLayout::new(1, vec![100]).unwrap().param_count(), 301);
        assert_eq!(NetLayout::new(2, vec![6, 6]).unwrap().param_count(), 18 + 42 + 7);
    }

    #[test]
    fn invalid_layouts() {
        assert!(NetLayout::new(3, vec![4]).is_err());
        assert!(NetLayout::new(1, vec![]).is_err());
        assert!(NetLayout::new(1, vec![4, 4, 4]).is_err());
        assert!(NetLayout::new(1, vec![0]).is_err());
    }

    #[test]
    fn glorot_is_deterministic_and_bounded() {
        let layout = NetLayout::new(1, vec![100]).unwrap();
        let a = ShallowNet::init_glorot(layout.clone(), 42);
        let b = ShallowNet::init_glorot(layout.clone(), 42);
        assert_eq!(a, b);
        assert_ne!(a, ShallowNet::init_glorot(layout, 43));
        let l1 = (6.0f64 / 101.0).sqrt();
        for j in 0..100 {
            assert!(a.theta[2 * j].abs() <= l1);
            assert_eq!(a.theta[2 * j + 1], 0.0);
        }
        let l2 = glorot_limit(100, 1);
        assert!(a.theta[200..300].iter().all(|r| r.abs() <= l2));
        assert_eq!(a.theta[300], 0.0);
    }

    #[test]
    fn two_layer_init_zero_biases() {
        let layout = NetLayout::new(2, vec![5, 4]).unwrap();
        let net = ShallowNet::init_glorot(layout, 7);
        let t = net.theta();
        for j in 0..5 {
            assert_eq!(t[j * 3 + 2], 0.0);
        }
        for j in 0..4 {
            assert_eq!(t[15 + j * 6 + 5], 0.0);
        }
        assert_eq!(*t.last().unwrap(), 0.0);
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = ShallowNet::zeros(NetLayout::new(2, vec![7, 3]).unwrap());
        assert_eq!(net.forward(&[0.3, -0.4]).unwrap(), 0.0);
        assert_eq!(net.forward_jet(&[0.3, -0.4], 1).unwrap(), Jet2::ZERO);
    }

    #[test]
    fn single_neuron_is_tanh() {
        let net = single_neuron(0.0);
        assert_eq!(net.forward(&[0.0]).unwrap(), 0.0);
        assert_eq!(net.forward(&[0.7]).unwrap(), 0.7f64.tanh());
        assert_eq!(net.forward_jet(&[0.0], 0).unwrap(), Jet2::new(0.0, 1.0, 0.0));
        assert_eq!(single_neuron(2.0).forward(&[0.0]).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        let net = single_neuron(0.0);
        assert!(matches!(net.forward(&[0.0, 1.0]), Err(Error::Config(_))));
        assert!(net.forward_jet(&[0.0], 1).is_err());
        assert!(ShallowNet::from_theta(NetLayout::new(1, vec![1]).unwrap(), vec![0.0; 3]).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let net = ShallowNet::init_glorot(NetLayout::new(2, vec![3, 2]).unwrap(), 5);
        let mut buf = Vec::new();
        net.write_checkpoint(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("2;3;2\n"));
        let back = ShallowNet::read_checkpoint(&buf[..]).unwrap();
        assert_eq!(back, net);
    }

    proptest! {
        #[test]
        fn matches_direct_single_layer_sum(seed in 0u64..1000, t in -5.0f64..5.0, h in 1usize..12) {
            let net = ShallowNet::init_glorot(NetLayout::new(1, vec![h]).unwrap(), seed);
            let th = net.theta();
            // sum_j rho_j tanh(nu_j t + eta_j) + gamma
            let direct: f64 = (0..h)
                .map(|j| th[2 * h + j] * (th[2 * j] * t + th[2 * j + 1]).tanh())
                .sum::<f64>() + th[3 * h];
            prop_assert!((net.forward(&[t]).unwrap() - direct).abs() < 1e-12);
        }

        #[test]
        fn jet_value_is_forward(seed in 0u64..1000, x in -1.0f64..1.0, y in -1.0f64..1.0, axis in 0usize..2) {
            let net = ShallowNet::init_glorot(NetLayout::new(2, vec![6, 5]).unwrap(), seed);
            prop_assert_eq!(net.forward_jet(&[x, y], axis).unwrap().v, net.forward(&[x, y]).unwrap());
        }

        #[test]
        fn output_layer_homogeneity(seed in 0u64..1000, t in -3.0f64..3.0, c in -4.0f64..4.0) {
            let mut net = ShallowNet::init_glorot(NetLayout::new(1, vec![8]).unwrap(), seed);
            let last = net.theta.len() - 1;
            net.theta[last] = 0.3;
            let base = net.forward(&[t]).unwrap();
            let mut scaled = net.clone();
            for p in &mut scaled.theta[16..] {
                *p *= c;
            }
            let got = scaled.forward(&[t]).unwrap();
            prop_assert!((got - c * base).abs() <= 1e-14 * (1.0 + got.abs()));
        }
    }
}
