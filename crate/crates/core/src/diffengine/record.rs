//! Forward jet record of one network evaluation and its reverse sweep.
//!
//! The forward pass propagates a shared value channel plus a `(d1, d2)` pair
//! for every requested input axis through each layer, keeping the
//! intermediate jets. The reverse pass takes adjoints of the output jets and
//! accumulates the parameter gradient by walking the layers backwards. Jet
//! nodes stay differentiable in the parameters, so losses built from
//! `u_t`, `u_tt`, `u_xx` or `u_yy` get exact gradients.

use super::Jet2;
use crate::network::ShallowNet;

/// Per-layer storage. Axis-dependent arrays are laid out `[axis * width + j]`.
#[derive(Clone, Debug, Default)]
struct LayerTrace {
    width: usize,
    /// tanh(z)
    f: Vec<f64>,
    zd1: Vec<f64>,
    zd2: Vec<f64>,
    ad1: Vec<f64>,
    ad2: Vec<f64>,
}

/// Reusable record of a jet forward pass through a [`ShallowNet`].
#[derive(Clone, Debug, Default)]
pub struct JetRecord {
    axes: Vec<usize>,
    input: Vec<f64>,
    layers: Vec<LayerTrace>,
    out: Vec<Jet2>,
    out_value: f64,
    // reverse-sweep scratch
    bar_v: Vec<f64>,
    bar_d1: Vec<f64>,
    bar_d2: Vec<f64>,
    zbar_v: Vec<f64>,
    zbar_d1: Vec<f64>,
    zbar_d2: Vec<f64>,
}

impl JetRecord {
    /// Number of axes recorded by the last forward pass.
    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    /// Output jet for the `k`-th recorded axis.
    pub fn output(&self, k: usize) -> Jet2 {
        self.out[k]
    }

    /// Network output value (shared by every axis).
    pub fn value(&self) -> f64 {
        self.out_value
    }

    /// Records a forward pass at `x`, seeding each entry of `axes` as an
    /// independent direction. An empty `axes` records values only.
    ///
    /// Input dimension is not checked here; callers validate it.
    pub fn forward(&mut self, net: &ShallowNet, x: &[f64], axes: &[usize]) {
        let theta = net.theta();
        let hidden = net.layout().hidden();
        let na = axes.len();
        self.axes.clear();
        self.axes.extend_from_slice(axes);
        self.input.clear();
        self.input.extend_from_slice(x);
        self.layers.resize_with(hidden.len(), LayerTrace::default);

        let mut offset = 0;
        for (l, &width) in hidden.iter().enumerate() {
            let (before, rest) = self.layers.split_at_mut(l);
            let layer = &mut rest[0];
            layer.width = width;
            layer.f.clear();
            for buf in [&mut layer.zd1, &mut layer.zd2, &mut layer.ad1, &mut layer.ad2] {
                buf.clear();
                buf.resize(na * width, 0.0);
            }

            if l == 0 {
                let fan_in = x.len();
                for j in 0..width {
                    let row = &theta[offset + j * (fan_in + 1)..offset + (j + 1) * (fan_in + 1)];
                    let mut z = row[fan_in];
                    for (w, p) in row[..fan_in].iter().zip(x) {
                        z += w * p;
                    }
                    let f = z.tanh();
                    let s = 1.0 - f * f;
                    layer.f.push(f);
                    for (k, &axis) in axes.iter().enumerate() {
                        // input jets are (x, e_axis, 0)
                        let u1 = row[axis];
                        layer.zd1[k * width + j] = u1;
                        layer.ad1[k * width + j] = s * u1;
                        layer.ad2[k * width + j] = -2.0 * f * s * u1 * u1;
                    }
                }
                offset += width * (fan_in + 1);
            } else {
                let prev = &before[l - 1];
                let fan_in = prev.width;
                for j in 0..width {
                    let row = &theta[offset + j * (fan_in + 1)..offset + (j + 1) * (fan_in + 1)];
                    let w = &row[..fan_in];
                    let mut z = row[fan_in];
                    for (wi, p) in w.iter().zip(&prev.f) {
                        z += wi * p;
                    }
                    let f = z.tanh();
                    let s = 1.0 - f * f;
                    layer.f.push(f);
                    for k in 0..na {
                        let pd1 = &prev.ad1[k * fan_in..(k + 1) * fan_in];
                        let pd2 = &prev.ad2[k * fan_in..(k + 1) * fan_in];
                        let (mut u1, mut u2) = (0.0, 0.0);
                        for i in 0..fan_in {
                            u1 += w[i] * pd1[i];
                            u2 += w[i] * pd2[i];
                        }
                        let idx = k * width + j;
                        layer.zd1[idx] = u1;
                        layer.zd2[idx] = u2;
                        layer.ad1[idx] = s * u1;
                        layer.ad2[idx] = s * u2 - 2.0 * f * s * u1 * u1;
                    }
                }
                offset += width * (fan_in + 1);
            }
        }

        let last = self.layers.last().expect("at least one hidden layer");
        let h = last.width;
        let rho = &theta[offset..offset + h];
        let gamma = theta[offset + h];
        let mut y = gamma;
        for (r, a) in rho.iter().zip(&last.f) {
            y += r * a;
        }
        self.out_value = y;
        self.out.clear();
        for k in 0..na {
            let (mut d1, mut d2) = (0.0, 0.0);
            for j in 0..h {
                d1 += rho[j] * last.ad1[k * h + j];
                d2 += rho[j] * last.ad2[k * h + j];
            }
            self.out.push(Jet2::new(y, d1, d2));
        }
    }

    /// Accumulates `sum_k <adj[k], d out_k / d theta>` into `grad`.
    ///
    /// `value_adj` is the adjoint of the shared output value; `adj[k]` holds
    /// adjoints of `(d1, d2)` for the `k`-th recorded axis (its `v` field is
    /// added to `value_adj`).
    pub fn backward(&mut self, net: &ShallowNet, value_adj: f64, adj: &[Jet2], grad: &mut [f64]) {
        let theta = net.theta();
        let na = self.axes.len();
        debug_assert_eq!(adj.len(), na);
        debug_assert_eq!(grad.len(), theta.len());

        let ybar_v = value_adj + adj.iter().map(|a| a.v).sum::<f64>();

        // offsets of every affine block
        let mut offsets = [0usize; 3];
        let mut fan_in = self.input.len();
        let mut off = 0;
        for (l, layer) in self.layers.iter().enumerate() {
            offsets[l] = off;
            off += layer.width * (fan_in + 1);
            fan_in = layer.width;
        }
        let out_off = off;

        // output layer
        let depth = self.layers.len();
        {
            let last = &self.layers[depth - 1];
            let h = last.width;
            let rho = &theta[out_off..out_off + h];
            let g = &mut grad[out_off..out_off + h + 1];
            self.bar_v.clear();
            self.bar_d1.clear();
            self.bar_d2.clear();
            self.bar_d1.resize(na * h, 0.0);
            self.bar_d2.resize(na * h, 0.0);
            for j in 0..h {
                let mut gj = ybar_v * last.f[j];
                for (k, a) in adj.iter().enumerate() {
                    gj += a.d1 * last.ad1[k * h + j] + a.d2 * last.ad2[k * h + j];
                    self.bar_d1[k * h + j] = rho[j] * a.d1;
                    self.bar_d2[k * h + j] = rho[j] * a.d2;
                }
                g[j] += gj;
                self.bar_v.push(rho[j] * ybar_v);
            }
            g[h] += ybar_v;
        }

        for l in (0..depth).rev() {
            let layer = &self.layers[l];
            let width = layer.width;

            // tanh
            self.zbar_v.clear();
            self.zbar_d1.clear();
            self.zbar_d2.clear();
            self.zbar_d1.resize(na * width, 0.0);
            self.zbar_d2.resize(na * width, 0.0);
            for j in 0..width {
                let f = layer.f[j];
                let s = 1.0 - f * f;
                let mut zv = self.bar_v[j] * s;
                for k in 0..na {
                    let idx = k * width + j;
                    let (u1, u2) = (layer.zd1[idx], layer.zd2[idx]);
                    let (b1, b2) = (self.bar_d1[idx], self.bar_d2[idx]);
                    zv += b1 * (-2.0 * f * s * u1)
                        + b2 * (-2.0 * f * s * u2 - 2.0 * s * (s - 2.0 * f * f) * u1 * u1);
                    self.zbar_d1[idx] = b1 * s + b2 * (-4.0 * f * s * u1);
                    self.zbar_d2[idx] = b2 * s;
                }
                self.zbar_v.push(zv);
            }

            // affine
            let off = offsets[l];
            if l == 0 {
                let fan_in = self.input.len();
                for j in 0..width {
                    let g = &mut grad[off + j * (fan_in + 1)..off + (j + 1) * (fan_in + 1)];
                    let zv = self.zbar_v[j];
                    for i in 0..fan_in {
                        g[i] += zv * self.input[i];
                    }
                    for (k, &axis) in self.axes.iter().enumerate() {
                        g[axis] += self.zbar_d1[k * width + j];
                    }
                    g[fan_in] += zv;
                }
            } else {
                let prev = &self.layers[l - 1];
                let fan_in = prev.width;
                self.bar_v.clear();
                self.bar_v.resize(fan_in, 0.0);
                self.bar_d1.clear();
                self.bar_d1.resize(na * fan_in, 0.0);
                self.bar_d2.clear();
                self.bar_d2.resize(na * fan_in, 0.0);
                for j in 0..width {
                    let row = off + j * (fan_in + 1);
                    let w = &theta[row..row + fan_in];
                    let g = &mut grad[row..row + fan_in + 1];
                    let zv = self.zbar_v[j];
                    for i in 0..fan_in {
                        let mut gi = zv * prev.f[i];
                        self.bar_v[i] += w[i] * zv;
                        for k in 0..na {
                            let zi = k * width + j;
                            let pi = k * fan_in + i;
                            gi += self.zbar_d1[zi] * prev.ad1[pi] + self.zbar_d2[zi] * prev.ad2[pi];
                            self.bar_d1[pi] += w[i] * self.zbar_d1[zi];
                            self.bar_d2[pi] += w[i] * self.zbar_d2[zi];
                        }
                        g[i] += gi;
                    }
                    g[fan_in] += zv;
                }
            }
        }
    }
}
