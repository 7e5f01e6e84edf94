//! Group normalization with affine parameters.

use ndarray::Array3;

use crate::field::Real;

const EPS: f64 = 1e-5;

/// GroupNorm over channel groups of a (C,H,W) tensor.
#[derive(Debug, Clone)]
pub struct GroupNorm<T> {
    pub channels: usize,
    pub groups: usize,
    pub gamma: Vec<T>,
    pub beta: Vec<T>,
}

pub struct GroupNormCache<T> {
    /// Normalized activations (pre-affine).
    x_hat: Array3<T>,
    /// Per-group 1/sqrt(var + eps).
    inv_std: Vec<T>,
}

impl<T: Real> GroupNorm<T> {
    /// `requested_groups` is reduced to the largest divisor of `channels`.
    pub fn new(channels: usize, requested_groups: usize) -> Self {
        let mut groups = requested_groups.min(channels).max(1);
        while channels % groups != 0 {
            groups -= 1;
        }
        Self {
            channels,
            groups,
            gamma: vec![T::one(); channels],
            beta: vec![T::zero(); channels],
        }
    }

    pub fn param_count(&self) -> usize {
        2 * self.channels
    }

    pub fn push_params(&self, out: &mut Vec<T>) {
        out.extend_from_slice(&self.gamma);
        out.extend_from_slice(&self.beta);
    }

    pub fn load_params<'a>(&mut self, src: &mut impl Iterator<Item = &'a T>)
    where
        T: 'a,
    {
        for g in self.gamma.iter_mut() {
            *g = *src.next().expect("parameter vector too short");
        }
        for b in self.beta.iter_mut() {
            *b = *src.next().expect("parameter vector too short");
        }
    }

    pub fn forward(&self, x: &Array3<T>) -> (Array3<T>, GroupNormCache<T>) {
        let (c, h, w) = x.dim();
        debug_assert_eq!(c, self.channels);
        let group_size = c / self.groups;
        let n = T::from_usize(group_size * h * w).unwrap();
        let eps = T::from_f64(EPS);

        let mut x_hat = Array3::zeros((c, h, w));
        let mut inv_std = vec![T::zero(); self.groups];
        for g in 0..self.groups {
            let ch0 = g * group_size;
            let mut mean = T::zero();
            for ch in ch0..ch0 + group_size {
                for v in x.index_axis(ndarray::Axis(0), ch).iter() {
                    mean = mean + *v;
                }
            }
            mean = mean / n;
            let mut var = T::zero();
            for ch in ch0..ch0 + group_size {
                for v in x.index_axis(ndarray::Axis(0), ch).iter() {
                    let d = *v - mean;
                    var = var + d * d;
                }
            }
            var = var / n;
            let istd = T::one() / (var + eps).sqrt();
            inv_std[g] = istd;
            for ch in ch0..ch0 + group_size {
                for i in 0..h {
                    for j in 0..w {
                        x_hat[(ch, i, j)] = (x[(ch, i, j)] - mean) * istd;
                    }
                }
            }
        }

        let mut out = x_hat.clone();
        for ch in 0..c {
            let (gamma, beta) = (self.gamma[ch], self.beta[ch]);
            for v in out.index_axis_mut(ndarray::Axis(0), ch).iter_mut() {
                *v = gamma * *v + beta;
            }
        }
        (out, GroupNormCache { x_hat, inv_std })
    }

    pub fn backward_input(&self, cache: &GroupNormCache<T>, d_out: &Array3<T>) -> Array3<T> {
        self.backward(cache, d_out).0
    }

    /// Returns (dx, grads) with grads = [dgamma..., dbeta...].
    pub fn backward(&self, cache: &GroupNormCache<T>, d_out: &Array3<T>) -> (Array3<T>, Vec<T>) {
        let (c, h, w) = d_out.dim();
        let group_size = c / self.groups;
        let n = T::from_usize(group_size * h * w).unwrap();

        let mut d_gamma = vec![T::zero(); c];
        let mut d_beta = vec![T::zero(); c];
        for ch in 0..c {
            let mut dg = T::zero();
            let mut db = T::zero();
            for i in 0..h {
                for j in 0..w {
                    dg = dg + d_out[(ch, i, j)] * cache.x_hat[(ch, i, j)];
                    db = db + d_out[(ch, i, j)];
                }
            }
            d_gamma[ch] = dg;
            d_beta[ch] = db;
        }

        // dx = istd * (dxhat - mean_g(dxhat) - xhat * mean_g(dxhat*xhat))
        let mut dx = Array3::zeros((c, h, w));
        for g in 0..self.groups {
            let ch0 = g * group_size;
            let mut sum_dxh = T::zero();
            let mut sum_dxh_xh = T::zero();
            for ch in ch0..ch0 + group_size {
                for i in 0..h {
                    for j in 0..w {
                        let dxh = d_out[(ch, i, j)] * self.gamma[ch];
                        sum_dxh = sum_dxh + dxh;
                        sum_dxh_xh = sum_dxh_xh + dxh * cache.x_hat[(ch, i, j)];
                    }
                }
            }
            let mean_dxh = sum_dxh / n;
            let mean_dxh_xh = sum_dxh_xh / n;
            let istd = cache.inv_std[g];
            for ch in ch0..ch0 + group_size {
                for i in 0..h {
                    for j in 0..w {
                        let dxh = d_out[(ch, i, j)] * self.gamma[ch];
                        dx[(ch, i, j)] =
                            istd * (dxh - mean_dxh - cache.x_hat[(ch, i, j)] * mean_dxh_xh);
                    }
                }
            }
        }

        let mut grads = d_gamma;
        grads.extend(d_beta);
        (dx, grads)
    }
}
