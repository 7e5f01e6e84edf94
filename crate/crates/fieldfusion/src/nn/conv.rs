//! 3×3 same-padding convolution via im2col + GEMM.

use ndarray::{Array2, Array3};
use rand::Rng;

use super::kaiming_bound;
use crate::field::Real;

/// 3×3 convolution with unit padding (output spatial dims equal input's).
#[derive(Debug, Clone)]
pub struct Conv2d<T> {
    pub in_channels: usize,
    pub out_channels: usize,
    /// (out_channels, in_channels*9)
    pub weight: Array2<T>,
    pub bias: Vec<T>,
}

/// Forward-pass state needed by the backward pass.
pub struct ConvCache<T> {
    /// im2col matrix, (in_channels*9, H*W)
    cols: Array2<T>,
    height: usize,
    width: usize,
}

impl<T: Real> Conv2d<T> {
    pub fn new<R: Rng + ?Sized>(in_channels: usize, out_channels: usize, rng: &mut R) -> Self {
        let bound: T = kaiming_bound(in_channels * 9);
        let weight = Array2::from_shape_fn((out_channels, in_channels * 9), |_| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            bound * T::from_f64(u)
        });
        Self {
            in_channels,
            out_channels,
            weight,
            bias: vec![T::zero(); out_channels],
        }
    }

    pub fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    pub fn push_params(&self, out: &mut Vec<T>) {
        out.extend(self.weight.iter().copied());
        out.extend_from_slice(&self.bias);
    }

    pub fn load_params<'a>(&mut self, src: &mut impl Iterator<Item = &'a T>)
    where
        T: 'a,
    {
        for w in self.weight.iter_mut() {
            *w = *src.next().expect("parameter vector too short");
        }
        for b in self.bias.iter_mut() {
            *b = *src.next().expect("parameter vector too short");
        }
    }

    pub fn forward(&self, x: &Array3<T>) -> (Array3<T>, ConvCache<T>) {
        let (c, h, w) = x.dim();
        debug_assert_eq!(c, self.in_channels);
        let cols = im2col(x);
        let mut out = self.weight.dot(&cols); // (out, H*W)
        for (mut row, &b) in out.outer_iter_mut().zip(&self.bias) {
            row.mapv_inplace(|v| v + b);
        }
        let out = out
            .into_shape_with_order((self.out_channels, h, w))
            .expect("conv output reshape");
        (out, ConvCache { cols, height: h, width: w })
    }

    /// Input gradient only (the sampling hot path never needs weight grads).
    pub fn backward_input(&self, cache: &ConvCache<T>, d_out: &Array3<T>) -> Array3<T> {
        let hw = cache.height * cache.width;
        let d_flat = flatten_spatial(d_out, hw);
        let d_cols = self.weight.t().dot(&d_flat); // (in*9, H*W)
        col2im(&d_cols, self.in_channels, cache.height, cache.width)
    }

    /// Input gradient plus flattened parameter gradient (weights then bias).
    pub fn backward_full(&self, cache: &ConvCache<T>, d_out: &Array3<T>) -> (Array3<T>, Vec<T>) {
        let hw = cache.height * cache.width;
        let d_flat = flatten_spatial(d_out, hw);
        let d_weight = d_flat.dot(&cache.cols.t()); // (out, in*9)
        let mut grads: Vec<T> = Vec::with_capacity(self.param_count());
        grads.extend(d_weight.iter().copied());
        for row in d_flat.outer_iter() {
            grads.push(row.iter().fold(T::zero(), |a, &v| a + v));
        }
        let dx = self.backward_input(cache, d_out);
        (dx, grads)
    }
}

fn flatten_spatial<T: Real>(x: &Array3<T>, hw: usize) -> Array2<T> {
    let (c, _, _) = x.dim();
    x.to_owned()
        .into_shape_with_order((c, hw))
        .expect("spatial flatten")
}

/// Expand (C,H,W) into (C*9, H*W) patches for a 3×3 kernel with unit padding.
fn im2col<T: Real>(x: &Array3<T>) -> Array2<T> {
    let (c, h, w) = x.dim();
    let mut cols = Array2::zeros((c * 9, h * w));
    for ch in 0..c {
        for k in 0..9 {
            let di = (k / 3) as isize - 1;
            let dj = (k % 3) as isize - 1;
            let row = ch * 9 + k;
            for i in 0..h {
                let si = i as isize + di;
                if si < 0 || si >= h as isize {
                    continue;
                }
                for j in 0..w {
                    let sj = j as isize + dj;
                    if sj < 0 || sj >= w as isize {
                        continue;
                    }
                    cols[(row, i * w + j)] = x[(ch, si as usize, sj as usize)];
                }
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatter-add patches back onto the grid.
fn col2im<T: Real>(cols: &Array2<T>, channels: usize, h: usize, w: usize) -> Array3<T> {
    let mut out = Array3::zeros((channels, h, w));
    for ch in 0..channels {
        for k in 0..9 {
            let di = (k / 3) as isize - 1;
            let dj = (k % 3) as isize - 1;
            let row = ch * 9 + k;
            for i in 0..h {
                let si = i as isize + di;
                if si < 0 || si >= h as isize {
                    continue;
                }
                for j in 0..w {
                    let sj = j as isize + dj;
                    if sj < 0 || sj >= w as isize {
                        continue;
                    }
                    let v = cols[(row, i * w + j)];
                    out[(ch, si as usize, sj as usize)] = out[(ch, si as usize, sj as usize)] + v;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::{central_diff, rel_err};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct nested-loop convolution; the oracle the GEMM path is checked against.
    fn conv_naive(conv: &Conv2d<f64>, x: &Array3<f64>) -> Array3<f64> {
        let (c_in, h, w) = x.dim();
        let mut out = Array3::zeros((conv.out_channels, h, w));
        for o in 0..conv.out_channels {
            for i in 0..h as isize {
                for j in 0..w as isize {
                    let mut acc = conv.bias[o];
                    for c in 0..c_in {
                        for di in -1..=1isize {
                            for dj in -1..=1isize {
                                let (si, sj) = (i + di, j + dj);
                                if si < 0 || sj < 0 || si >= h as isize || sj >= w as isize {
                                    continue;
                                }
                                let k = ((di + 1) * 3 + (dj + 1)) as usize;
                                acc += conv.weight[(o, c * 9 + k)]
                                    * x[(c, si as usize, sj as usize)];
                            }
                        }
                    }
                    out[(o, i as usize, j as usize)] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn gemm_path_matches_naive_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let conv = Conv2d::<f64>::new(2, 3, &mut rng);
        let x = Array3::from_shape_fn((2, 5, 4), |_| rng.gen_range(-1.0..1.0));
        let (out, _) = conv.forward(&x);
        let naive = conv_naive(&conv, &x);
        for (a, b) in out.iter().zip(naive.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let conv = Conv2d::<f64>::new(2, 2, &mut rng);
        let x0 = Array3::from_shape_fn((2, 4, 3), |_| rng.gen_range(-1.0..1.0));
        let proj = Array3::from_shape_fn((2, 4, 3), |_| rng.gen_range(-1.0..1.0));

        let (_, cache) = conv.forward(&x0);
        let dx = conv.backward_input(&cache, &proj);

        let flat: Vec<f64> = x0.iter().copied().collect();
        let mut f = |v: &[f64]| {
            let xt = Array3::from_shape_vec((2, 4, 3), v.to_vec()).unwrap();
            let (y, _) = conv.forward(&xt);
            y.iter().zip(proj.iter()).map(|(a, b)| a * b).sum()
        };
        for i in (0..flat.len()).step_by(5) {
            let num = central_diff(&mut f, &flat, i, 1e-6);
            let ana = dx.as_slice().unwrap()[i];
            assert!(rel_err(ana, num) < 1e-7, "i={i} ana={ana} num={num}");
        }
    }

    #[test]
    fn parameter_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut conv = Conv2d::<f64>::new(1, 2, &mut rng);
        let x = Array3::from_shape_fn((1, 4, 4), |_| rng.gen_range(-1.0..1.0));
        let proj = Array3::from_shape_fn((2, 4, 4), |_| rng.gen_range(-1.0..1.0));

        let (_, cache) = conv.forward(&x);
        let (_, grads) = conv.backward_full(&cache, &proj);

        let mut theta = Vec::new();
        conv.push_params(&mut theta);
        for i in (0..theta.len()).step_by(3) {
            let mut f = |v: &[f64]| {
                let mut c2 = conv.clone();
                c2.load_params(&mut v.iter());
                let (y, _) = c2.forward(&x);
                y.iter().zip(proj.iter()).map(|(a, b)| a * b).sum()
            };
            let num = central_diff(&mut f, &theta, i, 1e-6);
            assert!(rel_err(grads[i], num) < 1e-7, "param {i}");
        }
    }
}
