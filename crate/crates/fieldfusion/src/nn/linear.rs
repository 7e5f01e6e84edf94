//! Dense layer on flat vectors.

use ndarray::{Array1, Array2};
use rand::Rng;

use super::kaiming_bound;
use crate::field::Real;

#[derive(Debug, Clone)]
pub struct Linear<T> {
    pub in_dim: usize,
    pub out_dim: usize,
    /// (out_dim, in_dim)
    pub weight: Array2<T>,
    pub bias: Vec<T>,
}

pub struct LinearCache<T> {
    input: Array1<T>,
}

impl<T: Real> Linear<T> {
    pub fn new<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let bound: T = kaiming_bound(in_dim);
        let weight = Array2::from_shape_fn((out_dim, in_dim), |_| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            bound * T::from_f64(u)
        });
        Self {
            in_dim,
            out_dim,
            weight,
            bias: vec![T::zero(); out_dim],
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

    pub fn forward(&self, x: &[T]) -> (Vec<T>, LinearCache<T>) {
        let input = Array1::from_vec(x.to_vec());
        let mut y = self.weight.dot(&input);
        for (v, &b) in y.iter_mut().zip(&self.bias) {
            *v = *v + b;
        }
        (y.to_vec(), LinearCache { input })
    }

    pub fn backward_input(&self, _cache: &LinearCache<T>, d_out: &[T]) -> Vec<T> {
        let d = Array1::from_vec(d_out.to_vec());
        self.weight.t().dot(&d).to_vec()
    }

    /// Returns (dx, grads) with grads = [dweight..., dbias...].
    pub fn backward_full(&self, cache: &LinearCache<T>, d_out: &[T]) -> (Vec<T>, Vec<T>) {
        let mut grads = Vec::with_capacity(self.param_count());
        for &d in d_out {
            for &xin in cache.input.iter() {
                grads.push(d * xin);
            }
        }
        grads.extend_from_slice(d_out);
        (self.backward_input(cache, d_out), grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::{central_diff, rel_err};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let lin = Linear::<f64>::new(5, 3, &mut rng);
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let proj: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let (_, cache) = lin.forward(&x);
        let (dx, grads) = lin.backward_full(&cache, &proj);

        let mut f = |v: &[f64]| {
            let (y, _) = lin.forward(v);
            y.iter().zip(&proj).map(|(a, b)| a * b).sum()
        };
        for i in 0..x.len() {
            let num = central_diff(&mut f, &x, i, 1e-6);
            assert!(rel_err(dx[i], num) < 1e-8);
        }

        let mut theta = Vec::new();
        lin.push_params(&mut theta);
        let mut fp = |v: &[f64]| {
            let mut l2 = lin.clone();
            l2.load_params(&mut v.iter());
            let (y, _) = l2.forward(&x);
            y.iter().zip(&proj).map(|(a, b)| a * b).sum()
        };
        for i in 0..theta.len() {
            let num = central_diff(&mut fp, &theta, i, 1e-6);
            assert!(rel_err(grads[i], num) < 1e-8);
        }
    }
}
