//! Small neural-network layer toolkit with hand-written backward passes.
//!
//! Every layer provides a cached forward pass plus explicit vector-Jacobian
//! products for both its input and its parameters. The layers are generic
//! over [`Real`](crate::field::Real) so gradient correctness can be checked
//! against central finite differences at 64-bit precision.

mod conv;
mod linear;
mod norm;
mod pool;

pub use conv::{Conv2d, ConvCache};
pub use linear::{Linear, LinearCache};
pub use norm::{GroupNorm, GroupNormCache};
pub use pool::{avg_pool2, avg_pool2_backward, upsample2, upsample2_backward};

use crate::field::Real;

/// SiLU (x·sigmoid(x)), the activation used inside the score network.
/// Smooth everywhere, which keeps finite-difference probes well behaved.
pub fn silu<T: Real>(x: T) -> T {
    x * sigmoid(x)
}

pub fn silu_derivative<T: Real>(x: T) -> T {
    let s = sigmoid(x);
    s * (T::one() + x * (T::one() - s))
}

pub fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

pub fn relu<T: Real>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

pub fn relu_derivative<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

/// Kaiming-uniform bound for a layer with the given fan-in.
pub(crate) fn kaiming_bound<T: Real>(fan_in: usize) -> T {
    T::from_f64((6.0 / fan_in as f64).sqrt())
}

#[cfg(test)]
pub(crate) mod gradcheck {
    //! Central finite-difference helpers shared by the layer tests.

    /// Relative error between an analytic and a numerical derivative.
    pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
        let denom = analytic.abs().max(numeric.abs()).max(1e-8);
        (analytic - numeric).abs() / denom
    }

    /// Central difference of a scalar function at x[i].
    pub fn central_diff(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    }
}
