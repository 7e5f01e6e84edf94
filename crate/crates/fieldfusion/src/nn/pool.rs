//! Parameter-free resolution changes: 2×2 average pooling and
//! nearest-neighbor 2× upsampling.

use ndarray::Array3;

use crate::field::Real;

/// 2×2 average pooling with stride 2. Spatial dims must be even.
pub fn avg_pool2<T: Real>(x: &Array3<T>) -> Array3<T> {
    let (c, h, w) = x.dim();
    debug_assert!(h % 2 == 0 && w % 2 == 0);
    let quarter = T::from_f64(0.25);
    Array3::from_shape_fn((c, h / 2, w / 2), |(ch, i, j)| {
        (x[(ch, 2 * i, 2 * j)]
            + x[(ch, 2 * i, 2 * j + 1)]
            + x[(ch, 2 * i + 1, 2 * j)]
            + x[(ch, 2 * i + 1, 2 * j + 1)])
            * quarter
    })
}

pub fn avg_pool2_backward<T: Real>(d_out: &Array3<T>) -> Array3<T> {
    let (c, h, w) = d_out.dim();
    let quarter = T::from_f64(0.25);
    Array3::from_shape_fn((c, h * 2, w * 2), |(ch, i, j)| {
        d_out[(ch, i / 2, j / 2)] * quarter
    })
}

/// Nearest-neighbor 2× upsampling.
pub fn upsample2<T: Real>(x: &Array3<T>) -> Array3<T> {
    let (c, h, w) = x.dim();
    Array3::from_shape_fn((c, h * 2, w * 2), |(ch, i, j)| x[(ch, i / 2, j / 2)])
}

pub fn upsample2_backward<T: Real>(d_out: &Array3<T>) -> Array3<T> {
    let (c, h, w) = d_out.dim();
    debug_assert!(h % 2 == 0 && w % 2 == 0);
    Array3::from_shape_fn((c, h / 2, w / 2), |(ch, i, j)| {
        d_out[(ch, 2 * i, 2 * j)]
            + d_out[(ch, 2 * i, 2 * j + 1)]
            + d_out[(ch, 2 * i + 1, 2 * j)]
            + d_out[(ch, 2 * i + 1, 2 * j + 1)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_then_upsample_shapes() {
        let x = Array3::<f64>::from_shape_fn((1, 4, 6), |(_, i, j)| (i * 6 + j) as f64);
        let p = avg_pool2(&x);
        assert_eq!(p.dim(), (1, 2, 3));
        assert_eq!(p[(0, 0, 0)], (0.0 + 1.0 + 6.0 + 7.0) / 4.0);
        let u = upsample2(&p);
        assert_eq!(u.dim(), (1, 4, 6));
        assert_eq!(u[(0, 1, 1)], p[(0, 0, 0)]);
    }

    #[test]
    fn adjoint_identity_holds() {
        // <pool(x), y> == <x, pool_backward(y)> and likewise for upsample.
        let x = Array3::<f64>::from_shape_fn((2, 4, 4), |(c, i, j)| (c + i + j) as f64 * 0.37);
        let y = Array3::<f64>::from_shape_fn((2, 2, 2), |(c, i, j)| (c * 7 + i * 3 + j) as f64);
        let lhs: f64 = avg_pool2(&x).iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(avg_pool2_backward(&y).iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);

        let lhs2: f64 = upsample2(&y).iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let rhs2: f64 = y.iter().zip(upsample2_backward(&x).iter()).map(|(a, b)| a * b).sum();
        assert!((lhs2 - rhs2).abs() < 1e-12);
    }
}
