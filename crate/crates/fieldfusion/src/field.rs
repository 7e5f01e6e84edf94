//! The `Field` grid type and the scalar abstraction shared by every
//! numerical routine.
//!
//! A field is a C×H×W grid of scalar samples stored row-major per channel —
//! the object being generated and reconstructed. Production code runs fields
//! at `f32`; oracle and finite-difference tests instantiate the same code at
//! `f64`, so everything numerical is generic over [`Real`].

use ndarray::{ArrayView3, ArrayViewMut3, LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Scalar type usable throughout the library: `f32` in production,
/// `f64` in oracle tests.
pub trait Real:
    Float + FromPrimitive + ScalarOperand + LinalgScalar + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 conversion")
    }

    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Channel tag for the von Mises stress field.
pub const STRESS_TAG: &str = "vonmises_stress";
/// Channel tag for the strain field.
pub const STRAIN_TAG: &str = "strain";

/// A C×H×W grid of scalar samples, row-major per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T = f32> {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<T>,
    /// Per-channel labels, e.g. `"vonmises_stress"`. May be empty (untagged).
    pub channel_tags: Vec<String>,
}

impl<T: Real> Field<T> {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![T::zero(); channels * height * width],
            channel_tags: Vec::new(),
        }
    }

    pub fn from_vec(channels: usize, height: usize, width: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::shape(
                format!("{}x{}x{} = {}", channels, height, width, channels * height * width),
                format!("{} values", data.len()),
            ));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
            channel_tags: Vec::new(),
        })
    }

    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for i in 0..height {
                for j in 0..width {
                    data.push(f(c, i, j));
                }
            }
        }
        Self {
            channels,
            height,
            width,
            data,
            channel_tags: Vec::new(),
        }
    }

    /// Constant field.
    pub fn splat(channels: usize, height: usize, width: usize, value: T) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![value; channels * height * width],
            channel_tags: Vec::new(),
        }
    }

    /// Field of i.i.d. standard-normal draws.
    pub fn standard_normal<R: Rng + ?Sized>(
        channels: usize,
        height: usize,
        width: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..channels * height * width)
            .map(|_| T::standard_normal(rng))
            .collect();
        Self {
            channels,
            height,
            width,
            data,
            channel_tags: Vec::new(),
        }
    }

    pub fn with_tags(mut self, tags: &[&str]) -> Self {
        self.channel_tags = tags.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn get(&self, c: usize, i: usize, j: usize) -> T {
        self.data[(c * self.height + i) * self.width + j]
    }

    pub fn set(&mut self, c: usize, i: usize, j: usize, v: T) {
        self.data[(c * self.height + i) * self.width + j] = v;
    }

    /// Row-major slice of one channel.
    pub fn channel(&self, c: usize) -> &[T] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    /// Extract one channel as a new single-channel field.
    pub fn extract_channel(&self, c: usize) -> Field<T> {
        let mut out = Field {
            channels: 1,
            height: self.height,
            width: self.width,
            data: self.channel(c).to_vec(),
            channel_tags: Vec::new(),
        };
        if let Some(tag) = self.channel_tags.get(c) {
            out.channel_tags = vec![tag.clone()];
        }
        out
    }

    /// Stack single-channel fields of identical HxW into one multi-channel field.
    pub fn stack(parts: &[&Field<T>]) -> Result<Field<T>> {
        let (h, w) = (parts[0].height, parts[0].width);
        let mut data = Vec::new();
        let mut tags = Vec::new();
        for p in parts {
            if (p.height, p.width) != (h, w) {
                return Err(Error::shape(format!("{}x{}", h, w), format!("{}x{}", p.height, p.width)));
            }
            data.extend_from_slice(&p.data);
            if p.channel_tags.len() == p.channels {
                tags.extend(p.channel_tags.iter().cloned());
            }
        }
        let channels: usize = parts.iter().map(|p| p.channels).sum();
        let mut f = Field::from_vec(channels, h, w, data)?;
        if tags.len() == channels {
            f.channel_tags = tags;
        }
        Ok(f)
    }

    pub fn same_shape(&self, other: &Field<T>) -> bool {
        self.shape() == other.shape()
    }

    pub fn check_same_shape(&self, other: &Field<T>) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::shape(
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(())
    }

    pub fn view(&self) -> ArrayView3<'_, T> {
        ArrayView3::from_shape((self.channels, self.height, self.width), &self.data)
            .expect("field layout is dense row-major")
    }

    pub fn view_mut(&mut self) -> ArrayViewMut3<'_, T> {
        ArrayViewMut3::from_shape((self.channels, self.height, self.width), &mut self.data)
            .expect("field layout is dense row-major")
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Field<T> {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = f(*v);
        }
        out
    }

    /// Elementwise `a*self + b*other`.
    pub fn axpby(&self, a: T, other: &Field<T>, b: T) -> Field<T> {
        debug_assert!(self.same_shape(other));
        let mut out = self.clone();
        for (o, &r) in out.data.iter_mut().zip(&other.data) {
            *o = a * *o + b * r;
        }
        out
    }

    pub fn add(&self, other: &Field<T>) -> Field<T> {
        self.axpby(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Field<T>) -> Field<T> {
        self.axpby(T::one(), other, -T::one())
    }

    pub fn scale(&self, a: T) -> Field<T> {
        self.map(|v| a * v)
    }

    pub fn add_assign(&mut self, other: &Field<T>) {
        debug_assert!(self.same_shape(other));
        for (o, &r) in self.data.iter_mut().zip(&other.data) {
            *o = *o + r;
        }
    }

    /// In-place `self -= a*other`.
    pub fn sub_scaled_assign(&mut self, a: T, other: &Field<T>) {
        debug_assert!(self.same_shape(other));
        for (o, &r) in self.data.iter_mut().zip(&other.data) {
            *o = *o - a * r;
        }
    }

    pub fn dot(&self, other: &Field<T>) -> T {
        debug_assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn mean(&self) -> T {
        let n = T::from_usize(self.data.len()).unwrap();
        self.data.iter().fold(T::zero(), |a, &v| a + v) / n
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Convert precision elementwise (used by f64 oracles probing f32 artifacts).
    pub fn cast<U: Real>(&self) -> Field<U> {
        Field {
            channels: self.channels,
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| U::from_f64(v.to_f64())).collect(),
            channel_tags: self.channel_tags.clone(),
        }
    }
}
