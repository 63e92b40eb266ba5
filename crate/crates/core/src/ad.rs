//! Forward-mode automatic differentiation on fixed-width dual numbers.
//!
//! The dynamics, aerodynamics, and power models are generic over [`Real`] so the
//! trajectory transcription can push [`Dual`] numbers through them and read exact
//! Jacobian columns back out. `Dual<N>` carries `N` derivative lanes at once, so a
//! block of N Jacobian columns costs a single evaluation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar abstraction over `f64` and [`Dual`].
///
/// Comparisons and branching are done on [`Real::value`]; this keeps piecewise
/// definitions (clamps, small-angle branches) consistent between plain and dual
/// evaluation.
pub trait Real:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + num_traits::Zero
    + num_traits::One
    + 'static
{
    fn from_f64(v: f64) -> Self;
    /// The underlying primal value.
    fn value(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    /// Arcsine with the argument clamped to `[-1, 1]`.
    fn asin_clamped(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn max(self, other: Self) -> Self {
        if other.value() > self.value() {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other.value() < self.value() {
            other
        } else {
            self
        }
    }
    fn clamp(self, lo: f64, hi: f64) -> Self {
        self.max(Self::from_f64(lo)).min(Self::from_f64(hi))
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn asin_clamped(self) -> Self {
        f64::asin(f64::clamp(self, -1.0, 1.0))
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Dual number with `N` simultaneous derivative lanes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<const N: usize> {
    pub re: f64,
    pub du: [f64; N],
}

impl<const N: usize> Dual<N> {
    #[inline]
    pub fn constant(re: f64) -> Self {
        Self { re, du: [0.0; N] }
    }

    /// A variable seeded with derivative 1 in the given lane.
    #[inline]
    pub fn seeded(re: f64, lane: usize) -> Self {
        let mut du = [0.0; N];
        du[lane] = 1.0;
        Self { re, du }
    }

    #[inline]
    pub fn deriv(&self, lane: usize) -> f64 {
        self.du[lane]
    }

    #[inline]
    fn map_unary(self, value: f64, slope: f64) -> Self {
        let mut du = [0.0; N];
        for (d, s) in du.iter_mut().zip(self.du.iter()) {
            *d = slope * s;
        }
        Self { re: value, du }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Dual<N> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        for (a, b) in self.du.iter_mut().zip(rhs.du.iter()) {
            *a += b;
        }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for Dual<N> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.re -= rhs.re;
        for (a, b) in self.du.iter_mut().zip(rhs.du.iter()) {
            *a -= b;
        }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut du = [0.0; N];
        for i in 0..N {
            du[i] = self.du[i] * rhs.re + self.re * rhs.du[i];
        }
        Self {
            re: self.re * rhs.re,
            du,
        }
    }
}

impl<const N: usize> MulAssign for Dual<N> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.re;
        let mut du = [0.0; N];
        for i in 0..N {
            du[i] = (self.du[i] - self.re * inv * rhs.du[i]) * inv;
        }
        Self {
            re: self.re * inv,
            du,
        }
    }
}

impl<const N: usize> DivAssign for Dual<N> {
    #[inline]
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.re = -self.re;
        for d in self.du.iter_mut() {
            *d = -*d;
        }
        self
    }
}

impl<const N: usize> num_traits::Zero for Dual<N> {
    #[inline]
    fn zero() -> Self {
        Self::constant(0.0)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.du.iter().all(|d| *d == 0.0)
    }
}

impl<const N: usize> num_traits::One for Dual<N> {
    #[inline]
    fn one() -> Self {
        Self::constant(1.0)
    }
}

impl<const N: usize> Real for Dual<N> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    #[inline]
    fn value(self) -> f64 {
        self.re
    }

    #[inline]
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.map_unary(s, c)
    }

    #[inline]
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.map_unary(c, -s)
    }

    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        (self.map_unary(s, c), self.map_unary(c, -s))
    }

    #[inline]
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        let slope = if r > 0.0 { 0.5 / r } else { 0.0 };
        self.map_unary(r, slope)
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.map_unary(e, e)
    }

    #[inline]
    fn ln(self) -> Self {
        self.map_unary(self.re.ln(), 1.0 / self.re)
    }

    #[inline]
    fn abs(self) -> Self {
        if self.re < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn atan2(self, x: Self) -> Self {
        let y = self;
        let denom = x.re * x.re + y.re * y.re;
        let mut du = [0.0; N];
        if denom > 0.0 {
            for i in 0..N {
                du[i] = (x.re * y.du[i] - y.re * x.du[i]) / denom;
            }
        }
        Self {
            re: y.re.atan2(x.re),
            du,
        }
    }

    #[inline]
    fn asin_clamped(self) -> Self {
        let xc = self.re.clamp(-1.0, 1.0);
        let denom_sq = (1.0 - xc * xc).max(1e-24);
        self.map_unary(xc.asin(), 1.0 / denom_sq.sqrt())
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        let v = self.re.powi(n);
        let slope = f64::from(n) * self.re.powi(n - 1);
        self.map_unary(v, slope)
    }
}
