//! Second-order forward jets.
//!
//! A [`Jet2`] carries a value together with its first and second derivative
//! along a single input axis. Arithmetic on jets applies the first- and
//! second-order chain and product rules, so any expression built from these
//! combinators yields exact derivatives up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

/// Value plus first and second directional derivatives along one axis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 { v: 0.0, d1: 0.0, d2: 0.0 };

    #[inline]
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    /// Lift a constant: `c -> (c, 0, 0)`.
    #[inline]
    pub const fn constant(c: f64) -> Self {
        Self { v: c, d1: 0.0, d2: 0.0 }
    }

    /// Lift the active variable: `s -> (s, 1, 0)`.
    #[inline]
    pub const fn variable(s: f64) -> Self {
        Self { v: s, d1: 1.0, d2: 0.0 }
    }

    #[inline]
    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.v, c * self.d1, c * self.d2)
    }

    #[inline]
    pub fn square(self) -> Self {
        Self::new(
            self.v * self.v,
            2.0 * self.v * self.d1,
            2.0 * (self.v * self.d2 + self.d1 * self.d1),
        )
    }

    /// Apply a scalar function given `f(u)`, `f'(u)` and `f''(u)`.
    #[inline]
    pub fn compose(self, f: f64, df: f64, ddf: f64) -> Self {
        Self::new(f, df * self.d1, df * self.d2 + ddf * self.d1 * self.d1)
    }

    #[inline]
    pub fn tanh(self) -> Self {
        let f = self.v.tanh();
        let s = 1.0 - f * f;
        Self::new(f, s * self.d1, s * self.d2 - 2.0 * f * s * self.d1 * self.d1)
    }

    #[inline]
    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    #[inline]
    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s)
    }

    #[inline]
    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl From<f64> for Jet2 {
    fn from(c: f64) -> Self {
        Jet2::constant(c)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.v * o.d1 + self.d1 * o.v,
            self.v * o.d2 + 2.0 * self.d1 * o.d1 + self.d2 * o.v,
        )
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, c: f64) -> Jet2 {
        Jet2::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, c: f64) -> Jet2 {
        Jet2::new(self.v - c, self.d1, self.d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn tanh_of_seed_at_zero() {
        assert_eq!(Jet2::variable(0.0).tanh(), Jet2::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn square_of_seed() {
        assert_eq!(Jet2::variable(3.0).square(), Jet2::new(9.0, 6.0, 2.0));
    }

    #[test]
    fn lifting() {
        assert_eq!(Jet2::constant(4.5), Jet2::new(4.5, 0.0, 0.0));
        assert_eq!(Jet2::from(-1.0), Jet2::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn tanh_of_affine_matches_finite_differences() {
        // f(s) = tanh(3s + 1) at s = 0; central differences, h = 1e-5.
        let f = |s: f64| (3.0 * s + 1.0).tanh();
        let h = 1e-5;
        let fd1 = (f(h) - f(-h)) / (2.0 * h);
        let fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let j = (Jet2::variable(0.0) * 3.0 + 1.0).tanh();
        assert!(close(j.v, 0.761_594_155_955_764_9, 1e-15));
        assert!(close(j.d1, fd1, 1e-8), "{} vs {}", j.d1, fd1);
        assert!(close(j.d2, fd2, 1e-4), "{} vs {}", j.d2, fd2);
        // 3 (1 - tanh^2 1) and -18 tanh 1 (1 - tanh^2 1)
        assert!(close(j.d1, 1.259_923_024_842_078_3, 1e-14));
        assert!(close(j.d2, -5.757_300_076_043_021, 1e-13), "{}", j.d2);
    }

    #[test]
    fn mul_product_rule() {
        let u = Jet2::new(2.0, 3.0, 5.0);
        let w = Jet2::new(7.0, 11.0, 13.0);
        let p = u * w;
        assert_eq!(p, Jet2::new(14.0, 2.0 * 11.0 + 3.0 * 7.0, 2.0 * 13.0 + 2.0 * 3.0 * 11.0 + 5.0 * 7.0));
    }

    proptest! {
        #[test]
        fn linearity(
            a in -3.0f64..3.0, b in -3.0f64..3.0, s in -2.0f64..2.0,
        ) {
            let x = Jet2::variable(s);
            let f = (x * 1.5 + 0.2).tanh();
            let g = (x * x).sin();
            let lhs = f.scale(a) + g.scale(b);
            let rhs = Jet2::new(a * f.v + b * g.v, a * f.d1 + b * g.d1, a * f.d2 + b * g.d2);
            prop_assert!(close(lhs.v, rhs.v, 1e-14));
            prop_assert!(close(lhs.d1, rhs.d1, 1e-14));
            prop_assert!(close(lhs.d2, rhs.d2, 1e-14));
        }

        #[test]
        fn sub_and_neg_agree(v in -5.0f64..5.0, d in -5.0f64..5.0) {
            let u = Jet2::new(v, d, d * 0.5);
            let w = Jet2::new(d, v, 1.0);
            prop_assert_eq!(u - w, u + (-w));
        }
    }
}
