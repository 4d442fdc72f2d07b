//! Forward-mode dual numbers, nestable to propagate higher-order jets.
//!
//! `Dual<T>` carries a value and one directional-derivative slot. Because
//! `Dual<T>` implements [`Real`] whenever `T` does, duals nest:
//! `Dual<Dual<f64>>` propagates second derivatives, `Dual<Dual<Dual<f64>>>`
//! third. The jet-lift machinery ([`crate::jet`]) relies on exactly that
//! tower, one nesting level per derivative order.
//!
//! Comparison semantics: `PartialEq` and `PartialOrd` look at the value part
//! only, so branching code (domain checks, `max`, interval search) behaves
//! identically whether it runs on plain floats or on duals. This is the
//! usual forward-mode convention; it does mean `a == b` ignores derivative
//! slots.

use crate::real::Real;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

/// Value plus one derivative slot: `re + du * eps` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dual<T> {
    /// Value part.
    pub re: T,
    /// Derivative part.
    pub du: T,
}

impl<T: Float> Dual<T> {
    #[inline]
    pub fn new(re: T, du: T) -> Self {
        Dual { re, du }
    }

    /// Lift a constant: derivative slot zero.
    #[inline]
    pub fn constant(re: T) -> Self {
        Dual { re, du: T::zero() }
    }

    /// Seed a variable: derivative slot one.
    #[inline]
    pub fn variable(re: T) -> Self {
        Dual { re, du: T::one() }
    }
}

impl<T: fmt::Display> fmt::Display for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {{{}}}eps)", self.re, self.du)
    }
}

// ---- comparisons: value part only ----

impl<T: Float> PartialEq for Dual<T> {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re
    }
}

impl<T: Float> PartialOrd for Dual<T> {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

// ---- arithmetic ----

impl<T: Float> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.du)
    }
}

impl<T: Float> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.du + o.du)
    }
}

impl<T: Float> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.du - o.du)
    }
}

impl<T: Float> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.du * o.re + self.re * o.du)
    }
}

impl<T: Float> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        Dual::new(
            self.re / o.re,
            (self.du * o.re - self.re * o.du) / (o.re * o.re),
        )
    }
}

impl<T: Float> Rem for Dual<T> {
    type Output = Self;
    #[inline]
    fn rem(self, o: Self) -> Self {
        // a - b * trunc(a/b); trunc has zero derivative a.e.
        let q = (self.re / o.re).trunc();
        Dual::new(self.re % o.re, self.du - o.du * q)
    }
}

macro_rules! assign_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<T: Float> $trait for Dual<T> {
            #[inline]
            fn $method(&mut self, o: Self) {
                *self = *self $op o;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

// ---- num-traits tower ----

impl<T: Float> Zero for Dual<T> {
    #[inline]
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.re.is_zero()
    }
}

impl<T: Float> One for Dual<T> {
    #[inline]
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Float> Num for Dual<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Dual::constant)
    }
}

impl<T: Float> ToPrimitive for Dual<T> {
    fn to_i64(&self) -> Option<i64> {
        self.re.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.re.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.re.to_f64()
    }
}

impl<T: Float> NumCast for Dual<T> {
    fn from<U: ToPrimitive>(n: U) -> Option<Self> {
        T::from(n).map(Dual::constant)
    }
}

impl<T: Float + FromPrimitive> FromPrimitive for Dual<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Dual::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Dual::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Dual::constant)
    }
}

impl<T: Float + FloatConst> FloatConst for Dual<T> {
    fn E() -> Self {
        Dual::constant(T::E())
    }
    fn FRAC_1_PI() -> Self {
        Dual::constant(T::FRAC_1_PI())
    }
    fn FRAC_1_SQRT_2() -> Self {
        Dual::constant(T::FRAC_1_SQRT_2())
    }
    fn FRAC_2_PI() -> Self {
        Dual::constant(T::FRAC_2_PI())
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Dual::constant(T::FRAC_2_SQRT_PI())
    }
    fn FRAC_PI_2() -> Self {
        Dual::constant(T::FRAC_PI_2())
    }
    fn FRAC_PI_3() -> Self {
        Dual::constant(T::FRAC_PI_3())
    }
    fn FRAC_PI_4() -> Self {
        Dual::constant(T::FRAC_PI_4())
    }
    fn FRAC_PI_6() -> Self {
        Dual::constant(T::FRAC_PI_6())
    }
    fn FRAC_PI_8() -> Self {
        Dual::constant(T::FRAC_PI_8())
    }
    fn LN_10() -> Self {
        Dual::constant(T::LN_10())
    }
    fn LN_2() -> Self {
        Dual::constant(T::LN_2())
    }
    fn LOG10_E() -> Self {
        Dual::constant(T::LOG10_E())
    }
    fn LOG2_E() -> Self {
        Dual::constant(T::LOG2_E())
    }
    fn PI() -> Self {
        Dual::constant(T::PI())
    }
    fn SQRT_2() -> Self {
        Dual::constant(T::SQRT_2())
    }
}

impl<T: Float> Float for Dual<T> {
    fn nan() -> Self {
        Dual::constant(T::nan())
    }
    fn infinity() -> Self {
        Dual::constant(T::infinity())
    }
    fn neg_infinity() -> Self {
        Dual::constant(T::neg_infinity())
    }
    fn neg_zero() -> Self {
        Dual::constant(T::neg_zero())
    }
    fn min_value() -> Self {
        Dual::constant(T::min_value())
    }
    fn min_positive_value() -> Self {
        Dual::constant(T::min_positive_value())
    }
    fn max_value() -> Self {
        Dual::constant(T::max_value())
    }

    fn is_nan(self) -> bool {
        self.re.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.re.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite()
    }
    fn is_normal(self) -> bool {
        self.re.is_normal()
    }
    fn classify(self) -> std::num::FpCategory {
        self.re.classify()
    }

    fn floor(self) -> Self {
        Dual::constant(self.re.floor())
    }
    fn ceil(self) -> Self {
        Dual::constant(self.re.ceil())
    }
    fn round(self) -> Self {
        Dual::constant(self.re.round())
    }
    fn trunc(self) -> Self {
        Dual::constant(self.re.trunc())
    }
    fn fract(self) -> Self {
        // fract = x - trunc(x): unit derivative away from integers.
        Dual::new(self.re.fract(), self.du)
    }

    fn abs(self) -> Self {
        if self.re < T::zero() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Dual::constant(self.re.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.re.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.re.is_sign_negative()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Dual::new(self.re.recip(), -self.du / (self.re * self.re))
    }

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::one(),
            n if n < 0 => self.powi(-n).recip(),
            _ => {
                let mut acc = self;
                for _ in 1..n {
                    acc = acc * self;
                }
                acc
            }
        }
    }

    fn powf(self, p: Self) -> Self {
        let v = self.re.powf(p.re);
        // d(x^p) = p x^(p-1) dx + x^p ln(x) dp; second term only when the
        // exponent itself carries a derivative.
        let mut du = p.re * self.re.powf(p.re - T::one()) * self.du;
        if !p.du.is_zero() {
            du = du + v * self.re.ln() * p.du;
        }
        Dual::new(v, du)
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / ((s + s).max(T::min_positive_value())))
    }
    fn cbrt(self) -> Self {
        let c = self.re.cbrt();
        let three = T::one() + T::one() + T::one();
        Dual::new(c, self.du / (three * c * c))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }
    fn exp2(self) -> Self {
        let e = self.re.exp2();
        Dual::new(e, self.du * e * T::from(std::f64::consts::LN_2).unwrap())
    }
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        Dual::new(
            self.re.log2(),
            self.du / (self.re * T::from(std::f64::consts::LN_2).unwrap()),
        )
    }
    fn log10(self) -> Self {
        Dual::new(
            self.re.log10(),
            self.du / (self.re * T::from(std::f64::consts::LN_10).unwrap()),
        )
    }
    fn exp_m1(self) -> Self {
        Dual::new(self.re.exp_m1(), self.du * self.re.exp())
    }
    fn ln_1p(self) -> Self {
        Dual::new(self.re.ln_1p(), self.du / (T::one() + self.re))
    }

    fn max(self, other: Self) -> Self {
        if self.re >= other.re {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self.re <= other.re {
            self
        } else {
            other
        }
    }
    #[allow(deprecated)]
    fn abs_sub(self, other: Self) -> Self {
        if self.re > other.re {
            self - other
        } else {
            Self::zero()
        }
    }

    fn hypot(self, other: Self) -> Self {
        let h = self.re.hypot(other.re);
        Dual::new(h, (self.re * self.du + other.re * other.du) / h)
    }

    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.du * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -self.du * self.re.sin())
    }
    fn tan(self) -> Self {
        let t = self.re.tan();
        Dual::new(t, self.du * (T::one() + t * t))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn asin(self) -> Self {
        Dual::new(
            self.re.asin(),
            self.du / (T::one() - self.re * self.re).sqrt(),
        )
    }
    fn acos(self) -> Self {
        Dual::new(
            self.re.acos(),
            -self.du / (T::one() - self.re * self.re).sqrt(),
        )
    }
    fn atan(self) -> Self {
        Dual::new(self.re.atan(), self.du / (T::one() + self.re * self.re))
    }
    fn atan2(self, other: Self) -> Self {
        // self = y, other = x
        let denom = self.re * self.re + other.re * other.re;
        Dual::new(
            self.re.atan2(other.re),
            (other.re * self.du - self.re * other.du) / denom,
        )
    }

    fn sinh(self) -> Self {
        Dual::new(self.re.sinh(), self.du * self.re.cosh())
    }
    fn cosh(self) -> Self {
        Dual::new(self.re.cosh(), self.du * self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        Dual::new(t, self.du * (T::one() - t * t))
    }
    fn asinh(self) -> Self {
        Dual::new(
            self.re.asinh(),
            self.du / (self.re * self.re + T::one()).sqrt(),
        )
    }
    fn acosh(self) -> Self {
        Dual::new(
            self.re.acosh(),
            self.du / ((self.re * self.re - T::one()).sqrt()),
        )
    }
    fn atanh(self) -> Self {
        Dual::new(self.re.atanh(), self.du / (T::one() - self.re * self.re))
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        self.re.integer_decode()
    }
}

impl<T: Real> Real for Dual<T> {
    #[inline]
    fn approx_f64(self) -> f64 {
        self.re.approx_f64()
    }
}

/// First-order duals over `f64`.
pub type D1 = Dual<f64>;
/// Second-order nesting.
pub type D2 = Dual<Dual<f64>>;
/// Third-order nesting.
pub type D3 = Dual<Dual<Dual<f64>>>;
