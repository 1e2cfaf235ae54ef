//! A binary floating-point value with an unbounded exponent.
//!
//! Elementary symmetric polynomials of long or steeply decaying spectra leave the
//! range of `f64` long before their ratios do (e.g. `e_k(1, q, ..., q^63)` with
//! `q = 0.1` is about `10^{-k(k-1)/2}`). [`ExtFloat`] keeps a mantissa in
//! `[0.5, 1)` and a separate `i64` exponent so these coefficients can be stored
//! and divided without underflow.

use std::cmp::Ordering;
use std::fmt;

/// `mant * 2^exp` with `|mant|` in `[0.5, 1)`, or exactly zero.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtFloat {
    mant: f64,
    exp: i64,
}

/// Exact power of two for `e` in the normal exponent range.
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Splits a finite nonzero `x` into `(m, e)` with `x = m * 2^e`, `|m|` in `[0.5, 1)`.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal
        let (m, e) = frexp(x * pow2(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (m, biased - 1022)
}

/// Largest power of two not exceeding a positive finite `x`.
pub(crate) fn pow2_floor(x: f64) -> f64 {
    let (_, e) = frexp(x);
    ldexp(0.5, e)
}

fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 {
        return m;
    }
    if e > 1100 {
        return m.signum() * f64::INFINITY;
    }
    if e < -1100 {
        return 0.0 * m.signum();
    }
    let half = e / 2;
    m * pow2(half) * pow2(e - half)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp: 0 };
    pub const ONE: ExtFloat = ExtFloat { mant: 0.5, exp: 1 };

    fn normalized(mant: f64, exp: i64) -> Self {
        if mant == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mant);
        ExtFloat {
            mant: m,
            exp: exp + e,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(
            x.is_finite(),
            "ExtFloat::from_f64 requires a finite value, got {x}"
        );
        Self::normalized(x, 0)
    }

    /// Nearest `f64`, saturating to zero or infinity outside the double range.
    pub fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    pub fn is_positive(self) -> bool {
        self.mant > 0.0
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(self) -> f64 {
        if self.mant == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self.mul(Self::from_f64(x))
    }

    pub fn div(self, other: Self) -> Self {
        assert!(!other.is_zero(), "ExtFloat division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.mant / other.mant, self.exp - other.exp)
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = hi.exp - lo.exp;
        if shift > 60 {
            return hi;
        }
        Self::normalized(hi.mant + lo.mant * pow2(-shift), hi.exp)
    }

    /// Ratio `self / other` as an `f64`.
    pub fn ratio(self, other: Self) -> f64 {
        self.div(other).to_f64()
    }

    /// `x^n` by repeated squaring, without intermediate overflow.
    pub fn powi(x: f64, mut n: u64) -> Self {
        let mut base = Self::from_f64(x);
        let mut acc = Self::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }
}

impl Default for ExtFloat {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let sa = self.mant.partial_cmp(&0.0)?;
        let sb = other.mant.partial_cmp(&0.0)?;
        if sa != sb || sa == Ordering::Equal {
            return Some(sa.cmp(&sb));
        }
        let by_exp = self.exp.cmp(&other.exp);
        let ord = if by_exp == Ordering::Equal {
            self.mant.partial_cmp(&other.mant)?
        } else if sa == Ordering::Greater {
            by_exp
        } else {
            by_exp.reverse()
        };
        Some(ord)
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * 2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v != 0.0 && v.is_finite() || self.is_zero() {
            return write!(f, "{v:e}");
        }
        // outside double range: print via base-10 logarithm
        let log10 = self.ln() / std::f64::consts::LN_10;
        let e10 = log10.floor();
        let sign = if self.mant < 0.0 { "-" } else { "" };
        write!(f, "{sign}{}e{}", 10f64.powf(log10 - e10), e10 as i64)
    }
}
