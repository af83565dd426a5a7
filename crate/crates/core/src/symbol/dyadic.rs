//! Exact dyadic rationals `num / 2^k`, their Gaussian extension, and the
//! [`Scalar`] abstraction shared by exact and floating-point fields.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::Error;

/// An exact dyadic rational `num / 2^log2den`.
///
/// The representation is canonical: zero is `0 / 2^0`, and every other value
/// has an odd numerator unless the exponent is zero. Equality and hashing
/// are therefore structural.
///
/// Arithmetic panics on `i128` overflow; the `checked_*` methods return
/// `None` instead.
///
/// ```
/// use shearsub::Dyadic;
/// let a: Dyadic = "9/2^4".parse().unwrap();
/// let b = Dyadic::new(-1, 4);
/// assert_eq!((a + b).to_string(), "1/2^1");
/// assert_eq!(a * Dyadic::from(16), Dyadic::from(9));
/// ```
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i128,
    log2den: u32,
}

fn shl_exact(x: i128, s: u32) -> Option<i128> {
    if x == 0 {
        return Some(0);
    }
    if s >= 127 {
        return None;
    }
    let y = x << s;
    (y >> s == x).then_some(y)
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2den: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2den: 0 };

    /// `num / 2^log2den`, normalized.
    #[must_use]
    pub fn new(num: i128, log2den: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros().min(log2den);
        Dyadic { num: num >> tz, log2den: log2den - tz }
    }

    /// `2^k` for any integer `k`.
    #[must_use]
    pub fn pow2(k: i32) -> Self {
        Self::ONE.mul_pow2(k)
    }

    #[must_use]
    pub fn numerator(self) -> i128 {
        self.num
    }

    #[must_use]
    pub fn log2den(self) -> u32 {
        self.log2den
    }

    #[must_use]
    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    #[must_use]
    pub fn is_integer(self) -> bool {
        self.log2den == 0
    }

    /// The value as an integer, if it is one and fits.
    #[must_use]
    pub fn to_integer(self) -> Option<i64> {
        if self.log2den == 0 {
            i64::try_from(self.num).ok()
        } else {
            None
        }
    }

    #[must_use]
    pub fn abs(self) -> Self {
        Dyadic { num: self.num.abs(), log2den: self.log2den }
    }

    #[must_use]
    pub fn signum(self) -> i32 {
        self.num.signum() as i32
    }

    #[must_use]
    pub fn to_f64(self) -> f64 {
        self.num as f64 * 2f64.powi(-(self.log2den as i32))
    }

    /// The value as an exact fraction, if the denominator fits in `i128`.
    #[must_use]
    pub fn to_ratio(self) -> Option<Ratio<i128>> {
        (self.log2den < 127).then(|| Ratio::new(self.num, 1i128 << self.log2den))
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let e = self.log2den.max(rhs.log2den);
        let a = shl_exact(self.num, e - self.log2den)?;
        let b = shl_exact(rhs.num, e - rhs.log2den)?;
        Some(Self::new(a.checked_add(b)?, e))
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.checked_add(-rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let num = self.num.checked_mul(rhs.num)?;
        let e = self.log2den.checked_add(rhs.log2den)?;
        Some(Self::new(num, e))
    }

    /// Multiply by `2^k`.
    pub fn checked_mul_pow2(self, k: i32) -> Option<Self> {
        if self.num == 0 {
            return Some(self);
        }
        if k >= 0 {
            let k = k as u32;
            if self.log2den >= k {
                Some(Dyadic { num: self.num, log2den: self.log2den - k })
            } else {
                Some(Dyadic { num: shl_exact(self.num, k - self.log2den)?, log2den: 0 })
            }
        } else {
            Some(Self::new(self.num, self.log2den.checked_add(k.unsigned_abs())?))
        }
    }

    #[must_use]
    pub fn mul_pow2(self, k: i32) -> Self {
        self.checked_mul_pow2(k).expect("dyadic overflow")
    }

    /// Exact quotient, when it is again dyadic (the odd part of `rhs` must
    /// divide the numerator of `self`).
    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.num == 0 {
            return None;
        }
        let t = rhs.num.trailing_zeros();
        let odd = rhs.num >> t;
        if self.num % odd != 0 {
            return None;
        }
        let q = self.num / odd;
        let shift = i64::from(rhs.log2den) - i64::from(t) - i64::from(self.log2den);
        Dyadic::new(q, 0).checked_mul_pow2(i32::try_from(shift).ok()?)
    }

    /// Nonnegative integer power.
    #[must_use]
    pub fn pow(self, e: u32) -> Self {
        (0..e).fold(Self::ONE, |acc, _| acc * self)
    }
}

impl From<i128> for Dyadic {
    fn from(n: i128) -> Self {
        Dyadic::new(n, 0)
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::new(i128::from(n), 0)
    }
}

impl From<i32> for Dyadic {
    fn from(n: i32) -> Self {
        Dyadic::new(i128::from(n), 0)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2den: self.log2den }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        self.checked_add(rhs).expect("dyadic overflow")
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self.checked_sub(rhs).expect("dyadic overflow")
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        self.checked_mul(rhs).expect("dyadic overflow")
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dyadic {
    fn sub_assign(&mut self, rhs: Dyadic) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dyadic {
    fn mul_assign(&mut self, rhs: Dyadic) {
        *self = *self * rhs;
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.copied().sum()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).num.cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2den)
        }
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `a`, `a/2^k`, `a/b` with `b` a power of two, and finite
    /// decimals such as `-0.375`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let num: i128 = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim();
            if let Some(k) = d.strip_prefix("2^") {
                let k: u32 = k.parse().map_err(|_| bad())?;
                return Ok(Dyadic::new(num, k));
            }
            let den: i128 = d.parse().map_err(|_| bad())?;
            if den <= 0 || den.count_ones() != 1 {
                return Err(bad());
            }
            return Ok(Dyadic::new(num, den.trailing_zeros()));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let mut n: i128 = digits.parse().map_err(|_| bad())?;
            let d = frac.len() as u32;
            let five = 5i128.checked_pow(d).ok_or_else(bad)?;
            if n % five != 0 {
                return Err(bad());
            }
            n /= five;
            if negative {
                n = -n;
            }
            return Ok(Dyadic::new(n, d));
        }
        s.parse::<i128>().map(Dyadic::from).map_err(|_| bad())
    }
}

/// An exact element of `D[i]`, used to evaluate symbols at fourth roots of
/// unity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct GaussianDyadic {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl GaussianDyadic {
    pub const ZERO: GaussianDyadic = GaussianDyadic { re: Dyadic::ZERO, im: Dyadic::ZERO };
    pub const ONE: GaussianDyadic = GaussianDyadic { re: Dyadic::ONE, im: Dyadic::ZERO };
    pub const I: GaussianDyadic = GaussianDyadic { re: Dyadic::ZERO, im: Dyadic::ONE };

    #[must_use]
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        GaussianDyadic { re, im }
    }

    /// `i^k` for any integer `k`.
    #[must_use]
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::ONE,
            1 => Self::I,
            2 => -Self::ONE,
            _ => -Self::I,
        }
    }

    #[must_use]
    pub fn mul_i(self) -> Self {
        GaussianDyadic { re: -self.im, im: self.re }
    }

    #[must_use]
    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    #[must_use]
    pub fn scale(self, d: Dyadic) -> Self {
        GaussianDyadic { re: self.re * d, im: self.im * d }
    }
}

impl From<Dyadic> for GaussianDyadic {
    fn from(re: Dyadic) -> Self {
        GaussianDyadic { re, im: Dyadic::ZERO }
    }
}

impl Neg for GaussianDyadic {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianDyadic { re: -self.re, im: -self.im }
    }
}

impl Add for GaussianDyadic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianDyadic { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussianDyadic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianDyadic { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for GaussianDyadic {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GaussianDyadic {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl AddAssign for GaussianDyadic {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl fmt::Display for GaussianDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Coefficient type of a sampled field: exact [`Dyadic`] or `f64`.
pub trait Scalar:
    Copy
    + PartialEq
    + Default
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    fn from_dyadic(d: Dyadic) -> Self;
    fn to_f64(self) -> f64;
    fn is_zero(&self) -> bool;
    /// Text form used in field CSV files.
    fn to_text(&self) -> String;
    fn from_text(s: &str) -> Result<Self, Error>;

    fn zero() -> Self {
        Self::default()
    }
}

impl Scalar for Dyadic {
    const EXACT: bool = true;

    fn from_dyadic(d: Dyadic) -> Self {
        d
    }
    fn to_f64(self) -> f64 {
        Dyadic::to_f64(self)
    }
    fn is_zero(&self) -> bool {
        self.num == 0
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn from_text(s: &str) -> Result<Self, Error> {
        s.parse()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_dyadic(d: Dyadic) -> Self {
        d.to_f64()
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_text(&self) -> String {
        format!("{self:?}")
    }
    fn from_text(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Ok(v) = s.parse::<f64>() {
            return Ok(v);
        }
        s.parse::<Dyadic>().map(Dyadic::to_f64)
    }
}
