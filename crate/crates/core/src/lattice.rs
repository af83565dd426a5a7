//! Branch words, the dilation and refinement matrices, cosets of the
//! dilated lattice, slope geometry and the direction planner.
//!
//! ```text
//!   W0 = | 4  0 |    W1 = | 4 -4 |    U = | 1 -2 |    V = | 1 -1 |
//!        | 0  2 |         | 0  2 |        | 0  1 |        | 0  1 |
//!
//!   W1 = U W0 = W0 V,     W_eps = W_{eps_n} ... W_{eps_1}
//! ```

use std::collections::HashSet;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::symbol::Dyadic;

type Q = Ratio<i128>;

/// A finite 0/1 word selecting one branch of the direction tree.
///
/// Bit `j` (1-based, as in `eps_j`) is the choice made at step `j`, so
/// the word `01` applies the axis-aligned step first and the sheared step
/// second.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EpsWord {
    bits: Vec<u8>,
}

impl EpsWord {
    #[must_use]
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from bits, each of which must be 0 or 1.
    pub fn new(bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("word bit {b} is not 0 or 1")));
        }
        Ok(EpsWord { bits: bits.to_vec() })
    }

    #[must_use]
    pub fn zeros(n: usize) -> Self {
        EpsWord { bits: vec![0; n] }
    }

    #[must_use]
    pub fn ones(n: usize) -> Self {
        EpsWord { bits: vec![1; n] }
    }

    /// The word of length `n` whose binary value is `value`.
    #[must_use]
    pub fn from_binary_value(value: u128, n: usize) -> Self {
        EpsWord { bits: (0..n).map(|j| u8::from(j < 128 && (value >> j) & 1 == 1)).collect() }
    }

    /// All `2^n` words of length `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = EpsWord> {
        (0u128..1 << n).map(move |v| EpsWord {
            bits: (0..n).map(|j| ((v >> (n - 1 - j)) & 1) as u8).collect(),
        })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[must_use]
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// `(eps)_2 = sum eps_{j+1} 2^j`.
    ///
    /// # Panics
    /// If the word is longer than 127 bits.
    #[must_use]
    pub fn binary_value(&self) -> u128 {
        assert!(self.bits.len() <= 127, "word too long for binary_value");
        self.bits.iter().enumerate().map(|(j, &b)| u128::from(b) << j).sum()
    }

    /// `[eps]_2 = sum eps_j 2^-j`.
    #[must_use]
    pub fn dyadic_value(&self) -> Dyadic {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(j, _)| Dyadic::new(1, j as u32 + 1))
            .sum()
    }

    #[must_use]
    pub fn reverse(&self) -> Self {
        EpsWord { bits: self.bits.iter().rev().copied().collect() }
    }

    /// The first `k` bits.
    #[must_use]
    pub fn project(&self, k: usize) -> Self {
        EpsWord { bits: self.bits[..k.min(self.bits.len())].to_vec() }
    }

    /// The word extended by one more step `eta`.
    #[must_use]
    pub fn child(&self, eta: u8) -> Self {
        debug_assert!(eta <= 1);
        let mut bits = self.bits.clone();
        bits.push(eta);
        EpsWord { bits }
    }

    /// Split off the last step.
    #[must_use]
    pub fn split_last(&self) -> Option<(EpsWord, u8)> {
        let (&last, rest) = self.bits.split_last()?;
        Some((EpsWord { bits: rest.to_vec() }, last))
    }

    /// Split off the first step.
    #[must_use]
    pub fn split_first(&self) -> Option<(u8, EpsWord)> {
        let (&first, rest) = self.bits.split_first()?;
        Some((first, EpsWord { bits: rest.to_vec() }))
    }
}

impl fmt::Display for EpsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for EpsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpsWord({self})")
    }
}

impl FromStr for EpsWord {
    type Err = Error;

    /// Parses strings matching `[01]*`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Parse(format!("word {s:?} must match [01]*"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(EpsWord { bits })
    }
}

/// An exact 2×2 matrix of dyadic rationals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    pub m: [[Dyadic; 2]; 2],
}

impl Mat2 {
    #[must_use]
    pub fn new(a: Dyadic, b: Dyadic, c: Dyadic, d: Dyadic) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    #[must_use]
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    #[must_use]
    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    #[must_use]
    pub fn det(&self) -> Dyadic {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// The inverse, when all of its entries are dyadic.
    #[must_use]
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        let [[a, b], [c, d]] = self.m;
        Some(Mat2::new(
            d.checked_div(det)?,
            (-b).checked_div(det)?,
            (-c).checked_div(det)?,
            a.checked_div(det)?,
        ))
    }

    #[must_use]
    pub fn pow(&self, e: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    #[must_use]
    pub fn is_integer(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_integer())
    }

    /// Integer entries and determinant ±1.
    #[must_use]
    pub fn is_unimodular(&self) -> bool {
        self.is_integer() && self.det().abs() == Dyadic::ONE
    }

    #[must_use]
    pub fn apply(&self, p: (Dyadic, Dyadic)) -> (Dyadic, Dyadic) {
        (self.m[0][0] * p.0 + self.m[0][1] * p.1, self.m[1][0] * p.0 + self.m[1][1] * p.1)
    }

    /// The same matrix over `i64`, if all entries are integers that fit.
    #[must_use]
    pub fn to_int(&self) -> Option<IMat2> {
        let [[a, b], [c, d]] = self.m;
        Some(IMat2 { m: [[a.to_integer()?, b.to_integer()?], [c.to_integer()?, d.to_integer()?]] })
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2 {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

/// An integer 2×2 matrix acting on lattice points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IMat2 {
    pub m: [[i64; 2]; 2],
}

impl IMat2 {
    #[must_use]
    pub fn apply(&self, p: (i64, i64)) -> (i64, i64) {
        (self.m[0][0] * p.0 + self.m[0][1] * p.1, self.m[1][0] * p.0 + self.m[1][1] * p.1)
    }

    #[must_use]
    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Canonical representative of `p` modulo `W Z²`, for upper-triangular
    /// `W = [[a, b], [0, d]]` with `a, d > 0`. The result lies in
    /// `{0..a-1} × {0..d-1}`.
    #[must_use]
    pub fn reduce(&self, p: (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.m;
        debug_assert!(c == 0 && a > 0 && d > 0, "reduce needs an upper-triangular lattice basis");
        let k = p.1.div_euclid(d);
        ((p.0 - b * k).rem_euclid(a), p.1 - d * k)
    }

    /// Solve `W x = p` for integer `x`, if `p ∈ W Z²` (upper triangular `W`).
    #[must_use]
    pub fn preimage(&self, p: (i64, i64)) -> Option<(i64, i64)> {
        let [[a, b], [_, d]] = self.m;
        if p.1 % d != 0 {
            return None;
        }
        let y = p.1 / d;
        let rest = p.0 - b * y;
        (rest % a == 0).then_some((rest / a, y))
    }
}

/// `W_eta` for a single step.
#[must_use]
pub fn step_dilation(eta: u8) -> Mat2 {
    if eta == 0 {
        Mat2::from_ints(4, 0, 0, 2)
    } else {
        Mat2::from_ints(4, -4, 0, 2)
    }
}

/// `W_eta` over the integers.
#[must_use]
pub fn step_dilation_int(eta: u8) -> IMat2 {
    IMat2 { m: if eta == 0 { [[4, 0], [0, 2]] } else { [[4, -4], [0, 2]] } }
}

/// The shear `U = [[1,-2],[0,1]]`.
#[must_use]
pub fn shear_u() -> Mat2 {
    Mat2::from_ints(1, -2, 0, 1)
}

/// The shear `V = [[1,-1],[0,1]]`.
#[must_use]
pub fn shear_v() -> Mat2 {
    Mat2::from_ints(1, -1, 0, 1)
}

/// `M_k = [[1/4, k/2], [0, 1/2]]`.
#[must_use]
pub fn shear_refinement(k: i64) -> Mat2 {
    Mat2::new(Dyadic::new(1, 2), Dyadic::new(i128::from(k), 1), Dyadic::ZERO, Dyadic::new(1, 1))
}

/// `W_eps` together with its shear factors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dilation {
    /// `W_eps = W_{eps_n} ... W_{eps_1}`.
    pub w: Mat2,
    /// `U_eps` with `W_eps = U_eps W0^n`.
    pub u: Mat2,
    /// `V_eps` with `W_eps = W0^n V_eps`.
    pub v: Mat2,
}

/// `W_eps` by direct product, with `U_eps` and `V_eps`.
///
/// ```
/// use shearsub::lattice::{dilation_matrix, Mat2};
/// let d = dilation_matrix(&"01".parse().unwrap());
/// assert_eq!(d.w, Mat2::from_ints(16, -8, 0, 4));
/// ```
#[must_use]
pub fn dilation_matrix(eps: &EpsWord) -> Dilation {
    let w = eps.bits().iter().fold(Mat2::identity(), |acc, &b| step_dilation(b) * acc);
    let n = eps.len() as i32;
    let frac = eps.dyadic_value();
    let u = Mat2::new(Dyadic::ONE, -frac.mul_pow2(n + 1), Dyadic::ZERO, Dyadic::ONE);
    let v = Mat2::new(Dyadic::ONE, -frac.mul_pow2(1), Dyadic::ZERO, Dyadic::ONE);
    debug_assert_eq!(w, dilation_closed_form(eps));
    Dilation { w, u, v }
}

/// `[[4^n, -4^n·2·[eps]_2], [0, 2^n]]`.
#[must_use]
pub fn dilation_closed_form(eps: &EpsWord) -> Mat2 {
    let n = eps.len() as i32;
    Mat2::new(
        Dyadic::pow2(2 * n),
        -eps.dyadic_value().mul_pow2(2 * n + 1),
        Dyadic::ZERO,
        Dyadic::pow2(n),
    )
}

/// `W_eps` over the integers.
#[must_use]
pub fn dilation_int(eps: &EpsWord) -> IMat2 {
    dilation_closed_form(eps).to_int().expect("dilation entries fit in i64")
}

/// `M_eps = M_{eps_n} ... M_{eps_1}` by direct product.
///
/// This is the inverse of `W` of the reversed word, not of `W_eps` itself.
#[must_use]
pub fn refinement_matrix(eps: &EpsWord) -> Mat2 {
    eps.bits().iter().fold(Mat2::identity(), |acc, &b| shear_refinement(i64::from(b)) * acc)
}

/// `[[4^-n, 4^-n·2·(eps)_2], [0, 2^-n]]`.
#[must_use]
pub fn refinement_closed_form(eps: &EpsWord) -> Mat2 {
    let n = eps.len() as i32;
    let value = Dyadic::from(i128::try_from(eps.binary_value()).expect("word too long"));
    Mat2::new(Dyadic::pow2(-2 * n), value.mul_pow2(1 - 2 * n), Dyadic::ZERO, Dyadic::pow2(-n))
}

/// Canonical representatives of `Z² / W_{r(eps)} Z²`: the box
/// `{0..4^n-1} × {0..2^n-1}`, listed by first coordinate then second.
///
/// The box is a complete residue system for every upper-triangular basis
/// with diagonal `(4^n, 2^n)`, so it also serves `W_eps`.
#[must_use]
pub fn coset_representatives(eps: &EpsWord) -> Vec<(i64, i64)> {
    let n = eps.len() as u32;
    let (a, d) = (4i64.pow(n), 2i64.pow(n));
    (0..a).flat_map(|x| (0..d).map(move |y| (x, y))).collect()
}

/// The seven nonzero classes of one step.
#[must_use]
pub fn nonzero_step_cosets() -> Vec<(i64, i64)> {
    coset_representatives(&EpsWord::zeros(1)).into_iter().filter(|&g| g != (0, 0)).collect()
}

/// Checks that `M_k` maps `4^-j Z × 2^-j Z` bijectively onto
/// `4^-(j+1) Z × 2^-(j+1) Z` on the integer window `[-radius, radius]²`
/// (in grid coordinates of each level), using exact arithmetic.
#[must_use]
pub fn check_lattice_refinement(k: i64, level: u32, radius: i64) -> bool {
    let m = shear_refinement(k);
    let Some(m_inv) = m.inverse() else { return false };
    let j = level as i32;
    let coarse = |x: i64, y: i64| (Dyadic::from(x).mul_pow2(-2 * j), Dyadic::from(y).mul_pow2(-j));
    let fine = |x: i64, y: i64| (Dyadic::from(x).mul_pow2(-2 * (j + 1)), Dyadic::from(y).mul_pow2(-(j + 1)));
    let to_grid = |p: (Dyadic, Dyadic), j: i32| -> Option<(i64, i64)> {
        Some((p.0.mul_pow2(2 * j).to_integer()?, p.1.mul_pow2(j).to_integer()?))
    };
    let mut images = HashSet::new();
    for x in -radius..=radius {
        for y in -radius..=radius {
            match to_grid(m.apply(coarse(x, y)), j + 1) {
                Some(q) if images.insert(q) => {}
                _ => return false,
            }
        }
    }
    for x in -radius..=radius {
        for y in -radius..=radius {
            let Some(pre) = to_grid(m_inv.apply(fine(x, y)), j) else { return false };
            if to_grid(m.apply(coarse(pre.0, pre.1)), j + 1) != Some((x, y)) {
                return false;
            }
        }
    }
    true
}

/// A slope in `[0, ∞]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Slope {
    Finite(Ratio<i128>),
    Infinite,
}

impl Slope {
    /// A finite slope; negative values are rejected.
    pub fn finite(r: Ratio<i128>) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidArgument(format!("slope {r} is negative")));
        }
        Ok(Slope::Finite(r))
    }

    #[must_use]
    pub fn integer(n: i128) -> Self {
        Slope::Finite(Ratio::from_integer(n))
    }

    #[must_use]
    pub fn to_f64(self) -> f64 {
        match self {
            Slope::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Slope::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{r}"),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Slope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Slope::Infinite),
            other => Slope::finite(parse_rational(other)?),
        }
    }
}

/// Parses `a`, `a/b`, finite decimals and scientific notation (`1e-3`)
/// into an exact fraction.
pub fn parse_rational(s: &str) -> Result<Ratio<i128>> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let negative = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    let mut num: i128 = digits.parse().map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    let ten = |e: u32| 10i128.checked_pow(e).ok_or_else(bad);
    if scale >= 0 {
        Ok(Ratio::from_integer(num.checked_mul(ten(scale as u32)?).ok_or_else(bad)?))
    } else {
        Ok(Ratio::new(num, ten(scale.unsigned_abs())?))
    }
}

/// The slope `s(L, eps)` of a line of slope `s` after applying `M_eps`.
///
/// ```
/// use shearsub::lattice::{slope_after, Slope};
/// assert_eq!(slope_after(Slope::Infinite, &"1".parse().unwrap()), Slope::integer(1));
/// assert_eq!(slope_after(Slope::integer(1), &"0".parse().unwrap()), Slope::integer(2));
/// ```
#[must_use]
pub fn slope_after(s: Slope, eps: &EpsWord) -> Slope {
    let n = eps.len() as u32;
    let value = Q::from_integer(i128::try_from(eps.binary_value()).expect("word too long"));
    match s {
        Slope::Finite(s) if s.is_zero() => Slope::Finite(Q::zero()),
        Slope::Finite(s) => {
            Slope::Finite(Q::from_integer(1i128 << n) / (s.recip() + value * Q::from_integer(2)))
        }
        Slope::Infinite if value.is_zero() => Slope::Infinite,
        Slope::Infinite => Slope::Finite(Q::from_integer(1i128 << (n - 1)) / value),
    }
}

/// Smallest integer `k` with `2^k ≥ r`, for `r > 0`.
fn ceil_log2(r: Q) -> i64 {
    let two = Q::from_integer(2);
    let mut k = 0i64;
    let mut p = Q::one();
    if r > p {
        while p < r {
            p *= two;
            k += 1;
        }
    } else {
        while p / two >= r {
            p /= two;
            k -= 1;
        }
    }
    k
}

/// Finds a word steering a line of slope `s` to within `delta` of `t`.
///
/// The word is built from the truncated binary expansion of `1/t`
/// (corrected by `1/(2^n s)`), trying lengths `n = 1, 2, ...` up to a cap
/// of `⌈log2(8/δ')⌉ + 4` plus `⌈log2(1/s)⌉` for finite `s < 1`, where
/// `δ' = δ / (t (t + δ))` is the tolerance in the reciprocal. Every
/// returned word has been re-checked with [`slope_after`]. For `t = ∞`
/// the criterion is a slope above `1/δ`.
///
/// ```
/// use shearsub::lattice::{plan_direction, Slope};
/// use num_rational::Ratio;
/// let eps = plan_direction(Slope::Infinite, Slope::integer(2), Ratio::new(1, 1_000_000)).unwrap();
/// assert_eq!(eps.to_string(), "10");
/// ```
pub fn plan_direction(s: Slope, t: Slope, delta: Ratio<i128>) -> Result<EpsWord> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument(format!("tolerance {delta} must be positive")));
    }
    if let Slope::Finite(s) = s {
        if !s.is_positive() {
            return Err(Error::InvalidArgument("source slope must be positive".into()));
        }
    }
    let half = Q::new(1, 2);
    let (target_recip, tol) = match t {
        Slope::Finite(t) if t < half => {
            return Err(Error::Unreachable(format!("target slope {t} is below 1/2")));
        }
        Slope::Finite(t) => (t.recip(), delta / (t * (t + delta))),
        Slope::Infinite => (Q::zero(), delta),
    };
    let mut n_max = ceil_log2(Q::from_integer(8) / tol) + 4;
    let correction = match s {
        Slope::Finite(s) => {
            n_max += ceil_log2(s.recip()).max(0);
            (Q::from_integer(2) * s).recip()
        }
        Slope::Infinite => Q::zero(),
    };
    let accept = |slope: Slope| match (t, slope) {
        (Slope::Infinite, Slope::Infinite) => true,
        (Slope::Infinite, Slope::Finite(v)) => v > delta.recip(),
        (Slope::Finite(t), Slope::Finite(v)) => (v - t).abs() < delta,
        (Slope::Finite(_), Slope::Infinite) => false,
    };
    for n in 1..=n_max.min(120) as u32 {
        let top = Q::from_integer((1i128 << n) - 1);
        let center = Q::from_integer(1i128 << (n - 1)) * target_recip - correction;
        let clamp = |q: Q| q.max(Q::zero()).min(top).to_integer();
        let mut candidates = vec![clamp(center.round()), clamp(center.floor()), clamp(center.ceil())];
        candidates.dedup();
        for value in candidates {
            let eps = EpsWord::from_binary_value(value as u128, n as usize);
            if accept(slope_after(s, &eps)) {
                return Ok(eps);
            }
        }
    }
    Err(Error::Unreachable(format!("no word of length ≤ {n_max} reaches slope {t} within {delta}")))
}
