//! Concrete masks: the four-point Deslauriers–Dubuc rule, cardinal
//! B-spline masks, their tensor pairs for the two dilations, and the mask
//! JSON format.
//!
//! A pair is built from two univariate masks `b1, b2` as
//!
//! ```text
//!   a0(x, y) = (b1 ↑ b1)(x) · b2(y)       // x is dilated by 4, y by 2
//!   a1(α)    = a0(U α)                    // the sheared rule
//! ```
//!
//! where `(b ↑ b)(m) = Σ_k b(k) b(m - 2k)` is two binary steps folded into
//! one quaternary step.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::step_dilation_int;
use crate::symbol::{Dyadic, Exp, LaurentPoly};

/// A finitely supported univariate mask.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Mask1D {
    terms: BTreeMap<i64, Dyadic>,
}

impl Mask1D {
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<Dyadic>,
    {
        let mut m = Mask1D::default();
        for (k, c) in terms {
            let c = c.into();
            let v = m.get(k) + c;
            if v.is_zero() {
                m.terms.remove(&k);
            } else {
                m.terms.insert(k, v);
            }
        }
        m
    }

    #[must_use]
    pub fn get(&self, k: i64) -> Dyadic {
        self.terms.get(&k).copied().unwrap_or(Dyadic::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Dyadic)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest and largest support index.
    #[must_use]
    pub fn support_range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    #[must_use]
    pub fn sum(&self) -> Dyadic {
        self.terms.values().sum()
    }

    /// `b(2m) = δ(m)`.
    #[must_use]
    pub fn is_interpolatory(&self) -> bool {
        self.get(0) == Dyadic::ONE && self.terms().all(|(k, c)| k == 0 || k % 2 != 0 || c.is_zero())
    }
}

/// The four-point rule: `b(±3) = -1/16`, `b(±1) = 9/16`, `b(0) = 1`.
#[must_use]
pub fn dd_mask() -> Mask1D {
    let n = Dyadic::new(-1, 4);
    let p = Dyadic::new(9, 4);
    Mask1D::from_terms([(-3, n), (-1, p), (0, Dyadic::ONE), (1, p), (3, n)])
}

/// `h(k) = 2^(1-m) binomial(m, k)` for `k = 0..m`.
///
/// # Errors
/// [`Error::InvalidArgument`] if `m < 1` or `m > 120`.
pub fn bspline_mask(m: u32) -> Result<Mask1D> {
    if !(1..=120).contains(&m) {
        return Err(Error::InvalidArgument(format!("B-spline order {m} must be in 1..=120")));
    }
    let mut binom: i128 = 1;
    let mut terms = Vec::new();
    for k in 0..=i128::from(m) {
        terms.push((k as i64, Dyadic::new(binom, m - 1)));
        binom = binom * (i128::from(m) - k) / (k + 1);
    }
    Ok(Mask1D::from_terms(terms))
}

/// `(b ↑ b)(m) = Σ_k b(k) b(m - 2k)`.
#[must_use]
pub fn double_step(b: &Mask1D) -> Mask1D {
    Mask1D::from_terms(b.terms().flat_map(|(k, c)| b.terms().map(move |(j, d)| (j + 2 * k, c * d))))
}

/// `a(x, y) = bx(x) · by(y)`.
#[must_use]
pub fn tensor(bx: &Mask1D, by: &Mask1D) -> LaurentPoly {
    LaurentPoly::from_terms(bx.terms().flat_map(|(x, c)| by.terms().map(move |(y, d)| ((x, y), c * d))))
}

/// `α ↦ a(U^k α)` with `U = [[1, -2], [0, 1]]`.
#[must_use]
pub fn shear_reindex(a: &LaurentPoly, k: i64) -> LaurentPoly {
    a.map_support(|(x, y)| (x + 2 * k * y, y))
}

/// True iff `a(0) = 1` and `a` vanishes on `W0 Z² \ {0}` (which equals
/// `W1 Z² \ {0}`).
#[must_use]
pub fn check_interpolatory(a: &LaurentPoly) -> bool {
    let w = step_dilation_int(0);
    a.get((0, 0)) == Dyadic::ONE && a.terms().all(|(e, _)| e == (0, 0) || w.preimage(e).is_none())
}

/// The two masks of an adaptive directional scheme.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaskPair {
    pub name: String,
    /// Mask of the axis-aligned step.
    pub a0: LaurentPoly,
    /// Mask of the sheared step.
    pub a1: LaurentPoly,
}

impl MaskPair {
    #[must_use]
    pub fn new(name: impl Into<String>, a0: LaurentPoly, a1: LaurentPoly) -> Self {
        MaskPair { name: name.into(), a0, a1 }
    }

    /// Pair with `a1 = a0(U ·)`.
    #[must_use]
    pub fn from_a0(name: impl Into<String>, a0: LaurentPoly) -> Self {
        let a1 = shear_reindex(&a0, 1);
        MaskPair { name: name.into(), a0, a1 }
    }

    /// The mask of step `eta`.
    #[must_use]
    pub fn mask(&self, eta: u8) -> &LaurentPoly {
        if eta == 0 {
            &self.a0
        } else {
            &self.a1
        }
    }

    #[must_use]
    pub fn is_interpolatory(&self) -> bool {
        check_interpolatory(&self.a0) && check_interpolatory(&self.a1)
    }

    /// Both masks multiplied by `c`.
    #[must_use]
    pub fn scaled(&self, c: Dyadic) -> Self {
        MaskPair { name: format!("{}*{c}", self.name), a0: self.a0.scale(c), a1: self.a1.scale(c) }
    }
}

/// `a0 = (b1 ↑ b1) ⊗ b2`, `a1 = a0(U ·)`.
///
/// ```
/// use shearsub::masks::{dd_mask, make_pair};
/// use shearsub::Dyadic;
/// let pair = make_pair(&dd_mask(), &dd_mask());
/// assert_eq!(pair.a1.get((2, 1)), Dyadic::new(9, 4));
/// assert!(pair.is_interpolatory());
/// ```
#[must_use]
pub fn make_pair(b1: &Mask1D, b2: &Mask1D) -> MaskPair {
    MaskPair::from_a0("custom", tensor(&double_step(b1), b2))
}

/// The four-point pair used throughout.
#[must_use]
pub fn dd_pair() -> MaskPair {
    MaskPair { name: "dd".into(), ..make_pair(&dd_mask(), &dd_mask()) }
}

/// B-spline tensor pair of order `m`.
///
/// # Errors
/// As [`bspline_mask`].
pub fn bspline_pair(m: u32) -> Result<MaskPair> {
    let h = bspline_mask(m)?;
    Ok(MaskPair { name: format!("bspline{m}"), ..make_pair(&h, &h) })
}

/// The indicator of `{0..3} × {0, 1}`.
#[must_use]
pub fn indicator_mask() -> LaurentPoly {
    LaurentPoly::from_terms((0..4).flat_map(|x| (0..2).map(move |y| ((x, y), 1))))
}

/// `(indicator, indicator ∘ U)`.
#[must_use]
pub fn indicator_pair() -> MaskPair {
    MaskPair::from_a0("indicator", indicator_mask())
}

#[derive(Serialize, Deserialize)]
struct MaskEntry {
    i: i64,
    j: i64,
    num: i64,
    log2den: u32,
}

#[derive(Serialize, Deserialize)]
struct MaskFile {
    name: String,
    entries: Vec<MaskEntry>,
}

/// Serialize a mask as `{"name", "entries": [{"i","j","num","log2den"}]}`.
///
/// # Errors
/// If a numerator does not fit in 64 bits.
pub fn mask_to_json(name: &str, a: &LaurentPoly) -> Result<String> {
    let entries = a
        .terms()
        .map(|((i, j), c)| {
            let num = i64::try_from(c.numerator())
                .map_err(|_| Error::InvalidArgument(format!("coefficient {c} too large for JSON")))?;
            Ok(MaskEntry { i, j, num, log2den: c.log2den() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string_pretty(&MaskFile { name: name.to_string(), entries })?)
}

/// Parse the mask JSON format; duplicate `(i, j)` entries are rejected.
///
/// # Errors
/// [`Error::Parse`] on malformed input or duplicates.
pub fn mask_from_json(text: &str) -> Result<(String, LaurentPoly)> {
    let file: MaskFile = serde_json::from_str(text)?;
    let mut seen = BTreeSet::<Exp>::new();
    let mut a = LaurentPoly::zero();
    for e in file.entries {
        if !seen.insert((e.i, e.j)) {
            return Err(Error::Parse(format!("duplicate mask entry at ({}, {})", e.i, e.j)));
        }
        a.add_term((e.i, e.j), Dyadic::new(i128::from(e.num), e.log2den));
    }
    Ok((file.name, a))
}
