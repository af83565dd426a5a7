use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Dyadic;

/// An exponent pair, also used as a point of `Z²`.
pub type Exp = (i64, i64);

/// A finitely supported map `Z² → Dyadic`.
///
/// The same type serves as a mask `a`, its symbol `a*(z) = Σ a(α) z^α`,
/// and a finitely supported data sequence. Zero values are never stored.
///
/// ```
/// use shearsub::{Dyadic, LaurentPoly};
/// let z1 = LaurentPoly::monomial((1, 0), Dyadic::ONE);
/// let s = LaurentPoly::from_terms([((0, 0), 1), ((1, 0), 1), ((2, 0), 1), ((3, 0), 1)]);
/// let one = LaurentPoly::one();
/// assert_eq!(&(&z1 - &one) * &s, LaurentPoly::from_terms([((4, 0), 1), ((0, 0), -1)]));
/// ```
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Exp, Dyadic>,
}

impl LaurentPoly {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn one() -> Self {
        Self::monomial((0, 0), Dyadic::ONE)
    }

    #[must_use]
    pub fn constant(c: Dyadic) -> Self {
        Self::monomial((0, 0), c)
    }

    /// `c z^e`.
    #[must_use]
    pub fn monomial(e: Exp, c: Dyadic) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// Sum of terms; repeated exponents are added.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exp, C)>,
        C: Into<Dyadic>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// The value at `e` (zero off the support).
    #[must_use]
    pub fn get(&self, e: Exp) -> Dyadic {
        self.terms.get(&e).copied().unwrap_or(Dyadic::ZERO)
    }

    pub fn set(&mut self, e: Exp, c: Dyadic) {
        if c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn add_term(&mut self, e: Exp, c: Dyadic) {
        if c.is_zero() {
            return;
        }
        let v = self.get(e) + c;
        self.set(e, v);
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exp, Dyadic)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    #[must_use]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(min, max)` corners of the support's bounding box.
    #[must_use]
    pub fn bounding_box(&self) -> Option<(Exp, Exp)> {
        let mut it = self.terms.keys();
        let &first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), &(x, y)| {
            ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y)))
        }))
    }

    #[must_use]
    pub fn scale(&self, c: Dyadic) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&e, &v)| (e, v * c)).collect() }
    }

    /// Multiply by `z^e`, i.e. translate the sequence by `e`.
    #[must_use]
    pub fn shift(&self, e: Exp) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&(x, y), &v)| ((x + e.0, y + e.1), v)).collect() }
    }

    /// `α ↦ self(f⁻¹(α))`: moves the value at `e` to `f(e)`. `f` must be injective.
    #[must_use]
    pub fn map_support(&self, f: impl Fn(Exp) -> Exp) -> Self {
        let terms: BTreeMap<Exp, Dyadic> = self.terms.iter().map(|(&e, &v)| (f(e), v)).collect();
        assert_eq!(terms.len(), self.terms.len(), "support map is not injective");
        LaurentPoly { terms }
    }

    /// The sum of all coefficients, `a*(1, 1)`.
    #[must_use]
    pub fn coefficient_sum(&self) -> Dyadic {
        self.terms.values().sum()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((x, y), c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            match (x, y) {
                (0, 0) => {}
                (x, 0) => write!(f, "·z1^{x}")?,
                (0, y) => write!(f, "·z2^{y}")?,
                (x, y) => write!(f, "·z1^{x}·z2^{y}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, c) in self.terms() {
            for (f, d) in rhs.terms() {
                out.add_term((e.0 + f.0, e.1 + f.1), c * d);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-Dyadic::ONE)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
