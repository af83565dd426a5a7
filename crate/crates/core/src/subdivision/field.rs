use crate::error::{Error, Result};
use crate::lattice::EpsWord;
use crate::symbol::{Dyadic, Exp, LaurentPoly, Scalar};

/// How a field extends beyond its stored array.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Boundary {
    /// Zero outside the stored box.
    Zero,
    /// Periodic with period `p1` along the first index and `p2` along the
    /// second; the stored array is one period based at the origin.
    Periodic { p1: usize, p2: usize },
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Zero => write!(f, "zero"),
            Boundary::Periodic { p1, p2 } => write!(f, "periodic:{p1},{p2}"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(Boundary::Zero);
        }
        let bad = || Error::Parse(format!("boundary {s:?} must be zero or periodic:P1,P2"));
        let (p1, p2) = s.strip_prefix("periodic:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
        Ok(Boundary::Periodic { p1: p1.trim().parse().map_err(|_| bad())?, p2: p2.trim().parse().map_err(|_| bad())? })
    }
}

/// A dense 2-D array of samples.
///
/// Entry `(row, col)` holds the value at index `α = origin + (col, row)`:
/// columns run along the first coordinate, rows along the second. The word
/// `eps` records the refinement level, so index `α` sits at the point
/// `W_eps⁻¹ α`.
#[derive(Clone, PartialEq, Debug)]
pub struct SampledField<T> {
    origin: Exp,
    rows: usize,
    cols: usize,
    values: Vec<T>,
    eps: EpsWord,
    boundary: Boundary,
}

impl<T: Scalar> SampledField<T> {
    /// All zeros on the box `origin + [0, cols) × [0, rows)`.
    #[must_use]
    pub fn zeros(origin: Exp, rows: usize, cols: usize) -> Self {
        SampledField { origin, rows, cols, values: vec![T::zero(); rows * cols], eps: EpsWord::empty(), boundary: Boundary::Zero }
    }

    /// One period of a periodic field, `rows = p2`, `cols = p1`.
    #[must_use]
    pub fn periodic_zeros(rows: usize, cols: usize) -> Self {
        SampledField {
            origin: (0, 0),
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
            eps: EpsWord::empty(),
            boundary: Boundary::Periodic { p1: cols, p2: rows },
        }
    }

    /// Build from row-major data (zero boundary).
    ///
    /// # Errors
    /// [`Error::ShapeMismatch`] for ragged rows.
    pub fn from_rows(origin: Exp, data: Vec<Vec<T>>) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("rows have different lengths".into()));
        }
        let mut f = Self::zeros(origin, rows, cols);
        f.values = data.into_iter().flatten().collect();
        Ok(f)
    }

    /// Build a field from raw parts.
    ///
    /// # Errors
    /// [`Error::ShapeMismatch`] if the value count or periods disagree with the shape.
    pub fn from_parts(origin: Exp, rows: usize, cols: usize, values: Vec<T>, eps: EpsWord, boundary: Boundary) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} values for a {rows}x{cols} field", values.len())));
        }
        if let Boundary::Periodic { p1, p2 } = boundary {
            if (p1, p2) != (cols, rows) || origin != (0, 0) {
                return Err(Error::ShapeMismatch(format!(
                    "periodic field must store one {p2}x{p1} period at the origin, got {rows}x{cols} at {origin:?}"
                )));
            }
        }
        Ok(SampledField { origin, rows, cols, values, eps, boundary })
    }

    /// The unit impulse at index `0`, on the box `[-radius, radius]²`.
    #[must_use]
    pub fn delta(radius: usize) -> Self {
        let r = radius as i64;
        let mut f = Self::zeros((-r, -r), 2 * radius + 1, 2 * radius + 1);
        f.set((0, 0), T::from_dyadic(Dyadic::ONE));
        f
    }

    /// The finitely supported sequence `c` as a field on its bounding box.
    #[must_use]
    pub fn from_poly(c: &LaurentPoly) -> Self {
        let Some((lo, hi)) = c.bounding_box() else { return Self::zeros((0, 0), 0, 0) };
        let mut f = Self::zeros(lo, (hi.1 - lo.1 + 1) as usize, (hi.0 - lo.0 + 1) as usize);
        for (e, v) in c.terms() {
            f.set(e, T::from_dyadic(v));
        }
        f
    }

    #[must_use]
    pub fn origin(&self) -> Exp {
        self.origin
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[must_use]
    pub fn eps(&self) -> &EpsWord {
        &self.eps
    }

    #[must_use]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[must_use]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[must_use]
    pub fn with_eps(mut self, eps: EpsWord) -> Self {
        self.eps = eps;
        self
    }

    /// Inclusive index range `(lo, hi)` of the stored box; `None` if empty.
    #[must_use]
    pub fn index_box(&self) -> Option<(Exp, Exp)> {
        (self.rows > 0 && self.cols > 0).then(|| {
            (self.origin, (self.origin.0 + self.cols as i64 - 1, self.origin.1 + self.rows as i64 - 1))
        })
    }

    /// Storage offset of index `α`: wraps in periodic mode, `None` outside
    /// the box in zero mode.
    #[must_use]
    pub fn offset(&self, a: Exp) -> Option<usize> {
        let (x, y) = (a.0 - self.origin.0, a.1 - self.origin.1);
        match self.boundary {
            Boundary::Periodic { p1, p2 } => {
                let (x, y) = (x.rem_euclid(p1 as i64), y.rem_euclid(p2 as i64));
                Some(y as usize * self.cols + x as usize)
            }
            Boundary::Zero => {
                (x >= 0 && y >= 0 && (x as usize) < self.cols && (y as usize) < self.rows)
                    .then(|| y as usize * self.cols + x as usize)
            }
        }
    }

    /// Value at index `α`.
    #[must_use]
    pub fn get(&self, a: Exp) -> T {
        self.offset(a).map_or_else(T::zero, |k| self.values[k])
    }

    /// Set the value at `α`.
    ///
    /// # Panics
    /// Outside the box in zero mode.
    pub fn set(&mut self, a: Exp, v: T) {
        let k = self.offset(a).expect("index outside the stored box");
        self.values[k] = v;
    }

    /// Add `v` at `α`.
    ///
    /// # Panics
    /// Outside the box in zero mode.
    pub fn add_at(&mut self, a: Exp, v: T) {
        let k = self.offset(a).expect("index outside the stored box");
        self.values[k] += v;
    }

    /// Overwrite every stored value with `f(α)`.
    pub fn fill_with(&mut self, f: impl Fn(Exp) -> T) {
        let cols = self.cols.max(1) as i64;
        for (k, v) in self.values.iter_mut().enumerate() {
            let k = k as i64;
            *v = f((self.origin.0 + k % cols, self.origin.1 + k / cols));
        }
    }

    /// `(α, value)` over the stored box.
    pub fn iter(&self) -> impl Iterator<Item = (Exp, T)> + '_ {
        let cols = self.cols.max(1);
        self.values.iter().enumerate().map(move |(k, &v)| {
            ((self.origin.0 + (k % cols) as i64, self.origin.1 + (k / cols) as i64), v)
        })
    }

    #[must_use]
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SampledField<U> {
        SampledField {
            origin: self.origin,
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
            eps: self.eps.clone(),
            boundary: self.boundary,
        }
    }

    #[must_use]
    pub fn to_f64(&self) -> SampledField<f64> {
        self.map(Scalar::to_f64)
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    /// Entrywise combination of two fields of the same shape.
    ///
    /// # Errors
    /// [`Error::ShapeMismatch`] when shapes differ.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if (self.origin, self.rows, self.cols, self.boundary) != (other.origin, other.rows, other.cols, other.boundary) {
            return Err(Error::ShapeMismatch("fields have different shapes".into()));
        }
        let mut out = self.clone();
        for (o, &v) in out.values.iter_mut().zip(&other.values) {
            *o = f(*o, v);
        }
        Ok(out)
    }

    /// Largest `|self - other|` over the union of both boxes (zero mode) or
    /// the common period (periodic mode).
    #[must_use]
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0f64;
        for (a, _) in self.iter().chain(other.iter()) {
            worst = worst.max((self.get(a) - other.get(a)).to_f64().abs());
        }
        worst
    }

    /// Equal as sequences on `Z²` (zero padding ignored).
    #[must_use]
    pub fn same_sequence(&self, other: &Self) -> bool {
        self.boundary == other.boundary
            && self.iter().all(|(a, v)| other.get(a) == v)
            && other.iter().all(|(a, v)| self.get(a) == v)
    }

    /// A copy restricted or zero-extended to a new box (zero mode).
    #[must_use]
    pub fn reshaped(&self, origin: Exp, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(origin, rows, cols);
        out.eps = self.eps.clone();
        for k in 0..out.values.len() {
            let a = (origin.0 + (k % cols.max(1)) as i64, origin.1 + (k / cols.max(1)) as i64);
            out.values[k] = self.get(a);
        }
        out
    }

    /// Row-major rows of values.
    #[must_use]
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.values.chunks(self.cols.max(1)).map(<[T]>::to_vec).collect()
    }
}

impl SampledField<Dyadic> {
    /// The stored values as a finitely supported sequence.
    #[must_use]
    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.iter())
    }
}
