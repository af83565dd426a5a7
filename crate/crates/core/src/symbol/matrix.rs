use std::collections::BTreeSet;
use std::fmt;

use super::{Dyadic, Exp, LaurentPoly};

/// A finitely supported map from `Z²` to `rows × cols` dyadic matrices,
/// stored entrywise as Laurent polynomials.
///
/// Holds the representation masks `B_η` (2×2) as well as vector sequences
/// such as differences `∇c` (2×1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixMask {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl MatrixMask {
    #[must_use]
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixMask { rows, cols, entries: vec![LaurentPoly::zero(); rows * cols] }
    }

    /// `δ · I`: the identity matrix at the origin.
    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = LaurentPoly::one();
        }
        m
    }

    /// Build from rows of entry symbols.
    ///
    /// # Panics
    /// If the rows have different lengths.
    #[must_use]
    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix mask");
        let n = rows.len();
        MatrixMask { rows: n, cols, entries: rows.into_iter().flatten().collect() }
    }

    /// A column vector sequence.
    #[must_use]
    pub fn column(entries: Vec<LaurentPoly>) -> Self {
        let rows = entries.len();
        MatrixMask { rows, cols: 1, entries }
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
    pub fn entry(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut LaurentPoly {
        &mut self.entries[r * self.cols + c]
    }

    /// The matrix value at a point, row-major.
    #[must_use]
    pub fn at(&self, e: Exp) -> Vec<Dyadic> {
        self.entries.iter().map(|p| p.get(e)).collect()
    }

    /// Points where some entry is nonzero.
    #[must_use]
    pub fn support(&self) -> BTreeSet<Exp> {
        self.entries.iter().flat_map(|p| p.terms().map(|(e, _)| e)).collect()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    #[must_use]
    pub fn scale(&self, c: Dyadic) -> Self {
        MatrixMask { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|p| p.scale(c)).collect() }
    }

    /// Symbol product `self*(z) · rhs*(z)`, i.e. matrix convolution.
    ///
    /// # Panics
    /// If the inner dimensions differ.
    #[must_use]
    pub fn symbol_product(&self, rhs: &MatrixMask) -> MatrixMask {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = MatrixMask::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = LaurentPoly::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.entry(i, k) * rhs.entry(k, j));
                }
                out.entries[i * rhs.cols + j] = acc;
            }
        }
        out
    }

    /// Entrywise sum.
    ///
    /// # Panics
    /// If the shapes differ.
    #[must_use]
    pub fn add(&self, rhs: &MatrixMask) -> MatrixMask {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        MatrixMask {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Debug for MatrixMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixMask {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                writeln!(f, "  ({r},{c}): {}", self.entry(r, c))?;
            }
        }
        write!(f, "]")
    }
}
