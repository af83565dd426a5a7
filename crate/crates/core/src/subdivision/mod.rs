//! The adaptive directional subdivision engine.
//!
//! One step with mask `a` and dilation `W_η` refines coarse data `c` to
//!
//! ```text
//!   (S_η c)(α) = Σ_β a(α - W_η β) c(β)
//! ```
//!
//! and a word `eps` applies `S_{eps_1}` first and `S_{eps_n}` last.

mod field;

pub use field::{Boundary, SampledField};

use std::any::Any;
use std::ops::{AddAssign, Mul};

use crate::error::{Error, Result};
use crate::lattice::{step_dilation_int, EpsWord, IMat2};
use crate::masks::MaskPair;
use crate::symbol::{Dyadic, Exp, LaurentPoly, Scalar};

/// Periods of `S_η c` for `c` with periods `(p1, p2)`.
///
/// The output period lattice is `W_η (p1 Z × p2 Z)`; it is rectangular,
/// equal to `4 p1 Z × 2 p2 Z`, unless `η = 1` and `p1` does not divide `p2`.
///
/// # Errors
/// [`Error::PeriodMismatch`] when the output lattice is not rectangular.
pub fn periodic_output_dims(eta: u8, p1: usize, p2: usize) -> Result<(usize, usize)> {
    if p1 == 0 || p2 == 0 {
        return Err(Error::PeriodMismatch("periods must be positive".into()));
    }
    if eta == 1 && p2 % p1 != 0 {
        return Err(Error::PeriodMismatch(format!(
            "sheared step needs the first period {p1} to divide the second period {p2}"
        )));
    }
    Ok((4 * p1, 2 * p2))
}

fn mask_terms<T: Scalar>(a: &LaurentPoly) -> Vec<(Exp, T)> {
    a.terms().map(|(e, c)| (e, T::from_dyadic(c))).collect()
}

/// Storage of a step's output.
struct Layout {
    origin: Exp,
    rows: usize,
    cols: usize,
    boundary: Boundary,
}

fn layout<T: Scalar>(a: &LaurentPoly, eta: u8, w: &IMat2, c: &SampledField<T>) -> Result<Layout> {
    match c.boundary() {
        Boundary::Periodic { p1, p2 } => {
            let (q1, q2) = periodic_output_dims(eta, p1, p2)?;
            Ok(Layout { origin: (0, 0), rows: q2, cols: q1, boundary: Boundary::Periodic { p1: q1, p2: q2 } })
        }
        Boundary::Zero => {
            let Some((lo, hi)) = c.index_box() else {
                return Ok(Layout { origin: (0, 0), rows: 0, cols: 0, boundary: Boundary::Zero });
            };
            let corners = [(lo.0, lo.1), (hi.0, lo.1), (lo.0, hi.1), (hi.0, hi.1)].map(|p| w.apply(p));
            let (tlo, thi) = a.bounding_box().unwrap_or(((0, 0), (0, 0)));
            let x0 = corners.iter().map(|p| p.0).min().expect("four corners") + tlo.0;
            let x1 = corners.iter().map(|p| p.0).max().expect("four corners") + thi.0;
            let y0 = corners.iter().map(|p| p.1).min().expect("four corners") + tlo.1;
            let y1 = corners.iter().map(|p| p.1).max().expect("four corners") + thi.1;
            Ok(Layout {
                origin: (x0, y0),
                rows: (y1 - y0 + 1) as usize,
                cols: (x1 - x0 + 1) as usize,
                boundary: Boundary::Zero,
            })
        }
    }
}

/// `Σ_β a(α - W β) c(β)` over a layout, in any coefficient ring.
fn accumulate<V>(terms: &[(Exp, V)], w: &IMat2, inputs: impl Iterator<Item = (Exp, V)>, out: &Layout) -> Vec<V>
where
    V: Copy + Default + PartialEq + AddAssign + Mul<Output = V>,
{
    let zero = V::default();
    let cols = out.cols as i64;
    let mut values = vec![zero; out.rows * out.cols];
    match out.boundary {
        Boundary::Periodic { p1, p2 } => {
            let (p1, p2) = (p1 as i64, p2 as i64);
            for (beta, v) in inputs {
                if v == zero {
                    continue;
                }
                let base = w.apply(beta);
                for &(t, m) in terms {
                    let x = (base.0 + t.0).rem_euclid(p1);
                    let y = (base.1 + t.1).rem_euclid(p2);
                    values[(y * cols + x) as usize] += m * v;
                }
            }
        }
        Boundary::Zero => {
            let offsets: Vec<(isize, V)> = terms.iter().map(|&(t, m)| ((t.1 * cols + t.0) as isize, m)).collect();
            for (beta, v) in inputs {
                if v == zero {
                    continue;
                }
                let base = w.apply(beta);
                let base = ((base.1 - out.origin.1) * cols + (base.0 - out.origin.0)) as isize;
                for &(off, m) in &offsets {
                    values[(base + off) as usize] += m * v;
                }
            }
        }
    }
    values
}

/// Exact step on integer numerators over a common power-of-two
/// denominator; `None` if the numerators could overflow.
fn exact_values(a: &LaurentPoly, w: &IMat2, c: &SampledField<Dyadic>, out: &Layout) -> Option<Vec<Dyadic>> {
    let sa = a.terms().map(|(_, v)| v.log2den()).max().unwrap_or(0);
    let sc = c.values().iter().map(|v| v.log2den()).max().unwrap_or(0);
    let terms: Vec<(Exp, i128)> = a
        .terms()
        .map(|(e, v)| Some((e, v.checked_mul_pow2(sa as i32)?.numerator())))
        .collect::<Option<_>>()?;
    let inputs: Vec<(Exp, i128)> = c
        .iter()
        .map(|(e, v)| Some((e, v.checked_mul_pow2(sc as i32)?.numerator())))
        .collect::<Option<_>>()?;
    let mass: f64 = terms.iter().map(|t| t.1.unsigned_abs() as f64).sum();
    let top = inputs.iter().map(|t| t.1.unsigned_abs() as f64).fold(0.0, f64::max);
    if mass * top >= 2f64.powi(125) {
        return None;
    }
    let sums = accumulate(&terms, w, inputs.into_iter(), out);
    Some(sums.into_iter().map(|n| Dyadic::new(n, sa + sc)).collect())
}

/// One subdivision step `S_η c`; the output word is `(c.eps, η)`.
///
/// ```
/// use shearsub::{masks, subdivision::{step, SampledField}, Dyadic};
/// let pair = masks::dd_pair();
/// let out = step(&pair.a0, 0, &SampledField::<Dyadic>::delta(0)).unwrap();
/// assert_eq!(out.to_poly(), pair.a0);
/// ```
///
/// # Errors
/// [`Error::PeriodMismatch`] for incompatible periods.
pub fn step<T: Scalar>(a: &LaurentPoly, eta: u8, c: &SampledField<T>) -> Result<SampledField<T>> {
    let w = step_dilation_int(eta);
    let out = layout(a, eta, &w, c)?;
    let eps = c.eps().child(eta);
    if let Some(exact) = (c as &dyn Any).downcast_ref::<SampledField<Dyadic>>() {
        if let Some(values) = exact_values(a, &w, exact, &out) {
            let field = SampledField::from_parts(out.origin, out.rows, out.cols, values, eps, out.boundary)?;
            let field: Box<dyn Any> = Box::new(field);
            return Ok(*field.downcast::<SampledField<T>>().expect("T is Dyadic here"));
        }
    }
    let values = accumulate(&mask_terms::<T>(a), &w, c.iter(), &out);
    SampledField::from_parts(out.origin, out.rows, out.cols, values, eps, out.boundary)
}

/// `S_eps c = S_{eps_n} ⋯ S_{eps_1} c`.
///
/// # Errors
/// As [`step`].
pub fn run<T: Scalar>(pair: &MaskPair, eps: &EpsWord, c: &SampledField<T>) -> Result<SampledField<T>> {
    let mut cur = c.clone();
    for &eta in eps.bits() {
        cur = step(pair.mask(eta), eta, &cur)?;
    }
    Ok(cur)
}

/// The iterated mask `a_eps` as a dense field: `S_eps δ`.
#[must_use]
pub fn iterated_mask_field(pair: &MaskPair, eps: &EpsWord) -> SampledField<Dyadic> {
    run(pair, eps, &SampledField::delta(0)).expect("zero boundary never mismatches")
}

/// The iterated mask `a_eps` with `S_eps c = Σ_β a_eps(· - W_eps β) c(β)`.
#[must_use]
pub fn iterated_mask(pair: &MaskPair, eps: &EpsWord) -> LaurentPoly {
    iterated_mask_field(pair, eps).to_poly()
}

/// Cascade samples of the limit function on the branch `eps`: the values
/// `a_eps(α)` attached to the points `W_eps⁻¹ α`.
#[must_use]
pub fn limit_samples(pair: &MaskPair, eps: &EpsWord) -> SampledField<Dyadic> {
    iterated_mask_field(pair, eps)
}

/// An inclusive box of coarse indices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Window {
    pub lo: Exp,
    pub hi: Exp,
}

impl Window {
    /// `[-radius, radius]²`.
    #[must_use]
    pub fn centered(radius: i64) -> Self {
        Window { lo: (-radius, -radius), hi: (radius, radius) }
    }

    #[must_use]
    pub fn contains(&self, p: Exp) -> bool {
        (self.lo.0..=self.hi.0).contains(&p.0) && (self.lo.1..=self.hi.1).contains(&p.1)
    }
}

/// Generalized binomial coefficient `C(n, k)` for integer `n`.
fn binomial(n: i64, k: u32) -> Dyadic {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for m in 0..i128::from(k) {
        num *= i128::from(n) - m;
        den *= m + 1;
    }
    Dyadic::from(num / den)
}

/// Whether each step reproduces polynomials of total degree `≤ k`.
///
/// For each `η` and each monomial `c(α) = α1^g1 α2^g2` with `g1 + g2 ≤ k`
/// sampled on `window`, the values of `S_η c` at indices depending only on
/// in-window data are fitted by the Newton interpolant of degree `k`
/// through a triangle of such indices, and the fit is compared exactly at
/// every such index.
///
/// # Errors
/// [`Error::WindowTooSmall`] if no fitting triangle fits in the interior.
pub fn check_poly_reproduction(pair: &MaskPair, k: u32, window: Window) -> Result<bool> {
    for eta in 0..2u8 {
        let a = pair.mask(eta);
        let w = step_dilation_int(eta);
        let mut c = SampledField::<Dyadic>::zeros(
            window.lo,
            (window.hi.1 - window.lo.1 + 1).max(0) as usize,
            (window.hi.0 - window.lo.0 + 1).max(0) as usize,
        );
        let out_shape = step(a, eta, &c)?;
        let interior: Vec<Exp> = out_shape
            .iter()
            .map(|(p, _)| p)
            .filter(|&p| {
                a.terms().all(|(t, _)| w.preimage((p.0 - t.0, p.1 - t.1)).map_or(true, |b| window.contains(b)))
            })
            .collect();
        let inside: std::collections::HashSet<Exp> = interior.iter().copied().collect();
        let triangle: Vec<(u32, u32)> = (0..=k).flat_map(|i| (0..=k - i).map(move |j| (i, j))).collect();
        let center = interior.iter().fold((0i64, 0i64), |s, p| (s.0 + p.0, s.1 + p.1));
        let n = interior.len().max(1) as i64;
        let center = (center.0 / n, center.1 / n);
        let anchor = interior
            .iter()
            .copied()
            .filter(|&p| triangle.iter().all(|&(i, j)| inside.contains(&(p.0 + i64::from(i), p.1 + i64::from(j)))))
            .min_by_key(|p| ((p.0 - center.0).abs() + (p.1 - center.1).abs(), *p))
            .ok_or_else(|| Error::WindowTooSmall(format!("no degree-{k} fitting triangle inside the window")))?;
        for g1 in 0..=k {
            for g2 in 0..=k - g1 {
                c.fill_with(|p| Dyadic::from(p.0).pow(g1) * Dyadic::from(p.1).pow(g2));
                let out = step(a, eta, &c)?;
                // Newton forward differences at the anchor.
                let diff = |i: u32, j: u32| -> Dyadic {
                    let mut acc = Dyadic::ZERO;
                    for s in 0..=i {
                        for t in 0..=j {
                            let sign = if (i - s + j - t) % 2 == 0 { Dyadic::ONE } else { -Dyadic::ONE };
                            let v = out.get((anchor.0 + i64::from(s), anchor.1 + i64::from(t)));
                            acc += sign * binomial(i64::from(i), s) * binomial(i64::from(j), t) * v;
                        }
                    }
                    acc
                };
                let coeffs: Vec<((u32, u32), Dyadic)> = triangle.iter().map(|&(i, j)| ((i, j), diff(i, j))).collect();
                for &p in &interior {
                    let fit: Dyadic = coeffs
                        .iter()
                        .map(|&((i, j), d)| d * binomial(p.0 - anchor.0, i) * binomial(p.1 - anchor.1, j))
                        .sum();
                    if fit != out.get(p) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
