//! Sum rules, evaluation at the roots of the dilated lattice, and reduction
//! modulo the quotient ideal
//!
//! ```text
//!   I = < z1^4 - 1,  s(z1)(z2 + 1),  z2^2 - 1 >,   s(z1) = z1^3 + z1^2 + z1 + 1
//! ```
//!
//! which is the same for both dilations. A mask satisfies the sum rule of
//! order zero exactly when its symbol lies in `I` and `a*(1,1) = 8`.

use std::collections::BTreeMap;

use super::{Dyadic, Exp, GaussianDyadic, LaurentPoly, MatrixMask};
use crate::error::{Error, Result};
use crate::lattice::{nonzero_step_cosets, step_dilation_int, IMat2};

fn ints(terms: &[(Exp, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().copied())
}

/// `s(z1) = 1 + z1 + z1^2 + z1^3`.
#[must_use]
pub fn s_poly() -> LaurentPoly {
    ints(&[((0, 0), 1), ((1, 0), 1), ((2, 0), 1), ((3, 0), 1)])
}

/// `z1^4 - 1`.
#[must_use]
pub fn z1_binomial() -> LaurentPoly {
    ints(&[((4, 0), 1), ((0, 0), -1)])
}

/// `s(z1)(z2 + 1)`.
#[must_use]
pub fn cross_generator() -> LaurentPoly {
    &s_poly() * &ints(&[((0, 1), 1), ((0, 0), 1)])
}

/// `z2^2 - 1`.
#[must_use]
pub fn z2_binomial() -> LaurentPoly {
    ints(&[((0, 2), 1), ((0, 0), -1)])
}

/// The seven monomials spanning the quotient by `I`.
pub const QUOTIENT_MONOMIALS: [Exp; 7] = [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1)];

/// Exact value of `f` at `(i^-η1, (-1)^η2)`.
///
/// ```
/// use shearsub::symbol::{evaluate_at_root, z1_binomial};
/// assert!(evaluate_at_root(&z1_binomial(), (1, 1)).is_zero());
/// ```
#[must_use]
pub fn evaluate_at_root(f: &LaurentPoly, eta: (u8, u8)) -> GaussianDyadic {
    let mut acc = GaussianDyadic::ZERO;
    for ((x, y), c) in f.terms() {
        let k = -i64::from(eta.0) * x + 2 * i64::from(eta.1) * y;
        acc += GaussianDyadic::i_pow(k).scale(c);
    }
    acc
}

/// Sums of `a` over every coset of `W Z²`, keyed by canonical
/// representative (upper-triangular `W`). Cosets missing the support sum to 0.
#[must_use]
pub fn coset_sums(a: &LaurentPoly, lattice: &IMat2) -> BTreeMap<Exp, Dyadic> {
    let (sx, sy) = (lattice.m[0][0], lattice.m[1][1]);
    let mut sums: BTreeMap<Exp, Dyadic> =
        (0..sx).flat_map(|x| (0..sy).map(move |y| ((x, y), Dyadic::ZERO))).collect();
    for (e, c) in a.terms() {
        *sums.get_mut(&lattice.reduce(e)).expect("reduced point lies in the box") += c;
    }
    sums
}

/// True iff every coset sum of `a` modulo `W Z²` equals 1.
#[must_use]
pub fn sum_rule_for_lattice(a: &LaurentPoly, lattice: &IMat2) -> bool {
    coset_sums(a, lattice).values().all(|&s| s == Dyadic::ONE)
}

/// Sum rule of order zero for one step `eta`: `Σ_β a(γ + W_η β) = 1` for
/// all eight cosets `γ`.
///
/// ```
/// use shearsub::{masks, symbol::sum_rule_check};
/// assert!(sum_rule_check(&masks::dd_pair().a0, 0));
/// ```
#[must_use]
pub fn sum_rule_check(a: &LaurentPoly, eta: u8) -> bool {
    sum_rule_for_lattice(a, &step_dilation_int(eta))
}

/// The same condition stated on the symbol: `a*(1,1) = 8` and `a*`
/// vanishes at the seven other points `(i^-η1, (-1)^η2)`.
#[must_use]
pub fn sum_rule_by_evaluation(a: &LaurentPoly) -> bool {
    if evaluate_at_root(a, (0, 0)) != GaussianDyadic::from(Dyadic::from(8)) {
        return false;
    }
    nonzero_step_cosets().into_iter().all(|(x, y)| evaluate_at_root(a, (x as u8, y as u8)).is_zero())
}

/// Cofactors and normal form of a symbol modulo `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HBasisReduction {
    /// Cofactor of `z1^4 - 1`.
    pub p: LaurentPoly,
    /// Cofactor of `s(z1)(z2 + 1)`.
    pub q: LaurentPoly,
    /// Cofactor of `z2^2 - 1`.
    pub r: LaurentPoly,
    /// Supported on [`QUOTIENT_MONOMIALS`]; zero iff the input lies in `I`.
    pub remainder: LaurentPoly,
}

impl HBasisReduction {
    /// `p (z1^4-1) + q s(z1)(z2+1) + r (z2^2-1) + remainder`.
    #[must_use]
    pub fn recompose(&self) -> LaurentPoly {
        let parts = [
            &self.p * &z1_binomial(),
            &self.q * &cross_generator(),
            &self.r * &z2_binomial(),
            self.remainder.clone(),
        ];
        parts.iter().fold(LaurentPoly::zero(), |acc, t| &acc + t)
    }

    #[must_use]
    pub fn is_member(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Dense univariate polynomial in `z1`, lowest degree first.
type Uni = Vec<Dyadic>;

fn uni_get(u: &Uni, k: usize) -> Dyadic {
    u.get(k).copied().unwrap_or(Dyadic::ZERO)
}

fn uni_add(u: &mut Uni, k: usize, c: Dyadic) {
    if u.len() <= k {
        u.resize(k + 1, Dyadic::ZERO);
    }
    u[k] += c;
}

/// Divide by a monic divisor given by its lower coefficients
/// (`divisor = z^deg + Σ low[k] z^k`); returns (quotient, remainder).
fn uni_divide_monic(mut f: Uni, low: &[Dyadic]) -> (Uni, Uni) {
    let deg = low.len();
    let mut quot = Uni::new();
    for top in (deg..f.len()).rev() {
        let c = f[top];
        if c.is_zero() {
            continue;
        }
        let k = top - deg;
        uni_add(&mut quot, k, c);
        f[top] = Dyadic::ZERO;
        for (j, &l) in low.iter().enumerate() {
            f[k + j] -= c * l;
        }
    }
    f.truncate(deg);
    (quot, f)
}

fn uni_to_poly(u: &Uni, z2_power: i64) -> LaurentPoly {
    LaurentPoly::from_terms(u.iter().enumerate().map(|(k, &c)| ((k as i64, z2_power), c)))
}

/// `(z^m - 1) / (z^step - 1)` as a Laurent polynomial in one variable, for
/// `m` a multiple of `step`; `axis` selects `z1` (0) or `z2` (1).
fn binomial_quotient(m: i64, step: i64, axis: usize) -> LaurentPoly {
    debug_assert_eq!(m % step, 0);
    let at = |k: i64| if axis == 0 { (k, 0) } else { (0, k) };
    let k = m / step;
    if k >= 0 {
        LaurentPoly::from_terms((0..k).map(|j| (at(step * j), 1)))
    } else {
        LaurentPoly::from_terms((1..=-k).map(|j| (at(-step * j), -1)))
    }
}

/// Reduce `f` modulo `I`.
///
/// The input is first translated by a monomial `z^m` with `m ∈ 4Z × 2Z`
/// so that it becomes a polynomial; `z2`-powers above one are folded with
/// `z2^2 - 1`, the `z2`-linear part is divided by `s(z1)`, and the rest by
/// `z1^4 - 1`. Translating back by `z^m` leaves the remainder in the span
/// of [`QUOTIENT_MONOMIALS`], since `z^m - 1 ∈ I`.
///
/// ```
/// use shearsub::symbol::{hbasis_reduce, z1_binomial};
/// use shearsub::LaurentPoly;
/// let red = hbasis_reduce(&z1_binomial());
/// assert_eq!(red.p, LaurentPoly::one());
/// assert!(red.remainder.is_zero());
/// ```
#[must_use]
pub fn hbasis_reduce(f: &LaurentPoly) -> HBasisReduction {
    let Some(((min_x, min_y), _)) = f.bounding_box() else {
        return HBasisReduction {
            p: LaurentPoly::zero(),
            q: LaurentPoly::zero(),
            r: LaurentPoly::zero(),
            remainder: LaurentPoly::zero(),
        };
    };
    let m = (4 * min_x.div_euclid(4), 2 * min_y.div_euclid(2));
    let g = f.shift((-m.0, -m.1));

    // Fold z2^b, b ≥ 2, down with z2^2 = (z2^2 - 1) + 1.
    let mut by_power: BTreeMap<i64, Uni> = BTreeMap::new();
    for ((x, y), c) in g.terms() {
        uni_add(by_power.entry(y).or_default(), x as usize, c);
    }
    let mut r_cof = LaurentPoly::zero();
    while let Some((&b, _)) = by_power.last_key_value() {
        if b < 2 {
            break;
        }
        let u = by_power.remove(&b).expect("key present");
        r_cof = &r_cof + &uni_to_poly(&u, b - 2);
        let target = by_power.entry(b - 2).or_default();
        for (k, c) in u.into_iter().enumerate() {
            uni_add(target, k, c);
        }
    }
    let mut f0 = by_power.remove(&0).unwrap_or_default();
    let f1 = by_power.remove(&1).unwrap_or_default();

    // f1 z2 = q s (z2 + 1) - q s + rho z2
    let one = Dyadic::ONE;
    let (q_uni, rho) = uni_divide_monic(f1, &[one, one, one]);
    let qs = &uni_to_poly(&q_uni, 0) * &s_poly();
    for ((x, _), c) in qs.terms() {
        uni_add(&mut f0, x as usize, -c);
    }
    let (p_uni, rem0) = uni_divide_monic(f0, &[-one, Dyadic::ZERO, Dyadic::ZERO, Dyadic::ZERO]);
    let remainder = &uni_to_poly(&rem0, 0) + &uni_to_poly(&rho, 1);

    // Translate back: z^m rem = rem + (z1^m1 - 1) rem + z1^m1 (z2^m2 - 1) rem.
    let p = &uni_to_poly(&p_uni, 0).shift(m) + &(&binomial_quotient(m.0, 4, 0) * &remainder);
    let q = uni_to_poly(&q_uni, 0).shift(m);
    let r = &r_cof.shift(m) + &(&binomial_quotient(m.1, 2, 1) * &remainder).shift((m.0, 0));
    debug_assert!(remainder.terms().all(|(e, _)| QUOTIENT_MONOMIALS.contains(&e)));
    debug_assert!((0..=3).all(|k| uni_get(&rem0, k) == remainder.get((k as i64, 0))));
    HBasisReduction { p, q, r, remainder }
}

/// `[z - 1] c*`: the backward differences `(c(·-e1) - c, c(·-e2) - c)`.
///
/// ```
/// use shearsub::{symbol::difference, Dyadic, LaurentPoly};
/// let d = difference(&LaurentPoly::one());
/// assert_eq!(d.at((0, 0)), vec![-Dyadic::ONE, -Dyadic::ONE]);
/// assert_eq!(d.at((1, 0)), vec![Dyadic::ONE, Dyadic::ZERO]);
/// ```
#[must_use]
pub fn difference(c: &LaurentPoly) -> MatrixMask {
    let z1m1 = ints(&[((1, 0), 1), ((0, 0), -1)]);
    let z2m1 = ints(&[((0, 1), 1), ((0, 0), -1)]);
    MatrixMask::column(vec![&z1m1 * c, &z2m1 * c])
}

/// `[z^{W_η} - 1]`: the column `(z^{w1} - 1, z^{w2} - 1)` over the
/// columns `w1, w2` of `W_η`.
#[must_use]
pub fn dilated_difference_symbol(eta: u8) -> MatrixMask {
    let w = step_dilation_int(eta);
    let col = |k: usize| ints(&[((w.m[0][k], w.m[1][k]), 1), ((0, 0), -1)]);
    MatrixMask::column(vec![col(0), col(1)])
}

/// Checks `[z - 1] a*(z) = B*(z) [z^{W_η} - 1]` symbolically.
#[must_use]
pub fn verify_representation(a: &LaurentPoly, b: &MatrixMask, eta: u8) -> bool {
    b.rows() == 2 && b.cols() == 2 && difference(a) == b.symbol_product(&dilated_difference_symbol(eta))
}

/// The representation mask `B_η` with `[z - 1] a* = B_η* [z^{W_η} - 1]`.
///
/// From the cofactors `a* = p (z1^4-1) + q s (z2+1) + r (z2^2-1)`:
///
/// ```text
///   B0* = | (z1-1) p + (z2+1) q      (z1-1) r          |
///         | (z2-1) p                 s q + (z2-1) r    |
///
///   B1* = B0* · | 1   0    |
///               | 1   z1^4 |
/// ```
///
/// # Errors
/// [`Error::NotInIdeal`] when the symbol is not in `I`.
pub fn representation_mask(a: &LaurentPoly, eta: u8) -> Result<MatrixMask> {
    let red = hbasis_reduce(a);
    if !red.is_member() {
        return Err(Error::NotInIdeal { remainder: red.remainder.to_string() });
    }
    let z1m1 = ints(&[((1, 0), 1), ((0, 0), -1)]);
    let z2m1 = ints(&[((0, 1), 1), ((0, 0), -1)]);
    let z2p1 = ints(&[((0, 1), 1), ((0, 0), 1)]);
    let (p, q, r) = (&red.p, &red.q, &red.r);
    let b11 = &(&z1m1 * p) + &(&z2p1 * q);
    let b12 = &z1m1 * r;
    let b21 = &z2m1 * p;
    let b22 = &(&s_poly() * q) + &(&z2m1 * r);
    let b = if eta == 0 {
        MatrixMask::from_rows(vec![vec![b11, b12], vec![b21, b22]])
    } else {
        MatrixMask::from_rows(vec![
            vec![&b11 + &b12, b12.shift((4, 0))],
            vec![&b21 + &b22, b22.shift((4, 0))],
        ])
    };
    debug_assert!(verify_representation(a, &b, eta));
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks;
    use proptest::prelude::*;

    #[test]
    fn generator_reductions() {
        let red = hbasis_reduce(&cross_generator());
        assert_eq!((red.p.is_zero(), red.q == LaurentPoly::one(), red.r.is_zero()), (true, true, true));
        let red = hbasis_reduce(&LaurentPoly::one());
        assert_eq!(red.remainder, LaurentPoly::one());
        assert!(red.p.is_zero() && red.q.is_zero() && red.r.is_zero());
        let red = hbasis_reduce(&z2_binomial());
        assert_eq!(red.r, LaurentPoly::one());
    }

    #[test]
    fn negative_exponents_reduce_to_normal_form() {
        let f = ints(&[((-3, -1), 1)]);
        let red = hbasis_reduce(&f);
        assert_eq!(red.recompose(), f);
        // z1^-3 ≡ z1 and z2^-1 ≡ z2 modulo I
        assert_eq!(red.remainder, ints(&[((1, 1), 1)]));
    }

    #[test]
    fn dd_masks_are_members() {
        let pair = masks::dd_pair();
        for (eta, a) in [(0, &pair.a0), (1, &pair.a1)] {
            let red = hbasis_reduce(a);
            assert!(red.is_member());
            assert_eq!(red.recompose(), *a);
            let b = representation_mask(a, eta).unwrap();
            assert!(verify_representation(a, &b, eta));
        }
    }

    #[test]
    fn representation_examples() {
        let b = representation_mask(&z1_binomial(), 0).unwrap();
        let z1m1 = ints(&[((1, 0), 1), ((0, 0), -1)]);
        let z2m1 = ints(&[((0, 1), 1), ((0, 0), -1)]);
        let zero = LaurentPoly::zero();
        assert_eq!(b, MatrixMask::from_rows(vec![vec![z1m1.clone(), zero.clone()], vec![z2m1.clone(), zero.clone()]]));
        let b = representation_mask(&z2_binomial(), 0).unwrap();
        assert_eq!(b, MatrixMask::from_rows(vec![vec![zero.clone(), z1m1], vec![zero, z2m1]]));
        assert!(matches!(representation_mask(&LaurentPoly::one(), 0), Err(Error::NotInIdeal { .. })));
    }

    #[test]
    fn sum_rule_examples() {
        let delta = LaurentPoly::one();
        assert!(!sum_rule_check(&delta, 0));
        assert!(!sum_rule_by_evaluation(&delta));
        let box_mask = masks::indicator_mask();
        assert!(sum_rule_check(&box_mask, 0) && sum_rule_check(&box_mask, 1));
        assert!(sum_rule_by_evaluation(&box_mask));
        let a0 = masks::dd_pair().a0;
        assert!(evaluate_at_root(&a0, (0, 1)).is_zero());
        assert_eq!(a0.coefficient_sum(), Dyadic::from(8));
    }

    fn dy() -> impl Strategy<Value = Dyadic> {
        (-64i128..64, 0u32..6).prop_map(|(n, k)| Dyadic::new(n, k))
    }

    fn poly(max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(((-6i64..7, -4i64..5), dy()), 0..max_terms)
            .prop_map(LaurentPoly::from_terms)
    }

    fn member() -> impl Strategy<Value = LaurentPoly> {
        (poly(5), poly(5), poly(5)).prop_map(|(p, q, r)| {
            &(&(&p * &z1_binomial()) + &(&q * &cross_generator())) + &(&r * &z2_binomial())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn members_reduce_to_zero(f in member()) {
            let red = hbasis_reduce(&f);
            prop_assert!(red.remainder.is_zero());
            prop_assert_eq!(red.recompose(), f);
        }

        #[test]
        fn remainder_is_the_quotient_part(f in member(), coeffs in proptest::collection::vec(dy(), 7)) {
            let rest = LaurentPoly::from_terms(QUOTIENT_MONOMIALS.iter().copied().zip(coeffs));
            prop_assume!(!rest.is_zero());
            let g = &f + &rest;
            let red = hbasis_reduce(&g);
            prop_assert_eq!(&red.remainder, &rest);
            prop_assert_eq!(red.recompose(), g);
        }

        #[test]
        fn any_poly_recomposes(f in poly(12)) {
            let red = hbasis_reduce(&f);
            prop_assert!(red.remainder.terms().all(|(e, _)| QUOTIENT_MONOMIALS.contains(&e)));
            prop_assert_eq!(red.recompose(), f);
        }

        #[test]
        fn coset_and_evaluation_criteria_agree(f in poly(12), shift in proptest::collection::vec(dy(), 8)) {
            // push random masks onto and off the sum rule
            let mut a = f.clone();
            let sums = coset_sums(&f, &step_dilation_int(0));
            for ((g, s), t) in sums.into_iter().zip(shift) {
                let fix = if t.signum() >= 0 { Dyadic::ONE - s } else { t };
                a.add_term(g, fix);
            }
            prop_assert_eq!(sum_rule_check(&a, 0), sum_rule_by_evaluation(&a));
            prop_assert_eq!(sum_rule_check(&a, 0), sum_rule_check(&a, 1));
            let member = hbasis_reduce(&a).is_member();
            prop_assert_eq!(sum_rule_check(&a, 0), member && a.coefficient_sum() == Dyadic::from(8));
        }

        #[test]
        fn representation_identity(f in member(), eta in 0u8..2) {
            let b = representation_mask(&f, eta).unwrap();
            prop_assert!(verify_representation(&f, &b, eta));
        }
    }
}
