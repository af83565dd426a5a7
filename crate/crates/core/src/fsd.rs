//! Interpolatory fast shearlet decomposition over the binary tree of
//! directions.
//!
//! With an interpolatory pair, one analysis step along `η` splits `c` into
//! the coarse samples and seven prediction residuals:
//!
//! ```text
//!   child(α)  = c(W_η α)
//!   d_γ(α)    = (c - S_η child)(W_η α + γ),   γ ∈ Γ* = {0..3}×{0,1} \ {0}
//! ```
//!
//! The `γ = 0` residual vanishes by interpolation, so synthesis recovers `c`
//! exactly. Zero-boundary fields keep every residual that the prediction
//! spills outside the input box, so both boundary modes reconstruct exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{nonzero_step_cosets, step_dilation_int, EpsWord, IMat2};
use crate::masks::MaskPair;
use crate::subdivision::{step, Boundary, SampledField};
use crate::symbol::{Exp, Scalar};

/// The seven detail cosets `Γ*`, shared by `W_0` and `W_1`.
#[must_use]
pub fn detail_cosets() -> Vec<Exp> {
    nonzero_step_cosets()
}

/// Stored box of a field: origin, rows, cols.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodeShape {
    pub origin: Exp,
    pub rows: usize,
    pub cols: usize,
}

impl NodeShape {
    #[must_use]
    pub fn of<T: Scalar>(c: &SampledField<T>) -> Self {
        NodeShape { origin: c.origin(), rows: c.rows(), cols: c.cols() }
    }
}

/// The coarse samples and the seven details of one analysis step.
#[derive(Clone, PartialEq, Debug)]
pub struct Analysis<T> {
    pub child: SampledField<T>,
    /// In the order of [`detail_cosets`].
    pub details: Vec<SampledField<T>>,
}

/// Periods of the child of a periodic field, `(P1/4, P2/2)`.
///
/// # Errors
/// [`Error::PeriodMismatch`] unless `4 | P1`, `2 | P2` and, for `η = 1`,
/// `P1 | 2 P2` (so that the sheared sublattice is rectangular).
pub fn child_periods(eta: u8, p1: usize, p2: usize) -> Result<(usize, usize)> {
    if p1 == 0 || p2 == 0 || p1 % 4 != 0 || p2 % 2 != 0 {
        return Err(Error::PeriodMismatch(format!(
            "periods ({p1}, {p2}) must be divisible by (4, 2) for one analysis step"
        )));
    }
    if eta == 1 && (2 * p2) % p1 != 0 {
        return Err(Error::PeriodMismatch(format!(
            "sheared analysis needs the first period {p1} to divide twice the second period {p2}"
        )));
    }
    Ok((p1 / 4, p2 / 2))
}

/// Samples `α ↦ c(W α + γ)` on every `α` where it can be nonzero.
fn coset_samples<T: Scalar>(c: &SampledField<T>, w: &IMat2, gamma: Exp, periods: Option<(usize, usize)>) -> SampledField<T> {
    if let Some((q1, q2)) = periods {
        let mut out = SampledField::<T>::periodic_zeros(q2, q1);
        out.fill_with(|a| {
            let p = w.apply(a);
            c.get((p.0 + gamma.0, p.1 + gamma.1))
        });
        return out;
    }
    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for (p, _) in c.iter() {
        if let Some(a) = w.preimage((p.0 - gamma.0, p.1 - gamma.1)) {
            lo = (lo.0.min(a.0), lo.1.min(a.1));
            hi = (hi.0.max(a.0), hi.1.max(a.1));
        }
    }
    if lo.0 > hi.0 {
        return SampledField::zeros((0, 0), 0, 0);
    }
    let mut out = SampledField::<T>::zeros(lo, (hi.1 - lo.1 + 1) as usize, (hi.0 - lo.0 + 1) as usize);
    out.fill_with(|a| {
        let p = w.apply(a);
        c.get((p.0 + gamma.0, p.1 + gamma.1))
    });
    out
}

fn require_interpolatory(pair: &MaskPair) -> Result<()> {
    if pair.is_interpolatory() {
        Ok(())
    } else {
        Err(Error::NotInterpolatory)
    }
}

/// Child, residual and child periods of one analysis step.
type Split<T> = (SampledField<T>, SampledField<T>, Option<(usize, usize)>);

/// `c - S_η D_{W_η} c` on a box covering its support (zero mode) or one
/// period (periodic mode), together with the child `D_{W_η} c`.
fn split<T: Scalar>(c: &SampledField<T>, eta: u8, pair: &MaskPair) -> Result<Split<T>> {
    let w = step_dilation_int(eta);
    let periods = match c.boundary() {
        Boundary::Periodic { p1, p2 } => Some(child_periods(eta, p1, p2)?),
        Boundary::Zero => None,
    };
    let child = coset_samples(c, &w, (0, 0), periods).with_eps(c.eps().clone());
    let prediction = step(pair.mask(eta), eta, &child)?;
    let residual = match periods {
        Some(_) => c.zip_with(&prediction, |x, y| x - y)?,
        None => {
            let (lo, hi) = union_box([c.index_box(), prediction.index_box()]);
            let mut r = c.reshaped(lo, (hi.1 - lo.1 + 1).max(0) as usize, (hi.0 - lo.0 + 1).max(0) as usize);
            for (p, v) in prediction.iter() {
                if !v.is_zero() {
                    r.add_at(p, -v);
                }
            }
            r
        }
    };
    Ok((child, residual, periods))
}

fn union_box<const N: usize>(boxes: [Option<(Exp, Exp)>; N]) -> (Exp, Exp) {
    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for (l, h) in boxes.into_iter().flatten() {
        lo = (lo.0.min(l.0), lo.1.min(l.1));
        hi = (hi.0.max(h.0), hi.1.max(h.1));
    }
    if lo.0 > hi.0 {
        ((0, 0), (-1, -1))
    } else {
        (lo, hi)
    }
}

/// One analysis step along `η`.
///
/// ```
/// use shearsub::fsd::{analyze_step, detail_cosets};
/// use shearsub::{masks, Dyadic, SampledField};
/// let pair = masks::dd_pair();
/// let out = analyze_step(&SampledField::<Dyadic>::delta(2), 0, &pair).unwrap();
/// assert_eq!(out.child.get((0, 0)), Dyadic::ONE);
/// let k = detail_cosets().iter().position(|&g| g == (1, 0)).unwrap();
/// assert_eq!(out.details[k].get((0, 0)), -pair.a0.get((1, 0)));
/// ```
///
/// # Errors
/// [`Error::NotInterpolatory`] for non-interpolatory pairs and
/// [`Error::PeriodMismatch`] for periods that do not split.
pub fn analyze_step<T: Scalar>(c: &SampledField<T>, eta: u8, pair: &MaskPair) -> Result<Analysis<T>> {
    require_interpolatory(pair)?;
    let (child, residual, periods) = split(c, eta, pair)?;
    let w = step_dilation_int(eta);
    debug_assert!(coset_samples(&residual, &w, (0, 0), periods).is_zero(), "interpolation leaves a coarse residual");
    let details = detail_cosets().into_iter().map(|g| coset_samples(&residual, &w, g, periods)).collect();
    Ok(Analysis { child, details })
}

/// The `γ = 0` residual `(c - S_η D_{W_η} c)(W_η α)`, identically zero for
/// interpolatory pairs.
///
/// # Errors
/// As [`analyze_step`], except that any pair is accepted.
pub fn coarse_residual<T: Scalar>(c: &SampledField<T>, eta: u8, pair: &MaskPair) -> Result<SampledField<T>> {
    let (_, residual, periods) = split(c, eta, pair)?;
    Ok(coset_samples(&residual, &step_dilation_int(eta), (0, 0), periods))
}

/// Inverse of [`analyze_step`]: `S_η child` corrected by the details.
///
/// In zero mode the result covers the prediction and detail boxes, which
/// contain the analyzed box; its values agree with the analyzed field as a
/// sequence on `Z²`.
///
/// # Errors
/// [`Error::NotInterpolatory`], or [`Error::ShapeMismatch`] when the
/// details do not fit the child.
pub fn synthesize_step<T: Scalar>(child: &SampledField<T>, details: &[SampledField<T>], eta: u8, pair: &MaskPair) -> Result<SampledField<T>> {
    require_interpolatory(pair)?;
    let cosets = detail_cosets();
    if details.len() != cosets.len() {
        return Err(Error::ShapeMismatch(format!("expected {} detail arrays, got {}", cosets.len(), details.len())));
    }
    let w = step_dilation_int(eta);
    let prediction = step(pair.mask(eta), eta, child)?;
    let mut out = match child.boundary() {
        Boundary::Periodic { .. } => {
            for d in details {
                if (d.boundary(), d.rows(), d.cols()) != (child.boundary(), child.rows(), child.cols()) {
                    return Err(Error::ShapeMismatch("periodic details must share the child's period".into()));
                }
            }
            prediction
        }
        Boundary::Zero => {
            if details.iter().any(|d| d.boundary() != Boundary::Zero) {
                return Err(Error::ShapeMismatch("details and child mix boundary modes".into()));
            }
            let mut boxes = vec![prediction.index_box()];
            for (d, &g) in details.iter().zip(&cosets) {
                boxes.push(d.index_box().map(|(lo, hi)| {
                    let corners = [(lo.0, lo.1), (hi.0, lo.1), (lo.0, hi.1), (hi.0, hi.1)].map(|p| w.apply(p));
                    let x0 = corners.iter().map(|p| p.0).min().expect("corners") + g.0;
                    let x1 = corners.iter().map(|p| p.0).max().expect("corners") + g.0;
                    let y0 = corners.iter().map(|p| p.1).min().expect("corners") + g.1;
                    let y1 = corners.iter().map(|p| p.1).max().expect("corners") + g.1;
                    ((x0, y0), (x1, y1))
                }));
            }
            let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
            for (l, h) in boxes.into_iter().flatten() {
                lo = (lo.0.min(l.0), lo.1.min(l.1));
                hi = (hi.0.max(h.0), hi.1.max(h.1));
            }
            if lo.0 > hi.0 {
                return Ok(SampledField::zeros((0, 0), 0, 0).with_eps(child.eps().clone()));
            }
            prediction.reshaped(lo, (hi.1 - lo.1 + 1) as usize, (hi.0 - lo.0 + 1) as usize)
        }
    };
    for (d, &g) in details.iter().zip(&cosets) {
        for (a, v) in d.iter() {
            if !v.is_zero() {
                let p = w.apply(a);
                out.add_at((p.0 + g.0, p.1 + g.1), v);
            }
        }
    }
    Ok(out.with_eps(child.eps().clone()))
}

/// Which edges of the direction tree to analyze.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Branches {
    /// Every word of length `depth`.
    Full,
    /// The prefixes of one word of length `depth`.
    Path(EpsWord),
}

/// Scaling and detail coefficients over the direction tree.
///
/// Node `ε` holds `c_ε`; the edge from `ε` to `ε·η` holds the seven
/// details keyed by `(ε·η, γ)`.
#[derive(Clone, PartialEq, Debug)]
pub struct ShearletTree<T> {
    pub depth: usize,
    pub boundary: Boundary,
    pub branches: Branches,
    /// Leaf scaling arrays, plus interior ones when kept.
    pub scaling: BTreeMap<EpsWord, SampledField<T>>,
    pub details: BTreeMap<(EpsWord, Exp), SampledField<T>>,
    /// The stored box of every node, the root included.
    pub shapes: BTreeMap<EpsWord, NodeShape>,
    /// The refinement word carried by the input field.
    pub root_eps: EpsWord,
}

impl<T: Scalar> ShearletTree<T> {
    /// Words of the leaves.
    #[must_use]
    pub fn leaves(&self) -> Vec<EpsWord> {
        match &self.branches {
            Branches::Full => EpsWord::all(self.depth).collect(),
            Branches::Path(p) => vec![p.clone()],
        }
    }

    /// Number of analyzed edges.
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.details.len() / detail_cosets().len()
    }

    /// The seven detail arrays on the edge into `node`.
    ///
    /// # Errors
    /// [`Error::MissingNode`] if the edge was not analyzed.
    pub fn edge_details(&self, node: &EpsWord) -> Result<Vec<&SampledField<T>>> {
        detail_cosets()
            .into_iter()
            .map(|g| {
                self.details
                    .get(&(node.clone(), g))
                    .ok_or_else(|| Error::MissingNode(format!("details for edge into {node}")))
            })
            .collect()
    }
}

/// Options for [`decompose`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecomposeOptions {
    pub depth: usize,
    pub branches: Branches,
    /// Keep the scaling array of interior nodes as well as leaves.
    pub keep_interior: bool,
}

impl DecomposeOptions {
    #[must_use]
    pub fn full(depth: usize) -> Self {
        DecomposeOptions { depth, branches: Branches::Full, keep_interior: false }
    }

    #[must_use]
    pub fn path(word: EpsWord) -> Self {
        DecomposeOptions { depth: word.len(), branches: Branches::Path(word), keep_interior: false }
    }
}

/// Analyze `c` along every requested edge of the direction tree.
///
/// ```
/// use shearsub::{fsd::{decompose, DecomposeOptions}, masks, SampledField};
/// let mut c = SampledField::<f64>::periodic_zeros(8, 8);
/// c.fill_with(|_| 1.0);
/// let tree = decompose(&c, &DecomposeOptions::full(1), &masks::dd_pair()).unwrap();
/// assert_eq!(tree.details.len(), 14);
/// assert!(tree.details.values().all(|d| d.is_zero()));
/// ```
///
/// # Errors
/// [`Error::NotInterpolatory`]; [`Error::PeriodMismatch`] unless both
/// periods are divisible by `4^depth` and every sheared step splits;
/// [`Error::InvalidArgument`] for a path whose length is not `depth`.
pub fn decompose<T: Scalar>(c: &SampledField<T>, opts: &DecomposeOptions, pair: &MaskPair) -> Result<ShearletTree<T>> {
    require_interpolatory(pair)?;
    if let Branches::Path(p) = &opts.branches {
        if p.len() != opts.depth {
            return Err(Error::InvalidArgument(format!("path {p} has length {} but depth is {}", p.len(), opts.depth)));
        }
    }
    if let Boundary::Periodic { p1, p2 } = c.boundary() {
        let q = 4usize.checked_pow(opts.depth as u32).unwrap_or(usize::MAX);
        if p1 % q != 0 || p2 % q != 0 {
            return Err(Error::PeriodMismatch(format!("periods ({p1}, {p2}) must be divisible by 4^{} = {q}", opts.depth)));
        }
    }
    let mut tree = ShearletTree {
        depth: opts.depth,
        boundary: c.boundary(),
        branches: opts.branches.clone(),
        scaling: BTreeMap::new(),
        details: BTreeMap::new(),
        shapes: BTreeMap::new(),
        root_eps: c.eps().clone(),
    };
    let root = c.clone().with_eps(EpsWord::empty());
    descend(&root, &EpsWord::empty(), opts, pair, &mut tree)?;
    Ok(tree)
}

fn descend<T: Scalar>(c: &SampledField<T>, word: &EpsWord, opts: &DecomposeOptions, pair: &MaskPair, tree: &mut ShearletTree<T>) -> Result<()> {
    tree.shapes.insert(word.clone(), NodeShape::of(c));
    if word.len() == opts.depth || opts.keep_interior {
        tree.scaling.insert(word.clone(), c.clone());
    }
    if word.len() == opts.depth {
        return Ok(());
    }
    let etas: Vec<u8> = match &opts.branches {
        Branches::Full => vec![0, 1],
        Branches::Path(p) => vec![p.bits()[word.len()]],
    };
    for eta in etas {
        let node = word.child(eta);
        let Analysis { child, details } = analyze_step(c, eta, pair)?;
        for (d, g) in details.into_iter().zip(detail_cosets()) {
            tree.details.insert((node.clone(), g), d);
        }
        descend(&child.with_eps(node.clone()), &node, opts, pair, tree)?;
    }
    Ok(())
}

/// Synthesize back along `path`.
///
/// A path of the tree's full depth names a leaf and returns the original
/// input, synthesized from that leaf to the root. A shorter path returns the
/// intermediate scaling array `c_path`, synthesized from the first stored
/// descendant.
///
/// # Errors
/// [`Error::MissingNode`] when the path leaves the analyzed branches.
pub fn reconstruct<T: Scalar>(tree: &ShearletTree<T>, path: &EpsWord, pair: &MaskPair) -> Result<SampledField<T>> {
    if path.len() > tree.depth {
        return Err(Error::MissingNode(format!("path {path} is longer than the tree depth {}", tree.depth)));
    }
    if !tree.shapes.contains_key(path) {
        return Err(Error::MissingNode(format!("node {path} was not decomposed")));
    }
    let mut leaf = path.clone();
    while !tree.scaling.contains_key(&leaf) {
        let next = (0..2u8).map(|eta| leaf.child(eta)).find(|w| tree.shapes.contains_key(w));
        leaf = next.ok_or_else(|| Error::MissingNode(format!("no stored scaling array below {path}")))?;
    }
    let target = if path.len() == tree.depth { 0 } else { path.len() };
    let mut c = tree.scaling[&leaf].clone();
    for k in (target..leaf.len()).rev() {
        let node = leaf.project(k + 1);
        let eta = leaf.bits()[k];
        let details: Vec<SampledField<T>> = tree.edge_details(&node)?.into_iter().cloned().collect();
        let parent = leaf.project(k);
        c = synthesize_step(&c, &details, eta, pair)?;
        let shape = tree.shapes[&parent];
        if tree.boundary == Boundary::Zero {
            c = c.reshaped(shape.origin, shape.rows, shape.cols);
        }
        c = c.with_eps(parent);
    }
    if target == 0 {
        c = c.with_eps(tree.root_eps.clone());
    }
    Ok(c)
}

/// Per-position `max_γ |d_γ|` on the edge into `node`, as floats.
///
/// # Errors
/// [`Error::MissingNode`] if the edge was not analyzed.
pub fn detail_energy_map<T: Scalar>(tree: &ShearletTree<T>, node: &EpsWord) -> Result<SampledField<f64>> {
    let details = tree.edge_details(node)?;
    let mut out = match tree.boundary {
        Boundary::Periodic { .. } => details[0].map(|_| 0.0),
        Boundary::Zero => {
            let boxes: Vec<_> = details.iter().filter_map(|d| d.index_box()).collect();
            let lo = boxes.iter().fold((i64::MAX, i64::MAX), |l, b| (l.0.min(b.0 .0), l.1.min(b.0 .1)));
            let hi = boxes.iter().fold((i64::MIN, i64::MIN), |h, b| (h.0.max(b.1 .0), h.1.max(b.1 .1)));
            if boxes.is_empty() {
                SampledField::zeros((0, 0), 0, 0)
            } else {
                SampledField::zeros(lo, (hi.1 - lo.1 + 1) as usize, (hi.0 - lo.0 + 1) as usize)
            }
        }
    };
    for d in details {
        for (a, v) in d.iter() {
            let m = v.to_f64().abs();
            if m > out.get(a) {
                out.set(a, m);
            }
        }
    }
    Ok(out.with_eps(node.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{bspline_pair, dd_pair};
    use crate::subdivision::run;
    use crate::symbol::Dyadic;
    use proptest::prelude::*;

    fn random_field(rows: usize, cols: usize, seed: &[i128]) -> SampledField<Dyadic> {
        let mut c = SampledField::periodic_zeros(rows, cols);
        c.fill_with(|(x, y)| {
            let k = (x as usize * 7 + y as usize * 13) % seed.len();
            Dyadic::new(seed[k] + x as i128 - 2 * y as i128, 3)
        });
        c
    }

    #[test]
    fn delta_details() {
        let pair = dd_pair();
        for eta in 0..2u8 {
            let out = analyze_step(&SampledField::<Dyadic>::delta(3), eta, &pair).unwrap();
            assert_eq!(out.child.to_poly(), crate::symbol::LaurentPoly::one());
            for (d, g) in out.details.iter().zip(detail_cosets()) {
                assert_eq!(d.get((0, 0)), -pair.mask(eta).get(g), "eta={eta} g={g:?}");
            }
        }
    }

    #[test]
    fn pure_prediction_has_no_details() {
        let pair = dd_pair();
        let mut coarse = SampledField::<Dyadic>::periodic_zeros(4, 4);
        coarse.fill_with(|(x, y)| Dyadic::from(x * x - 3 * y));
        for eta in 0..2u8 {
            let fine = step(pair.mask(eta), eta, &coarse).unwrap();
            let out = analyze_step(&fine, eta, &pair).unwrap();
            assert!(out.details.iter().all(SampledField::is_zero));
            assert_eq!(out.child.values(), coarse.values());
        }
    }

    #[test]
    fn synthesize_from_delta_child() {
        let pair = dd_pair();
        let child = SampledField::<Dyadic>::delta(0);
        let zeros = vec![SampledField::zeros((0, 0), 0, 0); 7];
        let out = synthesize_step(&child, &zeros, 1, &pair).unwrap();
        assert_eq!(out.to_poly(), pair.a1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = SampledField::<Dyadic>::periodic_zeros(8, 8);
        let spline = bspline_pair(3).unwrap();
        assert_eq!(analyze_step(&c, 0, &spline), Err(Error::NotInterpolatory));
        let odd = SampledField::<Dyadic>::periodic_zeros(8, 6);
        assert!(matches!(analyze_step(&odd, 0, &dd_pair()), Err(Error::PeriodMismatch(_))));
        assert!(matches!(decompose(&c, &DecomposeOptions::full(2), &dd_pair()), Err(Error::PeriodMismatch(_))));
        let wide = SampledField::<Dyadic>::periodic_zeros(4, 16);
        assert!(matches!(analyze_step(&wide, 1, &dd_pair()), Err(Error::PeriodMismatch(_))));
    }

    #[test]
    fn counts() {
        let c = random_field(16, 16, &[1, 5, -3]);
        let tree = decompose(&c, &DecomposeOptions::full(2), &dd_pair()).unwrap();
        assert_eq!((tree.scaling.len(), tree.edge_count(), tree.details.len()), (4, 6, 42));
        for leaf in tree.leaves() {
            let s = &tree.scaling[&leaf];
            assert_eq!((s.rows(), s.cols()), (4, 1));
        }
    }

    #[test]
    fn partial_paths() {
        let pair = dd_pair();
        let c = random_field(16, 16, &[2, -7, 4, 1]);
        let tree = decompose(&c, &DecomposeOptions::full(2), &pair).unwrap();
        let child = analyze_step(&c, 1, &pair).unwrap().child;
        assert_eq!(reconstruct(&tree, &"1".parse().unwrap(), &pair).unwrap().values(), child.values());
        assert_eq!(reconstruct(&tree, &EpsWord::empty(), &pair).unwrap(), c);
        let single = decompose(&c, &DecomposeOptions::path("10".parse().unwrap()), &pair).unwrap();
        assert_eq!(reconstruct(&single, &"10".parse().unwrap(), &pair).unwrap(), c);
        assert!(matches!(reconstruct(&single, &"01".parse().unwrap(), &pair), Err(Error::MissingNode(_))));
    }

    #[test]
    fn energy_of_delta() {
        let pair = dd_pair();
        let tree = decompose(&SampledField::<Dyadic>::delta(4), &DecomposeOptions::full(1), &pair).unwrap();
        let map = detail_energy_map(&tree, &"0".parse().unwrap()).unwrap();
        let peak = detail_cosets().into_iter().map(|g| pair.a0.get(g).abs().to_f64()).fold(0.0, f64::max);
        assert_eq!(map.get((0, 0)), peak);
    }

    fn zero_field() -> impl Strategy<Value = SampledField<Dyadic>> {
        (1usize..7, 1usize..7, -4i64..4, -4i64..4)
            .prop_flat_map(|(r, c, x, y)| {
                proptest::collection::vec((-16i128..16, 0u32..4), r * c).prop_map(move |v| {
                    let values = v.into_iter().map(|(n, k)| Dyadic::new(n, k)).collect::<Vec<_>>();
                    SampledField::from_parts((x, y), r, c, values, EpsWord::empty(), Boundary::Zero).unwrap()
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn zero_mode_roundtrip(c in zero_field(), bits in proptest::collection::vec(0u8..2, 1..4)) {
            let pair = dd_pair();
            let path = EpsWord::new(&bits).unwrap();
            let tree = decompose(&c, &DecomposeOptions::path(path.clone()), &pair).unwrap();
            prop_assert_eq!(reconstruct(&tree, &EpsWord::empty(), &pair).unwrap(), c.clone());
            for eta in 0..2u8 {
                prop_assert!(coarse_residual(&c, eta, &pair).unwrap().is_zero());
                let Analysis { child, details } = analyze_step(&c, eta, &pair).unwrap();
                prop_assert!(synthesize_step(&child, &details, eta, &pair).unwrap().same_sequence(&c));
            }
        }

        #[test]
        fn subdivided_data_is_pure_scaling(c in zero_field(), eta in 0u8..2) {
            let pair = dd_pair();
            let fine = run(&pair, &EpsWord::new(&[eta]).unwrap(), &c).unwrap();
            let out = analyze_step(&fine, eta, &pair).unwrap();
            prop_assert!(out.details.iter().all(SampledField::is_zero));
            prop_assert!(out.child.same_sequence(&c));
        }
    }
}
