//! The ten acceptance criteria, each checked at its stated tolerance and
//! time budget. Runs without the libtest harness so that every criterion
//! prints one PASS/FAIL line.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearsub::convergence::{check_intertwining, jsr_estimate, JsrOptions, Verdict};
use shearsub::fsd::{decompose, reconstruct, DecomposeOptions, ShearletTree};
use shearsub::lattice::{
    check_lattice_refinement, dilation_closed_form, dilation_int, dilation_matrix, parse_rational, plan_direction, refinement_closed_form,
    refinement_matrix, shear_u, shear_v, slope_after, step_dilation, Slope,
};
use shearsub::masks::{check_interpolatory, dd_pair, shear_reindex};
use shearsub::subdivision::{check_poly_reproduction, step, Window};
use shearsub::symbol::{
    cross_generator, evaluate_at_root, hbasis_reduce, representation_mask, sum_rule_check, verify_representation,
    z1_binomial, z2_binomial, QUOTIENT_MONOMIALS,
};
use shearsub::symbol::Exp;
use shearsub::{io, Boundary, Dyadic, EpsWord, LaurentPoly, SampledField};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn words_up_to(n: usize) -> impl Iterator<Item = EpsWord> {
    (1..=n).flat_map(EpsWord::all)
}

fn random_poly(rng: &mut ChaCha8Rng, radius: i64, terms: usize) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for _ in 0..terms {
        let e = (rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius));
        p.add_term(e, Dyadic::new(rng.gen_range(-32..=32), rng.gen_range(0..=4)));
    }
    p
}

fn matrix_algebra() -> Check {
    let w0 = step_dilation(0);
    ensure(step_dilation(1) == shear_u() * w0 && step_dilation(1) == w0 * shear_v(), || "W1 != U W0 = W0 V".into())?;
    let mut count = 0;
    for eps in words_up_to(10) {
        let n = eps.len();
        let d = dilation_matrix(&eps);
        ensure(d.w == dilation_closed_form(&eps), || format!("W_eps closed form fails at {eps}"))?;
        ensure(d.w == d.u * w0.pow(n as u64) && d.w == w0.pow(n as u64) * d.v, || format!("W factorization fails at {eps}"))?;
        ensure(d.u == d.v.pow(1 << n), || format!("U_eps != V_eps^(2^n) at {eps}"))?;
        ensure(refinement_matrix(&eps) == refinement_closed_form(&eps), || format!("M_eps closed form fails at {eps}"))?;
        let inverse = dilation_closed_form(&eps.reverse()).inverse().expect("invertible");
        ensure(refinement_matrix(&eps) == inverse, || format!("M_eps != W_r(eps)^-1 at {eps}"))?;
        count += 1;
    }
    Ok(format!("{count} words"))
}

fn lattice_refinement() -> Check {
    for k in -2..=2 {
        for level in 0..3 {
            ensure(check_lattice_refinement(k, level, 32), || format!("M_{k} not bijective at level {level}"))?;
        }
    }
    Ok("k in -2..2, levels 0..2, window [-32,32]^2".into())
}

fn direction_planner() -> Check {
    let delta = parse_rational("1e-3").map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for t in ["1/2", "3/4", "1", "2", "5", "10", "inf"] {
        let target: Slope = t.parse().map_err(|e| format!("{e}"))?;
        let word = plan_direction(Slope::Infinite, target, delta).map_err(|e| format!("target {t}: {e}"))?;
        let reached = slope_after(Slope::Infinite, &word);
        let close = match (reached, target) {
            (Slope::Infinite, Slope::Infinite) => true,
            (Slope::Finite(a), Slope::Finite(b)) => a - b < delta && b - a < delta,
            _ => false,
        };
        ensure(close, || format!("target {t}: word {word} reaches {reached}"))?;
        report.push(format!("{t}->{}", word.len()));
    }
    Ok(format!("word lengths {}", report.join(" ")))
}

fn dd_validity() -> Check {
    let pair = dd_pair();
    for eta in 0..2u8 {
        let a = pair.mask(eta);
        ensure(check_interpolatory(a), || format!("a{eta} not interpolatory"))?;
        ensure(sum_rule_check(a, eta), || format!("a{eta} fails the sum rule"))?;
        for e1 in 0..4u8 {
            for e2 in 0..2u8 {
                if (e1, e2) != (0, 0) {
                    ensure(evaluate_at_root(a, (e1, e2)).is_zero(), || format!("a{eta}* nonzero at ({e1},{e2})"))?;
                }
            }
        }
        ensure(a.coefficient_sum() == Dyadic::from(8), || format!("a{eta}*(1,1) = {}", a.coefficient_sum()))?;
    }
    Ok("interpolatory, sum rules, 7 roots, a*(1,1) = 8".into())
}

fn ideal_algebra() -> Check {
    let pair = dd_pair();
    for eta in 0..2u8 {
        let a = pair.mask(eta);
        let red = hbasis_reduce(a);
        ensure(red.remainder.is_zero() && red.recompose() == *a, || format!("a{eta} reduction"))?;
        let b = representation_mask(a, eta).map_err(|e| e.to_string())?;
        ensure(verify_representation(a, &b, eta), || format!("B{eta} identity"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let gens = [z1_binomial(), cross_generator(), z2_binomial()];
    for case in 0..100 {
        let member = gens.iter().fold(LaurentPoly::zero(), |acc, g| &acc + &(g * &random_poly(&mut rng, 3, 4)));
        let red = hbasis_reduce(&member);
        ensure(red.remainder.is_zero() && red.recompose() == member, || format!("member case {case}"))?;
        let mut extra = LaurentPoly::zero();
        while extra.is_zero() {
            for &m in &QUOTIENT_MONOMIALS {
                if rng.gen_bool(0.5) {
                    extra.add_term(m, Dyadic::new(rng.gen_range(-16..=16), rng.gen_range(0..=3)));
                }
            }
        }
        let f = &member + &extra;
        let red = hbasis_reduce(&f);
        ensure(red.remainder == extra && red.recompose() == f, || format!("non-member case {case}"))?;
    }
    Ok("DD cofactors and B masks exact; 100 members, 100 non-members".into())
}

fn intertwining() -> Check {
    let pair = dd_pair();
    let reps = [representation_mask(&pair.a0, 0).map_err(|e| e.to_string())?, representation_mask(&pair.a1, 1).map_err(|e| e.to_string())?];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let inputs: Vec<LaurentPoly> = (0..20).map(|_| random_poly(&mut rng, 2, 6)).collect();
    let words: Vec<EpsWord> = std::iter::once(EpsWord::empty()).chain(words_up_to(3)).collect();
    for eps in &words {
        for (k, c) in inputs.iter().enumerate() {
            ensure(check_intertwining(&pair, &reps, eps, c).map_err(|e| e.to_string())?, || format!("eps={eps}, input {k}"))?;
        }
    }
    Ok(format!("{} words x {} inputs", words.len(), inputs.len()))
}

/// Regression constant: the depth-4 bound `max_eps ‖B_eps‖` of the DD pair.
const DD_DEPTH4_NORM: &str = "118067921225/2^37";

fn convergence_certificate() -> Check {
    let pair = dd_pair();
    let b0 = representation_mask(&pair.a0, 0).map_err(|e| e.to_string())?;
    let b1 = representation_mask(&pair.a1, 1).map_err(|e| e.to_string())?;
    let est = jsr_estimate(&b0, &b1, &JsrOptions::with_depth(6));
    ensure(est.verdict == Verdict::Converges, || format!("verdict {}", est.verdict))?;
    ensure(est.upper < 1.0 && est.upper_norm < Dyadic::ONE && est.depth <= 6, || format!("upper {}", est.upper))?;
    let frozen: Dyadic = DD_DEPTH4_NORM.parse().map_err(|e| format!("{e}"))?;
    ensure(est.per_depth[3].upper_norm == Some(frozen), || format!("depth-4 norm {:?}", est.per_depth[3].upper_norm))?;
    ensure(est.lower <= est.upper, || "lower above upper".into())?;
    Ok(format!("upper {:.4} at depth {}, lower {:.4}", est.upper, est.depth, est.lower))
}

fn subdivision_exactness() -> Check {
    let pair = dd_pair();
    // Interpolation invariance over the tree of words up to length 4.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..20 {
        let c = SampledField::<Dyadic>::from_poly(&random_poly(&mut rng, 2, 8));
        let mut stack = vec![(EpsWord::empty(), c.clone())];
        while let Some((eps, field)) = stack.pop() {
            let w = dilation_int(&eps);
            ensure(c.iter().all(|(a, v)| field.get(w.apply(a)) == v), || format!("interpolation fails: input {k}, eps={eps}"))?;
            if eps.len() < 4 {
                for eta in 0..2u8 {
                    let next = step(pair.mask(eta), eta, &field).map_err(|e| e.to_string())?;
                    stack.push((eps.child(eta), next));
                }
            }
        }
    }
    // Discrete refinement identity for every word up to length 5.
    let mut masks: BTreeMap<EpsWord, SampledField<Dyadic>> = BTreeMap::new();
    masks.insert(EpsWord::empty(), SampledField::delta(0));
    for eps in words_up_to(5) {
        let (head, last) = eps.split_last().expect("nonempty");
        let next = step(pair.mask(last), last, &masks[&head]).map_err(|e| e.to_string())?;
        masks.insert(eps, next);
    }
    for eps in words_up_to(5) {
        let (first, tail) = eps.split_first().expect("nonempty");
        ensure(first_step_expansion(&masks[&eps], pair.mask(first), &tail, &masks[&tail]), || {
            format!("refinement identity fails at {eps}")
        })?;
    }
    for n in 1..=4 {
        let zeros = masks[&EpsWord::zeros(n)].to_poly();
        let ones = masks[&EpsWord::ones(n)].to_poly();
        ensure(ones == shear_reindex(&zeros, 1), || format!("shear conjugation fails at n={n}"))?;
    }
    for k in 0..=3 {
        ensure(check_poly_reproduction(&pair, k, Window::centered(12)).map_err(|e| e.to_string())?, || format!("degree {k} not reproduced"))?;
    }
    Ok("interpolation |eps|<=4 x 20, refinement identity |eps|<=5, shear n<=4, degrees 0..3".into())
}

/// Whether `lhs = Σ_α a(α) tail(· - W_tail α)`, accumulated densely on
/// integer numerators over the box of `lhs`.
fn first_step_expansion(lhs: &SampledField<Dyadic>, a: &LaurentPoly, tail_word: &EpsWord, tail: &SampledField<Dyadic>) -> bool {
    let sa = a.terms().map(|(_, v)| v.log2den()).max().unwrap_or(0);
    let st = tail.values().iter().map(|v| v.log2den()).max().unwrap_or(0);
    let scale = sa + st;
    let (origin, rows, cols) = (lhs.origin(), lhs.rows() as i64, lhs.cols() as i64);
    let mut acc = vec![0i128; (rows * cols) as usize];
    let w = dilation_int(tail_word);
    let tail_nums: Vec<(Exp, i128)> = tail
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(p, v)| (p, v.mul_pow2(st as i32).numerator()))
        .collect();
    for (alpha, v) in a.terms() {
        let va = v.mul_pow2(sa as i32).numerator();
        let wa = w.apply(alpha);
        for &(p, t) in &tail_nums {
            let (x, y) = (p.0 + wa.0 - origin.0, p.1 + wa.1 - origin.1);
            if x < 0 || y < 0 || x >= cols || y >= rows {
                return false;
            }
            acc[(y * cols + x) as usize] += va * t;
        }
    }
    lhs.values().iter().zip(acc).all(|(&l, r)| l == Dyadic::new(r, scale))
}

/// Checks `out(W_eps α) = input(α)` reading only the CSV rows that hold
/// coarse lattice points.
fn csv_interpolates(csv: &Path, input: &SampledField<Dyadic>, eps: &EpsWord) -> Result<(), String> {
    let text = std::fs::read_to_string(csv).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    let origin = header
        .split_whitespace()
        .find_map(|t| t.strip_prefix("origin="))
        .and_then(|o| o.split_once(','))
        .and_then(|(x, y)| Some((x.parse::<i64>().ok()?, y.parse::<i64>().ok()?)))
        .ok_or("header lacks origin")?;
    let rows: Vec<&str> = lines.collect();
    let w = dilation_int(eps);
    for (a, v) in input.iter() {
        let p = w.apply(a);
        let row = rows.get((p.1 - origin.1) as usize).ok_or("coarse point outside output rows")?;
        let cell = row.split(',').nth((p.0 - origin.0) as usize).ok_or("coarse point outside output cols")?;
        let got: Dyadic = cell.parse().map_err(|e| format!("{e}"))?;
        ensure(got == v, || format!("value {got} at {p:?}, input {v} at {a:?}"))?;
    }
    Ok(())
}

fn figure_reproduction() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut count = 0;
    for fixture in ["c1", "c2", "delta"] {
        let input = io::fixture(fixture).ok_or("missing fixture")?;
        for word in ["00000", "00010", "01000", "01111"] {
            let out = dir.path().join(format!("{fixture}_{word}"));
            let run = Command::new(env!("CARGO_BIN_EXE_shearsub"))
                .args(["refine", "--pair", "dd", "--fixture", fixture, "--eps", word, "--format", "both", "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            let stdout = String::from_utf8_lossy(&run.stdout);
            ensure(run.status.success() && stdout.contains("interpolation: ok"), || format!("{fixture} {word}: {stdout}"))?;
            csv_interpolates(&out.with_extension("csv"), &input, &word.parse().expect("word"))
                .map_err(|e| format!("{fixture} {word}: {e}"))?;
            let pgm = std::fs::read(out.with_extension("pgm")).map_err(|e| e.to_string())?;
            let dims = stdout.lines().find_map(|l| l.strip_prefix("dims: ")).ok_or("no dims line")?;
            let (r, c) = dims.split_once('x').ok_or("bad dims")?;
            let pixels = r.parse::<usize>().map_err(|e| e.to_string())? * c.parse::<usize>().map_err(|e| e.to_string())?;
            ensure(pgm.starts_with(b"P5\n") && io::pgm_scaling(&pgm).is_some(), || format!("{fixture} {word}: bad PGM header"))?;
            let header_len = pgm.len() - pixels;
            ensure(pgm[..header_len].ends_with(b"\n255\n"), || format!("{fixture} {word}: PGM size mismatch"))?;
            count += 1;
        }
    }
    Ok(format!("{count} configurations refined, checked and exported"))
}

fn random_periodic(rng: &mut ChaCha8Rng, size: usize) -> SampledField<Dyadic> {
    let mut c = SampledField::periodic_zeros(size, size);
    let values: Vec<Dyadic> = (0..size * size).map(|_| Dyadic::new(rng.gen_range(-256..=256), rng.gen_range(0..=6))).collect();
    c.fill_with(|(x, y)| values[y as usize * size + x as usize]);
    c
}

fn trees_combine(t: &ShearletTree<Dyadic>, u: &ShearletTree<Dyadic>, s: &ShearletTree<Dyadic>, a: Dyadic, b: Dyadic) -> bool {
    let comb = |x: &SampledField<Dyadic>, y: &SampledField<Dyadic>, z: &SampledField<Dyadic>| {
        x.zip_with(y, |p, q| a * p + b * q).is_ok_and(|f| f.values() == z.values())
    };
    t.scaling.keys().eq(s.scaling.keys())
        && t.details.keys().eq(s.details.keys())
        && t.scaling.iter().all(|(k, x)| comb(x, &u.scaling[k], &s.scaling[k]))
        && t.details.iter().all(|(k, x)| comb(x, &u.details[k], &s.details[k]))
}

fn fsd_reconstruction() -> Check {
    let pair = dd_pair();
    let opts = DecomposeOptions::full(3);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fields: Vec<_> = (0..10).map(|_| random_periodic(&mut rng, 64)).collect();
    let mut trees = Vec::new();
    for (k, c) in fields.iter().enumerate() {
        let tree = decompose(c, &opts, &pair).map_err(|e| e.to_string())?;
        ensure(tree.leaves().len() == 8, || "expected 8 leaves".into())?;
        for leaf in tree.leaves() {
            let back = reconstruct(&tree, &leaf, &pair).map_err(|e| e.to_string())?;
            ensure(back == *c, || format!("field {k}, path {leaf}: reconstruction differs"))?;
        }
        trees.push(tree);
    }
    let mut constant = SampledField::<Dyadic>::periodic_zeros(64, 64);
    constant.fill_with(|_| Dyadic::new(-5, 3));
    let tree = decompose(&constant, &opts, &pair).map_err(|e| e.to_string())?;
    ensure(tree.details.values().all(SampledField::is_zero), || "constant input left details".into())?;
    let (a, b) = (Dyadic::new(3, 2), Dyadic::new(-7, 1));
    let combined = fields[0].zip_with(&fields[1], |p, q| a * p + b * q).map_err(|e| e.to_string())?;
    let tree = decompose(&combined, &opts, &pair).map_err(|e| e.to_string())?;
    ensure(trees_combine(&trees[0], &trees[1], &tree, a, b), || "decomposition is not linear".into())?;
    ensure(fields[0].boundary() == Boundary::Periodic { p1: 64, p2: 64 }, || "fields must be periodic".into())?;
    Ok("10 fields x 8 paths exact; constants and linearity exact".into())
}

type Criterion = (&'static str, u64, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("matrix algebra", 5, matrix_algebra),
        ("lattice refinement", 5, lattice_refinement),
        ("direction planner", 1, direction_planner),
        ("DD pair validity", 1, dd_validity),
        ("ideal algebra", 10, ideal_algebra),
        ("intertwining", 10, intertwining),
        ("convergence certificate", 60, convergence_certificate),
        ("subdivision exactness", 60, subdivision_exactness),
        ("figure reproduction", 30, figure_reproduction),
        ("FSD perfect reconstruction", 60, fsd_reconstruction),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (verdict, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the time budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("criterion {:>2} {name}: {verdict} [{:.2}s / {budget}s] {detail}", k + 1, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
