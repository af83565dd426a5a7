//! End-to-end flows across modules: masks through convergence, refinement
//! through decomposition, and the file formats in between.

use shearsub::convergence::{convergence_verdict, JsrOptions, Verdict};
use shearsub::fsd::{decompose, detail_energy_map, reconstruct, DecomposeOptions};
use shearsub::lattice::{dilation_int, plan_direction, slope_after, Slope};
use shearsub::masks::{self, MaskPair};
use shearsub::subdivision::{check_poly_reproduction, limit_samples, run, Window};
use shearsub::{io, Dyadic, EpsWord, SampledField};

#[test]
fn mask_files_feed_the_convergence_check() {
    let pair = masks::dd_pair();
    let text = masks::mask_to_json("a0", &pair.a0).unwrap();
    let (_, a0) = masks::mask_from_json(&text).unwrap();
    let text = masks::mask_to_json("a1", &pair.a1).unwrap();
    let (_, a1) = masks::mask_from_json(&text).unwrap();
    let loaded = MaskPair::new("loaded", a0, a1);
    let report = convergence_verdict(&loaded, &JsrOptions::with_depth(2)).unwrap();
    assert_eq!(report.sum_rule, [true, true]);
    let estimate = report.estimate.unwrap();
    assert_eq!(estimate.per_depth.len(), 2);
    assert!(estimate.lower <= estimate.upper);
}

#[test]
fn scaled_pair_is_rejected_with_diagnostics() {
    let report = convergence_verdict(&masks::dd_pair().scaled(Dyadic::from(2)), &JsrOptions::with_depth(2)).unwrap();
    assert_eq!(report.sum_rule, [false, false]);
    assert!(report.estimate.is_none());
    assert_eq!(report.diagnostics.len(), 16);
}

#[test]
fn unsheared_mask_on_both_branches_is_analyzable() {
    let a0 = masks::dd_pair().a0;
    let pair = MaskPair::new("a0,a0", a0.clone(), a0);
    let report = convergence_verdict(&pair, &JsrOptions::with_depth(2)).unwrap();
    let estimate = report.estimate.unwrap();
    assert!(matches!(estimate.verdict, Verdict::Converges | Verdict::Inconclusive | Verdict::NotContractive));
}

#[test]
fn indicator_pair_reproduces_constants_only() {
    let pair = masks::indicator_pair();
    assert!(check_poly_reproduction(&pair, 0, Window::centered(10)).unwrap());
    assert!(!check_poly_reproduction(&pair, 1, Window::centered(10)).unwrap());
}

#[test]
fn cascade_samples_are_cardinal() {
    let eps = EpsWord::zeros(5);
    let samples = limit_samples(&masks::dd_pair(), &eps);
    let w = dilation_int(&eps);
    assert_eq!(samples.get((0, 0)), Dyadic::ONE);
    for a in [(1, 0), (0, 1), (-1, 1), (2, -1)] {
        assert_eq!(samples.get(w.apply(a)), Dyadic::ZERO);
    }
}

#[test]
fn planned_words_refine_fixtures_consistently() {
    let delta = shearsub::lattice::parse_rational("1/100").unwrap();
    let word = plan_direction(Slope::Infinite, Slope::integer(2), delta).unwrap();
    let Slope::Finite(reached) = slope_after(Slope::Infinite, &word) else { panic!("finite target") };
    let gap = reached - 2;
    assert!(gap < delta && -gap < delta);
    let c1 = io::fixture_c1();
    let out = run(&masks::dd_pair(), &word, &c1).unwrap();
    let w = dilation_int(&word);
    assert!(c1.iter().all(|(a, v)| out.get(w.apply(a)) == v));
}

#[test]
fn refined_fixture_decomposes_into_pure_scaling() {
    let pair = masks::dd_pair();
    let word: EpsWord = "01".parse().unwrap();
    let fine = run(&pair, &word, &io::fixture_c2()).unwrap();
    // Analysis along the reversed word undoes the refinement exactly.
    let tree = decompose(&fine, &DecomposeOptions::path(word.reverse()), &pair).unwrap();
    assert!(tree.details.values().all(SampledField::is_zero));
    assert!(tree.scaling[&word.reverse()].same_sequence(&io::fixture_c2()));
    for node in ["1", "10"] {
        let map = detail_energy_map(&tree, &node.parse().unwrap()).unwrap();
        assert!(map.is_zero());
    }
}

#[test]
fn tree_directories_reconstruct_exactly() {
    let pair = masks::dd_pair();
    let mut c = SampledField::<Dyadic>::periodic_zeros(16, 32);
    c.fill_with(|(x, y)| Dyadic::new(i128::from((x * 7 + y * y) % 11 - 5), 2));
    let tree = decompose(&c, &DecomposeOptions::full(2), &pair).unwrap();
    let dir = tempdir();
    io::write_tree(&dir, &tree).unwrap();
    let back = io::read_tree::<Dyadic>(&dir).unwrap();
    for leaf in back.leaves() {
        assert_eq!(reconstruct(&back, &leaf, &pair).unwrap(), c);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn zero_boundary_fixtures_reconstruct_exactly() {
    let pair = masks::dd_pair();
    for name in ["c1", "c2", "delta"] {
        let c = io::fixture(name).unwrap();
        let tree = decompose(&c, &DecomposeOptions::full(3), &pair).unwrap();
        for leaf in tree.leaves() {
            assert_eq!(reconstruct(&tree, &leaf, &pair).unwrap(), c, "{name} via {leaf}");
        }
    }
}

#[test]
fn float_and_exact_refinement_agree() {
    let pair = masks::dd_pair();
    let word: EpsWord = "0110".parse().unwrap();
    let exact = run(&pair, &word, &io::fixture_c2()).unwrap();
    let float = run(&pair, &word, &io::fixture_c2().to_f64()).unwrap();
    assert!(exact.to_f64().max_abs_diff(&float) < 1e-12);
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("shearsub-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
