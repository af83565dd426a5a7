use std::fs;
use std::path::Path;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearsub::convergence::{convergence_verdict, jsr_estimate, ConvergenceReport, JsrOptions};
use shearsub::fsd::{decompose as fsd_decompose, reconstruct as fsd_reconstruct, Branches, DecomposeOptions};
use shearsub::lattice::{dilation_int, parse_rational, plan_direction, Slope};
use shearsub::masks::{self, Mask1D};
use shearsub::symbol::{hbasis_reduce, sum_rule_check};
use shearsub::{io, subdivision, Boundary, Dyadic, EpsWord, Error, MaskPair, MatrixMask, Result, SampledField, Scalar};

use crate::{ConvergeArgs, DecomposeArgs, Format, PairArgs, PlanArgs, ReconstructArgs, RefineArgs, RoundtripArgs};

const VALIDATION_FAILED: u8 = 3;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => 2,
        Error::NotInIdeal { .. } | Error::NotInterpolatory | Error::Unreachable(_) | Error::WindowTooSmall(_) => 3,
        Error::PeriodMismatch(_) | Error::ShapeMismatch(_) | Error::MissingNode(_) | Error::Io(_) => 4,
    }
}

fn rule_1d(name: &str) -> Result<Mask1D> {
    match name.trim() {
        "dd" => Ok(masks::dd_mask()),
        s => {
            let m = s
                .strip_prefix("bspline:")
                .and_then(|m| m.parse().ok())
                .ok_or_else(|| Error::Parse(format!("1-D rule {s:?} must be dd or bspline:<m>")))?;
            masks::bspline_mask(m)
        }
    }
}

fn named_pair(name: &str) -> Result<MaskPair> {
    match name.trim() {
        "dd" => Ok(masks::dd_pair()),
        "indicator" => Ok(masks::indicator_pair()),
        s if s.starts_with("bspline:") => {
            let m = s["bspline:".len()..].parse().map_err(|_| Error::Parse(format!("bad B-spline order in {s:?}")))?;
            masks::bspline_pair(m)
        }
        s if s.starts_with("tensor:") => {
            let (b1, b2) = s["tensor:".len()..]
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("{s:?} must read tensor:<b1>,<b2>")))?;
            let mut pair = masks::make_pair(&rule_1d(b1)?, &rule_1d(b2)?);
            pair.name = s.to_string();
            Ok(pair)
        }
        s => Err(Error::Parse(format!("unknown pair {s:?}"))),
    }
}

fn load_pair(args: &PairArgs) -> Result<MaskPair> {
    let pair = match (&args.a0, &args.a1) {
        (Some(f0), Some(f1)) => {
            let (name, a0) = masks::mask_from_json(&fs::read_to_string(f0)?)?;
            let (_, a1) = masks::mask_from_json(&fs::read_to_string(f1)?)?;
            MaskPair::new(name, a0, a1)
        }
        _ => named_pair(&args.pair)?,
    };
    match &args.scale {
        Some(c) => Ok(pair.scaled(c.parse::<Dyadic>()?)),
        None => Ok(pair),
    }
}

pub fn mask_build(args: &PairArgs, out_dir: &Path) -> Result<ExitCode> {
    let pair = load_pair(args)?;
    fs::create_dir_all(out_dir)?;
    for eta in 0..2u8 {
        let path = out_dir.join(format!("a{eta}.json"));
        fs::write(&path, masks::mask_to_json(&format!("{}/a{eta}", pair.name), pair.mask(eta))? + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fail"
    }
}

pub fn mask_check(path: &Path) -> Result<ExitCode> {
    let (name, a) = masks::mask_from_json(&fs::read_to_string(path)?)?;
    let sum_rule = sum_rule_check(&a, 0);
    let reduction = hbasis_reduce(&a);
    println!("name: {name}");
    println!("sum_rule: {}, interpolatory: {}", flag(sum_rule), flag(masks::check_interpolatory(&a)));
    println!("coefficient_sum: {}", a.coefficient_sum());
    println!("p: {}", reduction.p);
    println!("q: {}", reduction.q);
    println!("r: {}", reduction.r);
    println!("remainder: {}", reduction.remainder);
    Ok(if sum_rule { ExitCode::SUCCESS } else { ExitCode::from(VALIDATION_FAILED) })
}

fn load_input(args: &RefineArgs) -> Result<SampledField<Dyadic>> {
    let field = match (&args.input, &args.fixture) {
        (Some(p), _) => io::read_field(p)?,
        (None, Some(name)) => io::fixture(name).ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))?,
        (None, None) => return Err(Error::InvalidArgument("give --input or --fixture".into())),
    };
    match &args.boundary {
        None => Ok(field),
        Some(b) => {
            let boundary: Boundary = b.parse()?;
            SampledField::from_parts(field.origin(), field.rows(), field.cols(), field.values().to_vec(), field.eps().clone(), boundary)
        }
    }
}

/// Whether `out(W_eps α) = input(α)` over the input box.
fn interpolates<T: Scalar>(input: &SampledField<T>, out: &SampledField<T>, eps: &EpsWord) -> bool {
    let w = dilation_int(eps);
    input.iter().all(|(a, v)| out.get(w.apply(a)) == v)
}

fn emit<T: Scalar>(field: &SampledField<T>, out: &Path, format: Format) -> Result<()> {
    if format != Format::Pgm {
        let p = out.with_extension("csv");
        io::write_field(&p, field)?;
        println!("wrote {}", p.display());
    }
    if format != Format::Csv {
        let p = out.with_extension("pgm");
        fs::write(&p, io::field_to_pgm(field))?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn refine_with<T: Scalar>(pair: &MaskPair, eps: &EpsWord, input: &SampledField<T>, args: &RefineArgs) -> Result<ExitCode> {
    let out = subdivision::run(pair, eps, input)?;
    emit(&out, &args.out, args.format)?;
    println!("dims: {}x{}", out.rows(), out.cols());
    if !pair.is_interpolatory() {
        println!("interpolation: n/a");
        return Ok(ExitCode::SUCCESS);
    }
    let ok = interpolates(input, &out, eps);
    println!("interpolation: {}", flag(ok));
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(VALIDATION_FAILED) })
}

pub fn refine(args: &RefineArgs) -> Result<ExitCode> {
    let pair = load_pair(&args.pair)?;
    let eps: EpsWord = args.eps.parse()?;
    let input = load_input(args)?;
    if args.float {
        refine_with(&pair, &eps, &input.to_f64(), args)
    } else {
        refine_with(&pair, &eps, &input, args)
    }
}

pub fn converge(args: &ConvergeArgs) -> Result<ExitCode> {
    let opts = JsrOptions { max_depth: args.max_depth, max_positions: args.max_positions, probes: args.probes, seed: args.seed };
    if opts.max_depth == 0 {
        return Err(Error::InvalidArgument("--max-depth must be at least 1".into()));
    }
    let report = if args.pair.pair == "zero" && args.pair.a0.is_none() {
        let zero = MatrixMask::zero(2, 2);
        ConvergenceReport {
            sum_rule: [true, true],
            estimate: Some(jsr_estimate(&zero, &zero, &opts)),
            diagnostics: vec!["difference masks B0 = B1 = 0 given directly".into()],
        }
    } else {
        convergence_verdict(&load_pair(&args.pair)?, &opts)?
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.estimate.is_none() {
        eprintln!("sum_rule: fail");
        return Ok(ExitCode::from(VALIDATION_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn plan(args: &PlanArgs) -> Result<ExitCode> {
    let s: Slope = args.source_slope.parse()?;
    let t: Slope = args.target.parse()?;
    let word = plan_direction(s, t, parse_rational(&args.delta)?)?;
    println!("{word}");
    Ok(ExitCode::SUCCESS)
}

pub fn decompose(args: &DecomposeArgs) -> Result<ExitCode> {
    let pair = load_pair(&args.pair)?;
    let input: SampledField<Dyadic> = io::read_field(&args.input)?;
    let branches = match &args.path {
        Some(p) => Branches::Path(p.parse()?),
        None => Branches::Full,
    };
    let opts = DecomposeOptions { depth: args.depth, branches, keep_interior: args.keep_interior };
    let tree = fsd_decompose(&input, &opts, &pair)?;
    io::write_tree(&args.tree_dir, &tree)?;
    println!(
        "wrote {}: {} scaling arrays, {} detail arrays",
        args.tree_dir.display(),
        tree.scaling.len(),
        tree.details.len()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<ExitCode> {
    let pair = load_pair(&args.pair)?;
    let tree = io::read_tree::<Dyadic>(&args.tree_dir)?;
    let out = fsd_reconstruct(&tree, &args.path.parse()?, &pair)?;
    io::write_field(&args.out, &out)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn random_field(rng: &mut ChaCha8Rng, size: usize) -> SampledField<Dyadic> {
    let mut c = SampledField::periodic_zeros(size, size);
    let values: Vec<Dyadic> = (0..size * size).map(|_| Dyadic::new(rng.gen_range(-256..=256), rng.gen_range(0..=4))).collect();
    c.fill_with(|(x, y)| values[y as usize * size + x as usize]);
    c
}

pub fn roundtrip(args: &RoundtripArgs) -> Result<ExitCode> {
    let pair = load_pair(&args.pair)?;
    let fields = match (&args.input, args.random) {
        (Some(p), _) => vec![io::read_field::<Dyadic>(p)?],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..n).map(|_| random_field(&mut rng, args.size)).collect()
        }
        (None, None) => return Err(Error::InvalidArgument("give --input or --random N".into())),
    };
    let mut worst = 0f64;
    let mut exact = true;
    let mut paths = 0;
    for c in &fields {
        let tree = fsd_decompose(c, &DecomposeOptions::full(args.depth), &pair)?;
        for leaf in tree.leaves() {
            let back = fsd_reconstruct(&tree, &leaf, &pair)?;
            worst = worst.max(back.max_abs_diff(c));
            exact &= back == *c;
            paths += 1;
        }
    }
    println!("fields: {}, paths: {paths}, max_error: {worst}, exact: {exact}", fields.len());
    Ok(if exact { ExitCode::SUCCESS } else { ExitCode::from(VALIDATION_FAILED) })
}
