use std::path::PathBuf;

use clifford_povm::distinguish::{
    bound_4design, bound_converse_pauli, bound_main, converse_lower_from_alpha, helstrom_bias, is_typical,
    kappa_ratio, lambda_lower_generic, lambda_summary, Povm, PovmSpec, PURE_PAIR_CONSTANT,
};
use clifford_povm::entropic::{
    average_basis_entropy, certainty_constants, collision_bound, fig1, grid_refinement, povm_entropy,
    uncertainty_bound, DesignLevel, GridPolicy, UncertaintyResult, MAX_EXACT_ENTROPY_QUBITS,
    REFINEMENT_GRIDS,
};
use clifford_povm::fiducial::{
    alpha, alpha_range, beta, effective_rank, four_design_alpha, load_fiducial_file, make_fiducial,
    typical_alpha_threshold, FiducialKind,
};
use clifford_povm::moments::{clifford_fourth_moment, second_moment};
use clifford_povm::operator::{HermitianOperator, PureState};
use clifford_povm::pauli::PauliOperator;
use clifford_povm::random::{random_hermitian, random_pure_state, stream_rng};
use clifford_povm::stabilizer::StabilizerOrbit;
use clifford_povm::{Error, Result};

use crate::report::{Report, Value};

/// Stream reserved for drawing test operators, disjoint from the per-sample Clifford streams.
const OPERATOR_STREAM: u64 = u64::MAX;
const MOMENT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FiducialArg {
    Stabilizer,
    Magic,
    Haar,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    /// Exact when an enumerated or full-group orbit is available, else Monte Carlo.
    Auto,
    Exact,
    Mc,
}

#[derive(Clone, Debug)]
pub struct Context {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
}

pub struct FiducialChoice {
    pub kind: FiducialArg,
    pub file: Option<PathBuf>,
}

impl FiducialChoice {
    fn resolve(&self, seed: u64) -> Result<FiducialKind> {
        let vector = self.file.as_deref().map(load_fiducial_file).transpose()?;
        let tag = match self.kind {
            FiducialArg::Stabilizer => "stabilizer",
            FiducialArg::Magic => "magic",
            FiducialArg::Haar => "haar",
            FiducialArg::Explicit => "explicit",
        };
        FiducialKind::from_tag(tag, Some(seed), vector)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    Ok(())
}

pub fn alpha_cmd(ctx: &Context, n: usize, fiducial: &FiducialChoice) -> Result<Report> {
    check_n(n)?;
    let kind = fiducial.resolve(ctx.seed)?;
    let z = make_fiducial(&kind, n)?;
    let d = z.dim();
    let a = alpha(&z)?;
    let (lo, hi) = alpha_range(d);
    let report = Report::record(
        "alpha",
        vec![
            ("n", n.into()),
            ("d", d.into()),
            ("fiducial", kind.tag().into()),
            ("alpha", a.into()),
            ("alpha_min", lo.into()),
            ("alpha_max", hi.into()),
            ("beta", beta(a, d)?.into()),
            ("four_design_alpha", four_design_alpha(d).into()),
            ("typical_threshold", typical_alpha_threshold(d).into()),
            ("typical", is_typical(&z)?.into()),
        ],
    );
    Ok(with_seed_if_random(report, &kind, ctx.seed))
}

fn with_seed_if_random(report: Report, kind: &FiducialKind, seed: u64) -> Report {
    match kind {
        FiducialKind::HaarRandom { .. } => report.with_header("seed", seed),
        _ => report,
    }
}

/// Builds the POVM for `mode`, returning whether it is exact.
fn build_povm(ctx: &Context, n: usize, kind: &FiducialKind, mode: ModeArg, samples: usize) -> Result<Povm> {
    let exact_available = matches!(kind, FiducialKind::StabilizerBasisState) || n <= 2;
    let exact = match mode {
        ModeArg::Exact if !exact_available => {
            return Err(Error::UnsupportedQubits {
                n,
                max: 2,
                what: "exact orbits of non-stabilizer fiducials",
            })
        }
        ModeArg::Exact => true,
        ModeArg::Mc => false,
        ModeArg::Auto => exact_available,
    };
    if !exact {
        let spec = PovmSpec::monte_carlo(n, kind.clone(), samples, ctx.seed);
        return Povm::build(&spec, None);
    }
    if matches!(kind, FiducialKind::StabilizerBasisState) {
        Povm::build(&PovmSpec::stabilizer(n), ctx.cache_dir.as_deref())
    } else {
        Povm::full_group_orbit(&make_fiducial(kind, n)?)
    }
}

fn povm_header(report: Report, povm: &Povm, ctx: &Context, samples: usize) -> Report {
    let mode = if povm.is_exact() { "exact" } else { "monte_carlo" };
    let report = report.with_header("mode", mode).with_header("seed", ctx.seed);
    if povm.is_exact() {
        report.with_header("samples", Value::Null)
    } else {
        report.with_header("samples", samples)
    }
}

fn parse_operator(spec: &str, n: usize, seed: u64) -> Result<HermitianOperator> {
    let d = 1usize << n;
    let mut rng = stream_rng(seed, OPERATOR_STREAM);
    match spec {
        "identity" => Ok(HermitianOperator::identity(d)),
        "random-hermitian" => Ok(random_hermitian(d, &mut rng)),
        "random-pure-pair" => {
            let a = random_pure_state(d, &mut rng);
            let b = random_pure_state(d, &mut rng);
            Ok(HermitianOperator::projector(&a).sub(&HermitianOperator::projector(&b)))
        }
        other => {
            let label = other.strip_prefix("pauli:").ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown operator {other:?} (identity, random-hermitian, random-pure-pair, pauli:LABEL)"
                ))
            })?;
            let p: PauliOperator = label.parse()?;
            if p.qubits() != n {
                return Err(Error::QubitMismatch(p.qubits(), n));
            }
            Ok(p.matrix())
        }
    }
}

pub fn orbit_norm_cmd(
    ctx: &Context,
    n: usize,
    fiducial: &FiducialChoice,
    operator: &str,
    mode: ModeArg,
    samples: usize,
) -> Result<Report> {
    check_n(n)?;
    let kind = fiducial.resolve(ctx.seed)?;
    let z = make_fiducial(&kind, n)?;
    let a = alpha(&z)?;
    let x = parse_operator(operator, n, ctx.seed)?;
    let povm = build_povm(ctx, n, &kind, mode, samples)?;
    let image = povm.image_l1(&x)?;
    let l1 = x.spectrum().trace_norm();
    let main = bound_main(&x, a)?;
    let report = Report::record(
        "orbit-norm",
        vec![
            ("n", n.into()),
            ("d", povm.dim().into()),
            ("fiducial", kind.tag().into()),
            ("operator", operator.into()),
            ("alpha", a.into()),
            ("trace_norm", l1.into()),
            ("r_eff", effective_rank(&x)?.into()),
            ("image_l1", image.value.into()),
            ("std_error", image.std_error.into()),
            ("samples_used", image.samples_used.into()),
            ("ratio", (image.value / l1).into()),
            ("kappa_ratio", kappa_ratio(&x, a)?.into()),
            ("main_bound_ratio", main.ratio.into()),
        ],
    );
    Ok(povm_header(report, &povm, ctx, samples))
}

pub fn bounds_cmd(ctx: &Context, n: usize, fiducial: &FiducialChoice) -> Result<Report> {
    check_n(n)?;
    let kind = fiducial.resolve(ctx.seed)?;
    let z = make_fiducial(&kind, n)?;
    let d = z.dim();
    let a = alpha(&z)?;
    let tabulated = match &kind {
        FiducialKind::ExplicitVector(_) => None,
        FiducialKind::HaarRandom { .. } if !is_typical(&z)? => None,
        k => Some(lambda_summary(k, d)?),
    };
    let rank_one = bound_4design(&HermitianOperator::projector(&PureState::basis(d, 0)))?;
    let report = Report::record(
        "bounds",
        vec![
            ("n", n.into()),
            ("d", d.into()),
            ("fiducial", kind.tag().into()),
            ("alpha", a.into()),
            ("lambda_lower_generic", lambda_lower_generic(a, d).into()),
            ("lambda_lower", tabulated.map(|t| t.lower).into()),
            ("lambda_upper", tabulated.and_then(|t| t.upper).into()),
            ("converse_pauli", bound_converse_pauli(&z)?.into()),
            ("converse_lower_from_alpha", converse_lower_from_alpha(a, d).into()),
            ("typical", is_typical(&z)?.into()),
            ("pure_pair_constant", PURE_PAIR_CONSTANT.into()),
            ("four_design_constant", rank_one.constant.into()),
        ],
    );
    Ok(with_seed_if_random(report, &kind, ctx.seed))
}

pub fn verify_moments_cmd(ctx: &Context, n: usize, fiducial: &FiducialChoice, operators: usize) -> Result<Report> {
    check_n(n)?;
    if operators == 0 {
        return Err(Error::InvalidArgument("--samples must be positive".into()));
    }
    let kind = fiducial.resolve(ctx.seed)?;
    let z = make_fiducial(&kind, n)?;
    let a = alpha(&z)?;
    let povm = build_povm(ctx, n, &kind, ModeArg::Exact, 0)?;
    let d = povm.dim();
    let mut rng = stream_rng(ctx.seed, OPERATOR_STREAM);
    let mut worst4 = 0.0f64;
    let mut worst2 = 0.0f64;
    for _ in 0..operators {
        let x = random_hermitian(d, &mut rng);
        let m = povm.moments(&x)?;
        worst4 = worst4.max((m.m4 - clifford_fourth_moment(&x, a)?).abs() / m.m4.abs());
        worst2 = worst2.max((m.m2 - second_moment(&x)).abs() / m.m2.abs());
    }
    Ok(Report::record(
        "verify-moments",
        vec![
            ("n", n.into()),
            ("d", d.into()),
            ("fiducial", kind.tag().into()),
            ("alpha", a.into()),
            ("orbit_size", povm.outcome_count().into()),
            ("operators", operators.into()),
            ("max_relative_error", worst4.into()),
            ("max_relative_error_second", worst2.into()),
            ("passed", (worst4 < MOMENT_TOLERANCE && worst2 < MOMENT_TOLERANCE).into()),
        ],
    )
    .with_header("seed", ctx.seed)
    .with_header("samples", operators))
}

const LP_COLUMNS: [&str; 9] = [
    "n",
    "d",
    "level",
    "alpha_order",
    "grid",
    "lambda_alpha",
    "bound_bits",
    "c_of_d",
    "support_size",
];

fn lp_row(n: usize, r: &UncertaintyResult) -> Vec<Value> {
    vec![
        n.into(),
        r.d.into(),
        r.level.tag().into(),
        r.renyi_order.into(),
        r.grid.to_string().into(),
        r.lambda_alpha.into(),
        r.bound_bits.into(),
        r.c_of_d.into(),
        r.support_size.into(),
    ]
}

pub fn uncertainty_lp_cmd(
    n: usize,
    level: DesignLevel,
    epsilon: f64,
    grid_size: usize,
    grid: GridPolicy,
    refine: bool,
) -> Result<Report> {
    check_n(n)?;
    if n > 62 {
        return Err(Error::UnsupportedQubits {
            n,
            max: 62,
            what: "the uncertainty LP",
        });
    }
    let d = 1usize << n;
    let order = 1.0 + epsilon;
    let mut columns = LP_COLUMNS.to_vec();
    columns.push("relative_delta");
    let mut report = Report::table("uncertainty-lp", &columns)
        .with_header("renyi_epsilon", epsilon)
        .with_header("collision_bound_bits", collision_bound(d));
    for spec in grid.grids(n, grid_size) {
        if refine {
            let r = grid_refinement(d, level, order, spec, &REFINEMENT_GRIDS)?;
            for (i, res) in r.results.iter().enumerate() {
                let mut row = lp_row(n, res);
                row.push(if i == 0 { Value::Null } else { r.relative_deltas[i - 1].into() });
                report.push_row(row);
            }
        } else {
            let mut row = lp_row(n, &uncertainty_bound(d, level, order, spec)?);
            row.push(Value::Null);
            report.push_row(row);
        }
    }
    Ok(report)
}

pub fn fig1_cmd(n_max: usize, epsilon: f64, grid_size: usize, grid: GridPolicy) -> Result<Report> {
    let order = 1.0 + epsilon;
    let mut report = Report::table("fig1", &LP_COLUMNS[..8])
        .with_header("renyi_epsilon", epsilon)
        .with_header("grid_size", grid_size)
        .with_header("grid_policy", format!("{grid:?}").to_lowercase());
    for p in fig1(n_max, order, grid_size, grid)? {
        let row = match &p.result {
            Some(r) => lp_row(p.n, r)[..8].to_vec(),
            None => vec![
                p.n.into(),
                (1usize << p.n).into(),
                p.level.tag().into(),
                order.into(),
                p.grid.to_string().into(),
                Value::Null,
                Value::Null,
                Value::Null,
            ],
        };
        report.push_row(row);
    }
    Ok(report)
}

pub fn certainty_cmd(ctx: &Context, n: usize, states: usize) -> Result<Report> {
    check_n(n)?;
    if n > 62 {
        return Err(Error::UnsupportedQubits {
            n,
            max: 62,
            what: "certainty constants",
        });
    }
    let d = 1usize << n;
    let k = certainty_constants(d)?;
    let mut fields = vec![
        ("n", n.into()),
        ("d", d.into()),
        ("log2_outcomes", k.log2_outcomes.into()),
        ("mutual_information_bound", k.mutual_information_bound.into()),
        ("entropy_ceiling", k.entropy_ceiling.into()),
        ("design4_comparison", k.design4_comparison.into()),
        ("design2_comparison", k.design2_comparison.into()),
        ("collision_bound", collision_bound(d).into()),
    ];
    let mut report_seed = None;
    if states > 0 {
        if n > MAX_EXACT_ENTROPY_QUBITS {
            return Err(Error::UnsupportedQubits {
                n,
                max: MAX_EXACT_ENTROPY_QUBITS,
                what: "entropy checks on random states",
            });
        }
        let orbit = match &ctx.cache_dir {
            Some(dir) => StabilizerOrbit::cached(n, dir)?,
            None => StabilizerOrbit::enumerate(n)?,
        };
        let povm = Povm::from_orbit(orbit.clone());
        let (mut max_entropy, mut min_average) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut ceiling_violations, mut floor_violations) = (0usize, 0usize);
        for i in 0..states as u64 {
            let phi = HermitianOperator::projector(&random_pure_state(d, &mut stream_rng(ctx.seed, i)));
            let h = povm_entropy(&povm, &phi)?;
            let avg = average_basis_entropy(&orbit, &phi)?;
            max_entropy = max_entropy.max(h);
            min_average = min_average.min(avg);
            ceiling_violations += usize::from(h > k.entropy_ceiling);
            floor_violations += usize::from(avg < collision_bound(d));
        }
        fields.extend([
            ("states", states.into()),
            ("max_povm_entropy", max_entropy.into()),
            ("ceiling_violations", ceiling_violations.into()),
            ("min_average_entropy", min_average.into()),
            ("floor_violations", floor_violations.into()),
        ]);
        report_seed = Some(ctx.seed);
    }
    let mut report = Report::record("certainty", fields);
    if let Some(seed) = report_seed {
        report = report.with_header("seed", seed).with_header("samples", states);
    }
    Ok(report)
}

pub fn distinguish_cmd(
    ctx: &Context,
    n: usize,
    fiducial: &FiducialChoice,
    pairs: usize,
    mode: ModeArg,
    samples: usize,
) -> Result<Report> {
    check_n(n)?;
    if pairs == 0 {
        return Err(Error::InvalidArgument("--pairs must be positive".into()));
    }
    let kind = fiducial.resolve(ctx.seed)?;
    let povm = build_povm(ctx, n, &kind, mode, samples)?;
    let d = povm.dim();
    let mut report = Report::table(
        "distinguish",
        &["pair", "trace_distance", "helstrom_bias", "povm_bias", "std_error", "ratio"],
    );
    let mut ratios = Vec::with_capacity(pairs);
    for i in 0..pairs as u64 {
        let mut rng = stream_rng(ctx.seed, OPERATOR_STREAM - 1 - i);
        let rho = HermitianOperator::projector(&random_pure_state(d, &mut rng));
        let sigma = HermitianOperator::projector(&random_pure_state(d, &mut rng));
        let diff = rho.sub(&sigma);
        let trace_distance = 0.5 * diff.spectrum().trace_norm();
        let image = povm.image_l1(&diff)?;
        let ratio = image.value / (2.0 * trace_distance);
        ratios.push(ratio);
        report.push_row(vec![
            (i as usize).into(),
            trace_distance.into(),
            helstrom_bias(0.5, &rho, &sigma)?.into(),
            (0.5 * image.value).into(),
            (0.5 * image.std_error).into(),
            ratio.into(),
        ]);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let below = ratios.iter().filter(|r| **r < PURE_PAIR_CONSTANT).count();
    let report = povm_header(report, &povm, ctx, samples)
        .with_header("fiducial", kind.tag())
        .with_header("n", n)
        .with_header("pairs", pairs)
        .with_header("min_ratio", min_ratio)
        .with_header("pure_pair_constant", PURE_PAIR_CONSTANT)
        .with_header("below_constant", below);
    Ok(report)
}
