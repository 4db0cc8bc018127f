//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clifford_povm::distinguish::{Povm, PURE_PAIR_CONSTANT};
use clifford_povm::entropic::{
    certainty_constants, collision_bound, exact_average_entropy, fig1, povm_entropy, DesignLevel, GridPolicy,
    DEFAULT_GRID_SIZE,
};
use clifford_povm::fiducial::{alpha, make_fiducial, typical_alpha_threshold, FiducialKind};
use clifford_povm::moments::{
    clifford_fourth_moment, fourth_moment_constant, lemma_ratios, lemma_ratios_from_spectrum, near_extremal_spectrum,
    orbit_moments, rank_two_constant,
};
use clifford_povm::operator::{HermitianOperator, PureState, Spectrum};
use clifford_povm::pauli::all_paulis;
use clifford_povm::random::{hermitian_from_spectrum, random_hermitian, random_hermitian_with_rank, random_pure_state, stream_rng};
use clifford_povm::stabilizer::{design_frame_potential, StabilizerOrbit};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn orbit(n: usize) -> Result<StabilizerOrbit, String> {
    StabilizerOrbit::enumerate(n).map_err(|e| e.to_string())
}

fn projector(psi: &PureState) -> HermitianOperator {
    HermitianOperator::projector(psi)
}

fn fourth_moment_identity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=2 {
        let orb = orbit(n)?;
        let d = 1usize << n;
        let a = alpha(&PureState::basis(d, 0)).map_err(|e| e.to_string())?;
        let mut rng = stream_rng(1, n as u64);
        for _ in 0..20 {
            let x = random_hermitian(d, &mut rng);
            let empirical = orbit_moments(&orb, &x).map_err(|e| e.to_string())?.m4;
            let formula = clifford_fourth_moment(&x, a).map_err(|e| e.to_string())?;
            worst = worst.max((empirical - formula).abs() / formula.abs());
        }
    }
    let elapsed = start.elapsed();
    ensure(worst < 1e-9, || format!("max relative error {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("max relative error {worst:.2e} in {:.2?}", elapsed))
}

fn pauli_converse_equality() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in 1..=3 {
        let povm = Povm::from_orbit(orbit(n)?);
        let d = (1usize << n) as f64;
        for w in all_paulis(n).filter(|p| !p.is_identity()) {
            let ratio = povm.image_l1(&w.matrix()).map_err(|e| e.to_string())?.value / d;
            worst = worst.max((ratio - 1.0 / (d + 1.0)).abs());
            checked += 1;
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("{checked} Paulis, max deviation {worst:.1e}"))
}

fn pure_pair_constant_holds() -> Outcome {
    let mut summary = Vec::new();
    for n in 2..=3 {
        let povm = Povm::from_orbit(orbit(n)?);
        let d = 1usize << n;
        let mut min_ratio = f64::INFINITY;
        for i in 0..500 {
            let mut rng = stream_rng(3, (n as u64) << 32 | i);
            let diff = projector(&random_pure_state(d, &mut rng)).sub(&projector(&random_pure_state(d, &mut rng)));
            let l1 = diff.spectrum().trace_norm();
            let ratio = povm.image_l1(&diff).map_err(|e| e.to_string())?.value / l1;
            ensure(ratio >= PURE_PAIR_CONSTANT, || format!("n={n} pair {i}: ratio {ratio}"))?;
            min_ratio = min_ratio.min(ratio);
        }
        summary.push(format!("n={n} min ratio {min_ratio:.4}"));
    }
    Ok(summary.join(", "))
}

fn lemma_suite() -> Outcome {
    let c1 = fourth_moment_constant();
    let mut rng = stream_rng(4, 0);
    let (mut max_r1, mut max_r2, mut max_r3, mut max_r4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let d = rng.random_range(2..=8);
        let rank = rng.random_range(1..=d);
        let r = lemma_ratios(&random_hermitian_with_rank(d, rank, &mut rng)).map_err(|e| e.to_string())?;
        max_r1 = max_r1.max(r.r1);
        max_r2 = max_r2.max(r.r2);
    }
    for _ in 0..1000 {
        let d = rng.random_range(2..=8);
        let r = lemma_ratios(&random_hermitian_with_rank(d, 2, &mut rng)).map_err(|e| e.to_string())?;
        max_r3 = max_r3.max(r.r3.ok_or("rank-2 operator without r3")?);
        max_r4 = max_r4.max(r.r4.ok_or("rank-2 operator without r4")?);
    }
    let mut traceless_dev = 0.0f64;
    for _ in 0..1000 {
        let d = rng.random_range(2..=8);
        let s = rng.random_range(0.1..3.0);
        let r = lemma_ratios(&hermitian_from_spectrum(&[s, -s], d, &mut rng)).map_err(|e| e.to_string())?;
        let (r3, r4) = (r.r3.ok_or("no r3")?, r.r4.ok_or("no r4")?);
        traceless_dev = traceless_dev.max((r3 - 12.0).abs()).max((r4 - 36.0).abs());
    }
    let y = 2f64.cbrt() - 1.0;
    let ev = near_extremal_spectrum(10_000, y).map_err(|e| e.to_string())?;
    let family = lemma_ratios_from_spectrum(&Spectrum::new(ev)).map_err(|e| e.to_string())?.r1;

    ensure(max_r1 <= c1 + 1e-9, || format!("r1 = {max_r1}"))?;
    ensure(max_r2 <= 9.673, || format!("r2 = {max_r2}"))?;
    ensure(max_r3 <= rank_two_constant() + 1e-9, || format!("r3 = {max_r3}"))?;
    ensure(max_r4 <= 36.0 + 1e-9, || format!("r4 = {max_r4}"))?;
    ensure(traceless_dev < 1e-9, || format!("traceless rank-2 deviation {traceless_dev:e}"))?;
    ensure((family - c1).abs() < 0.05, || format!("near-extremal r1 = {family}"))?;
    Ok(format!(
        "max r1 {max_r1:.4}, r2 {max_r2:.4}, r3 {max_r3:.4}, r4 {max_r4:.4}; extremal family r1 {family:.5}"
    ))
}

fn alpha_table() -> Outcome {
    let e = |e: clifford_povm::Error| e.to_string();
    for n in 1..=4 {
        let d = (1usize << n) as f64;
        let a = alpha(&make_fiducial(&FiducialKind::StabilizerBasisState, n).map_err(e)?).map_err(e)?;
        ensure(a == 1.0 / d, || format!("stabilizer n={n}: alpha {a}"))?;
    }
    for n in 1..=5 {
        let a = alpha(&make_fiducial(&FiducialKind::MagicProduct, n).map_err(e)?).map_err(e)?;
        ensure((a - 3f64.powi(-(n as i32))).abs() < 1e-12, || format!("magic n={n}: alpha {a}"))?;
    }
    let mut report = Vec::new();
    for n in 3..=4 {
        let d = 1usize << n;
        let typical = (0..100u64)
            .filter(|&seed| {
                let z = make_fiducial(&FiducialKind::HaarRandom { seed: 1000 * n as u64 + seed }, n).expect("valid n");
                alpha(&z).expect("unit vector") <= typical_alpha_threshold(d)
            })
            .count();
        ensure(typical >= 99, || format!("n={n}: only {typical}/100 typical"))?;
        report.push(format!("n={n} {typical}/100 typical"));
    }
    Ok(format!("stabilizer and magic exact; Haar {}", report.join(", ")))
}

fn figure_one() -> Outcome {
    let start = Instant::now();
    let points = fig1(20, 1.1, DEFAULT_GRID_SIZE, GridPolicy::Auto).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let c = |n: usize, level: DesignLevel| -> Result<f64, String> {
        points
            .iter()
            .find(|p| p.n == n && p.level == level)
            .and_then(|p| p.result.as_ref())
            .map(|r| r.c_of_d)
            .ok_or_else(|| format!("no feasible {level} point at n={n}"))
    };
    // Levels that coincide analytically (n = 1) differ only by solver round-off.
    const ORDER_TOL: f64 = 1e-9;
    let mut stab_range = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=20 {
        let [d2, d3, st, d4] = [
            c(n, DesignLevel::Design2)?,
            c(n, DesignLevel::Design3)?,
            c(n, DesignLevel::Stabilizer)?,
            c(n, DesignLevel::Design4)?,
        ];
        ensure(d4 <= st + ORDER_TOL && st <= d3 + ORDER_TOL && d3 <= d2 + ORDER_TOL, || {
            format!("ordering fails at n={n}: {d4} {st} {d3} {d2}")
        })?;
        if n >= 10 {
            ensure((0.80..=0.90).contains(&st), || format!("stabilizer c at n={n} is {st}"))?;
            stab_range = (stab_range.0.min(st), stab_range.1.max(st));
        }
    }
    let d3 = c(20, DesignLevel::Design3)?;
    ensure((d3 - 1.0).abs() < 0.05, || format!("design3 c at n=20 is {d3}"))?;
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "stabilizer c in [{:.4}, {:.4}] for n=10..20, design3(20) {d3:.4}, {:.1?}",
        stab_range.0, stab_range.1, elapsed
    ))
}

fn two_design_entropy() -> Outcome {
    let mut margin = f64::INFINITY;
    for n in 1..=3 {
        let d = 1usize << n;
        let floor = collision_bound(d);
        for i in 0..200 {
            let phi = projector(&random_pure_state(d, &mut stream_rng(7, (n as u64) << 32 | i)));
            let h = exact_average_entropy(&phi).map_err(|e| e.to_string())?;
            ensure(h >= floor, || format!("n={n} state {i}: {h} < {floor}"))?;
            margin = margin.min(h - floor);
        }
    }
    Ok(format!("600 states, min margin {margin:.4} bits"))
}

fn certainty_relation() -> Outcome {
    let mut margin = f64::INFINITY;
    for n in 1..=3 {
        let d = 1usize << n;
        let povm = Povm::from_orbit(orbit(n)?);
        let ceiling = certainty_constants(d).map_err(|e| e.to_string())?.entropy_ceiling;
        for i in 0..100 {
            let phi = projector(&random_pure_state(d, &mut stream_rng(8, (n as u64) << 32 | i)));
            let h = povm_entropy(&povm, &phi).map_err(|e| e.to_string())?;
            ensure(h <= ceiling, || format!("n={n} state {i}: {h} > {ceiling}"))?;
            margin = margin.min(ceiling - h);
        }
    }
    Ok(format!("300 states, min margin {margin:.4} bits"))
}

fn monte_carlo_consistency() -> Outcome {
    let exact = Povm::from_orbit(orbit(2)?);
    let sampled = Povm::sampled(&PureState::basis(4, 0), 100_000, 9).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(9, u64::MAX);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let x = random_hermitian(4, &mut rng);
        let e = exact.image_l1(&x).map_err(|e| e.to_string())?.value;
        let mc = sampled.image_l1(&x).map_err(|e| e.to_string())?;
        let z = (mc.value - e).abs() / mc.std_error;
        ensure(z < 5.0, || format!("operator {i}: {z:.2} standard errors"))?;
        worst = worst.max(z);
    }
    Ok(format!("20 operators, max deviation {worst:.2} standard errors"))
}

fn frame_potentials() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let d = 1usize << n;
        let fp = orbit(n)?.frame_potential(3);
        let design = design_frame_potential(d, 3);
        worst = worst.max((fp - design).abs() / design);
    }
    ensure(worst < 1e-9, || format!("t=3 relative error {worst:e}"))?;
    let fp4 = orbit(2)?.frame_potential(4);
    let design4 = design_frame_potential(4, 4);
    ensure(fp4 > design4 * (1.0 + 1e-9), || format!("t=4 at n=2: {fp4} vs {design4}"))?;
    Ok(format!("t=3 relative error {worst:.1e}; t=4 at n=2 {fp4:.6} > {design4:.6}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact fourth moment of stabilizer orbits", fourth_moment_identity),
        ("Pauli converse equality", pauli_converse_equality),
        ("pure-pair bias constant 1/6", pure_pair_constant_holds),
        ("spectral lemma suite", lemma_suite),
        ("alpha case table", alpha_table),
        ("entropic bound curves", figure_one),
        ("2-design entropy floor", two_design_entropy),
        ("certainty relation", certainty_relation),
        ("Monte Carlo vs exact", monte_carlo_consistency),
        ("frame potentials", frame_potentials),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
