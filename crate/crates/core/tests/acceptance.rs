//! Acceptance suite: one test per exit criterion, each printing a pass/fail
//! line (run with `--nocapture` to see them live).

use std::path::PathBuf;
use std::time::Instant;
use twospecies::harness::{
    aggregate, run_pdmp_sweep, run_scheme_sweep, run_validation, ExperimentConfig, IcName,
};
use twospecies::ic;
use twospecies::kinetic::KineticSolution;
use twospecies::measures::GridDensity;
use twospecies::pdmp::{pdmp_run, ParticleState};

fn report(criterion: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_closed_form_renewal_oracle() {
    let started = Instant::now();
    let h = 1e-4;
    let ic = ic::uniform_halves(h).unwrap();
    let sol = KineticSolution::solve(&ic.f1, &ic.f2, 0.75, 1e-8, Some(0.0)).unwrap();

    let mut max_err = 0.0f64;
    let upto = (0.65 / h).round() as usize;
    for (i, a) in sol
        .removal_rate()
        .values()
        .iter()
        .enumerate()
        .take(upto + 1)
    {
        let t = i as f64 * h;
        max_err = max_err.max((a - 0.5 * t.exp()).abs());
    }
    let blowup = sol.blowup_time(0.0);
    let blowup_err = (blowup - 2.0f64.ln()).abs();
    let elapsed = started.elapsed().as_secs_f64();

    report(
        "criterion 1 (closed-form renewal oracle)",
        max_err < 1e-5 && blowup_err < 1e-4 && elapsed < 5.0,
        format!(
            "max |a - e^t/2| = {max_err:.3e} (< 1e-5), |T - ln 2| = {blowup_err:.3e} (< 1e-4), {elapsed:.2} s (< 5 s)"
        ),
    );
}

#[test]
fn criterion_2_renewal_residual_and_quadrature_order() {
    let residual = |step: f64, tol: f64, uniform: bool, t_max: f64| {
        let ic = if uniform {
            ic::uniform_halves(step).unwrap()
        } else {
            ic::tent(step).unwrap()
        };
        KineticSolution::solve(&ic.f1, &ic.f2, t_max, tol, Some(0.0))
            .unwrap()
            .renewal_residual()
    };

    let r_uniform = residual(1e-4, 1e-8, true, 0.65);
    let r_tent = residual(1e-4, 1e-8, false, 0.4);

    // Quadrature-limited regime: series tail pushed far below the trapezoid
    // error before halving h.
    let ratio_uniform = residual(1e-4, 1e-12, true, 0.4) / residual(5e-5, 1e-12, true, 0.4);
    let ratio_tent = residual(1e-4, 1e-12, false, 0.4) / residual(5e-5, 1e-12, false, 0.4);

    let in_band = |r: f64| (3.0..=5.0).contains(&r);
    report(
        "criterion 2 (renewal residual, trapezoid order)",
        r_uniform < 1e-5 && r_tent < 1e-5 && in_band(ratio_uniform) && in_band(ratio_tent),
        format!(
            "residuals: uniform {r_uniform:.3e}, tent {r_tent:.3e} (< 1e-5); h-halving ratios: uniform {ratio_uniform:.2}, tent {ratio_tent:.2} (in [3, 5])"
        ),
    );
}

#[test]
fn criterion_3_scheme_first_order_rate() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        ic_name: IcName::Tent,
        custom_ic_path: None,
        grid_step: 1.0 / 1600.0,
        delta_list: vec![0.05, 0.025, 0.0125],
        n_list: vec![],
        replicas: 1,
        master_seed: 1,
        t_end: 0.4,
        // Incommensurate with every delta so each run pays a comparable
        // time-alignment penalty.
        snap_count: Some(64),
        eps_list: vec![],
        n2_floor: None,
        output_dir: PathBuf::from("out"),
    };
    cfg.validate().unwrap();
    let records = run_scheme_sweep(&cfg).unwrap();
    // Records are ordered by ascending delta; read them coarsest first.
    let sups: Vec<f64> = records.iter().rev().map(|r| r.sup_distance).collect();
    let deltas: Vec<f64> = records.iter().rev().map(|r| r.param_value).collect();
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let ratios: Vec<f64> = sups.windows(2).map(|w| w[0] / w[1]).collect();
    let ratios_ok = ratios.iter().all(|r| (1.5..=2.6).contains(r));
    let elapsed = started.elapsed().as_secs_f64();

    report(
        "criterion 3 (first-order scheme rate)",
        decreasing && ratios_ok && elapsed < 30.0,
        format!(
            "sup_t d at delta {deltas:?} = {sups:?}, halving ratios {ratios:?} (in [1.5, 2.6]), {elapsed:.2} s (< 30 s)"
        ),
    );
}

#[test]
fn criterion_4_fluctuation_scale_and_tail_monotonicity() {
    let started = Instant::now();
    let replicas = 50u32;
    let cfg = ExperimentConfig {
        ic_name: IcName::Tent,
        custom_ic_path: None,
        grid_step: 1e-3,
        delta_list: vec![],
        n_list: vec![1_000, 10_000, 100_000],
        replicas,
        master_seed: 20260811,
        t_end: 0.4,
        snap_count: Some(32),
        eps_list: vec![],
        n2_floor: None,
        output_dir: PathBuf::from("out"),
    };
    cfg.validate().unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let records = pool.install(|| run_pdmp_sweep(&cfg)).unwrap();

    let aggs = aggregate(&records, &[]);
    assert_eq!(aggs.len(), 3);
    let medians: Vec<f64> = aggs.iter().map(|a| a.median_sup).collect();

    // Least-squares slope of ln(median) against ln(n).
    let xs: Vec<f64> = aggs.iter().map(|a| a.param_value.ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    let slope_ok = (-0.7..=-0.35).contains(&slope);

    // Tail fractions at eps = twice the median sup at the smallest n.
    let eps = 2.0 * medians[0];
    let tails: Vec<f64> = aggregate(&records, &[eps])
        .iter()
        .map(|a| a.tail_fractions[0].1)
        .collect();
    let noise = 2.0 / (replicas as f64).sqrt();
    let mut inversions = 0usize;
    let mut inversion_ok = true;
    for w in tails.windows(2) {
        if w[1] > w[0] {
            inversions += 1;
            inversion_ok &= w[1] - w[0] <= noise;
        }
    }
    let tails_ok = inversion_ok && inversions <= 1;
    let cemetery_free = records.iter().all(|r| !r.cemetery);
    let elapsed = started.elapsed().as_secs_f64();

    report(
        "criterion 4 (fluctuation scale, concentration tails)",
        slope_ok && tails_ok && cemetery_free && elapsed < 600.0,
        format!(
            "medians {medians:?}, log-log slope {slope:.3} (in [-0.7, -0.35]), tails at eps={eps:.4}: {tails:?} ({inversions} inversion(s) allowed within {noise:.3}), {elapsed:.1} s (< 600 s)"
        ),
    );
}

#[test]
fn criterion_5_invariant_suite() {
    let started = Instant::now();
    let results = run_validation();
    let elapsed = started.elapsed().as_secs_f64();
    let failed: Vec<String> = results
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    report(
        "criterion 5 (invariant suite via validate)",
        failed.is_empty() && elapsed < 60.0,
        format!(
            "{} checks passed in {elapsed:.1} s (< 60 s){}",
            results.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failures: {failed:?}")
            }
        ),
    );
}

/// Independent cumulative: fresh trapezoid prefix over raw node values plus
/// the in-cell quadratic correction. Shares no code with `GridDensity`.
fn cdf_independent(values: &[f64], h: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 1..values.len() {
        let right = i as f64 * h;
        if right <= x {
            acc += 0.5 * h * (values[i - 1] + values[i]);
        } else {
            let d = x - (right - h);
            if d > 0.0 {
                let slope = (values[i] - values[i - 1]) / h;
                acc += values[i - 1] * d + 0.5 * slope * d * d;
            }
            break;
        }
    }
    acc
}

/// Independent KS evaluation between a weighted atom set and a grid density:
/// scans atoms (both one-sided limits) and grid nodes directly.
fn ks_independent(atoms: &[f64], weight: f64, values: &[f64], h: f64) -> f64 {
    let mut sorted = atoms.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let emp = |x: f64, strict: bool| -> f64 {
        let k = if strict {
            sorted.partition_point(|p| *p < x)
        } else {
            sorted.partition_point(|p| *p <= x)
        };
        k as f64 * weight
    };
    let mut sup = (emp(f64::MAX, false) - cdf_independent(values, h, f64::MAX)).abs();
    for &p in &sorted {
        let f = cdf_independent(values, h, p);
        sup = sup
            .max((emp(p, false) - f).abs())
            .max((emp(p, true) - f).abs());
    }
    for i in 0..values.len() {
        let x = i as f64 * h;
        let f = cdf_independent(values, h, x);
        sup = sup
            .max((emp(x, false) - f).abs())
            .max((emp(x, true) - f).abs());
    }
    sup
}

/// Initial densities whose n = 2 quantile placement is exactly one species-1
/// particle at 0.5 and one species-2 particle at 0.3.
fn forced_ic(step: f64) -> ic::InitialCondition {
    let n1 = (0.5 / step).round() as usize + 1;
    let n2 = (0.3 / step).round() as usize + 1;
    let f1 = GridDensity::from_fn(step, n1, |_| 1.0).unwrap();
    let f2 = GridDensity::from_fn(step, n2, |_| 5.0 / 3.0).unwrap();
    ic::InitialCondition::new(f1, f2).unwrap()
}

#[test]
fn criterion_6_forced_two_particle_trajectory() {
    // (a) Exact trajectory: removal at 0.5 mutates the particle at 0.3,
    // which is removed at 0.8 with nothing left to mutate.
    let mut s = ParticleState::from_positions(vec![0.5], vec![0.3], 2, 7, 0);
    let out = pdmp_run(&mut s, 0.9, &[0.0, 0.6, 0.9]).unwrap();
    let times_ok = s.removal_times().len() == 2
        && (s.removal_times()[0] - 0.5).abs() < 1e-12
        && (s.removal_times()[1] - 0.8).abs() < 1e-12;
    let cemetery_ok = out.cemetery && s.is_cemetery();
    let (mu1, mu2) = &out.snapshots[1];
    let snapshot_ok =
        mu1.points().len() == 1 && (mu1.points()[0] - 0.2).abs() < 1e-12 && mu2.points().is_empty();

    // (b) Quantile initialization reproduces the same configuration.
    let ic = forced_ic(1e-3);
    let init = ParticleState::init(&ic, 2, 7, 0).unwrap();
    let init_ok =
        (init.s1_positions()[0] - 0.5).abs() < 1e-9 && (init.s2_positions()[0] - 0.3).abs() < 1e-9;

    // (c) Harness sweep on the pre-blowup window against the explicit
    // solution; recompute every snapshot distance with the independent KS
    // path and a hand model of the (event-free) trajectory.
    let dir = tempfile::tempdir().unwrap();
    let ic_path = dir.path().join("forced_ic.json");
    std::fs::write(
        &ic_path,
        serde_json::to_string(&serde_json::json!({
            "step": 1e-3,
            "f1": ic.f1.values(),
            "f2": ic.f2.values(),
        }))
        .unwrap(),
    )
    .unwrap();
    let cfg = ExperimentConfig {
        ic_name: IcName::CustomFile,
        custom_ic_path: Some(ic_path),
        grid_step: 1e-3,
        delta_list: vec![],
        n_list: vec![2],
        replicas: 1,
        master_seed: 7,
        t_end: 0.25,
        snap_count: Some(11),
        eps_list: vec![],
        n2_floor: None,
        output_dir: PathBuf::from("out"),
    };
    cfg.validate().unwrap();
    let records = run_pdmp_sweep(&cfg).unwrap();
    let record = &records[0];
    let sol = cfg.solve_kinetic(&ic).unwrap();
    let mut max_gap = 0.0f64;
    let mut hand_sup = 0.0f64;
    for snap in &record.per_snapshot {
        let t = snap.t;
        // No event before 0.5: species 1 is one atom drifted to 0.5 - t,
        // species 2 one atom fixed at 0.3, each of weight 1/2.
        let f1 = sol.f1_eval(t).unwrap();
        let f2 = sol.f2_eval(t).unwrap();
        let d1 = ks_independent(&[0.5 - t], 0.5, f1.values(), f1.step());
        let d2 = ks_independent(&[0.3], 0.5, f2.values(), f2.step());
        max_gap = max_gap.max((d1 + d2 - snap.d).abs());
        hand_sup = hand_sup.max(d1 + d2);
    }
    let sup_gap = (hand_sup - record.sup_distance).abs();
    let hand_ok = max_gap < 1e-12 && sup_gap < 1e-12;

    report(
        "criterion 6 (forced two-particle trajectory)",
        times_ok && cemetery_ok && snapshot_ok && init_ok && hand_ok,
        format!(
            "events at {:?} then cemetery, snapshot(0.6) atom at {:.3}, quantile init ok, hand-recomputed distances agree to {max_gap:.2e} (sup gap {sup_gap:.2e} < 1e-12)",
            s.removal_times(),
            out.snapshots[1].0.points().first().copied().unwrap_or(f64::NAN),
        ),
    );
}
