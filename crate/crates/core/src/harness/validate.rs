//! Built-in invariant suite behind the `validate` subcommand.

use crate::harness::config::{ExperimentConfig, IcName};
use crate::harness::sweep::{run_pdmp_sweep, ResultRecord};
use crate::ic;
use crate::kinetic::KineticSolution;
use crate::measures::{
    bin_from_density, ks_distance, modulus_of_continuity, BinMeasure, EmpiricalMeasure,
};
use crate::pdmp::ParticleState;
use crate::scheme::{scheme_init, scheme_run};
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }

    fn from_bound(name: &'static str, observed: f64, bound: f64) -> Self {
        if observed <= bound {
            Self::pass(name, format!("{observed:.3e} <= {bound:.3e}"))
        } else {
            Self::fail(name, format!("{observed:.3e} > {bound:.3e}"))
        }
    }
}

fn check_scheme_invariants(out: &mut Vec<CheckResult>) {
    let ic = ic::tent(1e-3).expect("tent ic");
    let delta = 0.05;
    let s0 = scheme_init(&ic, delta).expect("scheme init");
    let snaps = scheme_run(&s0, 0.4).expect("scheme run");
    let last = snaps.last().unwrap();

    // Species-1 conservation across steps.
    let drift = snaps
        .iter()
        .map(|s| (s.mu1().total_mass() - s0.n1()).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::from_bound(
        "scheme.n1_conserved",
        drift,
        10.0 * f64::EPSILON * s0.n1().max(1.0),
    ));

    // N2 bookkeeping is exact: replay the subtraction order.
    let mut acc = s0.n2();
    for d in last.loss_history() {
        acc -= d;
    }
    if acc.to_bits() == last.n2().to_bits() {
        out.push(CheckResult::pass(
            "scheme.n2_exact_ledger",
            format!(
                "N2 = N2(0) - sum of {} losses, bitwise",
                last.loss_history().len()
            ),
        ));
    } else {
        out.push(CheckResult::fail(
            "scheme.n2_exact_ledger",
            format!("replayed {acc} vs stored {}", last.n2()),
        ));
    }

    // Species-2 shape preservation: every bin carries the same scalar.
    let scale = last.n2() / s0.n2();
    let worst = last
        .mu2()
        .masses()
        .iter()
        .zip(s0.mu2().masses())
        .filter(|(_, m0)| **m0 > 0.0)
        .map(|(m, m0)| (m / m0 - scale).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::from_bound(
        "scheme.species2_shape",
        worst,
        100.0 * f64::EPSILON,
    ));

    // Cross-check the discrete species-2 profile against the kinetic one
    // within the first-order bound C*(delta + omega(delta, 0)); C frozen at 2.
    let sol = KineticSolution::solve(&ic.f1, &ic.f2, 0.45, 1e-8, Some(0.0)).expect("solve");
    let omega = modulus_of_continuity(&ic.f1, &ic.f2, delta).expect("omega");
    let bound = 2.0 * (delta + omega);
    let mut worst_cross = 0.0f64;
    for s in &snaps {
        let f2 = sol.f2_eval(s.time()).expect("within horizon");
        let kin_bins = bin_from_density(&f2, delta).expect("binning");
        let d = ks_distance(s.mu2(), &kin_bins);
        worst_cross = worst_cross.max(d);
    }
    out.push(CheckResult::from_bound(
        "scheme.species2_vs_kinetic",
        worst_cross,
        bound,
    ));
}

fn check_pdmp_conservation(out: &mut Vec<CheckResult>) {
    let ic = ic::tent(1e-3).expect("tent ic");
    let mut s = ParticleState::init(&ic, 600, 20260811, 0).expect("init");
    let n1_0 = s.s1_len();
    let mut ok = true;
    while let Some(tau) = s.next_event() {
        if s.time() + tau > 0.4 {
            break;
        }
        s.apply_event();
        if s.is_cemetery() {
            break;
        }
        if s.s1_len() != n1_0 {
            ok = false;
            break;
        }
    }
    let name = "pdmp.n1_conserved";
    if ok && s.removal_count() > 0 {
        out.push(CheckResult::pass(
            name,
            format!("|S1| = {n1_0} across {} removals", s.removal_count()),
        ));
    } else {
        out.push(CheckResult::fail(
            name,
            format!("|S1| drifted from {n1_0} (removals {})", s.removal_count()),
        ));
    }

    // Normalized ledger N^n(t) = 1 - L^n(t) at a few sampled times.
    let mut worst = 0.0f64;
    for &t in &[0.1, 0.25, 0.4] {
        let mut fresh = ParticleState::init(&ic, 600, 20260811, 1).expect("init");
        fresh.advance_to(t);
        let (mu1, mu2) = fresh.empirical_at(t).expect("snapshot");
        let total = crate::measures::Cdf::total_mass(&mu1) + crate::measures::Cdf::total_mass(&mu2);
        worst = worst.max((total - (1.0 - fresh.loss_count(t).unwrap())).abs());
    }
    out.push(CheckResult::from_bound("pdmp.mass_ledger", worst, 1e-12));
}

fn check_ks_axioms(out: &mut Vec<CheckResult>) {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let random_bins = |rng: &mut rand_chacha::ChaCha8Rng| {
        let n = rng.random_range(1..6);
        let masses = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
        BinMeasure::new(0.25, masses).unwrap()
    };
    let random_atoms = |rng: &mut rand_chacha::ChaCha8Rng| {
        let n = rng.random_range(1..6);
        let pts = (0..n).map(|_| rng.random_range(0.0..1.5)).collect();
        EmpiricalMeasure::new(pts, 0.2).unwrap()
    };
    let mut worst_sym = 0.0f64;
    let mut worst_tri = 0.0f64;
    let mut worst_id = 0.0f64;
    for i in 0..100 {
        let (dab, dba, dac, dbc, daa) = if i % 2 == 0 {
            let (a, b, c) = (
                random_bins(&mut rng),
                random_bins(&mut rng),
                random_bins(&mut rng),
            );
            (
                ks_distance(&a, &b),
                ks_distance(&b, &a),
                ks_distance(&a, &c),
                ks_distance(&b, &c),
                ks_distance(&a, &a),
            )
        } else {
            let (a, b, c) = (
                random_atoms(&mut rng),
                random_bins(&mut rng),
                random_atoms(&mut rng),
            );
            (
                ks_distance(&a, &b),
                ks_distance(&b, &a),
                ks_distance(&a, &c),
                ks_distance(&b, &c),
                ks_distance(&a, &a),
            )
        };
        worst_sym = worst_sym.max((dab - dba).abs());
        worst_tri = worst_tri.max(dac - (dab + dbc));
        worst_id = worst_id.max(daa);
    }
    out.push(CheckResult::from_bound("ks.symmetry", worst_sym, 1e-15));
    out.push(CheckResult::from_bound("ks.triangle", worst_tri, 1e-12));
    out.push(CheckResult::from_bound("ks.identity", worst_id, 0.0));
}

fn check_pdmp_determinism(out: &mut Vec<CheckResult>) {
    let ic = ic::tent(1e-3).expect("tent ic");
    let run = || {
        let mut s = ParticleState::init(&ic, 400, 7, 5).expect("init");
        s.advance_to(0.4);
        s.mutation_log().to_vec()
    };
    let a = run();
    let b = run();
    let identical = a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| {
            x.time.to_bits() == y.time.to_bits() && x.position.to_bits() == y.position.to_bits()
        });
    if identical {
        out.push(CheckResult::pass(
            "pdmp.determinism",
            format!("{} log entries bit-identical", a.len()),
        ));
    } else {
        out.push(CheckResult::fail(
            "pdmp.determinism",
            "logs differ for equal seeds".into(),
        ));
    }
}

fn check_parallel_serial_equality(out: &mut Vec<CheckResult>) {
    let cfg = ExperimentConfig {
        ic_name: IcName::Tent,
        custom_ic_path: None,
        grid_step: 1.0 / 400.0,
        delta_list: vec![],
        n_list: vec![100, 200],
        replicas: 4,
        master_seed: 31,
        t_end: 0.3,
        snap_count: Some(9),
        eps_list: vec![],
        n2_floor: None,
        output_dir: PathBuf::from("out"),
    };
    let serial: Vec<ResultRecord> = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_pdmp_sweep(&cfg))
        .expect("serial sweep");
    let parallel: Vec<ResultRecord> = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_pdmp_sweep(&cfg))
        .expect("parallel sweep");
    let equal = serial.len() == parallel.len()
        && serial
            .iter()
            .zip(parallel.iter())
            .all(|(a, b)| a.same_outcome(b));
    if equal {
        out.push(CheckResult::pass(
            "harness.parallel_serial_equal",
            format!("{} records identical", serial.len()),
        ));
    } else {
        out.push(CheckResult::fail(
            "harness.parallel_serial_equal",
            "worker count changed the records".into(),
        ));
    }
}

fn check_uniform_mutation_chi_square(out: &mut Vec<CheckResult>) {
    // Forced removal against a 3-atom species 2, replicated over 1e4 seeds.
    // The chi-square statistic (2 dof, mean 2, sigma 2) must sit within 3σ.
    let reps = 10_000usize;
    let mut counts = [0usize; 3];
    for seed in 0..reps {
        let mut s =
            ParticleState::from_positions(vec![0.05], vec![0.2, 0.4, 0.6], 4, seed as u64, 0);
        s.apply_event();
        let p = s.mutation_log()[0].position;
        let idx = ((p - 0.2) / 0.2).round() as usize;
        counts[idx] += 1;
    }
    let expect = reps as f64 / 3.0;
    let chi2: f64 = counts
        .iter()
        .map(|c| {
            let d = *c as f64 - expect;
            d * d / expect
        })
        .sum();
    out.push(CheckResult::from_bound(
        "pdmp.uniform_mutation_chi_square",
        chi2,
        8.0,
    ));
}

/// Runs the whole invariant suite; every entry must pass for `validate` to
/// exit 0.
pub fn run_validation() -> Vec<CheckResult> {
    let mut out = Vec::new();
    check_scheme_invariants(&mut out);
    check_pdmp_conservation(&mut out);
    check_ks_axioms(&mut out);
    check_pdmp_determinism(&mut out);
    check_parallel_serial_equality(&mut out);
    check_uniform_mutation_chi_square(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes() {
        let results = run_validation();
        assert!(!results.is_empty());
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
