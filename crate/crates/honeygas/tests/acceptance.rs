//! Acceptance gate for the toolkit. Each test prints one PASS or FAIL
//! line; run with `cargo test --test acceptance -- --nocapture` to see
//! them all.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use honeygas::admissibility::{
    admissible_polynomial, admissible_probability, face_config, ClassTable, CLASS_COUNT,
};
use honeygas::dynamics::{self, reverse_step, step, OutcomeKind, SimState};
use honeygas::lattice::{mirror_x, FaceCoord, SiteCoord};
use honeygas::medium::{Medium, MediumSpec};
use honeygas::stats::{self, msd_series, powerlaw_fit, EnsembleSpec};
use honeygas::structures::{
    analyze_run, check_reflecting_property, cycle_decomposition, period_consistency,
    period_from_encounters, EventKind, ReflectorKind, ReflectorRecord, StructureError,
    TrajectoryAnalyzer,
};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

/// The log of a periodic run, extended far enough to cover every
/// record's reversal window; a periodic walk repeats its positions, so
/// the extension reads the recorded cycle modularly.
fn extended_log(analyzer: &TrajectoryAnalyzer, records: &[ReflectorRecord]) -> Vec<SiteCoord> {
    let log = analyzer.log();
    let needed = records
        .iter()
        .map(|r| {
            let tau = match r.kind {
                ReflectorKind::Reflecting => 0,
                ReflectorKind::SemiReflecting { tau } => tau,
            };
            r.t2 + (r.t1 - tau) + 1
        })
        .max()
        .unwrap_or(0) as usize;
    let mut out = log.to_vec();
    if needed > out.len() {
        let period = analyzer
            .period()
            .expect("a capped run is too short to verify its last structures")
            as usize;
        while out.len() < needed {
            let t = out.len();
            out.push(log[t % period]);
        }
    }
    out
}

fn censored_median(periods: &[Option<u64>], cap: u64) -> f64 {
    let mut values: Vec<u64> = periods.iter().map(|p| p.unwrap_or(cap)).collect();
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

fn bare_periods(spec: MediumSpec, n: u64, cap: u64, master: u64) -> Vec<Option<u64>> {
    (0..n)
        .map(|i| {
            let seed = stats::derive_seed(master, i);
            let mut medium = Medium::new(spec.clone(), seed);
            match dynamics::run(&mut medium, cap, &mut []).kind {
                OutcomeKind::Periodic { period } => Some(period),
                _ => None,
            }
        })
        .collect()
}

#[test]
fn c01_reverse_steps_undo_forward_steps_exactly() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC3_0001);
    let mut round_trips = 0u64;
    for _ in 0..250 {
        let spec = match rng.random_range(0..4) {
            0 => MediumSpec::iid(rng.random_range(0.05..0.95)),
            1 => MediumSpec::family(rng.random_range(0.05..0.95)),
            2 => MediumSpec::admissible_hex(rng.random_range(0.05..0.95), rng.random_range(0..3)),
            _ => MediumSpec::all_left(),
        };
        let mut medium = Medium::new(spec, rng.random());
        let mut state = SimState::initial();
        for _ in 0..rng.random_range(0..200) {
            step(&mut state, &mut medium).unwrap();
        }
        let mark_state = state;
        let mark_flips = medium.flipped_sites();
        let k = rng.random_range(200..600);
        for _ in 0..k {
            step(&mut state, &mut medium).unwrap();
        }
        for _ in 0..k {
            reverse_step(&mut state, &mut medium).unwrap();
        }
        assert_eq!(state, mark_state);
        assert_eq!(medium.flipped_sites(), mark_flips);
        round_trips += k;
    }
    let dt = t0.elapsed();
    verdict(
        "exact inversion",
        round_trips >= 100_000 && dt.as_secs_f64() < 1.0,
        &format!("{round_trips} randomized round trips restored state and medium exactly in {dt:.2?}"),
    );
}

#[test]
fn c02_confirmed_structures_reverse_the_trajectory() {
    let t0 = Instant::now();
    let runs = 60u64;
    let mut structures = 0u64;
    for i in 0..runs {
        let seed = stats::derive_seed(90, i);
        let mut medium = Medium::new(MediumSpec::iid(0.5), seed);
        let (outcome, analyzer) = analyze_run(&mut medium, 2_000_000, false);
        assert!(outcome.kind.is_periodic(), "run {i} did not close");
        assert!(analyzer.max_concurrent_reflecting() <= 2);
        let log = extended_log(&analyzer, analyzer.records());
        for record in analyzer.records() {
            assert_eq!(
                check_reflecting_property(record, &log),
                Ok(true),
                "run {i}, structure at {}",
                record.base
            );
            structures += 1;
        }
    }
    let dt = t0.elapsed();
    verdict(
        "reflecting property",
        structures > 0 && dt.as_secs() < 60,
        &format!("{structures} confirmed structures over {runs} runs reverse exactly in {dt:.2?}"),
    );
}

#[test]
fn c03_measured_periods_match_the_two_reflector_formula() {
    assert_eq!(period_from_encounters(1, 23, 24, 46), 92);
    assert_eq!(period_from_encounters(944, 998, 3602, 3704), 10728);

    let runs = 60u64;
    let mut with_pattern = 0;
    for i in 0..runs {
        let seed = stats::derive_seed(90, i);
        let mut medium = Medium::new(MediumSpec::iid(0.5), seed);
        let (outcome, analyzer) = analyze_run(&mut medium, 2_000_000, false);
        assert!(outcome.kind.is_periodic(), "run {i} did not close");
        match period_consistency(analyzer.events(), &outcome) {
            Ok(matched) => {
                assert!(matched, "run {i}: measured period deviates from the formula");
                with_pattern += 1;
            }
            Err(StructureError::PreconditionUnmet(_)) => {}
            Err(e) => panic!("run {i}: {e}"),
        }
    }
    verdict(
        "period formula",
        with_pattern >= 10,
        &format!(
            "formula exact on {with_pattern} of {runs} runs showing the two-reflector pattern, plus both algebraic values"
        ),
    );
}

#[test]
fn c04_walks_at_moderate_p_almost_surely_close() {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for p in [0.3, 0.5, 0.7] {
        let periods = bare_periods(MediumSpec::iid(p), 100, 10_000_000, 2026);
        let periodic = periods.iter().filter(|p| p.is_some()).count();
        pass &= periodic >= 95;
        lines.push(format!("p={p}: {periodic}/100 periodic"));
    }
    verdict(
        "periodic termination",
        pass,
        &format!("{} in {:.2?}", lines.join(", "), t0.elapsed()),
    );
}

#[test]
fn c05_admissible_and_uniform_media_stay_self_avoiding() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (label, spec, seed, expect_mirror) in [
        ("uniform left", MediumSpec::all_left(), 0u64, true),
        ("uniform right", MediumSpec::all_right(), 0, true),
        ("admissible p=0.5", MediumSpec::admissible_hex(0.5, 0), 2, false),
    ] {
        let mut medium = Medium::new(spec, seed);
        let (outcome, analyzer) = analyze_run(&mut medium, 1_000_000, false);
        let full = analyzer.count(EventKind::ReflectorConfirmed);
        assert!(analyzer.max_concurrent_reflecting() <= 2);
        let cycles = cycle_decomposition(analyzer.log(), &outcome.origin_returns).unwrap();
        let avoiding = cycles.iter().all(|c| c.self_avoiding);
        let mirrored = !expect_mirror
            || cycles.iter().all(|cycle| {
                let sites: BTreeSet<_> = analyzer.log()
                    [cycle.start as usize..cycle.end as usize]
                    .iter()
                    .copied()
                    .collect();
                sites.iter().all(|&s| sites.contains(&mirror_x(s)))
            });
        pass &= full == 0 && avoiding && mirrored;
        let mirror_note = if expect_mirror { ", mirror-symmetric" } else { "" };
        lines.push(format!(
            "{label}: 0 full reflectors, {} cycles self-avoiding{mirror_note}",
            cycles.len()
        ));
    }
    let dt = t0.elapsed();
    verdict(
        "self-avoidance",
        pass && dt.as_secs() < 60,
        &format!("{} ({dt:.2?})", lines.join("; ")),
    );
}

#[test]
fn c06_never_more_than_two_reflecting_structures() {
    let mut observed = 0;
    let mut runs = 0;
    for p in [0.3, 0.5, 0.7] {
        for i in 0..20u64 {
            let seed = stats::derive_seed(77, i);
            let mut medium = Medium::new(MediumSpec::iid(p), seed);
            let (_, analyzer) = analyze_run(&mut medium, 500_000, false);
            observed = observed.max(analyzer.max_concurrent_reflecting());
            runs += 1;
        }
    }
    verdict(
        "at most two",
        observed <= 2,
        &format!("max concurrent non-annihilated reflecting structures over {runs} runs: {observed}"),
    );
}

#[test]
fn c07_hexagon_census_and_admissible_probability() {
    let t0 = Instant::now();
    let table = ClassTable::shipped_default();
    let classes_ok = table.classes().len() == CLASS_COUNT && CLASS_COUNT == 13;
    let configs: usize = table.classes().iter().map(|e| e.orbit_size).sum();
    let coeffs = admissible_polynomial(&table);
    let coeffs_ok = coeffs == [1, -6, 24, -54, 72, -54, 18];
    let values_ok = admissible_probability(0.5, &table) == 0.34375
        && admissible_probability(0.0, &table) == 1.0
        && admissible_probability(1.0, &table) == 1.0;

    let medium = Medium::new(MediumSpec::iid(0.5), 4242);
    let n = 1_000_000;
    let mut hits = 0u64;
    for u in 0..1000 {
        for v in 0..1000 {
            let face = FaceCoord::new(2 * u, 2 * v);
            if table.is_admissible(face_config(&medium, face)) {
                hits += 1;
            }
        }
    }
    let rate = hits as f64 / n as f64;
    let expected = 0.34375;
    let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
    let mc_ok = (rate - expected).abs() <= 3.0 * sigma;
    let dt = t0.elapsed();

    verdict(
        "admissibility census",
        classes_ok && configs == 64 && coeffs_ok && values_ok && mc_ok && dt.as_secs() < 5,
        &format!(
            "13 classes over 64 configurations, exact polynomial, monte carlo rate {rate:.5} vs {expected} (3 sigma {:.5}) in {dt:.2?}",
            3.0 * sigma
        ),
    );
}

#[test]
fn c08_trapping_time_grows_toward_uniform_media() {
    let t0 = Instant::now();
    let cap = 10_000_000;
    let stat_at = |p: f64| {
        let periods = bare_periods(MediumSpec::iid(p), 100, cap, 2026);
        censored_median(&periods, cap)
    };
    let low = stat_at(0.05);
    let mid = stat_at(0.5);
    let high = stat_at(0.95);
    let dt = t0.elapsed();
    verdict(
        "trapping divergence",
        low >= 2.0 * mid && high >= 2.0 * mid,
        &format!(
            "censored median period {low} at p=0.05 and {high} at p=0.95 vs {mid} at p=0.5 ({dt:.2?})"
        ),
    );
}

#[test]
fn c09_displacement_plateaus_or_grows_by_medium() {
    let t0 = Instant::now();
    let iid = EnsembleSpec {
        medium: MediumSpec::iid(0.5),
        realizations: 200,
        step_cap: 10_000_000,
        master_seed: 2026,
        msd_horizon: 3000,
        record_every: 10,
    };
    let series = msd_series(&iid);
    let at = |t: u64| {
        let i = series.times.iter().position(|&x| x == t).unwrap();
        series.values[i]
    };
    let ratio = at(3000) / at(2000);
    let plateau_ok = (0.75..=1.33).contains(&ratio);
    let level_ok = (1000.0..=4000.0).contains(&at(3000));

    let admissible = EnsembleSpec {
        medium: MediumSpec::admissible_hex(0.5, 0),
        realizations: 100,
        step_cap: 10_000_000,
        master_seed: 7,
        msd_horizon: 100_000,
        record_every: 100,
    };
    let fit = powerlaw_fit(&msd_series(&admissible), 1_000, 100_000).unwrap();
    let exponent_ok = (1.00..=1.35).contains(&fit.exponent);
    let dt = t0.elapsed();

    verdict(
        "displacement regimes",
        plateau_ok && level_ok && exponent_ok,
        &format!(
            "plateau ratio {ratio:.3}, level {:.0}, growth exponent {:.3} ({dt:.2?})",
            at(3000),
            fit.exponent
        ),
    );
}

#[test]
fn c10_identical_commands_give_identical_bytes() {
    use std::process::Command;
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for take in 0..2 {
        let base = dir.path().join(format!("take{take}"));
        std::fs::create_dir(&base).unwrap();
        let periods = base.join("periods.csv");
        let msd = base.join("msd.csv");
        let events = base.join("events.jsonl");
        let out1 = Command::new(env!("CARGO_BIN_EXE_honeygas"))
            .args([
                "ensemble", "--model", "iid", "--p", "0.5", "--seed", "42",
                "--realizations", "6", "--steps", "2000000", "--horizon", "100",
            ])
            .args(["--csv", periods.to_str().unwrap(), "--msd-csv", msd.to_str().unwrap()])
            .output()
            .unwrap();
        let out2 = Command::new(env!("CARGO_BIN_EXE_honeygas"))
            .args(["run", "--model", "iid", "--p", "0.5", "--seed", "7"])
            .args(["--events", events.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out1.status.success() && out2.status.success());
        let summary_line = |stdout: &[u8]| {
            String::from_utf8_lossy(stdout)
                .lines()
                .last()
                .unwrap_or_default()
                .to_string()
        };
        outputs.push((
            std::fs::read(&periods).unwrap(),
            std::fs::read(&msd).unwrap(),
            std::fs::read(&events).unwrap(),
            summary_line(&out1.stdout),
            summary_line(&out2.stdout),
        ));
    }
    let identical = outputs[0] == outputs[1];
    verdict(
        "determinism",
        identical,
        "repeated ensemble and run commands reproduced every output file and summary line byte for byte",
    );
}
