//! Sweeps the right-rotator probability and summarizes how long the
//! walk wanders before settling into its cycle. Periods are shortest
//! at p = 1/2 and grow toward the uniform media.
//!
//!     cargo run --release --example period_sweep

use honeygas::medium::MediumSpec;
use honeygas::stats::{censored_median_period, run_ensemble, summarize_periods, EnsembleSpec};

fn main() {
    let step_cap = 5_000_000;
    println!("30 realizations per point, step cap {step_cap}");
    println!();
    println!(
        "  {:<6} {:>9} {:>14} {:>16} {:>8}",
        "p", "periodic", "mean period", "median period", "capped"
    );

    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let spec = EnsembleSpec {
            medium: MediumSpec::iid(p),
            realizations: 30,
            step_cap,
            master_seed: 1,
            msd_horizon: 1,
            record_every: 1,
        };
        let records = run_ensemble(&spec);
        let n_periodic = records.iter().filter(|r| r.period().is_some()).count();
        match summarize_periods(&records) {
            Ok(summary) => println!(
                "  {:<6} {:>6}/30 {:>14.1} {:>16.1} {:>8.2}",
                p,
                n_periodic,
                summary.mean_period.unwrap(),
                summary.median_period.unwrap(),
                summary.capped_fraction
            ),
            Err(_) => println!("  {p:<6} {n_periodic:>6}/30 no run closed within the cap"),
        }
        let censored = censored_median_period(&records, step_cap);
        if records.iter().any(|r| r.period().is_none()) {
            println!("         censored median counting capped runs at the cap: {censored}");
        }
    }

    println!();
    println!("capped runs are not failures; they are walks whose cycle,");
    println!("if any, exceeds the step budget. The censored median keeps");
    println!("them in the ranking instead of discarding them.");
}
