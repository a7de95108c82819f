//! Scans seeds for a short periodic walk, prints its structure event
//! timeline, verifies each confirmed reflector against the reversal
//! property on the raw log, and checks the measured period against the
//! prediction from the first two persistent reflecting encounters.
//!
//!     cargo run --release --example reflector_timeline

use honeygas::medium::{Medium, MediumSpec};
use honeygas::structures::{
    analyze_run, check_reflecting_property, period_consistency, period_from_encounters,
};

fn main() {
    let step_cap = 200_000;
    let (seed, outcome, analyzer) = (0..)
        .find_map(|seed| {
            let mut medium = Medium::new(MediumSpec::iid(0.5), seed);
            let (outcome, analyzer) = analyze_run(&mut medium, step_cap, false);
            match analyzer.period() {
                Some(period) if period <= 2_000 => Some((seed, outcome, analyzer)),
                _ => None,
            }
        })
        .expect("short periodic walks are common at p = 0.5");

    let period = analyzer.period().unwrap();
    println!("seed {seed} closes into a cycle of period {period}");
    println!();
    println!("event timeline:");
    for event in analyzer.events() {
        print!("  t={:<6} {}", event.time, event.kind);
        if let Some(base) = event.base {
            print!(" at {base}");
        }
        if let (Some(t1), Some(t2)) = (event.t1, event.t2) {
            print!(" (t1={t1}, t2={t2})");
        }
        if let Some(tau) = event.tau {
            print!(" tau={tau}");
        }
        println!();
    }

    println!();
    for record in analyzer.records() {
        let verdict = check_reflecting_property(record, analyzer.log())
            .expect("the log covers every confirmed structure");
        println!(
            "structure at {} ({:?}) reversal check: {}",
            record.base,
            record.kind,
            if verdict { "exact" } else { "violated" }
        );
    }

    match period_consistency(analyzer.events(), &outcome) {
        Ok(true) => println!("measured period matches the two-encounter prediction"),
        Ok(false) => println!("measured period disagrees with the two-encounter prediction"),
        Err(e) => println!("period prediction not applicable here: {e}"),
    }

    println!();
    println!("the prediction itself is a closed formula; for encounters");
    println!(
        "framed by (1, 23) and (24, 46) it gives {}",
        period_from_encounters(1, 23, 24, 46)
    );
}
