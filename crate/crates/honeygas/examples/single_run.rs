//! Runs one particle through a random medium until the walk repeats,
//! then prints what happened along the way.
//!
//!     cargo run --release --example single_run

use honeygas::dynamics::OutcomeKind;
use honeygas::medium::{Medium, MediumSpec};
use honeygas::structures::analyze_run;

fn main() {
    let mut medium = Medium::new(MediumSpec::iid(0.5), 7);
    let step_cap = 10_000_000;
    let (outcome, analyzer) = analyze_run(&mut medium, step_cap, false);

    match outcome.kind {
        OutcomeKind::Periodic { period } => {
            println!("the walk closed into a cycle of period {period}");
        }
        OutcomeKind::StepCapReached { cap } => {
            println!("no repeat within {cap} steps");
        }
        OutcomeKind::HaltedByCallback { at } => {
            println!("an observer halted the run at t={at}");
        }
    }

    println!("origin visits: {}", outcome.origin_returns.len());
    if let Some(&first) = outcome.origin_returns.first() {
        println!("first return to the origin at t={first}");
    }
    println!(
        "farthest squared distance from the start: {}",
        outcome.max_displacement_sq
    );
    println!("sites whose rotator ended up flipped: {}", medium.dirty_count());

    let confirmations = analyzer
        .records()
        .iter()
        .filter(|r| r.reflects_fully())
        .count();
    println!(
        "reflecting structures confirmed during the run: {}",
        confirmations
    );

    println!();
    println!("first ten positions of the trajectory:");
    for (t, site) in analyzer.log().iter().take(10).enumerate() {
        println!("  t={t:<2} {site}");
    }
}
