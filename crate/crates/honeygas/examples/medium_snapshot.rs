//! Saves the state of a medium after a run and restores it later. The
//! snapshot records the current rotator of every site in a chosen
//! region, so a restored medium replays the same walk.
//!
//!     cargo run --release --example medium_snapshot

use std::collections::BTreeSet;

use honeygas::dynamics::OutcomeKind;
use honeygas::medium::{restore_snapshot, Medium, MediumSpec};
use honeygas::structures::analyze_run;

fn main() {
    let mut medium = Medium::new(MediumSpec::iid(0.5), 3);
    let (outcome, analyzer) = analyze_run(&mut medium, 10_000_000, false);
    let OutcomeKind::Periodic { period } = outcome.kind else {
        panic!("seed 3 closes within the cap");
    };
    println!("original run: periodic with period {period}");

    let region: Vec<_> = analyzer
        .log()
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let text = medium.snapshot(&region);
    println!(
        "snapshot covers {} sites, {} lines of text",
        region.len(),
        text.lines().count()
    );
    println!("first lines:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }

    let mut restored = restore_snapshot(&text).expect("the writer emits what the reader accepts");
    println!(
        "restored medium: kind {}, pristine {}",
        restored.spec().kind_name(),
        restored.is_pristine()
    );

    let (replay, _) = analyze_run(&mut restored, 10_000_000, false);
    match replay.kind {
        OutcomeKind::Periodic { period: p } if p == period => {
            println!("replay from the snapshot reproduces period {p}");
        }
        other => println!("replay diverged: {other:?}"),
    }

    let differ = region
        .iter()
        .filter(|&&site| medium.current_orientation(site) != restored.current_orientation(site))
        .count();
    println!(
        "orientations over the saved region after both runs differ at {differ} sites"
    );
}
