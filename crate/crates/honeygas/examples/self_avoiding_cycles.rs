//! In media where every hexagon configuration is admissible the walk
//! never confirms a fully reflecting structure. Instead it traces
//! self-avoiding loops through the origin, growing without bound. This
//! example decomposes such walks into origin-to-origin cycles and
//! checks their geometry.
//!
//!     cargo run --release --example self_avoiding_cycles

use std::collections::BTreeSet;

use honeygas::lattice::mirror_x;
use honeygas::medium::{Medium, MediumSpec};
use honeygas::structures::{analyze_run, cycle_decomposition, EventKind};

fn survey(label: &str, spec: MediumSpec, seed: u64, check_mirror: bool) {
    let mut medium = Medium::new(spec, seed);
    let (outcome, analyzer) = analyze_run(&mut medium, 100_000, false);
    let cycles = cycle_decomposition(analyzer.log(), &outcome.origin_returns)
        .expect("the analyzer log covers every recorded return");

    println!("{label}:");
    println!("  origin returns within the cap: {}", cycles.len());
    let all_self_avoiding = cycles.iter().all(|c| c.self_avoiding);
    println!(
        "  every cycle self-avoiding: {}",
        if all_self_avoiding { "yes" } else { "no" }
    );
    if let Some(longest) = cycles.iter().max_by_key(|c| c.len()) {
        println!(
            "  longest cycle: {} steps (t={}..{})",
            longest.len(),
            longest.start,
            longest.end
        );
    }

    if check_mirror {
        let symmetric = cycles.iter().all(|cycle| {
            let sites: BTreeSet<_> = analyzer.log()[cycle.start as usize..cycle.end as usize]
                .iter()
                .copied()
                .collect();
            sites.iter().all(|&site| sites.contains(&mirror_x(site)))
        });
        println!(
            "  cycles mirror-symmetric about the first bond: {}",
            if symmetric { "yes" } else { "no" }
        );
    }

    println!(
        "  fully reflecting structures confirmed: {}",
        analyzer.count(EventKind::ReflectorConfirmed)
    );
    println!(
        "  weaker semi-reflecting confirmations: {}",
        analyzer.count(EventKind::SemiReflectorConfirmed)
    );
    println!();
}

fn main() {
    survey("uniform left rotators", MediumSpec::all_left(), 0, true);
    survey("uniform right rotators", MediumSpec::all_right(), 0, true);
    survey(
        "random admissible medium at p = 0.5",
        MediumSpec::admissible_hex(0.5, 0),
        9,
        false,
    );
}
