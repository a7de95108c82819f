//! Draws a periodic trajectory as an SVG file with diamond markers on
//! the reflector bases that pin the cycle down.
//!
//!     cargo run --release --example trajectory_portrait
//!
//! The picture lands in target/trajectory_portrait.svg.

use std::fs;

use honeygas::medium::{Medium, MediumSpec};
use honeygas::structures::analyze_run;
use honeygas::svg::trajectory_svg;

fn main() {
    let mut medium = Medium::new(MediumSpec::iid(0.5), 7);
    let (outcome, analyzer) = analyze_run(&mut medium, 10_000_000, false);
    println!("outcome: {:?}", outcome.kind);

    let bases: Vec<_> = analyzer.records().iter().map(|r| r.base).collect();
    println!(
        "drawing {} positions and {} reflector markers",
        analyzer.log().len(),
        bases.len()
    );

    let markup = trajectory_svg(analyzer.log(), &bases);
    let path = "target/trajectory_portrait.svg";
    fs::write(path, &markup).expect("target directory exists under cargo");
    println!("wrote {path} ({} bytes)", markup.len());
}
