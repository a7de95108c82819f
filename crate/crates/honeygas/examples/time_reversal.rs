//! The dynamics is exactly reversible. This example walks a particle
//! forward through a random medium, then turns it around and shows that
//! stepping backward restores every bit of the initial state, medium
//! included.
//!
//!     cargo run --release --example time_reversal

use honeygas::dynamics::{reverse_step, step, SimState};
use honeygas::medium::{Medium, MediumSpec};

fn main() {
    let mut medium = Medium::new(MediumSpec::iid(0.3), 2024);
    let mut state = SimState::initial();
    let start = state.clone();
    let forward = 100_000;

    for _ in 0..forward {
        step(&mut state, &mut medium).expect("the honeycomb walk never leaves the lattice");
    }
    println!("after {forward} forward steps:");
    println!("  position  {}", state.site);
    println!("  direction {:?}", state.dir);
    println!("  flipped rotators: {}", medium.dirty_count());

    for _ in 0..forward {
        reverse_step(&mut state, &mut medium).expect("reversal mirrors the forward walk");
    }
    println!("after {forward} backward steps:");
    println!("  position  {}", state.site);
    println!("  direction {:?}", state.dir);
    println!("  flipped rotators: {}", medium.dirty_count());

    assert_eq!(state.site, start.site);
    assert_eq!(state.dir, start.dir);
    assert!(medium.is_pristine());
    println!();
    println!("round trip exact: the walk returned to its starting state");
    println!("and the medium carries no trace of the excursion.");
}
