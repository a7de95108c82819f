//! Particle dynamics: the deterministic step map, its exact inverse, and
//! the run loop with periodicity detection.
//!
//! One step moves the particle along its velocity to a neighboring site,
//! where the rotator waiting there turns the velocity by sixty degrees,
//! then flips. The rotator acts with the orientation it has on arrival;
//! the flip takes effect afterwards, so a revisit is scattered the other
//! way.
//!
//! Because each step is a bijection of the joint particle and medium
//! state, running the map backwards is exact: the inverse step undoes the
//! turn using the already-flipped orientation, un-flips the departed site,
//! and walks back. No history is consulted.
//!
//! The initial condition is always the origin with velocity along
//! direction 0. The walk is periodic exactly when the particle stands at
//! the origin with that velocity while every rotator is back in its
//! initial orientation; the medium keeps the flipped-site count, so the
//! run loop checks this in constant time per step.

use crate::lattice::{self, neighbor, rotate, Direction, LatticeError, SiteCoord};
use crate::medium::Medium;
use thiserror::Error;

/// Instantaneous particle state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SimState {
    pub site: SiteCoord,
    pub dir: Direction,
    pub time: u64,
}

impl SimState {
    /// The fixed initial condition: origin, direction 0, time 0.
    pub fn initial() -> Self {
        SimState { site: SiteCoord::ORIGIN, dir: Direction::new(0), time: 0 }
    }
}

/// Squared distance of the particle from the origin, exact in quarter
/// units.
pub fn displacement_sq(state: &SimState) -> f64 {
    lattice::displacement_sq_of(state.site)
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cannot step backwards from time 0")]
    AtTimeZero,
}

/// Advances the state by one step, flipping the scatterer met on arrival.
pub fn step(state: &mut SimState, medium: &mut Medium) -> Result<(), DynamicsError> {
    let next = neighbor(state.site, state.dir)?;
    let orientation = medium.scatter(next);
    state.dir = rotate(state.dir, orientation);
    state.site = next;
    state.time += 1;
    Ok(())
}

/// Undoes one step exactly, restoring particle and medium.
///
/// The scatterer at the current site has already flipped, so its current
/// orientation is precisely the inverse turn; applying it recovers the
/// incoming velocity, and the visit recorded here un-flips the site.
pub fn reverse_step(state: &mut SimState, medium: &mut Medium) -> Result<(), DynamicsError> {
    if state.time == 0 {
        return Err(DynamicsError::AtTimeZero);
    }
    let incoming = rotate(state.dir, medium.current_orientation(state.site));
    medium.record_visit(state.site);
    state.site = neighbor(state.site, incoming.opposite())?;
    state.dir = incoming;
    state.time -= 1;
    Ok(())
}

/// Whether an observer lets the run continue.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObserverSignal {
    Continue,
    Halt,
}

/// Consumer of the position sequence produced by [`run`].
pub trait TrajectoryObserver {
    /// Called once per position, including the initial one at time 0.
    fn observe(&mut self, time: u64, site: SiteCoord) -> ObserverSignal;
}

/// An observer that records every position.
#[derive(Default)]
pub struct PositionLog {
    pub positions: Vec<SiteCoord>,
}

impl TrajectoryObserver for PositionLog {
    fn observe(&mut self, _time: u64, site: SiteCoord) -> ObserverSignal {
        self.positions.push(site);
        ObserverSignal::Continue
    }
}

/// How a run ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutcomeKind {
    /// The joint particle and medium state returned to its initial value;
    /// the motion repeats with this period forever.
    Periodic { period: u64 },
    /// The step budget ran out first.
    StepCapReached { cap: u64 },
    /// An observer requested the stop.
    HaltedByCallback { at: u64 },
}

impl OutcomeKind {
    pub fn is_periodic(&self) -> bool {
        matches!(self, OutcomeKind::Periodic { .. })
    }
}

/// Result of a run: how it ended plus trajectory summaries.
#[derive(Clone, PartialEq, Debug)]
pub struct RunOutcome {
    pub kind: OutcomeKind,
    /// Times at which the particle stood at the origin again, in order.
    pub origin_returns: Vec<u64>,
    /// Largest squared displacement from the origin seen along the way.
    pub max_displacement_sq: f64,
}

/// Runs the walk from the initial condition for at most `step_cap` steps,
/// stopping early on periodicity or on an observer's request.
///
/// Every position, the initial one included, is fed to each observer in
/// order. Directions parities guarantee steps stay legal, so lattice
/// errors cannot occur from the initial condition.
pub fn run(
    medium: &mut Medium,
    step_cap: u64,
    observers: &mut [&mut dyn TrajectoryObserver],
) -> RunOutcome {
    let mut state = SimState::initial();
    let mut origin_returns = Vec::new();
    let mut max_disp_quarters: i64 = 0;

    for obs in observers.iter_mut() {
        if obs.observe(0, state.site) == ObserverSignal::Halt {
            return RunOutcome {
                kind: OutcomeKind::HaltedByCallback { at: 0 },
                origin_returns,
                max_displacement_sq: 0.0,
            };
        }
    }

    let mut halted = None;
    let mut period = None;
    while state.time < step_cap {
        step(&mut state, medium).expect("legal-direction invariant");
        let (x2, y2) = lattice::embed_doubled(state.site);
        max_disp_quarters = max_disp_quarters.max(x2 * x2 + 3 * y2 * y2);
        if state.site == SiteCoord::ORIGIN {
            origin_returns.push(state.time);
        }
        for obs in observers.iter_mut() {
            if obs.observe(state.time, state.site) == ObserverSignal::Halt {
                halted = Some(state.time);
            }
        }
        if halted.is_some() {
            break;
        }
        if state.site == SiteCoord::ORIGIN && state.dir == Direction::new(0) && medium.is_pristine() {
            period = Some(state.time);
            break;
        }
    }

    let kind = match (period, halted) {
        (_, Some(at)) => OutcomeKind::HaltedByCallback { at },
        (Some(p), None) => OutcomeKind::Periodic { period: p },
        (None, None) => OutcomeKind::StepCapReached { cap: step_cap },
    };
    RunOutcome {
        kind,
        origin_returns,
        max_displacement_sq: max_disp_quarters as f64 * 0.25,
    }
}
