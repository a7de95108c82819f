//! Detection of the trajectory structures that organize the walk: loops,
//! reflectors and semi-reflectors, their transforms, annihilations, and
//! the period they force.
//!
//! A loop is the trajectory segment between two consecutive visits of the
//! same site. Whenever a site is visited for the third time or more, the
//! last three visit times `(t1, t*, t2)` frame a candidate pair of loops
//! based there. The candidate is confirmed as a structure when the two
//! sites flanking the base, `r(t1+1)` and `r(t2-1)`, are distinct and
//! each is visited exactly once by each loop. The distinctness matters:
//! a walk that leaves the base and later approaches it again through the
//! same neighbor exits toward the third neighbor instead of reversing,
//! so such a candidate does not reflect. If additionally no site touched
//! during
//! `[t1, t2]` was ever visited before `t1`, the structure reflects the
//! particle over its whole past and is recorded as reflecting; otherwise
//! it is semi-reflecting, and `tau`, the latest pre-`t1` visit to any of
//! its sites, bounds the range over which the reversal is guaranteed.
//!
//! A semi-reflector confirmed with `tau = 0` is special: its only overlap
//! with the past is the initial position itself, so its reversal range is
//! the entire history and it behaves exactly like a reflector. The
//! detector keeps the literal record but tracks such structures the same
//! way it tracks reflectors.
//!
//! Tracked structures are watched from the moment of confirmation. A
//! re-entry at the base that retraces the structure's whole site
//! sequence backwards is a transform traversal: the structure flips
//! between its original and transformed shapes, and remains tracked. Any
//! other first entry into the structure's sites annihilates it, unless a
//! reflecting event (a confirmation or a completed traversal) happened
//! since the structure last interacted with the particle; in that case
//! the entry is part of the normal back-and-forth between two reflectors
//! and the structure is left armed.
//!
//! Two reflecting structures, met one after the other without the first
//! being annihilated in between, force the walk into a cycle of period
//! `2 (t4 + t3 - t2 - t1)`; the consistency checker validates measured
//! periods against that count.

use crate::dynamics::{self, ObserverSignal, RunOutcome, TrajectoryObserver};
use crate::lattice::SiteCoord;
use crate::medium::Medium;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use std::fmt;
use std::io::{self, Write};
use thiserror::Error;

/// Trajectory segment between consecutive visits of `base`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct LoopRecord {
    pub base: SiteCoord,
    pub t_start: u64,
    pub t_end: u64,
}

/// Whether a confirmed structure reflects the whole past or a bounded
/// part of it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReflectorKind {
    Reflecting,
    /// `tau` is the latest time before the structure at which any of its
    /// sites was visited; the reversal is guaranteed back to `r(tau)`.
    SemiReflecting { tau: u64 },
}

/// Lifecycle of a confirmed structure.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StructureStatus {
    Active,
    Transformed,
    Annihilated { at: u64 },
    RetiredByPeriodicity,
}

/// A confirmed structure: two loops based at `base`, framed by the visit
/// times `t1 < t_star < t2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectorRecord {
    pub id: usize,
    pub base: SiteCoord,
    pub t1: u64,
    pub t_star: u64,
    pub t2: u64,
    pub kind: ReflectorKind,
    pub status: StructureStatus,
}

impl ReflectorRecord {
    /// True when the structure reverses the particle over its entire
    /// history: a reflecting record, or a semi-reflecting one whose only
    /// prior intersection is the initial position (`tau = 0`).
    pub fn reflects_fully(&self) -> bool {
        matches!(
            self.kind,
            ReflectorKind::Reflecting | ReflectorKind::SemiReflecting { tau: 0 }
        )
    }

    /// Length of the structure's site sequence, in steps.
    pub fn span(&self) -> u64 {
        self.t2 - self.t1
    }
}

/// Event kinds reported by the analyzer, in the JSONL vocabulary.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    LoopClosed,
    ReflectorConfirmed,
    SemiReflectorConfirmed,
    TransformTraversed,
    Annihilation,
    OriginReturn,
    PeriodDetected,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EventKind::LoopClosed => "loop-closed",
            EventKind::ReflectorConfirmed => "reflector-confirmed",
            EventKind::SemiReflectorConfirmed => "semi-reflector-confirmed",
            EventKind::TransformTraversed => "transform-traversed",
            EventKind::Annihilation => "annihilation",
            EventKind::OriginReturn => "origin-return",
            EventKind::PeriodDetected => "period-detected",
        };
        f.write_str(name)
    }
}

/// Status label carried by events, without payload.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatusLabel {
    Active,
    Transformed,
    Annihilated,
    RetiredByPeriodicity,
}

/// One analyzer event. Serialized as one JSON object per line with this
/// exact field order; absent fields are omitted.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct StructureEvent {
    pub time: u64,
    pub kind: EventKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<SiteCoord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<u64>,
    #[serde(rename = "tStar", skip_serializing_if = "Option::is_none")]
    pub t_star: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<StatusLabel>,
}

impl StructureEvent {
    fn bare(time: u64, kind: EventKind) -> Self {
        StructureEvent {
            time,
            kind,
            base: None,
            t1: None,
            t_star: None,
            t2: None,
            tau: None,
            status: None,
        }
    }
}

/// Writes events as JSON Lines.
pub fn write_events_jsonl<W: Write + ?Sized>(events: &[StructureEvent], out: &mut W) -> io::Result<()> {
    for event in events {
        let line = serde_json::to_string(event).expect("events serialize infallibly");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("positions must be fed in order: expected time {expected}, got {got}")]
    OutOfOrderInput { expected: u64, got: u64 },
    #[error("position log too short: need {needed} entries, have {have}")]
    InsufficientLog { needed: u64, have: u64 },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
}

struct Pending {
    start: u32,
}

struct Tracker {
    record: usize,
    site_set: FxHashSet<SiteCoord>,
    /// Time of the structure's last interaction with the particle: its
    /// confirmation or its latest completed traversal.
    since: u32,
    /// Set when the incarnation's first entry was excused by an
    /// intervening reflecting event; later entries no longer annihilate.
    protected: bool,
    pending: Option<Pending>,
}

enum TrackerAction {
    None,
    Completion { start: u32 },
    Adjudicate { entry: u32, retry_entry: bool },
    BeginTraversal,
}

/// Max segment tree over visit times. Leaf `v` holds the time of the
/// next visit to the site that was visited at time `v`, or 0 while that
/// revisit has not happened yet (times stored are always >= 1).
///
/// It answers the freshness question behind every confirmation: the
/// last time before `t1` whose site recurs in the window `[t1, t2]` is
/// the rightmost leaf `v < t1` with value >= `t1`. Next-visit times are
/// assigned chronologically, so at query time every leaf value is
/// either a revisit time <= `t2` or still 0, and the two-sided window
/// condition reduces to the single threshold.
struct NextVisitTree {
    len: usize,
    max_next: Vec<u32>,
}

impl NextVisitTree {
    fn new() -> Self {
        NextVisitTree { len: 1 << 12, max_next: vec![0; 1 << 13] }
    }

    fn set(&mut self, pos: u32, value: u32) {
        let pos = pos as usize;
        if pos >= self.len {
            let mut len = self.len;
            while pos >= len {
                len *= 2;
            }
            let mut grown = vec![0u32; 2 * len];
            grown[len..len + self.len].copy_from_slice(&self.max_next[self.len..]);
            for i in (1..len).rev() {
                grown[i] = grown[2 * i].max(grown[2 * i + 1]);
            }
            self.len = len;
            self.max_next = grown;
        }
        let mut i = self.len + pos;
        self.max_next[i] = value;
        while i > 1 {
            i /= 2;
            self.max_next[i] = self.max_next[2 * i].max(self.max_next[2 * i + 1]);
        }
    }

    /// Rightmost position `v < end` whose value is at least `threshold`.
    fn rightmost_at_least(&self, end: u32, threshold: u32) -> Option<u32> {
        self.descend(1, 0, self.len, end as usize, threshold)
    }

    fn descend(&self, node: usize, lo: usize, hi: usize, end: usize, threshold: u32) -> Option<u32> {
        if lo >= end || self.max_next[node] < threshold {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo as u32);
        }
        let mid = (lo + hi) / 2;
        self.descend(2 * node + 1, mid, hi, end, threshold)
            .or_else(|| self.descend(2 * node, lo, mid, end, threshold))
    }
}

/// Online structure detector. Feed it every position of a walk, in
/// order; it maintains the visit index, confirms structures, follows
/// transforms and annihilations, and accumulates the event log.
pub struct TrajectoryAnalyzer {
    record_loops: bool,
    log: Vec<SiteCoord>,
    visits: FxHashMap<SiteCoord, Vec<u32>>,
    events: Vec<StructureEvent>,
    records: Vec<ReflectorRecord>,
    trackers: Vec<Tracker>,
    /// Start times of reflecting events: `t1` of each fully-reflecting
    /// confirmation, plus the entry time of each completed traversal.
    /// Grows in increasing order because tracked structures occupy
    /// disjoint stretches of the trajectory.
    encounter_starts: Vec<u32>,
    next_visits: NextVisitTree,
    live_reflecting: usize,
    max_live_reflecting: usize,
    period: Option<u64>,
}

impl Default for TrajectoryAnalyzer {
    fn default() -> Self {
        TrajectoryAnalyzer::new(false)
    }
}

impl TrajectoryAnalyzer {
    /// `record_loops` turns on `loop-closed` events; they are emitted on
    /// every repeat visit of any site, which can dominate the event log,
    /// so they are off by default.
    pub fn new(record_loops: bool) -> Self {
        TrajectoryAnalyzer {
            record_loops,
            log: Vec::new(),
            visits: FxHashMap::default(),
            events: Vec::new(),
            records: Vec::new(),
            trackers: Vec::new(),
            encounter_starts: Vec::new(),
            next_visits: NextVisitTree::new(),
            live_reflecting: 0,
            max_live_reflecting: 0,
            period: None,
        }
    }

    pub fn log(&self) -> &[SiteCoord] {
        &self.log
    }

    pub fn events(&self) -> &[StructureEvent] {
        &self.events
    }

    pub fn records(&self) -> &[ReflectorRecord] {
        &self.records
    }

    /// Visit times of `site`, in increasing order.
    pub fn visit_times(&self, site: SiteCoord) -> Vec<u64> {
        self.visits
            .get(&site)
            .map(|v| v.iter().map(|&t| u64::from(t)).collect())
            .unwrap_or_default()
    }

    /// Sites of a record's structure, reconstructed from the log.
    pub fn site_set_of(&self, record: &ReflectorRecord) -> FxHashSet<SiteCoord> {
        self.log[record.t1 as usize..=record.t2 as usize]
            .iter()
            .copied()
            .collect()
    }

    /// Most reflecting records simultaneously not annihilated, over the
    /// whole run so far.
    pub fn max_concurrent_reflecting(&self) -> usize {
        self.max_live_reflecting
    }

    pub fn period(&self) -> Option<u64> {
        self.period
    }

    /// Count of events of one kind.
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Ingests the position at `time`, which must be the next unseen
    /// time, and returns the events this position triggered.
    pub fn feed(&mut self, position: SiteCoord, time: u64) -> Result<&[StructureEvent], StructureError> {
        let expected = self.log.len() as u64;
        if time != expected {
            return Err(StructureError::OutOfOrderInput { expected, got: time });
        }
        if time > u64::from(u32::MAX) {
            return Err(StructureError::PreconditionUnmet(
                "trajectory longer than the analyzer's 2^32 step range".into(),
            ));
        }
        let t = time as u32;
        let first_new_event = self.events.len();
        self.log.push(position);

        if t > 0 && position == self.log[0] {
            self.events
                .push(StructureEvent::bare(time, EventKind::OriginReturn));
        }

        self.advance_trackers(position, t);
        self.index_visit_and_detect(position, t);

        Ok(&self.events[first_new_event..])
    }

    /// Declares the walk periodic with period `t_p`: retires every
    /// surviving record and closes the event log with the detection.
    pub fn mark_period(&mut self, t_p: u64) {
        for record in &mut self.records {
            if matches!(record.status, StructureStatus::Active | StructureStatus::Transformed) {
                record.status = StructureStatus::RetiredByPeriodicity;
            }
        }
        self.trackers.clear();
        self.events
            .push(StructureEvent::bare(t_p, EventKind::PeriodDetected));
        self.period = Some(t_p);
    }

    fn expected_traversal_position(&self, tracker: &Tracker, offset: u32) -> SiteCoord {
        let record = &self.records[tracker.record];
        match record.status {
            StructureStatus::Active => self.log[(record.t2 - u64::from(offset)) as usize],
            StructureStatus::Transformed => self.log[(record.t1 + u64::from(offset)) as usize],
            _ => unreachable!("only armed records are tracked"),
        }
    }

    fn reflecting_event_in(&self, after: u32, upto: u32) -> bool {
        let lo = self.encounter_starts.partition_point(|&x| x <= after);
        let hi = self.encounter_starts.partition_point(|&x| x <= upto);
        hi > lo
    }

    fn advance_trackers(&mut self, position: SiteCoord, t: u32) {
        let mut idx = 0;
        while idx < self.trackers.len() {
            let action = {
                let tracker = &self.trackers[idx];
                match &tracker.pending {
                    Some(pending) => {
                        let offset = t - pending.start;
                        let span = self.records[tracker.record].span() as u32;
                        if position == self.expected_traversal_position(tracker, offset) {
                            if offset == span {
                                TrackerAction::Completion { start: pending.start }
                            } else {
                                TrackerAction::None
                            }
                        } else {
                            let retry = tracker.site_set.contains(&position);
                            TrackerAction::Adjudicate { entry: pending.start, retry_entry: retry }
                        }
                    }
                    None => {
                        if t > tracker.since && tracker.site_set.contains(&position) {
                            if position == self.records[tracker.record].base {
                                TrackerAction::BeginTraversal
                            } else if tracker.protected {
                                TrackerAction::None
                            } else {
                                TrackerAction::Adjudicate { entry: t, retry_entry: false }
                            }
                        } else {
                            TrackerAction::None
                        }
                    }
                }
            };

            match action {
                TrackerAction::None => idx += 1,
                TrackerAction::BeginTraversal => {
                    self.trackers[idx].pending = Some(Pending { start: t });
                    idx += 1;
                }
                TrackerAction::Completion { start } => {
                    let record_idx = self.trackers[idx].record;
                    let new_status = match self.records[record_idx].status {
                        StructureStatus::Active => StructureStatus::Transformed,
                        StructureStatus::Transformed => StructureStatus::Active,
                        _ => unreachable!("only armed records are tracked"),
                    };
                    self.records[record_idx].status = new_status;
                    let record = &self.records[record_idx];
                    self.events.push(StructureEvent {
                        time: u64::from(t),
                        kind: EventKind::TransformTraversed,
                        base: Some(record.base),
                        t1: Some(record.t1),
                        t_star: Some(record.t_star),
                        t2: Some(record.t2),
                        tau: None,
                        status: Some(match new_status {
                            StructureStatus::Active => StatusLabel::Active,
                            _ => StatusLabel::Transformed,
                        }),
                    });
                    debug_assert!(self.encounter_starts.last().is_none_or(|&x| x <= start));
                    self.encounter_starts.push(start);
                    let tracker = &mut self.trackers[idx];
                    tracker.pending = None;
                    tracker.since = t;
                    tracker.protected = false;
                    idx += 1;
                }
                TrackerAction::Adjudicate { entry, retry_entry } => {
                    let since = self.trackers[idx].since;
                    if self.reflecting_event_in(since, entry) {
                        let tracker = &mut self.trackers[idx];
                        tracker.protected = true;
                        tracker.pending = None;
                        // The deviating position may itself re-enter the
                        // structure; with protection on, only a fresh
                        // base entry matters.
                        if retry_entry && position == self.records[tracker.record].base {
                            tracker.pending = Some(Pending { start: t });
                        }
                        idx += 1;
                    } else {
                        let record_idx = self.trackers[idx].record;
                        self.records[record_idx].status =
                            StructureStatus::Annihilated { at: u64::from(entry) };
                        if self.records[record_idx].kind == ReflectorKind::Reflecting {
                            self.live_reflecting -= 1;
                        }
                        let record = &self.records[record_idx];
                        self.events.push(StructureEvent {
                            time: u64::from(t),
                            kind: EventKind::Annihilation,
                            base: Some(record.base),
                            t1: Some(record.t1),
                            t_star: Some(record.t_star),
                            t2: Some(record.t2),
                            tau: Some(u64::from(entry)),
                            status: Some(StatusLabel::Annihilated),
                        });
                        self.trackers.remove(idx);
                    }
                }
            }
        }
    }

    fn index_visit_and_detect(&mut self, position: SiteCoord, t: u32) {
        let visit_list = self.visits.entry(position).or_default();
        visit_list.push(t);
        let n = visit_list.len();
        if n >= 2 {
            self.next_visits.set(visit_list[n - 2], t);
        }

        if self.record_loops && n >= 2 {
            let prev = visit_list[n - 2];
            self.events.push(StructureEvent {
                time: u64::from(t),
                kind: EventKind::LoopClosed,
                base: Some(position),
                t1: Some(u64::from(prev)),
                t_star: None,
                t2: Some(u64::from(t)),
                tau: None,
                status: None,
            });
        }

        if n < 3 {
            return;
        }
        let t1 = self.visits[&position][n - 3];
        let t_star = self.visits[&position][n - 2];
        let t2 = t;
        if t1 < 1 {
            return;
        }
        if !self.flank_condition(t1, t_star, t2) {
            return;
        }

        let kind = match self.next_visits.rightmost_at_least(t1, t1) {
            None => ReflectorKind::Reflecting,
            Some(tau) => ReflectorKind::SemiReflecting { tau: u64::from(tau) },
        };
        let id = self.records.len();
        let record = ReflectorRecord {
            id,
            base: position,
            t1: u64::from(t1),
            t_star: u64::from(t_star),
            t2: u64::from(t2),
            kind,
            status: StructureStatus::Active,
        };
        self.events.push(StructureEvent {
            time: u64::from(t2),
            kind: match kind {
                ReflectorKind::Reflecting => EventKind::ReflectorConfirmed,
                ReflectorKind::SemiReflecting { .. } => EventKind::SemiReflectorConfirmed,
            },
            base: Some(position),
            t1: Some(u64::from(t1)),
            t_star: Some(u64::from(t_star)),
            t2: Some(u64::from(t2)),
            tau: match kind {
                ReflectorKind::Reflecting => None,
                ReflectorKind::SemiReflecting { tau } => Some(tau),
            },
            status: Some(StatusLabel::Active),
        });

        let track = record.reflects_fully();
        if kind == ReflectorKind::Reflecting {
            self.live_reflecting += 1;
            self.max_live_reflecting = self.max_live_reflecting.max(self.live_reflecting);
        }
        self.records.push(record);
        if track {
            let site_set: FxHashSet<SiteCoord> = self.log[t1 as usize..=t2 as usize]
                .iter()
                .copied()
                .collect();
            debug_assert!(self.encounter_starts.last().is_none_or(|&x| x <= t1));
            self.encounter_starts.push(t1);
            self.trackers.push(Tracker {
                record: id,
                site_set,
                since: t2,
                protected: false,
                pending: None,
            });
        }
    }

    /// The two flanking sites are distinct and each is visited exactly
    /// once by each of the two loops.
    fn flank_condition(&self, t1: u32, t_star: u32, t2: u32) -> bool {
        let first_flank = self.log[(t1 + 1) as usize];
        let last_flank = self.log[(t2 - 1) as usize];
        if first_flank == last_flank {
            return false;
        }
        for flank in [first_flank, last_flank] {
            let times = &self.visits[&flank];
            if count_in(times, t1, t_star) != 1 || count_in(times, t_star, t2) != 1 {
                return false;
            }
        }
        true
    }
}

fn count_in(sorted: &[u32], lo: u32, hi: u32) -> usize {
    sorted.partition_point(|&x| x <= hi) - sorted.partition_point(|&x| x < lo)
}

impl TrajectoryObserver for TrajectoryAnalyzer {
    fn observe(&mut self, time: u64, site: SiteCoord) -> ObserverSignal {
        self.feed(site, time)
            .expect("run feeds positions in order");
        ObserverSignal::Continue
    }
}

/// Runs the walk with an analyzer attached and, when the run turns out
/// periodic, closes the analysis with the detected period.
pub fn analyze_run(
    medium: &mut Medium,
    step_cap: u64,
    record_loops: bool,
) -> (RunOutcome, TrajectoryAnalyzer) {
    let mut analyzer = TrajectoryAnalyzer::new(record_loops);
    let outcome = dynamics::run(medium, step_cap, &mut [&mut analyzer]);
    if let dynamics::OutcomeKind::Periodic { period } = outcome.kind {
        analyzer.mark_period(period);
    }
    (outcome, analyzer)
}

/// Verifies a confirmed structure's reversal property directly on the
/// log: `r(t2 + t) = r(t1 - t)` for `t` up to `t1 - tau`.
///
/// One boundary case trims the range. When `tau = t1 - 1`, the site the
/// particle stood on just before reaching the base belongs to the
/// structure, and the final approach may come back through that same
/// neighbor; the exit then cannot retrace the entry edge and only the
/// trivial `t = 0` equality is guaranteed. The checker detects this from
/// the log and shrinks the checked range accordingly.
///
/// Needs the log to extend through the checked range; errs otherwise.
pub fn check_reflecting_property(
    record: &ReflectorRecord,
    log: &[SiteCoord],
) -> Result<bool, StructureError> {
    let tau = match record.kind {
        ReflectorKind::Reflecting => 0,
        ReflectorKind::SemiReflecting { tau } => tau,
    };
    let mut range = record.t1 - tau;
    if range == 1 && log[(record.t2 - 1) as usize] == log[(record.t1 - 1) as usize] {
        range = 0;
    }
    let needed = record.t2 + range + 1;
    if (log.len() as u64) < needed {
        return Err(StructureError::InsufficientLog { needed, have: log.len() as u64 });
    }
    for t in 0..=range {
        if log[(record.t2 + t) as usize] != log[(record.t1 - t) as usize] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Period forced by two reflecting encounters framed by `t1 < t2 <= t3 < t4`.
pub const fn period_from_encounters(t1: u64, t2: u64, t3: u64, t4: u64) -> u64 {
    2 * (t4 + t3 - t2 - t1)
}

/// Checks a measured period against the two-reflector count.
///
/// The walk settles into a cycle sustained by two mirrors that are never
/// annihilated; confirmations of structures that are later destroyed are
/// transients and do not anchor the cycle. The checker therefore filters
/// the fully-reflecting confirmations down to structures with no
/// annihilation event anywhere in the run, takes the first two, and
/// compares the measured period with `2 (t4 + t3 - t2 - t1)` over their
/// confirmation times.
///
/// Preconditions: the outcome is periodic and at least two such
/// persistent confirmations exist.
pub fn period_consistency(
    events: &[StructureEvent],
    outcome: &RunOutcome,
) -> Result<bool, StructureError> {
    let period = match outcome.kind {
        dynamics::OutcomeKind::Periodic { period } => period,
        _ => {
            return Err(StructureError::PreconditionUnmet(
                "outcome is not periodic".into(),
            ))
        }
    };
    let annihilated = |confirm: &StructureEvent| {
        events.iter().any(|e| {
            e.kind == EventKind::Annihilation
                && e.base == confirm.base
                && e.t1 == confirm.t1
        })
    };
    let mut persistent = events
        .iter()
        .filter(|e| match e.kind {
            EventKind::ReflectorConfirmed => true,
            EventKind::SemiReflectorConfirmed => e.tau == Some(0),
            _ => false,
        })
        .filter(|e| !annihilated(e));
    let (Some(first), Some(second)) = (persistent.next(), persistent.next()) else {
        return Err(StructureError::PreconditionUnmet(
            "fewer than two persistent fully-reflecting structures".into(),
        ));
    };
    let (t1, t2) = (first.t1.unwrap(), first.t2.unwrap());
    let (t3, t4) = (second.t1.unwrap(), second.t2.unwrap());
    Ok(period == period_from_encounters(t1, t2, t3, t4))
}

/// One origin-to-origin segment of a walk.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CycleRecord {
    pub start: u64,
    pub end: u64,
    /// Whether the segment visits no site twice (the closing return to
    /// the start site excluded).
    pub self_avoiding: bool,
}

impl CycleRecord {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Splits a log into the cycles between consecutive origin visits.
///
/// `origin_returns` must list, in increasing order, times at which the
/// log shows the particle back on its starting site; the segment after
/// the last return is not a cycle and is ignored.
pub fn cycle_decomposition(
    log: &[SiteCoord],
    origin_returns: &[u64],
) -> Result<Vec<CycleRecord>, StructureError> {
    if log.is_empty() {
        return Err(StructureError::InsufficientLog { needed: 1, have: 0 });
    }
    let origin = log[0];
    let mut cycles = Vec::with_capacity(origin_returns.len());
    let mut start = 0u64;
    for &ret in origin_returns {
        if ret <= start {
            return Err(StructureError::PreconditionUnmet(format!(
                "origin returns must increase, got {ret} after {start}"
            )));
        }
        if ret >= log.len() as u64 {
            return Err(StructureError::InsufficientLog { needed: ret + 1, have: log.len() as u64 });
        }
        if log[ret as usize] != origin {
            return Err(StructureError::PreconditionUnmet(format!(
                "time {ret} is not an origin visit"
            )));
        }
        let segment = &log[start as usize..ret as usize];
        let distinct: FxHashSet<SiteCoord> = segment.iter().copied().collect();
        cycles.push(CycleRecord {
            start,
            end: ret,
            self_avoiding: distinct.len() == segment.len(),
        });
        start = ret;
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SiteCoord;
    use crate::medium::MediumSpec;

    fn confirm_event(kind: EventKind, base: SiteCoord, t1: u64, t_star: u64, t2: u64, tau: Option<u64>) -> StructureEvent {
        StructureEvent {
            time: t2,
            kind,
            base: Some(base),
            t1: Some(t1),
            t_star: Some(t_star),
            t2: Some(t2),
            tau,
            status: Some(StatusLabel::Active),
        }
    }

    #[test]
    fn period_count_frozen_values() {
        assert_eq!(period_from_encounters(1, 23, 24, 46), 92);
        assert_eq!(period_from_encounters(944, 998, 3602, 3704), 10728);
    }

    #[test]
    fn period_consistency_on_synthetic_events() {
        let base1 = SiteCoord::new_b(2, 0);
        let base2 = SiteCoord::ORIGIN;
        let events = vec![
            confirm_event(EventKind::ReflectorConfirmed, base1, 1, 12, 23, None),
            confirm_event(EventKind::SemiReflectorConfirmed, base2, 24, 35, 46, Some(0)),
        ];
        let periodic = |p| RunOutcome {
            kind: dynamics::OutcomeKind::Periodic { period: p },
            origin_returns: vec![],
            max_displacement_sq: 0.0,
        };
        assert_eq!(period_consistency(&events, &periodic(92)), Ok(true));
        assert_eq!(period_consistency(&events, &periodic(90)), Ok(false));

        let capped = RunOutcome {
            kind: dynamics::OutcomeKind::StepCapReached { cap: 100 },
            origin_returns: vec![],
            max_displacement_sq: 0.0,
        };
        assert!(matches!(
            period_consistency(&events, &capped),
            Err(StructureError::PreconditionUnmet(_))
        ));

        let only_one = &events[..1];
        assert!(matches!(
            period_consistency(only_one, &periodic(92)),
            Err(StructureError::PreconditionUnmet(_))
        ));

        let tau_positive = vec![
            events[0],
            confirm_event(EventKind::SemiReflectorConfirmed, base2, 24, 35, 46, Some(3)),
        ];
        assert!(matches!(
            period_consistency(&tau_positive, &periodic(92)),
            Err(StructureError::PreconditionUnmet(_))
        ));

        let annihilate_first = StructureEvent {
            time: 30,
            kind: EventKind::Annihilation,
            base: Some(base1),
            t1: Some(1),
            t_star: Some(12),
            t2: Some(23),
            tau: Some(30),
            status: Some(StatusLabel::Annihilated),
        };
        let mut with_annihilation = events.clone();
        with_annihilation.push(annihilate_first);
        assert!(matches!(
            period_consistency(&with_annihilation, &periodic(92)),
            Err(StructureError::PreconditionUnmet(_))
        ));

        let base3 = SiteCoord::new_a(5, 1);
        let mut shifted_pair = with_annihilation.clone();
        shifted_pair.push(confirm_event(
            EventKind::ReflectorConfirmed,
            base3,
            50,
            64,
            78,
            None,
        ));
        let shifted = period_from_encounters(24, 46, 50, 78);
        assert_eq!(period_consistency(&shifted_pair, &periodic(shifted)), Ok(true));
        assert_eq!(period_consistency(&shifted_pair, &periodic(92)), Ok(false));
    }

    #[test]
    fn feed_rejects_out_of_order_input() {
        let mut analyzer = TrajectoryAnalyzer::default();
        analyzer.feed(SiteCoord::ORIGIN, 0).unwrap();
        assert_eq!(
            analyzer.feed(SiteCoord::new_b(0, 0), 2).unwrap_err(),
            StructureError::OutOfOrderInput { expected: 1, got: 2 }
        );
    }

    #[test]
    fn check_reflecting_property_needs_enough_log() {
        let record = ReflectorRecord {
            id: 0,
            base: SiteCoord::new_b(1, 1),
            t1: 5,
            t_star: 11,
            t2: 17,
            kind: ReflectorKind::Reflecting,
            status: StructureStatus::Active,
        };
        let log = vec![SiteCoord::ORIGIN; 10];
        assert_eq!(
            check_reflecting_property(&record, &log),
            Err(StructureError::InsufficientLog { needed: 23, have: 10 })
        );
    }

    #[test]
    fn cycle_decomposition_unit_cases() {
        let o = SiteCoord::ORIGIN;
        let x = SiteCoord::new_b(0, 0);
        let y = SiteCoord::new_a(1, 0);
        let z = SiteCoord::new_b(1, -1);

        let log = vec![o, x, y, o, x, z, o, y];
        let cycles = cycle_decomposition(&log, &[3, 6]).unwrap();
        assert_eq!(cycles.len(), 2);
        assert_eq!((cycles[0].start, cycles[0].end), (0, 3));
        assert!(cycles[0].self_avoiding);
        assert_eq!((cycles[1].start, cycles[1].end), (3, 6));
        assert!(cycles[1].self_avoiding);

        let log2 = vec![o, x, y, x, o];
        let cycles2 = cycle_decomposition(&log2, &[4]).unwrap();
        assert!(!cycles2[0].self_avoiding, "repeated interior site");

        assert!(matches!(
            cycle_decomposition(&log, &[2]),
            Err(StructureError::PreconditionUnmet(_))
        ));
        assert!(matches!(
            cycle_decomposition(&log, &[9]),
            Err(StructureError::InsufficientLog { .. })
        ));
        assert!(matches!(
            cycle_decomposition(&log, &[3, 3]),
            Err(StructureError::PreconditionUnmet(_))
        ));
        assert!(cycle_decomposition(&log, &[]).unwrap().is_empty());
    }

    #[test]
    fn loop_events_are_gated() {
        let mut medium = Medium::new(MediumSpec::iid(0.5), 11);
        let (_, quiet) = analyze_run(&mut medium, 5000, false);
        assert_eq!(quiet.count(EventKind::LoopClosed), 0);

        let mut medium = Medium::new(MediumSpec::iid(0.5), 11);
        let (_, chatty) = analyze_run(&mut medium, 5000, true);
        assert!(chatty.count(EventKind::LoopClosed) > 0);
        for event in chatty.events() {
            if event.kind == EventKind::LoopClosed {
                let t1 = event.t1.unwrap() as usize;
                let t2 = event.t2.unwrap() as usize;
                assert_eq!(chatty.log()[t1], chatty.log()[t2]);
                assert_eq!(event.base.unwrap(), chatty.log()[t1]);
                assert!(t2 - t1 >= 6, "bipartite girth bounds loop length");
            }
        }
    }

    #[test]
    fn event_kind_display_matches_the_serialized_vocabulary() {
        let kinds = [
            EventKind::LoopClosed,
            EventKind::ReflectorConfirmed,
            EventKind::SemiReflectorConfirmed,
            EventKind::TransformTraversed,
            EventKind::Annihilation,
            EventKind::OriginReturn,
            EventKind::PeriodDetected,
        ];
        for kind in kinds {
            let serialized = serde_json::to_string(&kind).unwrap();
            assert_eq!(serialized, format!("\"{kind}\""));
        }
    }

    #[test]
    fn events_serialize_with_stable_field_order() {
        let event = confirm_event(
            EventKind::SemiReflectorConfirmed,
            SiteCoord::new_b(3, -1),
            7,
            19,
            31,
            Some(2),
        );
        let line = serde_json::to_string(&event).unwrap();
        assert_eq!(
            line,
            r#"{"time":31,"kind":"semi-reflector-confirmed","base":{"a":3,"b":-1,"sub":"B"},"t1":7,"tStar":19,"t2":31,"tau":2,"status":"active"}"#
        );
        let bare = StructureEvent::bare(92, EventKind::PeriodDetected);
        assert_eq!(
            serde_json::to_string(&bare).unwrap(),
            r#"{"time":92,"kind":"period-detected"}"#
        );
    }

    #[test]
    fn analyzer_smoke_on_a_periodic_run() {
        let mut found = false;
        for seed in 0..60u64 {
            let mut medium = Medium::new(MediumSpec::iid(0.5), seed);
            let (outcome, analyzer) = analyze_run(&mut medium, 2_000_000, false);
            if !outcome.kind.is_periodic() {
                continue;
            }
            found = true;
            assert_eq!(analyzer.period(), Some(match outcome.kind {
                dynamics::OutcomeKind::Periodic { period } => period,
                _ => unreachable!(),
            }));
            assert_eq!(analyzer.count(EventKind::PeriodDetected), 1);
            assert!(analyzer.max_concurrent_reflecting() <= 2);
            for record in analyzer.records() {
                assert!(record.t1 < record.t_star && record.t_star < record.t2);
                assert_eq!(analyzer.log()[record.t1 as usize], record.base);
                assert_eq!(analyzer.log()[record.t_star as usize], record.base);
                assert_eq!(analyzer.log()[record.t2 as usize], record.base);
                assert!(record.t_star - record.t1 >= 6);
                assert!(record.t2 - record.t_star >= 6);
            }
            break;
        }
        assert!(found, "no periodic run among seeds 0..60");
    }
}
