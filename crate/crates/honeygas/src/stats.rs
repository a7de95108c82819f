//! Ensemble execution and aggregate observables.
//!
//! Runs many realizations of one medium specification under derived
//! seeds, in parallel, and reduces them to the quantities studied at
//! desk scale: mean and median period with the fraction of capped runs,
//! plus mean-square displacement series and their finite-window
//! power-law fits.
//! Every function here is a pure function of its spec, so identical
//! specs give identical results no matter how the work is scheduled.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{self, OutcomeKind, SimState};
use crate::lattice::{embed_doubled, Direction, SiteCoord};
use crate::medium::{self, Medium, MediumSpec};
use crate::structures::{self, EventKind};

/// One ensemble: a medium family, how many realizations to draw from it,
/// and the sampling windows.
///
/// Realization `i` runs on the seed [`derive_seed`]`(master_seed, i)`.
/// The step cap bounds period searches; the horizon and stride control
/// displacement series, which ignore the cap because periodic motion
/// keeps evolving forever.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub medium: MediumSpec,
    pub realizations: usize,
    pub step_cap: u64,
    pub master_seed: u64,
    pub msd_horizon: u64,
    pub record_every: u64,
}

impl EnsembleSpec {
    /// The desk-scale defaults: 200 realizations, cap 10^7, horizon 3000,
    /// one sample every 10 steps.
    pub fn standard(medium: MediumSpec, master_seed: u64) -> Self {
        EnsembleSpec {
            medium,
            realizations: 200,
            step_cap: 10_000_000,
            master_seed,
            msd_horizon: 3000,
            record_every: 10,
        }
    }
}

/// Seed for realization `index` of an ensemble keyed by `master_seed`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    medium::sample_hash(master_seed, index)
}

/// Outcome of one realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRecord {
    pub seed_index: usize,
    pub seed: u64,
    pub outcome: OutcomeKind,
    pub origin_returns: usize,
    /// Confirmed reflecting structures of either kind.
    pub reflectors: usize,
    pub annihilations: usize,
}

impl RunRecord {
    pub fn period(&self) -> Option<u64> {
        match self.outcome {
            OutcomeKind::Periodic { period } => Some(period),
            _ => None,
        }
    }

    pub fn outcome_label(&self) -> &'static str {
        match self.outcome {
            OutcomeKind::Periodic { .. } => "periodic",
            OutcomeKind::StepCapReached { .. } => "cap-reached",
            OutcomeKind::HaltedByCallback { .. } => "halted",
        }
    }
}

/// Runs every realization of the spec, each with a structure analyzer
/// attached, and returns the records in realization order.
pub fn run_ensemble(spec: &EnsembleSpec) -> Vec<RunRecord> {
    (0..spec.realizations)
        .into_par_iter()
        .map(|seed_index| {
            let seed = derive_seed(spec.master_seed, seed_index as u64);
            let mut medium = Medium::new(spec.medium.clone(), seed);
            let (outcome, analyzer) = structures::analyze_run(&mut medium, spec.step_cap, false);
            let confirmations = [
                EventKind::ReflectorConfirmed,
                EventKind::SemiReflectorConfirmed,
            ];
            let reflectors = analyzer
                .events()
                .iter()
                .filter(|event| confirmations.contains(&event.kind))
                .count();
            let annihilations = analyzer
                .events()
                .iter()
                .filter(|event| event.kind == EventKind::Annihilation)
                .count();
            RunRecord {
                seed_index,
                seed,
                outcome: outcome.kind,
                origin_returns: outcome.origin_returns.len(),
                reflectors,
                annihilations,
            }
        })
        .collect()
}

/// Aggregate summary attached to every series.
///
/// `mean_period` and `median_period` cover only the realizations that
/// terminated periodically; capped runs are counted in `capped_fraction`
/// and never imputed.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub mean_period: Option<f64>,
    pub median_period: Option<f64>,
    pub capped_fraction: f64,
    pub fit_exponent: Option<f64>,
}

/// A sampled time series plus its ensemble summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult {
    pub times: Vec<u64>,
    pub values: Vec<f64>,
    /// Realizations contributing to each point.
    pub counts: Vec<usize>,
    pub summary: Summary,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("no realization terminated periodically within the cap")]
    AllRunsCapped,
    #[error("power-law fit needs at least three usable points in range, found {found}")]
    DegenerateRange { found: usize },
}

fn median_of_sorted(sorted: &[u64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    }
}

/// Reduces run records to the period summary.
pub fn summarize_periods(records: &[RunRecord]) -> Result<Summary, StatsError> {
    let mut periods: Vec<u64> = records.iter().filter_map(RunRecord::period).collect();
    if periods.is_empty() {
        return Err(StatsError::AllRunsCapped);
    }
    periods.sort_unstable();
    let mean = periods.iter().sum::<u64>() as f64 / periods.len() as f64;
    let capped = records.len() - periods.len();
    Ok(Summary {
        mean_period: Some(mean),
        median_period: Some(median_of_sorted(&periods)),
        capped_fraction: capped as f64 / records.len() as f64,
        fit_exponent: None,
    })
}

/// Runs the ensemble and summarizes the observed periods.
pub fn average_period(spec: &EnsembleSpec) -> Result<SeriesResult, StatsError> {
    let records = run_ensemble(spec);
    let summary = summarize_periods(&records)?;
    Ok(SeriesResult {
        times: Vec::new(),
        values: Vec::new(),
        counts: Vec::new(),
        summary,
    })
}

/// Median over all realizations with capped runs entered at the cap.
///
/// Near the ends of the probability range periods grow heavy-tailed and
/// many runs cap out; the censored median stays well defined there,
/// where a mean over the periodic subset would report only the easy runs.
pub fn censored_median_period(records: &[RunRecord], step_cap: u64) -> f64 {
    let mut values: Vec<u64> = records
        .iter()
        .map(|record| record.period().unwrap_or(step_cap))
        .collect();
    values.sort_unstable();
    median_of_sorted(&values)
}

/// Sample times for displacement series: 0 and 1 always, then every
/// `record_every` steps up to the horizon.
pub fn sample_times(horizon: u64, record_every: u64) -> Vec<u64> {
    let every = record_every.max(1);
    let mut times = vec![0];
    if horizon >= 1 {
        times.push(1);
    }
    let mut t = every;
    while t <= horizon {
        if t > 1 {
            times.push(t);
        }
        t += every;
    }
    times
}

fn quarters(site: SiteCoord) -> u64 {
    let (x2, y2) = embed_doubled(site);
    (x2 * x2 + 3 * y2 * y2) as u64
}

/// Squared displacements of one realization at the sample times, in
/// exact quarter units, plus the period when one was found within the
/// horizon.
///
/// A periodic run needs no stepping past its period: the joint state
/// recurrence means `r(t) = r(t mod period)` for every `t`, so the tail
/// of the series is filled from the recorded cycle.
fn displacement_samples(
    medium: &mut Medium,
    horizon: u64,
    times: &[u64],
) -> (Vec<u64>, Option<u64>) {
    let mut by_time = Vec::with_capacity(horizon.min(1 << 20) as usize + 1);
    let mut state = SimState::initial();
    by_time.push(quarters(state.site));
    let mut period = None;
    while state.time < horizon {
        dynamics::step(&mut state, medium).expect("legal-direction invariant");
        by_time.push(quarters(state.site));
        if state.site == SiteCoord::ORIGIN
            && state.dir == Direction::new(0)
            && medium.is_pristine()
        {
            period = Some(state.time);
            break;
        }
    }
    let samples = times
        .iter()
        .map(|&t| match period {
            Some(p) => by_time[(t % p) as usize],
            None => by_time[t as usize],
        })
        .collect();
    (samples, period)
}

/// Mean-square displacement over the ensemble at the sample times.
///
/// Every realization contributes to every point; the summary's period
/// statistics cover the periods detected within the horizon, and its
/// `capped_fraction` is the fraction of realizations whose period did
/// not show by then.
pub fn msd_series(spec: &EnsembleSpec) -> SeriesResult {
    let times = sample_times(spec.msd_horizon, spec.record_every);
    let per_run: Vec<(Vec<u64>, Option<u64>)> = (0..spec.realizations)
        .into_par_iter()
        .map(|seed_index| {
            let seed = derive_seed(spec.master_seed, seed_index as u64);
            let mut medium = Medium::new(spec.medium.clone(), seed);
            displacement_samples(&mut medium, spec.msd_horizon, &times)
        })
        .collect();
    let mut totals = vec![0u128; times.len()];
    let mut periods: Vec<u64> = Vec::new();
    for (samples, period) in &per_run {
        for (total, &q) in totals.iter_mut().zip(samples) {
            *total += q as u128;
        }
        if let Some(p) = *period {
            periods.push(p);
        }
    }
    let n = spec.realizations;
    let values: Vec<f64> = totals
        .iter()
        .map(|&total| total as f64 / (4.0 * n as f64))
        .collect();
    periods.sort_unstable();
    let summary = Summary {
        mean_period: (!periods.is_empty())
            .then(|| periods.iter().sum::<u64>() as f64 / periods.len() as f64),
        median_period: (!periods.is_empty()).then(|| median_of_sorted(&periods)),
        capped_fraction: (n - periods.len()) as f64 / n as f64,
        fit_exponent: None,
    };
    let counts = vec![n; values.len()];
    SeriesResult {
        times,
        values,
        counts,
        summary,
    }
}

/// A finite-window power-law fit of a series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Root-mean-square deviation of `log(value)` from the fitted line.
    pub residual: f64,
}

/// Least-squares slope of `log(value)` against `log(t)` over the
/// recorded points with `t_min <= t <= t_max`. Points at `t = 0` or with
/// nonpositive values carry no logarithm and are excluded.
pub fn powerlaw_fit(
    series: &SeriesResult,
    t_min: u64,
    t_max: u64,
) -> Result<PowerLawFit, StatsError> {
    let points: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|&(&t, &v)| t >= t_min.max(1) && t <= t_max && v > 0.0)
        .map(|(&t, &v)| ((t as f64).ln(), v.ln()))
        .collect();
    if points.len() < 3 {
        return Err(StatsError::DegenerateRange {
            found: points.len(),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(StatsError::DegenerateRange { found: 1 });
    }
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let sq_dev: f64 = points
        .iter()
        .map(|&(x, y)| {
            let d = y - (intercept + exponent * x);
            d * d
        })
        .sum();
    Ok(PowerLawFit {
        exponent,
        residual: (sq_dev / n).sqrt(),
    })
}

/// Writes `seed_index,p,outcome,period,origin_returns,reflectors,annihilations`.
/// The period field is left empty for runs that did not terminate.
pub fn write_periods_csv<W: Write + ?Sized>(
    out: &mut W,
    records: &[RunRecord],
    p: f64,
) -> io::Result<()> {
    writeln!(
        out,
        "seed_index,p,outcome,period,origin_returns,reflectors,annihilations"
    )?;
    for record in records {
        let period = record.period().map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            record.seed_index,
            p,
            record.outcome_label(),
            period,
            record.origin_returns,
            record.reflectors,
            record.annihilations
        )?;
    }
    Ok(())
}

/// Writes `t,mean_sq_disp,n`.
pub fn write_msd_csv<W: Write + ?Sized>(out: &mut W, series: &SeriesResult) -> io::Result<()> {
    writeln!(out, "t,mean_sq_disp,n")?;
    for ((&t, &value), &count) in series
        .times
        .iter()
        .zip(&series.values)
        .zip(&series.counts)
    {
        writeln!(out, "{t},{value},{count}")?;
    }
    Ok(())
}

/// One row of a probability sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub summary: Summary,
    pub n_periodic: usize,
}

/// Writes `p,mean_period,median_period,capped_fraction,n_periodic`.
/// Mean and median are left empty when no run terminated at that p.
pub fn write_sweep_csv<W: Write + ?Sized>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "p,mean_period,median_period,capped_fraction,n_periodic")?;
    for row in rows {
        let mean = row.summary.mean_period.map(|v| v.to_string()).unwrap_or_default();
        let median = row
            .summary
            .median_period
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            row.p, mean, median, row.summary.capped_fraction, row.n_periodic
        )?;
    }
    Ok(())
}
