//! Shared helpers for the integration tests: a naive offline structure
//! detector written straight from the defining conditions, used as an
//! independent oracle for the online analyzer.

use honeygas::lattice::SiteCoord;
use std::collections::{HashMap, HashSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NaiveRecord {
    pub base: SiteCoord,
    pub t1: u64,
    pub t_star: u64,
    pub t2: u64,
    pub fresh: bool,
    pub tau: u64,
}

/// Detects structures by brute force: for every sliding triple of visits
/// of any site, count the flank visits directly over the log, then scan
/// the whole prefix for earlier intersections.
pub fn naive_detect(log: &[SiteCoord]) -> Vec<NaiveRecord> {
    let mut visit_index: HashMap<SiteCoord, Vec<usize>> = HashMap::new();
    let mut out = Vec::new();
    for (t, &site) in log.iter().enumerate() {
        let visits = visit_index.entry(site).or_default();
        visits.push(t);
        let n = visits.len();
        if n < 3 {
            continue;
        }
        let (t1, t_star, t2) = (visits[n - 3], visits[n - 2], visits[n - 1]);
        if t1 < 1 {
            continue;
        }
        let count = |x: SiteCoord, lo: usize, hi: usize| {
            log[lo..=hi].iter().filter(|&&p| p == x).count()
        };
        let x1 = log[t1 + 1];
        let x2 = log[t2 - 1];
        if x1 == x2 {
            continue;
        }
        if count(x1, t1, t_star) != 1
            || count(x1, t_star, t2) != 1
            || count(x2, t1, t_star) != 1
            || count(x2, t_star, t2) != 1
        {
            continue;
        }
        let window: HashSet<SiteCoord> = log[t1..=t2].iter().copied().collect();
        let mut fresh = true;
        let mut tau = 0usize;
        for (u, &p) in log[..t1].iter().enumerate() {
            if window.contains(&p) {
                fresh = false;
                tau = tau.max(u);
            }
        }
        out.push(NaiveRecord {
            base: site,
            t1: t1 as u64,
            t_star: t_star as u64,
            t2: t2 as u64,
            fresh,
            tau: tau as u64,
        });
    }
    out
}
