//! Scattering media: rotator configurations over the lattice, lazy and
//! seed-deterministic.
//!
//! A medium is the pair of an initial configuration (a rule assigning every
//! site a rotator orientation) and the mutable flip state accumulated while
//! the particle moves. Initial orientations are never stored: they are
//! recomputed on demand from the spec and seed by hashing the site address,
//! so any two media built from the same spec and seed agree at every site
//! regardless of query order, and a medium covers the whole infinite lattice
//! in bounded memory.
//!
//! The flip state is a visit counter per site. A site whose counter is odd
//! currently holds the opposite of its initial orientation. The number of
//! odd counters is kept incrementally, which makes "has the configuration
//! returned to its initial state" an O(1) question; the dynamics layer uses
//! that for periodicity detection.

use crate::lattice::{site_class, shaded_face_of, FaceCoord, Orientation, SiteClass, SiteCoord, SubLattice};
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;
use std::io::{self, Write};
use thiserror::Error;

/// Probability curve assigned to a site class by a family medium,
/// evaluated at the family parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassCurve {
    /// `f(p) = p`.
    Identity,
    /// `f(p) = cos(pi p / 2) / 2`.
    HalfCosine,
    /// `f(p) = 1 - cos(pi p / 2) / 2`.
    HalfCosineComplement,
    /// `f(p) = c`, ignoring the parameter.
    Constant(f64),
}

impl ClassCurve {
    pub fn eval(self, p: f64) -> f64 {
        match self {
            ClassCurve::Identity => p,
            ClassCurve::HalfCosine => 0.5 * (std::f64::consts::FRAC_PI_2 * p).cos(),
            ClassCurve::HalfCosineComplement => 1.0 - 0.5 * (std::f64::consts::FRAC_PI_2 * p).cos(),
            ClassCurve::Constant(c) => c,
        }
    }
}

/// Per-class probability curves of a family medium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyAssignment {
    pub h_plus: ClassCurve,
    pub h_minus: ClassCurve,
}

impl Default for FamilyAssignment {
    /// The complementary cosine pair: right ends of horizontal bonds get
    /// `cos(pi p / 2) / 2`, left ends the complement.
    fn default() -> Self {
        FamilyAssignment {
            h_plus: ClassCurve::HalfCosine,
            h_minus: ClassCurve::HalfCosineComplement,
        }
    }
}

/// Rule assigning every lattice site its initial rotator orientation.
///
/// All parametric kinds interpret their probability as the chance of a
/// `Right` rotator.
#[derive(Clone, Debug, PartialEq)]
pub enum MediumSpec {
    /// Independent fair sampling with the same probability at every site.
    Iid { p: f64 },
    /// Independent sampling with a per-site-class probability.
    Family { p: f64, assignment: FamilyAssignment },
    /// One draw per shaded hexagon of the given color class; all six
    /// vertices of a shaded hexagon share the drawn orientation.
    AdmissibleHex { p: f64, color_class: u8 },
    /// The same orientation everywhere.
    Homogeneous { orientation: Orientation },
    /// A finite table; sites outside the table fall back to `fallback`.
    Explicit {
        table: FxHashMap<SiteCoord, Orientation>,
        fallback: Orientation,
    },
}

impl MediumSpec {
    pub fn iid(p: f64) -> Self {
        MediumSpec::Iid { p }
    }

    pub fn family(p: f64) -> Self {
        MediumSpec::Family { p, assignment: FamilyAssignment::default() }
    }

    pub fn admissible_hex(p: f64, color_class: u8) -> Self {
        MediumSpec::AdmissibleHex { p, color_class: color_class % 3 }
    }

    pub fn all_left() -> Self {
        MediumSpec::Homogeneous { orientation: Orientation::Left }
    }

    pub fn all_right() -> Self {
        MediumSpec::Homogeneous { orientation: Orientation::Right }
    }

    /// Short kind name used in snapshot headers and command lines.
    pub fn kind_name(&self) -> &'static str {
        match self {
            MediumSpec::Iid { .. } => "iid",
            MediumSpec::Family { .. } => "family",
            MediumSpec::AdmissibleHex { .. } => "admissible",
            MediumSpec::Homogeneous { orientation: Orientation::Left } => "all-left",
            MediumSpec::Homogeneous { orientation: Orientation::Right } => "all-right",
            MediumSpec::Explicit { .. } => "explicit",
        }
    }

    /// The probability recorded in snapshot headers. Homogeneous media
    /// report 0 or 1 to match their contents; explicit tables report 0.
    pub fn nominal_p(&self) -> f64 {
        match self {
            MediumSpec::Iid { p }
            | MediumSpec::Family { p, .. }
            | MediumSpec::AdmissibleHex { p, .. } => *p,
            MediumSpec::Homogeneous { orientation: Orientation::Left } => 0.0,
            MediumSpec::Homogeneous { orientation: Orientation::Right } => 1.0,
            MediumSpec::Explicit { .. } => 0.0,
        }
    }
}

/// Probability of a right rotator at `site` under a family spec, or `None`
/// for every other kind. The curve for the site's class is evaluated at
/// the family parameter.
pub fn family_probability(spec: &MediumSpec, site: SiteCoord) -> Option<f64> {
    match spec {
        MediumSpec::Family { p, assignment } => {
            let curve = match site_class(site) {
                SiteClass::HPlus => assignment.h_plus,
                SiteClass::HMinus => assignment.h_minus,
            };
            Some(curve.eval(*p))
        }
        _ => None,
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FACE_DOMAIN: u64 = 0xF0E1_D2C3_B4A5_9687;

/// 64-bit finalizer with full avalanche (the splitmix64 output mix).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn sample_hash(seed: u64, key: u64) -> u64 {
    mix64(mix64(key.wrapping_add(GOLDEN_GAMMA)) ^ seed)
}

/// Packs a site address into disjoint bit ranges: sublattice bit, then 32
/// bits of `b`, then the low 31 bits of `a`. Unique for `|a| < 2^30`,
/// far beyond any reachable trajectory.
fn site_key(site: SiteCoord) -> u64 {
    let sub_bit = match site.sub {
        SubLattice::A => 0u64,
        SubLattice::B => 1u64,
    };
    let b_bits = u64::from(site.b as u32) << 1;
    let a_bits = (u64::from(site.a as u32) & 0x7FFF_FFFF) << 33;
    a_bits | b_bits | sub_bit
}

fn face_key(face: FaceCoord) -> u64 {
    let j_bits = u64::from(face.j as u32) << 1;
    let i_bits = (u64::from(face.i as u32) & 0x7FFF_FFFF) << 33;
    i_bits | j_bits
}

/// Right iff the hash falls below `p * 2^64`; saturation makes `p <= 0`
/// and `p >= 1` exact.
fn orientation_from_hash(hash: u64, p: f64) -> Orientation {
    let threshold = (p * 18_446_744_073_709_551_616.0) as u128;
    if u128::from(hash) < threshold {
        Orientation::Right
    } else {
        Orientation::Left
    }
}

/// A scattering medium: an initial-configuration rule plus flip state.
#[derive(Clone, Debug, PartialEq)]
pub struct Medium {
    spec: MediumSpec,
    seed: u64,
    visits: FxHashMap<SiteCoord, u32>,
    dirty: usize,
}

impl Medium {
    pub fn new(spec: MediumSpec, seed: u64) -> Self {
        Medium { spec, seed, visits: FxHashMap::default(), dirty: 0 }
    }

    pub fn spec(&self) -> &MediumSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Orientation of `site` in the initial configuration. Pure in the
    /// spec and seed: unaffected by visits, identical across query orders.
    pub fn initial_orientation(&self, site: SiteCoord) -> Orientation {
        match &self.spec {
            MediumSpec::Iid { p } => orientation_from_hash(sample_hash(self.seed, site_key(site)), *p),
            MediumSpec::Family { .. } => {
                let p = family_probability(&self.spec, site).expect("spec is a family");
                orientation_from_hash(sample_hash(self.seed, site_key(site)), p)
            }
            MediumSpec::AdmissibleHex { p, color_class } => {
                let face = shaded_face_of(site, *color_class);
                orientation_from_hash(sample_hash(self.seed ^ FACE_DOMAIN, face_key(face)), *p)
            }
            MediumSpec::Homogeneous { orientation } => *orientation,
            MediumSpec::Explicit { table, fallback } => table.get(&site).copied().unwrap_or(*fallback),
        }
    }

    /// Orientation of `site` right now: the initial orientation, flipped
    /// once per recorded visit.
    pub fn current_orientation(&self, site: SiteCoord) -> Orientation {
        let initial = self.initial_orientation(site);
        match self.visits.get(&site) {
            Some(count) if count % 2 == 1 => initial.flipped(),
            _ => initial,
        }
    }

    /// Records one scattering at `site`, flipping its rotator.
    pub fn record_visit(&mut self, site: SiteCoord) {
        let count = self.visits.entry(site).or_insert(0);
        *count += 1;
        if *count % 2 == 1 {
            self.dirty += 1;
        } else {
            self.dirty -= 1;
        }
    }

    /// The orientation that scatters an arriving particle, combined with
    /// the flip the scattering causes. Equivalent to `current_orientation`
    /// followed by `record_visit`, in one table operation.
    pub fn scatter(&mut self, site: SiteCoord) -> Orientation {
        let initial = self.initial_orientation(site);
        let count = self.visits.entry(site).or_insert(0);
        let before = if *count % 2 == 1 { initial.flipped() } else { initial };
        *count += 1;
        if *count % 2 == 1 {
            self.dirty += 1;
        } else {
            self.dirty -= 1;
        }
        before
    }

    /// Total visits recorded at `site`.
    pub fn visit_count(&self, site: SiteCoord) -> u64 {
        self.visits.get(&site).map_or(0, |&c| u64::from(c))
    }

    /// Number of sites whose rotator currently differs from its initial
    /// orientation.
    pub fn dirty_count(&self) -> usize {
        self.dirty
    }

    /// True when every rotator is back in its initial orientation.
    pub fn is_pristine(&self) -> bool {
        self.dirty == 0
    }

    /// The sites currently flipped relative to the initial configuration,
    /// in sorted order.
    pub fn flipped_sites(&self) -> BTreeSet<SiteCoord> {
        self.visits
            .iter()
            .filter(|&(_, count)| count % 2 == 1)
            .map(|(&site, _)| site)
            .collect()
    }

    /// Writes the current orientations over `region` in the snapshot text
    /// format: a header line, then one `a b sub orientation` line per site
    /// in sorted order (duplicates collapsed).
    pub fn write_snapshot<W: Write + ?Sized>(&self, region: &[SiteCoord], out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "# medium-snapshot v1 seed={} kind={} p={}",
            self.seed,
            self.spec.kind_name(),
            self.spec.nominal_p()
        )?;
        let sites: BTreeSet<SiteCoord> = region.iter().copied().collect();
        for site in sites {
            let sub = match site.sub {
                SubLattice::A => 'A',
                SubLattice::B => 'B',
            };
            writeln!(out, "{} {} {} {}", site.a, site.b, sub, self.current_orientation(site).letter())?;
        }
        Ok(())
    }

    /// The snapshot of `region` as a string. See [`Medium::write_snapshot`].
    pub fn snapshot(&self, region: &[SiteCoord]) -> String {
        let mut buf = Vec::new();
        self.write_snapshot(region, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("snapshot text is ASCII")
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("snapshot header missing or malformed: expected '# medium-snapshot v1 seed=.. kind=.. p=..'")]
    BadHeader,
    #[error("snapshot line {line}: expected 'a b sub orientation', got {text:?}")]
    BadLine { line: usize, text: String },
    #[error("snapshot line {line}: duplicate site {site}")]
    DuplicateSite { line: usize, site: SiteCoord },
}

/// Rebuilds a medium from snapshot text.
///
/// The result is an explicit medium over exactly the sites listed, with a
/// `Left` fallback outside them; the header's seed is carried over, its
/// kind and probability are informational only. Restored orientations
/// become the initial configuration, so the restored medium is pristine.
pub fn restore_snapshot(text: &str) -> Result<Medium, SnapshotError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(SnapshotError::BadHeader)?;
    let mut seed = None;
    if let Some(rest) = header.strip_prefix("# medium-snapshot v1 ") {
        for field in rest.split_whitespace() {
            if let Some(value) = field.strip_prefix("seed=") {
                seed = value.parse::<u64>().ok();
            }
        }
    }
    let seed = seed.ok_or(SnapshotError::BadHeader)?;

    let mut table = FxHashMap::default();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || SnapshotError::BadLine { line: line_no, text: line.to_string() };
        let mut parts = line.split_whitespace();
        let a: i32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let b: i32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let sub = match parts.next() {
            Some("A") => SubLattice::A,
            Some("B") => SubLattice::B,
            _ => return Err(bad()),
        };
        let orientation = parts
            .next()
            .and_then(|s| {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Orientation::from_letter(c),
                    _ => None,
                }
            })
            .ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        let site = SiteCoord { a, b, sub };
        if table.insert(site, orientation).is_some() {
            return Err(SnapshotError::DuplicateSite { line: line_no, site });
        }
    }
    Ok(Medium::new(
        MediumSpec::Explicit { table, fallback: Orientation::Left },
        seed,
    ))
}
