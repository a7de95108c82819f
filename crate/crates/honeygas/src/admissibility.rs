//! Classification of hexagon orientation patterns.
//!
//! Reading the six rotators around a face counterclockwise from the
//! bottom-left vertex gives a word over `{L, R}`. Words that differ by a
//! rotation or reflection of the hexagon describe the same local geometry,
//! so the 64 words fall into 13 dihedral classes. A [`ClassTable`] labels
//! each class admissible or not; media whose faces all carry admissible
//! labels under the shipped default table keep the particle from ever
//! retracing its path, and its trajectories stay free of reflecting
//! structures.
//!
//! Two labelings are shipped. Both contain the uniform words, the
//! alternating word, the opposite-pair words and a two-R class together
//! with its L/R exchange partner, and both produce the same counting
//! polynomial. They differ in which two-R class is chosen. The default
//! takes the class with adjacent Rs, which is the one realized by media
//! built from uniformly oriented shaded hexagons: a face outside the
//! shaded color class decomposes into three uniform vertex pairs, and
//! mixing those pairs yields exactly the adjacent-pair classes.

use std::fmt;

use thiserror::Error;

use crate::lattice::{face_vertices, FaceCoord, Orientation};
use crate::medium::Medium;

/// Number of dihedral classes of six-letter words over `{L, R}`.
pub const CLASS_COUNT: usize = 13;

/// Orientations of the six rotators around a face, read counterclockwise
/// starting from the bottom-left `A` vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct HexConfig([Orientation; 6]);

impl HexConfig {
    /// Number of distinct configurations.
    pub const COUNT: usize = 64;

    pub const fn new(orientations: [Orientation; 6]) -> Self {
        HexConfig(orientations)
    }

    pub const fn orientations(self) -> [Orientation; 6] {
        self.0
    }

    /// Bit pattern of the word with the first letter in the highest bit
    /// and `R` as one. Numeric order of codes equals alphabetical order
    /// of words.
    pub fn code(self) -> u8 {
        self.0.iter().fold(0, |acc, o| {
            (acc << 1) | matches!(o, Orientation::Right) as u8
        })
    }

    pub fn from_code(code: u8) -> Self {
        debug_assert!(code < 64);
        let mut orientations = [Orientation::Left; 6];
        for (i, slot) in orientations.iter_mut().enumerate() {
            if code >> (5 - i) & 1 == 1 {
                *slot = Orientation::Right;
            }
        }
        HexConfig(orientations)
    }

    pub fn from_letters(word: &str) -> Option<Self> {
        let mut orientations = [Orientation::Left; 6];
        let mut count = 0;
        for (slot, c) in orientations.iter_mut().zip(word.chars()) {
            *slot = Orientation::from_letter(c)?;
            count += 1;
        }
        (count == 6 && word.chars().count() == 6).then_some(HexConfig(orientations))
    }

    /// How many of the six rotators point right.
    pub fn right_count(self) -> usize {
        self.0.iter().filter(|o| matches!(o, Orientation::Right)).count()
    }

    /// The word read after rotating the hexagon by `k` vertices.
    pub fn rotated(self, k: usize) -> Self {
        let mut out = [Orientation::Left; 6];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[(i + k) % 6];
        }
        HexConfig(out)
    }

    /// The word read in the opposite direction around the hexagon.
    pub fn reflected(self) -> Self {
        let mut out = self.0;
        out.reverse();
        HexConfig(out)
    }

    /// The word with every letter exchanged.
    pub fn exchanged(self) -> Self {
        HexConfig(self.0.map(Orientation::flipped))
    }

    /// All twelve words obtained by rotating and reflecting the hexagon.
    pub fn images(self) -> [HexConfig; 12] {
        let mut out = [self; 12];
        let mirror = self.reflected();
        for k in 0..6 {
            out[k] = self.rotated(k);
            out[6 + k] = mirror.rotated(k);
        }
        out
    }

    /// The alphabetically smallest word in the dihedral orbit.
    pub fn canonical(self) -> Self {
        self.images().into_iter().min().expect("orbit is nonempty")
    }

    /// Number of distinct words in the dihedral orbit.
    pub fn orbit_size(self) -> usize {
        let mut images = self.images().map(HexConfig::code);
        images.sort_unstable();
        let mut distinct = 1;
        for pair in images.windows(2) {
            if pair[0] != pair[1] {
                distinct += 1;
            }
        }
        distinct
    }
}

impl PartialOrd for HexConfig {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HexConfig {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

impl fmt::Display for HexConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in self.0 {
            write!(f, "{}", o.letter())?;
        }
        Ok(())
    }
}

/// All 64 words in alphabetical order.
pub fn all_configs() -> impl Iterator<Item = HexConfig> {
    (0u8..64).map(HexConfig::from_code)
}

/// One dihedral class with its admissibility label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    /// Alphabetically smallest word of the class.
    pub representative: HexConfig,
    /// Number of words in the class.
    pub orbit_size: usize,
    pub admissible: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: expected `<six L/R letters> <admissible|nonadmissible>`, got `{text}`")]
    BadLine { line: usize, text: String },
    #[error("line {line}: `{word}` is not the smallest word of its class, that is `{canonical}`")]
    NotCanonical {
        line: usize,
        word: String,
        canonical: String,
    },
    #[error("line {line}: class `{word}` listed twice")]
    DuplicateClass { line: usize, word: String },
    #[error("table lists {found} classes, the hexagon has {CLASS_COUNT}")]
    WrongClassCount { found: usize },
    #[error("admissible set not closed under L/R exchange: `{word}` is admissible but `{partner}` is not")]
    NotExchangeClosed { word: String, partner: String },
}

/// The 13 dihedral classes, each labeled admissible or not.
///
/// A table is valid when every class is listed exactly once by its
/// canonical word and the admissible set is closed under exchanging
/// all Ls with Rs. The second condition reflects a symmetry of the
/// dynamics itself: exchanging every rotator turns each trajectory
/// into its mirror image, so a labeling that breaks the symmetry
/// could not describe a geometric property of faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    classes: Vec<ClassEntry>,
    class_by_code: [u8; 64],
}

impl ClassTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut listed: Vec<(HexConfig, bool)> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad_line = || TableError::BadLine {
                line,
                text: trimmed.to_string(),
            };
            let mut parts = trimmed.split_whitespace();
            let (Some(word), Some(label), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(bad_line());
            };
            let config = HexConfig::from_letters(word).ok_or_else(bad_line)?;
            let admissible = match label {
                "admissible" => true,
                "nonadmissible" => false,
                _ => return Err(bad_line()),
            };
            let canonical = config.canonical();
            if canonical != config {
                return Err(TableError::NotCanonical {
                    line,
                    word: word.to_string(),
                    canonical: canonical.to_string(),
                });
            }
            if listed.iter().any(|(seen, _)| *seen == config) {
                return Err(TableError::DuplicateClass {
                    line,
                    word: word.to_string(),
                });
            }
            listed.push((config, admissible));
        }
        if listed.len() != CLASS_COUNT {
            return Err(TableError::WrongClassCount { found: listed.len() });
        }
        for &(config, admissible) in &listed {
            if !admissible {
                continue;
            }
            let partner = config.exchanged().canonical();
            let partner_admissible = listed
                .iter()
                .find(|(seen, _)| *seen == partner)
                .map(|&(_, a)| a)
                .expect("all classes are listed");
            if !partner_admissible {
                return Err(TableError::NotExchangeClosed {
                    word: config.to_string(),
                    partner: partner.to_string(),
                });
            }
        }
        listed.sort_by_key(|(config, _)| config.code());
        let classes: Vec<ClassEntry> = listed
            .into_iter()
            .map(|(representative, admissible)| ClassEntry {
                representative,
                orbit_size: representative.orbit_size(),
                admissible,
            })
            .collect();
        let mut class_by_code = [0u8; 64];
        for config in all_configs() {
            let canonical = config.canonical();
            let index = classes
                .iter()
                .position(|entry| entry.representative == canonical)
                .expect("13 distinct canonical words cover every class");
            class_by_code[config.code() as usize] = index as u8;
        }
        Ok(ClassTable {
            classes,
            class_by_code,
        })
    }

    /// The labeling used throughout unless a table file is supplied.
    pub fn shipped_default() -> Self {
        ClassTable::parse(include_str!("../data/hex_classes_default.txt"))
            .expect("shipped default table is valid")
    }

    /// The alternative labeling with the same counting polynomial.
    pub fn shipped_variant() -> Self {
        ClassTable::parse(include_str!("../data/hex_classes_variant.txt"))
            .expect("shipped variant table is valid")
    }

    /// The classes in alphabetical order of their representatives.
    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    pub fn class_index(&self, config: HexConfig) -> usize {
        self.class_by_code[config.code() as usize] as usize
    }

    pub fn class_of(&self, config: HexConfig) -> &ClassEntry {
        &self.classes[self.class_index(config)]
    }

    pub fn is_admissible(&self, config: HexConfig) -> bool {
        self.class_of(config).admissible
    }

    /// Number of the 64 words labeled admissible.
    pub fn admissible_config_count(&self) -> usize {
        self.classes
            .iter()
            .filter(|entry| entry.admissible)
            .map(|entry| entry.orbit_size)
            .sum()
    }
}

/// Word formed by the current rotator orientations around `face`.
pub fn face_config(medium: &Medium, face: FaceCoord) -> HexConfig {
    HexConfig(face_vertices(face).map(|site| medium.current_orientation(site)))
}

/// Result of checking a set of faces against a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionCheck {
    Admissible,
    /// The first face visited whose class is not admissible.
    Inadmissible { face: FaceCoord },
}

impl RegionCheck {
    pub fn is_admissible(self) -> bool {
        matches!(self, RegionCheck::Admissible)
    }

    pub fn offending_face(self) -> Option<FaceCoord> {
        match self {
            RegionCheck::Admissible => None,
            RegionCheck::Inadmissible { face } => Some(face),
        }
    }
}

/// Checks the faces in order and reports the first one whose current
/// configuration is not admissible under `table`.
pub fn is_admissible_region<I>(medium: &Medium, faces: I, table: &ClassTable) -> RegionCheck
where
    I: IntoIterator<Item = FaceCoord>,
{
    for face in faces {
        if !table.is_admissible(face_config(medium, face)) {
            return RegionCheck::Inadmissible { face };
        }
    }
    RegionCheck::Admissible
}

/// Probability that a face whose six rotators are drawn independently,
/// each pointing right with probability `p`, lands in an admissible class.
pub fn admissible_probability(p: f64, table: &ClassTable) -> f64 {
    table
        .classes()
        .iter()
        .filter(|entry| entry.admissible)
        .map(|entry| {
            let k = entry.representative.right_count() as i32;
            entry.orbit_size as f64 * p.powi(k) * (1.0 - p).powi(6 - k)
        })
        .sum()
}

/// Coefficients of [`admissible_probability`] as a polynomial in `p`,
/// constant term first. Exact integer arithmetic.
pub fn admissible_polynomial(table: &ClassTable) -> [i64; 7] {
    let mut coefficients = [0i64; 7];
    for entry in table.classes().iter().filter(|entry| entry.admissible) {
        let n = entry.orbit_size as i64;
        let k = entry.representative.right_count();
        for m in 0..=(6 - k) {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            coefficients[k + m] += n * sign * binomial((6 - k) as u32, m as u32);
        }
    }
    coefficients
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut result = 1i64;
    for i in 0..k as i64 {
        result = result * (n as i64 - i) / (i + 1);
    }
    result
}
