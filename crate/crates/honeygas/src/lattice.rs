//! Honeycomb lattice geometry.
//!
//! Sites are addressed by two integer axial coordinates plus a sublattice
//! tag. The lattice is bipartite: every bond joins an `A` site to a `B`
//! site. Each `A` site sits at `a*u + b*w` in the plane, with basis
//! vectors `u = (3/2, sqrt(3)/2)` and `w = (3/2, -sqrt(3)/2)`, and the `B`
//! site of the same cell sits one unit to the right, so every cell
//! contributes one horizontal bond.
//!
//! Directions are sixths of a turn: index `k` points at angle `k * 60`
//! degrees. From an `A` site only the even directions `{0, 2, 4}` lead to
//! a neighbor, from a `B` site only the odd ones `{1, 3, 5}`; a step
//! always lands on the opposite sublattice.
//!
//! Hexagonal faces carry their own coordinates. Face `(i, j)` is the
//! hexagon whose lowest-left vertex is `A(i, j)`, and faces are
//! three-colored by `(i - j) mod 3`; the three faces meeting at any site
//! always show all three colors, so fixing one color class picks a unique
//! "shaded" face at every site.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which half of the bipartition a site belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum SubLattice {
    A,
    B,
}

/// Lattice site: cell coordinates plus sublattice tag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct SiteCoord {
    pub a: i32,
    pub b: i32,
    pub sub: SubLattice,
}

impl SiteCoord {
    pub const fn new_a(a: i32, b: i32) -> Self {
        SiteCoord { a, b, sub: SubLattice::A }
    }

    pub const fn new_b(a: i32, b: i32) -> Self {
        SiteCoord { a, b, sub: SubLattice::B }
    }

    /// The origin `A(0, 0)`, where every walk starts.
    pub const ORIGIN: SiteCoord = SiteCoord::new_a(0, 0);
}

impl std::fmt::Display for SiteCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.sub {
            SubLattice::A => 'A',
            SubLattice::B => 'B',
        };
        write!(f, "{}({},{})", tag, self.a, self.b)
    }
}

/// One of the six lattice directions, at angle `index * 60` degrees.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(u8);

impl Direction {
    /// All six directions in angular order.
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    /// Wraps an arbitrary index into `0..6`.
    pub const fn new(index: u8) -> Self {
        Direction(index % 6)
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    /// The reversed direction, three sixths of a turn away.
    pub const fn opposite(self) -> Self {
        Direction((self.0 + 3) % 6)
    }

    /// Unit vector of this direction in the plane embedding.
    pub fn unit_vector(self) -> (f64, f64) {
        let theta = f64::from(self.0) * std::f64::consts::FRAC_PI_3;
        (theta.cos(), theta.sin())
    }

    /// Exact integer displacement of one step in doubled coordinates
    /// (see [`embed_doubled`]).
    pub const fn doubled_delta(self) -> (i64, i64) {
        match self.0 {
            0 => (2, 0),
            1 => (1, 1),
            2 => (-1, 1),
            3 => (-2, 0),
            4 => (-1, -1),
            _ => (1, -1),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Chirality of a rotator, or equally the sense of the turn it causes.
///
/// `Right` turns the particle clockwise by one sixth of a turn, `Left`
/// counterclockwise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    pub const fn flipped(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
        }
    }

    /// Single-letter form used by the snapshot and table formats.
    pub const fn letter(self) -> char {
        match self {
            Orientation::Left => 'L',
            Orientation::Right => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'L' => Some(Orientation::Left),
            'R' => Some(Orientation::Right),
            _ => None,
        }
    }
}

/// Hexagonal face `(i, j)`: the hexagon whose bottom-left vertex is `A(i, j)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct FaceCoord {
    pub i: i32,
    pub j: i32,
}

impl FaceCoord {
    pub const fn new(i: i32, j: i32) -> Self {
        FaceCoord { i, j }
    }
}

impl std::fmt::Display for FaceCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F({},{})", self.i, self.j)
    }
}

/// Horizontal-bond endpoint class: `A` sites are the left ends (`HMinus`),
/// `B` sites the right ends (`HPlus`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum SiteClass {
    HPlus,
    HMinus,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("direction {dir} is illegal from {site}: {site} only admits {} directions", match site.sub { SubLattice::A => "even", SubLattice::B => "odd" })]
    IllegalDirection { site: SiteCoord, dir: Direction },
}

/// The site one step away along `dir`.
///
/// Errors when `dir`'s parity does not match the sublattice, since no such
/// bond exists.
pub fn neighbor(site: SiteCoord, dir: Direction) -> Result<SiteCoord, LatticeError> {
    let SiteCoord { a, b, sub } = site;
    match (sub, dir.index()) {
        (SubLattice::A, 0) => Ok(SiteCoord::new_b(a, b)),
        (SubLattice::A, 2) => Ok(SiteCoord::new_b(a, b - 1)),
        (SubLattice::A, 4) => Ok(SiteCoord::new_b(a - 1, b)),
        (SubLattice::B, 1) => Ok(SiteCoord::new_a(a + 1, b)),
        (SubLattice::B, 3) => Ok(SiteCoord::new_a(a, b)),
        (SubLattice::B, 5) => Ok(SiteCoord::new_a(a, b + 1)),
        _ => Err(LatticeError::IllegalDirection { site, dir }),
    }
}

/// Turns `dir` by one sixth of a turn in the sense given by `orientation`.
pub const fn rotate(dir: Direction, orientation: Orientation) -> Direction {
    match orientation {
        Orientation::Left => Direction((dir.index() + 1) % 6),
        Orientation::Right => Direction((dir.index() + 5) % 6),
    }
}

/// Position of a site in the plane.
pub fn embed(site: SiteCoord) -> (f64, f64) {
    let (dx, dy) = embed_doubled(site);
    (dx as f64 * 0.5, dy as f64 * (3.0f64.sqrt() * 0.5))
}

/// Exact integer embedding: returns `(X, Y)` with the true position being
/// `(X / 2, Y * sqrt(3) / 2)`. Every geometric predicate in this crate
/// reduces to integer arithmetic on these.
pub const fn embed_doubled(site: SiteCoord) -> (i64, i64) {
    let a = site.a as i64;
    let b = site.b as i64;
    let x2 = 3 * (a + b)
        + match site.sub {
            SubLattice::A => 0,
            SubLattice::B => 2,
        };
    (x2, a - b)
}

/// Exact squared distance from the origin, `|embed(site)|^2`.
///
/// `(X^2 + 3 Y^2) / 4` is an exact integer quarter-count, returned as f64.
pub fn displacement_sq_of(site: SiteCoord) -> f64 {
    let (x2, y2) = embed_doubled(site);
    (x2 * x2 + 3 * y2 * y2) as f64 * 0.25
}

/// Which end of its horizontal bond a site is.
pub const fn site_class(site: SiteCoord) -> SiteClass {
    match site.sub {
        SubLattice::A => SiteClass::HMinus,
        SubLattice::B => SiteClass::HPlus,
    }
}

/// The three faces meeting at `site`, in the fixed order used throughout.
pub const fn faces_incident(site: SiteCoord) -> [FaceCoord; 3] {
    let SiteCoord { a, b, .. } = site;
    match site.sub {
        SubLattice::A => [
            FaceCoord::new(a, b),
            FaceCoord::new(a - 1, b),
            FaceCoord::new(a - 1, b + 1),
        ],
        SubLattice::B => [
            FaceCoord::new(a, b),
            FaceCoord::new(a - 1, b + 1),
            FaceCoord::new(a, b + 1),
        ],
    }
}

/// Three-coloring of the faces: `(i - j) mod 3`.
pub const fn face_color(face: FaceCoord) -> u8 {
    (face.i - face.j).rem_euclid(3) as u8
}

/// The unique face at `site` whose color is `color_class` (taken mod 3).
pub fn shaded_face_of(site: SiteCoord, color_class: u8) -> FaceCoord {
    let class = color_class % 3;
    let faces = faces_incident(site);
    for face in faces {
        if face_color(face) == class {
            return face;
        }
    }
    unreachable!("the three faces at a site carry the three distinct colors");
}

/// Vertices of a face in counterclockwise order, starting from the
/// bottom-left vertex `A(i, j)`.
pub const fn face_vertices(face: FaceCoord) -> [SiteCoord; 6] {
    let FaceCoord { i, j } = face;
    [
        SiteCoord::new_a(i, j),
        SiteCoord::new_b(i, j),
        SiteCoord::new_a(i + 1, j),
        SiteCoord::new_b(i + 1, j - 1),
        SiteCoord::new_a(i + 1, j - 1),
        SiteCoord::new_b(i, j - 1),
    ]
}

/// Center of a face in the plane.
pub fn face_center(face: FaceCoord) -> (f64, f64) {
    let (x0, y0) = embed(SiteCoord::new_a(face.i, face.j));
    (x0 + 0.5, y0 + 3.0f64.sqrt() * 0.5)
}

/// Reflection through the vertical line `x = 1/2`.
///
/// This is a lattice symmetry that exchanges the sublattices:
/// `A(a, b) <-> B(-b, -a)`.
pub const fn mirror_x(site: SiteCoord) -> SiteCoord {
    match site.sub {
        SubLattice::A => SiteCoord::new_b(-site.b, -site.a),
        SubLattice::B => SiteCoord::new_a(-site.b, -site.a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn patch(radius: i32) -> Vec<SiteCoord> {
        let mut sites = Vec::new();
        for a in -radius..=radius {
            for b in -radius..=radius {
                sites.push(SiteCoord::new_a(a, b));
                sites.push(SiteCoord::new_b(a, b));
            }
        }
        sites
    }

    fn legal_dirs(site: SiteCoord) -> [Direction; 3] {
        match site.sub {
            SubLattice::A => [Direction::new(0), Direction::new(2), Direction::new(4)],
            SubLattice::B => [Direction::new(1), Direction::new(3), Direction::new(5)],
        }
    }

    /// Independent oracle: find the neighbor by brute-force search over the
    /// embedded plane, then check the closed-form table agrees.
    #[test]
    fn neighbor_matches_embedding_search() {
        let haystack = patch(6);
        for &site in &patch(4) {
            let (x, y) = embed(site);
            for dir in legal_dirs(site) {
                let (ux, uy) = dir.unit_vector();
                let target = (x + ux, y + uy);
                let found: Vec<SiteCoord> = haystack
                    .iter()
                    .copied()
                    .filter(|&s| {
                        let (sx, sy) = embed(s);
                        (sx - target.0).abs() < 1e-9 && (sy - target.1).abs() < 1e-9
                    })
                    .collect();
                assert_eq!(found.len(), 1, "embedding is not a packing at {site} {dir}");
                assert_eq!(neighbor(site, dir).unwrap(), found[0]);
            }
        }
    }

    #[test]
    fn neighbor_frozen_cases() {
        assert_eq!(
            neighbor(SiteCoord::ORIGIN, Direction::new(0)).unwrap(),
            SiteCoord::new_b(0, 0)
        );
        assert_eq!(
            neighbor(SiteCoord::ORIGIN, Direction::new(4)).unwrap(),
            SiteCoord::new_b(-1, 0)
        );
        assert_eq!(
            neighbor(SiteCoord::new_b(0, 0), Direction::new(3)).unwrap(),
            SiteCoord::ORIGIN
        );
        assert!(matches!(
            neighbor(SiteCoord::ORIGIN, Direction::new(1)),
            Err(LatticeError::IllegalDirection { .. })
        ));
        assert!(matches!(
            neighbor(SiteCoord::new_b(0, 0), Direction::new(0)),
            Err(LatticeError::IllegalDirection { .. })
        ));
    }

    #[test]
    fn rotation_frozen_cases() {
        assert_eq!(rotate(Direction::new(0), Orientation::Right), Direction::new(5));
        assert_eq!(rotate(Direction::new(0), Orientation::Left), Direction::new(1));
        assert_eq!(rotate(Direction::new(5), Orientation::Right), Direction::new(4));
        let (x, y) = rotate(Direction::new(0), Orientation::Right).unit_vector();
        assert!((x - 0.5).abs() < 1e-12);
        assert!((y + 3.0f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn face_vertices_frozen_hexagon() {
        let verts = face_vertices(FaceCoord::new(0, 0));
        assert_eq!(
            verts,
            [
                SiteCoord::new_a(0, 0),
                SiteCoord::new_b(0, 0),
                SiteCoord::new_a(1, 0),
                SiteCoord::new_b(1, -1),
                SiteCoord::new_a(1, -1),
                SiteCoord::new_b(0, -1),
            ]
        );
        let expected: [(f64, f64); 6] = [
            (0.0, 0.0),
            (1.0, 0.0),
            (1.5, 3.0f64.sqrt() / 2.0),
            (1.0, 3.0f64.sqrt()),
            (0.0, 3.0f64.sqrt()),
            (-0.5, 3.0f64.sqrt() / 2.0),
        ];
        for (v, e) in verts.iter().zip(expected.iter()) {
            let (x, y) = embed(*v);
            assert!((x - e.0).abs() < 1e-12 && (y - e.1).abs() < 1e-12);
        }
    }

    /// Faces are regular unit hexagons traversed counterclockwise.
    #[test]
    fn faces_are_regular_and_counterclockwise() {
        for i in -3..=3 {
            for j in -3..=3 {
                let face = FaceCoord::new(i, j);
                let verts = face_vertices(face);
                let (cx, cy) = face_center(face);
                let mut shoelace = 0.0;
                for k in 0..6 {
                    let (x0, y0) = embed(verts[k]);
                    let (x1, y1) = embed(verts[(k + 1) % 6]);
                    let r = ((x0 - cx).powi(2) + (y0 - cy).powi(2)).sqrt();
                    assert!((r - 1.0).abs() < 1e-9, "circumradius off at {face}");
                    let edge = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
                    assert!((edge - 1.0).abs() < 1e-9, "edge length off at {face}");
                    shoelace += x0 * y1 - x1 * y0;
                }
                assert!(shoelace > 0.0, "vertex order is clockwise at {face}");
            }
        }
    }

    /// Independent oracle for incidence: a face is incident to a site iff the
    /// site appears among the face's vertices.
    #[test]
    fn incidence_matches_vertex_membership() {
        let faces: Vec<FaceCoord> = (-5..=5)
            .flat_map(|i| (-5..=5).map(move |j| FaceCoord::new(i, j)))
            .collect();
        for &site in &patch(3) {
            let listed = faces_incident(site);
            let by_membership: Vec<FaceCoord> = faces
                .iter()
                .copied()
                .filter(|&f| face_vertices(f).contains(&site))
                .collect();
            assert_eq!(by_membership.len(), 3);
            let mut sorted_listed = listed.to_vec();
            sorted_listed.sort();
            let mut sorted_found = by_membership.clone();
            sorted_found.sort();
            assert_eq!(sorted_listed, sorted_found, "incidence wrong at {site}");
            let mut colors: Vec<u8> = listed.iter().map(|&f| face_color(f)).collect();
            colors.sort();
            assert_eq!(colors, vec![0, 1, 2], "colors not distinct at {site}");
        }
    }

    #[test]
    fn shaded_face_frozen_cases() {
        assert_eq!(shaded_face_of(SiteCoord::ORIGIN, 0), FaceCoord::new(0, 0));
        assert_eq!(shaded_face_of(SiteCoord::ORIGIN, 2), FaceCoord::new(-1, 0));
        assert_eq!(shaded_face_of(SiteCoord::ORIGIN, 1), FaceCoord::new(-1, 1));
        assert_eq!(shaded_face_of(SiteCoord::new_b(0, 0), 0), FaceCoord::new(0, 0));
        assert_eq!(shaded_face_of(SiteCoord::new_a(1, 0), 1), FaceCoord::new(1, 0));
    }

    #[test]
    fn site_classes_split_horizontal_bonds() {
        for &site in &patch(3) {
            match site.sub {
                SubLattice::A => {
                    assert_eq!(site_class(site), SiteClass::HMinus);
                    let right = neighbor(site, Direction::new(0)).unwrap();
                    assert_eq!(site_class(right), SiteClass::HPlus);
                    let (x0, y0) = embed(site);
                    let (x1, y1) = embed(right);
                    assert!((y1 - y0).abs() < 1e-12 && (x1 - x0 - 1.0).abs() < 1e-12);
                }
                SubLattice::B => assert_eq!(site_class(site), SiteClass::HPlus),
            }
        }
    }

    #[test]
    fn mirror_x_frozen_cases() {
        assert_eq!(mirror_x(SiteCoord::ORIGIN), SiteCoord::new_b(0, 0));
        assert_eq!(mirror_x(SiteCoord::new_b(0, 0)), SiteCoord::ORIGIN);
        assert_eq!(mirror_x(SiteCoord::new_a(1, 0)), SiteCoord::new_b(0, -1));
    }

    proptest! {
        #[test]
        fn neighbor_round_trips(a in -1000i32..1000, b in -1000i32..1000, sub in 0u8..2, k in 0u8..3) {
            let site = if sub == 0 { SiteCoord::new_a(a, b) } else { SiteCoord::new_b(a, b) };
            let dir = legal_dirs(site)[k as usize];
            let next = neighbor(site, dir).unwrap();
            prop_assert_eq!(next.sub != site.sub, true, "bipartite parity broken");
            prop_assert_eq!(neighbor(next, dir.opposite()).unwrap(), site);
        }

        #[test]
        fn steps_move_by_exact_unit_deltas(a in -1000i32..1000, b in -1000i32..1000, sub in 0u8..2, k in 0u8..3) {
            let site = if sub == 0 { SiteCoord::new_a(a, b) } else { SiteCoord::new_b(a, b) };
            let dir = legal_dirs(site)[k as usize];
            let next = neighbor(site, dir).unwrap();
            let (x0, y0) = embed_doubled(site);
            let (x1, y1) = embed_doubled(next);
            prop_assert_eq!((x1 - x0, y1 - y0), dir.doubled_delta());
        }

        #[test]
        fn rotations_compose_to_identity(k in 0u8..6) {
            let d = Direction::new(k);
            prop_assert_eq!(rotate(rotate(d, Orientation::Left), Orientation::Right), d);
            let mut six = d;
            for _ in 0..6 {
                six = rotate(six, Orientation::Right);
            }
            prop_assert_eq!(six, d);
        }

        #[test]
        fn mirror_is_an_involution_fixing_x_half(a in -1000i32..1000, b in -1000i32..1000, sub in 0u8..2) {
            let site = if sub == 0 { SiteCoord::new_a(a, b) } else { SiteCoord::new_b(a, b) };
            let m = mirror_x(site);
            prop_assert_eq!(mirror_x(m), site);
            let (x, y) = embed_doubled(site);
            let (mx, my) = embed_doubled(m);
            prop_assert_eq!(mx, 2 - x);
            prop_assert_eq!(my, y);
        }

        #[test]
        fn shaded_face_is_incident_with_requested_color(a in -1000i32..1000, b in -1000i32..1000, sub in 0u8..2, class in 0u8..3) {
            let site = if sub == 0 { SiteCoord::new_a(a, b) } else { SiteCoord::new_b(a, b) };
            let face = shaded_face_of(site, class);
            prop_assert_eq!(face_color(face), class);
            prop_assert!(face_vertices(face).contains(&site));
        }
    }
}
