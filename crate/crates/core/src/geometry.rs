//! Detection-zone tiling of the RSU coverage.
//!
//! The RSU sits at the origin. Zones are axis-aligned cubes of side
//! `s = d / sqrt(3)`, so a zone's space diagonal equals the accurate detection
//! distance `d`. Zone 0 is centred on the RSU; further zones are discovered
//! breadth-first across shared faces and kept while their nearest point to
//! the RSU lies strictly inside the coverage radius.
//!
//! Every zone sits on the integer lattice `cell * s`, which is what [`Tiling::locate`]
//! indexes on.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Absolute tolerance, in metres, for membership and distance comparisons.
pub const GEOM_EPS: f64 = 1e-9;

/// Default upper bound on the number of zones a tiling may hold.
pub const DEFAULT_ZONE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        math::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point3::ORIGIN)
    }

    /// Linear interpolation; `frac = 0` gives `self`, `frac = 1` gives `other`.
    pub fn lerp(&self, other: &Point3, frac: f64) -> Point3 {
        Point3 {
            x: self.x + (other.x - self.x) * frac,
            y: self.y + (other.y - self.y) * frac,
            z: self.z + (other.z - self.z) * frac,
        }
    }

    /// Coordinate by index: 0 = x, 1 = y, anything else = z.
    pub fn axis(&self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Point3::new(v[0], v[1], v[2])
    }
}

/// Which part of space the coverage lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TilingMode {
    /// One row of cubes along the x axis (a road).
    Line,
    /// One layer of cubes covering the disc in the z = 0 plane.
    #[default]
    Disc,
    /// The full coverage ball.
    Ball,
}

impl TilingMode {
    /// Number of leading axes (x, y, z) the mode tiles along.
    pub fn dims(self) -> usize {
        match self {
            TilingMode::Line => 1,
            TilingMode::Disc => 2,
            TilingMode::Ball => 3,
        }
    }
}

impl fmt::Display for TilingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TilingMode::Line => "line",
            TilingMode::Disc => "disc",
            TilingMode::Ball => "ball",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ZoneId(pub u32);

impl ZoneId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionZone {
    pub id: ZoneId,
    pub min_corner: Point3,
    pub max_corner: Point3,
    pub side: f64,
    /// Lattice coordinates; the centre is `cell * side`.
    pub cell: [i64; 3],
}

impl DetectionZone {
    fn from_cell(id: ZoneId, cell: [i64; 3], side: f64) -> Self {
        let half = side / 2.0;
        let c = [cell[0] as f64 * side, cell[1] as f64 * side, cell[2] as f64 * side];
        DetectionZone {
            id,
            min_corner: Point3::new(c[0] - half, c[1] - half, c[2] - half),
            max_corner: Point3::new(c[0] + half, c[1] + half, c[2] + half),
            side,
            cell,
        }
    }

    pub fn center(&self) -> Point3 {
        self.min_corner.lerp(&self.max_corner, 0.5)
    }

    pub fn diagonal(&self) -> f64 {
        self.min_corner.distance(&self.max_corner)
    }

    /// Closed-bounds membership with [`GEOM_EPS`] slack on every face.
    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| {
            let v = p.axis(i);
            self.min_corner.axis(i) - GEOM_EPS <= v && v <= self.max_corner.axis(i) + GEOM_EPS
        })
    }

    /// The eight corners, +z face first.
    pub fn vertices(&self) -> [Point3; 8] {
        let (lo, hi) = (self.min_corner, self.max_corner);
        [
            Point3::new(hi.x, hi.y, hi.z),
            Point3::new(hi.x, lo.y, hi.z),
            Point3::new(lo.x, lo.y, hi.z),
            Point3::new(lo.x, hi.y, hi.z),
            Point3::new(hi.x, hi.y, lo.z),
            Point3::new(hi.x, lo.y, lo.z),
            Point3::new(lo.x, lo.y, lo.z),
            Point3::new(lo.x, hi.y, lo.z),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    InvalidParameter { name: &'static str, value: f64 },
    Capacity { cap: usize },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InvalidParameter { name, value } => {
                write!(f, "invalid {name}: {value} (must be positive and finite)")
            }
            GeometryError::Capacity { cap } => write!(f, "tiling exceeds the zone cap of {cap}"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// Side of a detection zone whose space diagonal is `d`.
pub fn zone_side_length(d: f64) -> Result<f64, GeometryError> {
    check_positive("detection distance", d)?;
    Ok(d / math::sqrt(3.0))
}

fn check_positive(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter { name, value })
    }
}

/// Face directions in discovery order.
const FACES: [[i64; 3]; 6] = [
    [0, 0, 1],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, -1],
    [-1, 0, 0],
    [0, -1, 0],
];

#[derive(Debug, Clone)]
pub struct Tiling {
    zones: Vec<DetectionZone>,
    radius: f64,
    detection_distance: f64,
    side: f64,
    mode: TilingMode,
    index: BTreeMap<[i64; 3], ZoneId>,
}

impl PartialEq for Tiling {
    fn eq(&self, other: &Self) -> bool {
        self.zones == other.zones
            && self.radius == other.radius
            && self.detection_distance == other.detection_distance
            && self.mode == other.mode
    }
}

/// Tiles a coverage of radius `r` with zones for detection distance `d`.
pub fn build_tiling(r: f64, d: f64, mode: TilingMode) -> Result<Tiling, GeometryError> {
    build_tiling_capped(r, d, mode, DEFAULT_ZONE_CAP)
}

pub fn build_tiling_capped(
    r: f64,
    d: f64,
    mode: TilingMode,
    cap: usize,
) -> Result<Tiling, GeometryError> {
    check_positive("coverage radius", r)?;
    let side = zone_side_length(d)?;
    let dims = mode.dims();

    let mut zones = Vec::new();
    let mut index = BTreeMap::new();
    let mut queue = VecDeque::new();

    let origin = [0i64; 3];
    index.insert(origin, ZoneId(0));
    zones.push(DetectionZone::from_cell(ZoneId(0), origin, side));
    queue.push_back(origin);

    while let Some(cell) = queue.pop_front() {
        for face in FACES.iter() {
            if face.iter().skip(dims).any(|&c| c != 0) {
                continue;
            }
            let next = [cell[0] + face[0], cell[1] + face[1], cell[2] + face[2]];
            if index.contains_key(&next) || cell_min_distance(next, side, dims) >= r {
                continue;
            }
            if zones.len() >= cap {
                return Err(GeometryError::Capacity { cap });
            }
            let id = ZoneId(zones.len() as u32);
            index.insert(next, id);
            zones.push(DetectionZone::from_cell(id, next, side));
            queue.push_back(next);
        }
    }

    Ok(Tiling { zones, radius: r, detection_distance: d, side, mode, index })
}

/// Distance from the origin to the nearest point of a lattice cube, measured
/// inside the mode's subspace.
fn cell_min_distance(cell: [i64; 3], side: f64, dims: usize) -> f64 {
    let mut sq = 0.0;
    for &k in cell.iter().take(dims) {
        let gap = (k.unsigned_abs() as f64 - 0.5) * side;
        if gap > 0.0 {
            sq += gap * gap;
        }
    }
    math::sqrt(sq)
}

impl Tiling {
    pub fn zones(&self) -> &[DetectionZone] {
        &self.zones
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn zone(&self, id: ZoneId) -> Option<&DetectionZone> {
        self.zones.get(id.index())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn detection_distance(&self) -> f64 {
        self.detection_distance
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn mode(&self) -> TilingMode {
        self.mode
    }

    /// Lowest zone id whose closed bounds contain `p`.
    pub fn locate(&self, p: &Point3) -> Option<ZoneId> {
        if !p.is_finite() {
            return None;
        }
        // Candidate lattice indices per axis, widened by one on each side so
        // float error in the division can't drop a zone the bounds test would accept.
        let mut ranges = [(0i64, 0i64); 3];
        for (i, range) in ranges.iter_mut().enumerate() {
            let v = p.axis(i);
            let lo = math::ceil((v - GEOM_EPS) / self.side - 0.5) as i64 - 1;
            let hi = math::floor((v + GEOM_EPS) / self.side + 0.5) as i64 + 1;
            *range = (lo, hi);
        }
        let mut best: Option<ZoneId> = None;
        for kx in ranges[0].0..=ranges[0].1 {
            for ky in ranges[1].0..=ranges[1].1 {
                for kz in ranges[2].0..=ranges[2].1 {
                    if let Some(&id) = self.index.get(&[kx, ky, kz]) {
                        if best.is_none_or(|b| id < b) && self.zones[id.index()].contains(p) {
                            best = Some(id);
                        }
                    }
                }
            }
        }
        best
    }

    /// Reference implementation of [`Tiling::locate`]: scan every zone in id order.
    pub fn locate_linear(&self, p: &Point3) -> Option<ZoneId> {
        if !p.is_finite() {
            return None;
        }
        self.zones.iter().find(|z| z.contains(p)).map(|z| z.id)
    }
}
