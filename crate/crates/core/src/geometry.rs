//! Convex right prisms: construction, boundary features, uniform sampling.
//!
//! Points are `[x, y, z]` with `(x, y)` in the base polygon and `z ∈ [0, h]`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// Below this value of √β × (shortest edge) the boundary expansion is not expected to hold.
pub const VALIDITY_SCALE: f64 = 5.0;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidPrism(msg.into()))
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist2(a: Point2, b: Point2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    /// Cumulative fan-triangle areas from vertex 0, for sampling.
    fan_cumulative: Vec<f64>,
}

impl ConvexPolygon {
    /// Clockwise input is reversed. Collinear, repeated or reflex vertices are rejected.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return invalid(format!("a polygon needs at least 3 vertices, got {n}"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("vertex coordinates must be finite");
        }
        let signed: f64 = (0..n)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            / 2.0;
        if signed == 0.0 {
            return invalid("polygon has zero area");
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        let scale = vertices
            .iter()
            .flat_map(|p| p.iter().map(|c| c.abs()))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if dist2(a, b) <= 1e-12 * scale {
                return invalid(format!("repeated vertex at index {}", (i + 1) % n));
            }
            let turn = cross(a, b, c);
            if turn <= 1e-12 * scale * scale {
                return invalid(format!(
                    "base is not strictly convex at vertex {} (interior angle >= π)",
                    (i + 1) % n
                ));
            }
        }
        let mut poly = Self { vertices, fan_cumulative: Vec::new() };
        // Left turns everywhere still admit self-intersecting stars; their
        // interior angles no longer sum to (n - 2)π.
        let total: f64 = poly.interior_angles().iter().sum();
        if (total - (n as f64 - 2.0) * PI).abs() > 1e-9 {
            return invalid("polygon is self-intersecting");
        }
        let mut acc = 0.0;
        for i in 1..n - 1 {
            acc += 0.5 * cross(poly.vertices[0], poly.vertices[i], poly.vertices[i + 1]);
            poly.fan_cumulative.push(acc);
        }
        Ok(poly)
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        *self.fan_cumulative.last().expect("at least one fan triangle")
    }

    /// Length of the edge from vertex i to vertex i + 1.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| dist2(self.vertices[i], self.vertices[(i + 1) % n])).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// Interior angle at each vertex, in (0, π).
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let prev = self.vertices[(i + n - 1) % n];
                let cur = self.vertices[i];
                let next = self.vertices[(i + 1) % n];
                let u = [prev[0] - cur[0], prev[1] - cur[1]];
                let v = [next[0] - cur[0], next[1] - cur[1]];
                let c = u[0] * v[0] + u[1] * v[1];
                let s = u[0] * v[1] - u[1] * v[0];
                s.abs().atan2(c)
            })
            .collect()
    }

    pub fn contains(&self, p: Point2) -> bool {
        let n = self.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(dist2(*a, *b));
            }
        }
        best
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// A uniform point: fan triangle chosen by area, then barycentric sampling.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        let target = rng.random::<f64>() * self.area();
        let k = self
            .fan_cumulative
            .partition_point(|&c| c <= target)
            .min(self.fan_cumulative.len() - 1);
        let (a, b, c) = (self.vertices[0], self.vertices[k + 1], self.vertices[k + 2]);
        let r1 = rng.random::<f64>().sqrt();
        let r2 = rng.random::<f64>();
        let (wa, wb, wc) = (1.0 - r1, r1 * (1.0 - r2), r1 * r2);
        [wa * a[0] + wb * b[0] + wc * c[0], wa * a[1] + wb * b[1] + wc * c[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureClass {
    Bulk,
    Face,
    Edge,
    Corner,
}

impl FeatureClass {
    pub fn codim(self) -> u8 {
        match self {
            FeatureClass::Bulk => 0,
            FeatureClass::Face => 1,
            FeatureClass::Edge => 2,
            FeatureClass::Corner => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureClass::Bulk => "bulk",
            FeatureClass::Face => "face",
            FeatureClass::Edge => "edge",
            FeatureClass::Corner => "corner",
        }
    }
}

/// One boundary object of the prism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFeature {
    pub class: FeatureClass,
    /// Volume, area, length, or 1 for a corner.
    pub measure: f64,
    /// ϑ (corner), 2ϑ (edge), 2π (face), 4π (bulk).
    pub solid_angle: f64,
    /// ϑ for corners and edges.
    pub angle: Option<f64>,
    pub multiplicity: u32,
}

impl BoundaryFeature {
    pub fn corner(theta: f64) -> Self {
        Self { class: FeatureClass::Corner, measure: 1.0, solid_angle: theta, angle: Some(theta), multiplicity: 1 }
    }

    pub fn edge(theta: f64, length: f64) -> Self {
        Self {
            class: FeatureClass::Edge,
            measure: length,
            solid_angle: 2.0 * theta,
            angle: Some(theta),
            multiplicity: 1,
        }
    }

    pub fn face(area: f64) -> Self {
        Self { class: FeatureClass::Face, measure: area, solid_angle: 2.0 * PI, angle: None, multiplicity: 1 }
    }

    pub fn bulk(volume: f64) -> Self {
        Self { class: FeatureClass::Bulk, measure: volume, solid_angle: 4.0 * PI, angle: None, multiplicity: 1 }
    }

    pub fn codim(&self) -> u8 {
        self.class.codim()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PrismFile {
    base_vertices: Vec<Point2>,
    height: f64,
}

/// Convex polygon extruded perpendicular to its plane by `height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PrismFile", into = "PrismFile")]
pub struct RightPrism {
    base: ConvexPolygon,
    height: f64,
}

impl TryFrom<PrismFile> for RightPrism {
    type Error = Error;
    fn try_from(f: PrismFile) -> Result<Self> {
        RightPrism::new(f.base_vertices, f.height)
    }
}

impl From<RightPrism> for PrismFile {
    fn from(p: RightPrism) -> Self {
        PrismFile { base_vertices: p.base.vertices, height: p.height }
    }
}

impl RightPrism {
    pub fn new(base_vertices: Vec<Point2>, height: f64) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return invalid(format!("height must be positive and finite, got {height}"));
        }
        Ok(Self { base: ConvexPolygon::new(base_vertices)?, height })
    }

    pub fn base(&self) -> &ConvexPolygon {
        &self.base
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn base_area(&self) -> f64 {
        self.base.area()
    }

    pub fn volume(&self) -> f64 {
        self.base.area() * self.height
    }

    /// 2B + p h.
    pub fn surface_area(&self) -> f64 {
        2.0 * self.base.area() + self.base.perimeter() * self.height
    }

    pub fn shortest_edge(&self) -> f64 {
        self.base.edge_lengths().into_iter().fold(self.height, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        self.base.diameter().hypot(self.height)
    }

    /// √β × shortest edge; the boundary expansion wants this well above 1.
    pub fn validity_scale(&self, beta: f64) -> f64 {
        beta.sqrt() * self.shortest_edge()
    }

    pub fn is_small_scale(&self, beta: f64) -> bool {
        self.validity_scale(beta) < VALIDITY_SCALE
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0.0..=self.height).contains(&p[2]) && self.base.contains([p[0], p[1]])
    }

    /// 2n corners, 3n edges, one aggregated face and the bulk.
    ///
    /// Corners and vertical edges carry the base interior angle; the 2n
    /// horizontal edges meet the lateral faces at π/2.
    pub fn enumerate_features(&self) -> Vec<BoundaryFeature> {
        let angles = self.base.interior_angles();
        let lengths = self.base.edge_lengths();
        let mut out = Vec::with_capacity(5 * angles.len() + 2);
        for _ in 0..2 {
            out.extend(angles.iter().map(|&t| BoundaryFeature::corner(t)));
        }
        for _ in 0..2 {
            out.extend(lengths.iter().map(|&l| BoundaryFeature::edge(PI / 2.0, l)));
        }
        out.extend(angles.iter().map(|&t| BoundaryFeature::edge(t, self.height)));
        out.push(BoundaryFeature::face(self.surface_area()));
        out.push(BoundaryFeature::bulk(self.volume()));
        out
    }

    pub fn sample_uniform_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Point3> {
        (0..count)
            .map(|_| {
                let [x, y] = self.base.sample_with(rng);
                [x, y, rng.random::<f64>() * self.height]
            })
            .collect()
    }

    /// `count` i.i.d. uniform points, deterministic in `seed`.
    pub fn sample_uniform(&self, count: usize, seed: u64) -> Vec<Point3> {
        self.sample_uniform_with(count, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Merge features with identical class, angle and measure, summing multiplicities.
/// Order of first appearance is kept.
pub fn group_features(features: &[BoundaryFeature]) -> Vec<BoundaryFeature> {
    let same = |a: &BoundaryFeature, b: &BoundaryFeature| {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
        a.class == b.class
            && close(a.measure, b.measure)
            && match (a.angle, b.angle) {
                (Some(x), Some(y)) => close(x, y),
                (None, None) => true,
                _ => false,
            }
    };
    let mut out: Vec<BoundaryFeature> = Vec::new();
    for f in features {
        match out.iter_mut().find(|g| same(g, f)) {
            Some(g) => g.multiplicity += f.multiplicity,
            None => out.push(*f),
        }
    }
    out
}

/// Pentagonal "house" cross-section (unit square of side L under a right-angled
/// roof of height L/2) extruded by L.
pub fn house_prism(l: f64) -> Result<RightPrism> {
    RightPrism::new(vec![[0.0, 0.0], [l, 0.0], [l, l], [l / 2.0, 1.5 * l], [0.0, l]], l)
}

pub fn cube_prism(l: f64) -> Result<RightPrism> {
    RightPrism::new(ConvexPolygon::square(l)?.vertices().to_vec(), l)
}

pub fn distance<const D: usize>(p: &[f64; D], q: &[f64; D]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
