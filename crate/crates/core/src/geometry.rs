//! Planar polygon primitives on (longitude, latitude) degree pairs.
//!
//! Everything here treats coordinates as plate-carrée planar values; the
//! regions handled by this crate are small enough relative to the globe that
//! no reprojection is attempted.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("ring has {0} vertices, at least 4 are required")]
    TooFewVertices(usize),
    #[error("ring is not closed (first vertex differs from last)")]
    NotClosed,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("polygon has zero area")]
    Degenerate,
    #[error("geometry has no polygons")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coord<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Coord<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox<T> {
    pub min: Coord<T>,
    pub max: Coord<T>,
}

impl<T: Scalar> BBox<T> {
    fn empty() -> Self {
        Self {
            min: Coord::new(T::infinity(), T::infinity()),
            max: Coord::new(T::neg_infinity(), T::neg_infinity()),
        }
    }

    fn include(&mut self, c: Coord<T>) {
        self.min.x = self.min.x.min(c.x);
        self.min.y = self.min.y.min(c.y);
        self.max.x = self.max.x.max(c.x);
        self.max.y = self.max.y.max(c.y);
    }

    pub fn contains(&self, c: Coord<T>) -> bool {
        c.x >= self.min.x && c.x <= self.max.x && c.y >= self.min.y && c.y <= self.max.y
    }

    pub fn intersects(&self, other: &Self, tol: T) -> bool {
        self.min.x <= other.max.x + tol
            && other.min.x <= self.max.x + tol
            && self.min.y <= other.max.y + tol
            && other.min.y <= self.max.y + tol
    }
}

/// A closed linear ring. The first and last vertex are identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring<T>(Vec<Coord<T>>);

impl<T: Scalar> Ring<T> {
    pub fn new(coords: Vec<Coord<T>>) -> Result<Self, GeometryError> {
        if coords.iter().any(|c| !c.x.is_finite() || !c.y.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if coords.len() < 4 {
            return Err(GeometryError::TooFewVertices(coords.len()));
        }
        if coords.first() != coords.last() {
            return Err(GeometryError::NotClosed);
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[Coord<T>] {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = (Coord<T>, Coord<T>)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    /// Shoelace sums: (signed area, signed x-moment, signed y-moment).
    fn moments(&self) -> (T, T, T) {
        let mut a = T::zero();
        let mut mx = T::zero();
        let mut my = T::zero();
        for (p, q) in self.segments() {
            let cross = p.x * q.y - q.x * p.y;
            a += cross;
            mx += (p.x + q.x) * cross;
            my += (p.y + q.y) * cross;
        }
        (a / T::lit(2.0), mx / T::lit(6.0), my / T::lit(6.0))
    }

    pub fn signed_area(&self) -> T {
        self.moments().0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon<T> {
    pub exterior: Ring<T>,
    pub holes: Vec<Ring<T>>,
}

impl<T: Scalar> Polygon<T> {
    pub fn new(exterior: Ring<T>, holes: Vec<Ring<T>>) -> Result<Self, GeometryError> {
        let poly = Self { exterior, holes };
        if poly.area() <= T::zero() {
            return Err(GeometryError::Degenerate);
        }
        Ok(poly)
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring<T>> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    /// (area, x-moment, y-moment) with the exterior counted positive and
    /// holes negative, whatever their winding.
    fn moments(&self) -> (T, T, T) {
        let mut total = (T::zero(), T::zero(), T::zero());
        for (k, ring) in self.rings().enumerate() {
            let (a, mx, my) = ring.moments();
            let mut sign = if a < T::zero() { -T::one() } else { T::one() };
            if k > 0 {
                sign = -sign;
            }
            total.0 += sign * a;
            total.1 += sign * mx;
            total.2 += sign * my;
        }
        total
    }

    pub fn area(&self) -> T {
        self.moments().0
    }
}

/// One or more polygons treated as a single region (islands included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPolygon<T>(pub Vec<Polygon<T>>);

impl<T: Scalar> MultiPolygon<T> {
    pub fn new(polygons: Vec<Polygon<T>>) -> Result<Self, GeometryError> {
        if polygons.is_empty() {
            return Err(GeometryError::Empty);
        }
        Ok(Self(polygons))
    }

    /// Axis-aligned unit square with lower-left corner at (x, y).
    pub fn square(x: T, y: T, size: T) -> Self {
        let c = |a: T, b: T| Coord::new(a, b);
        let ring = Ring::new(vec![
            c(x, y),
            c(x + size, y),
            c(x + size, y + size),
            c(x, y + size),
            c(x, y),
        ])
        .expect("square ring is valid");
        Self(vec![Polygon { exterior: ring, holes: vec![] }])
    }

    pub fn polygons(&self) -> &[Polygon<T>] {
        &self.0
    }

    pub fn area(&self) -> T {
        self.0.iter().map(|p| p.area()).sum()
    }

    /// Area-weighted centroid over the union of parts.
    pub fn centroid(&self) -> Option<Coord<T>> {
        let (mut a, mut mx, mut my) = (T::zero(), T::zero(), T::zero());
        for p in &self.0 {
            let (pa, px, py) = p.moments();
            a += pa;
            mx += px;
            my += py;
        }
        if a <= T::zero() {
            return None;
        }
        Some(Coord::new(mx / a, my / a))
    }

    pub fn bbox(&self) -> BBox<T> {
        let mut bb = BBox::empty();
        for c in self.vertices() {
            bb.include(c);
        }
        bb
    }

    pub fn vertices(&self) -> impl Iterator<Item = Coord<T>> + '_ {
        self.0
            .iter()
            .flat_map(|p| p.rings())
            .flat_map(|r| r.coords().iter().copied())
    }

    pub fn segments(&self) -> impl Iterator<Item = (Coord<T>, Coord<T>)> + '_ {
        self.0.iter().flat_map(|p| p.rings()).flat_map(|r| r.segments())
    }
}

/// Euclidean distance from `p` to the closed segment `a`-`b`.
pub fn point_segment_distance<T: Scalar>(p: Coord<T>, a: Coord<T>, b: Coord<T>) -> T {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let cx = a.x + t * dx - p.x;
    let cy = a.y + t * dy - p.y;
    (cx * cx + cy * cy).sqrt()
}

/// Index pairs `(i, j)`, `i < j`, of shapes that share at least one boundary
/// point within `tol` (Queen contiguity). Sorted ascending.
///
/// Segments are bucketed into a uniform grid; every vertex is tested against
/// the segments of other shapes in its cell. A shared boundary always places a
/// vertex of one shape on (or at the end of) a segment of the other, so this
/// finds edge and corner contacts alike.
pub fn queen_contiguous_pairs<T: Scalar>(shapes: &[&MultiPolygon<T>], tol: T) -> Vec<(usize, usize)> {
    let mut segments: Vec<(u32, Coord<T>, Coord<T>)> = Vec::new();
    let mut total_len = T::zero();
    let mut extent = BBox::empty();
    for (idx, shape) in shapes.iter().enumerate() {
        for (a, b) in shape.segments() {
            total_len += ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
            extent.include(a);
            segments.push((idx as u32, a, b));
        }
    }
    if segments.is_empty() {
        return Vec::new();
    }
    let span = (extent.max.x - extent.min.x).max(extent.max.y - extent.min.y);
    let cell = (total_len / T::count(segments.len()))
        .max(span / T::lit(4096.0))
        .max(tol * T::lit(4.0))
        .max(T::epsilon());
    let key = |v: T| -> i64 { (v / cell).floor().to_i64().unwrap_or(0) };

    let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for (s, (_, a, b)) in segments.iter().enumerate() {
        let (x0, x1) = (key(a.x.min(b.x) - tol), key(a.x.max(b.x) + tol));
        let (y0, y1) = (key(a.y.min(b.y) - tol), key(a.y.max(b.y) + tol));
        for gx in x0..=x1 {
            for gy in y0..=y1 {
                grid.entry((gx, gy)).or_default().push(s as u32);
            }
        }
    }

    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for (idx, shape) in shapes.iter().enumerate() {
        for v in shape.vertices() {
            let Some(bucket) = grid.get(&(key(v.x), key(v.y))) else {
                continue;
            };
            for &s in bucket {
                let (owner, a, b) = segments[s as usize];
                let owner = owner as usize;
                if owner == idx {
                    continue;
                }
                let pair = (idx.min(owner), idx.max(owner));
                if pairs.contains(&pair) {
                    continue;
                }
                if point_segment_distance(v, a, b) <= tol {
                    pairs.insert(pair);
                }
            }
        }
    }
    let mut out: Vec<_> = pairs.into_iter().collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(points: &[(f64, f64)]) -> Ring<f64> {
        Ring::new(points.iter().map(|&(x, y)| Coord::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn unit_square_centroid() {
        let sq = MultiPolygon::<f64>::square(0.0, 0.0, 1.0);
        let c = sq.centroid().unwrap();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((sq.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l_shape_centroid_matches_triangulation() {
        // Three unit squares: (0,0), (1,0), (0,1).
        let l = ring(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.), (0., 0.)]);
        let mp = MultiPolygon(vec![Polygon::new(l, vec![]).unwrap()]);
        // Fan triangulation from the origin, area-weighted triangle centroids.
        let pts = [(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)];
        let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for k in 1..pts.len() - 1 {
            let (p0, p1, p2) = (pts[0], pts[k], pts[k + 1]);
            let ta = 0.5 * ((p1.0 - p0.0) * (p2.1 - p0.1) - (p2.0 - p0.0) * (p1.1 - p0.1));
            a += ta;
            cx += ta * (p0.0 + p1.0 + p2.0) / 3.0;
            cy += ta * (p0.1 + p1.1 + p2.1) / 3.0;
        }
        let c = mp.centroid().unwrap();
        assert!((c.x - cx / a).abs() < 1e-12);
        assert!((c.y - cy / a).abs() < 1e-12);
        // 5/6 for both axes by the unit-square decomposition
        assert!((c.x - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn hole_winding_does_not_matter() {
        let outer = ring(&[(0., 0.), (4., 0.), (4., 4.), (0., 4.), (0., 0.)]);
        let hole_ccw = ring(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.), (0., 0.)]);
        let hole_cw = ring(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.), (0., 0.)]);
        let a = Polygon::new(outer.clone(), vec![hole_ccw]).unwrap();
        let b = Polygon::new(outer, vec![hole_cw]).unwrap();
        assert_eq!(a.area(), 15.0);
        assert_eq!(b.area(), 15.0);
    }

    #[test]
    fn ring_validation() {
        let open = Ring::new(vec![Coord::new(0., 0.), Coord::new(1., 0.), Coord::new(1., 1.), Coord::new(0., 1.)]);
        assert_eq!(open.unwrap_err(), GeometryError::NotClosed);
        let short = Ring::new(vec![Coord::new(0., 0.), Coord::new(1., 0.), Coord::new(0., 0.)]);
        assert_eq!(short.unwrap_err(), GeometryError::TooFewVertices(3));
        let nan = Ring::new(vec![Coord::new(f64::NAN, 0.); 4]);
        assert_eq!(nan.unwrap_err(), GeometryError::NonFinite);
    }

    #[test]
    fn contiguity_detects_corner_and_t_junction() {
        let a = MultiPolygon::square(0.0, 0.0, 1.0);
        let corner = MultiPolygon::square(1.0, 1.0, 1.0);
        // Shares part of a's right edge without sharing a's vertices.
        let t = MultiPolygon(vec![Polygon::new(
            ring(&[(1.0, 0.25), (2.0, 0.25), (2.0, 0.75), (1.0, 0.75), (1.0, 0.25)]),
            vec![],
        )
        .unwrap()]);
        let far = MultiPolygon::square(5.0, 5.0, 1.0);
        let pairs = queen_contiguous_pairs(&[&a, &corner, &t, &far], 1e-9);
        assert_eq!(pairs, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn generic_over_f32() {
        let sq = MultiPolygon::<f32>::square(0.0, 0.0, 2.0);
        let c = sq.centroid().unwrap();
        assert_eq!((c.x, c.y), (1.0, 1.0));
    }
}
