//! Shape-regularity diagnostics.

use nalgebra::{Point2, Vector2};

use super::{polygon_centroid, signed_area2, PolyMesh};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct CellQuality<T: Scalar> {
    /// Radius of a ball the cell is star-shaped with respect to, over `h_E`.
    pub ball_ratio: T,
    /// Smallest distance between two vertices, over `h_E`.
    pub vertex_ratio: T,
}

#[derive(Debug, Clone)]
pub struct QualityReport<T: Scalar> {
    pub cells: Vec<CellQuality<T>>,
    pub min_ball_ratio: T,
    pub min_vertex_ratio: T,
}

/// Kernel of a simple CCW polygon: intersection of the inner half-planes of
/// all its edges. Empty when the polygon is not star-shaped.
fn kernel<T: Scalar>(pts: &[Point2<T>]) -> Vec<Point2<T>> {
    let n = pts.len();
    let mut poly: Vec<Point2<T>> = pts.to_vec();
    for i in 0..n {
        let a = pts[i];
        let t = pts[(i + 1) % n] - a;
        // inside: left of the directed edge
        let side = |p: &Point2<T>| t.perp(&(p - a));
        let m = poly.len();
        let mut out = Vec::with_capacity(m + 1);
        for j in 0..m {
            let p = poly[j];
            let q = poly[(j + 1) % m];
            let (sp, sq) = (side(&p), side(&q));
            let pin = sp >= T::zero();
            let qin = sq >= T::zero();
            if pin {
                out.push(p);
            }
            if pin != qin {
                out.push(p + (q - p) * (sp / (sp - sq)));
            }
        }
        poly = out;
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    poly
}

/// Distance from `c` to the boundary of a convex CCW polygon, or zero when
/// `c` lies outside.
fn inner_distance<T: Scalar>(poly: &[Point2<T>], c: &Point2<T>) -> T {
    let n = poly.len();
    let mut d = T::max_value().unwrap();
    for i in 0..n {
        let a = poly[i];
        let t: Vector2<T> = poly[(i + 1) % n] - a;
        let l = t.norm();
        if l == T::zero() {
            continue;
        }
        let s = t.perp(&(c - a)) / l;
        if s < T::zero() {
            return T::zero();
        }
        d = d.min(s);
    }
    d
}

pub(crate) fn cell_quality<T: Scalar>(pts: &[Point2<T>]) -> CellQuality<T> {
    let n = pts.len();
    let mut h = T::zero();
    let mut dmin = T::max_value().unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (pts[i] - pts[j]).norm();
            h = h.max(d);
            dmin = dmin.min(d);
        }
    }
    let ker = kernel(pts);
    let mut r = T::zero();
    if ker.len() >= 3 && signed_area2(&ker) > T::zero() {
        let centroid = polygon_centroid(pts);
        let kc = polygon_centroid(&ker);
        r = inner_distance(&ker, &centroid).max(inner_distance(&ker, &kc));
        // sample along segments from the kernel centroid to its vertices
        let steps = 8;
        for v in &ker {
            for s in 1..steps {
                let t = T::from_count(s) / T::from_count(steps);
                let c = kc + (v - kc) * t;
                r = r.max(inner_distance(&ker, &c));
            }
        }
    }
    CellQuality { ball_ratio: r / h, vertex_ratio: dmin / h }
}

pub fn mesh_quality<T: Scalar>(mesh: &PolyMesh<T>) -> QualityReport<T> {
    let cells: Vec<_> = (0..mesh.num_cells()).map(|c| cell_quality(&mesh.cell_points(c))).collect();
    let min_ball_ratio = cells.iter().fold(T::one(), |m, q| m.min(q.ball_ratio));
    let min_vertex_ratio = cells.iter().fold(T::one(), |m, q| m.min(q.vertex_ratio));
    QualityReport { cells, min_ball_ratio, min_vertex_ratio }
}
