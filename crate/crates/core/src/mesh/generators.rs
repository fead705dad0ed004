//! Structured and randomly perturbed mesh families on the unit square and the
//! unit disk.
//!
//! All random perturbations draw from `ChaCha8Rng::seed_from_u64(seed)`, so a
//! generator called twice with the same arguments yields bit-identical meshes.

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::quality::cell_quality;
use super::{is_simple_polygon, signed_area2, DomainTag, PolyMesh};
use crate::error::{Result, VemError};
use crate::scalar::Scalar;

/// Default bound on the WEB midpoint displacement, relative to the edge length.
pub const WEB_DISPLACEMENT_FRACTION: f64 = 0.2;

const MAX_RETRIES: usize = 200;
/// Displaced WEB cells must keep at least this chunkiness.
const WEB_MIN_BALL_RATIO: f64 = 0.08;

fn cell_ok<T: Scalar>(verts: &[Point2<T>], cell: &[usize]) -> bool {
    let pts: Vec<_> = cell.iter().map(|&v| verts[v]).collect();
    is_simple_polygon(&pts) && signed_area2(&pts) > T::zero()
}

fn web_cell_ok<T: Scalar>(verts: &[Point2<T>], cell: &[usize]) -> bool {
    if !cell_ok(verts, cell) {
        return false;
    }
    let pts: Vec<_> = cell.iter().map(|&v| verts[v]).collect();
    cell_quality(&pts).ball_ratio.as_f64() >= WEB_MIN_BALL_RATIO
}

/// `n x n` quadrilaterals of the unit square. Interior vertices are moved by a
/// uniform random offset of at most `distortion * h / 2` per coordinate.
pub fn gen_square_quads<T: Scalar>(n: usize, distortion: f64, seed: u64) -> Result<PolyMesh<T>> {
    if n < 2 {
        return Err(VemError::InvalidArgument(format!("quad mesh needs n >= 2, got {n}")));
    }
    if !(0.0..1.0).contains(&distortion) {
        return Err(VemError::InvalidArgument(format!(
            "distortion must lie in [0, 1), got {distortion}"
        )));
    }
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut verts: Vec<Point2<T>> = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Point2::new(T::lit(i as f64 * h), T::lit(j as f64 * h)));
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    if distortion > 0.0 {
        let amp = distortion * h / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in 1..n {
            for i in 1..n {
                let v = idx(i, j);
                let base = Point2::new(i as f64 * h, j as f64 * h);
                let around = [
                    (i - 1) + (j - 1) * n,
                    i + (j - 1) * n,
                    (i - 1) + j * n,
                    i + j * n,
                ];
                let mut placed = false;
                for _ in 0..MAX_RETRIES {
                    let dx: f64 = rng.gen_range(-amp..=amp);
                    let dy: f64 = rng.gen_range(-amp..=amp);
                    verts[v] = Point2::new(T::lit(base.x + dx), T::lit(base.y + dy));
                    if around.iter().all(|&c| cell_ok(&verts, &cells[c])) {
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    verts[v] = Point2::new(T::lit(base.x), T::lit(base.y));
                }
            }
        }
    }
    PolyMesh::new(verts, cells, DomainTag::Square)
}

/// Structured triangulation of the unit square: every one of the `n x n`
/// squares is split along a diagonal, alternating between the two
/// diagonals in a checkerboard pattern.
pub fn gen_square_triangles<T: Scalar>(n: usize) -> Result<PolyMesh<T>> {
    if n < 1 {
        return Err(VemError::InvalidArgument("triangle mesh needs n >= 1".into()));
    }
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut verts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Point2::new(T::lit(i as f64 * h), T::lit(j as f64 * h)));
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            if (i + j) % 2 == 0 {
                cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                cells.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            } else {
                cells.push(vec![idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
                cells.push(vec![idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    PolyMesh::new(verts, cells, DomainTag::Square)
}

/// WEB-like hexagonal mesh with the default displacement bound.
pub fn gen_web_hexagons<T: Scalar>(n: usize, seed: u64) -> Result<PolyMesh<T>> {
    gen_web_hexagons_with_amplitude(n, WEB_DISPLACEMENT_FRACTION, seed)
}

/// Splits every triangle of [`gen_square_triangles`] into a hexagon through
/// its vertices and edge midpoints, then moves each interior midpoint by a
/// random vector of length at most `amplitude` times the edge length.
/// Cells may become non-convex; moves that break simplicity or leave a cell
/// without a ball of radius `0.08 h_E` in its kernel are redrawn.
pub fn gen_web_hexagons_with_amplitude<T: Scalar>(
    n: usize,
    amplitude: f64,
    seed: u64,
) -> Result<PolyMesh<T>> {
    if n < 2 {
        return Err(VemError::InvalidArgument(format!("WEB mesh needs n >= 2, got {n}")));
    }
    if !(0.0..0.5).contains(&amplitude) {
        return Err(VemError::InvalidArgument(format!(
            "WEB amplitude must lie in [0, 0.5), got {amplitude}"
        )));
    }
    let tri: PolyMesh<T> = gen_square_triangles(n)?;
    let mut verts: Vec<Point2<T>> = tri.vertices().to_vec();
    let mut mid_of_edge = Vec::with_capacity(tri.num_edges());
    for e in tri.edges() {
        let [a, b] = e.vertices;
        let m = Point2::from((verts[a].coords + verts[b].coords) * T::lit(0.5));
        verts.push(m);
        mid_of_edge.push(verts.len() - 1);
    }
    let cells: Vec<Vec<usize>> = (0..tri.num_cells())
        .map(|c| {
            let cv = tri.cell(c);
            let ce = tri.cell_edges(c);
            let mut hex = Vec::with_capacity(6);
            for i in 0..3 {
                hex.push(cv[i]);
                hex.push(mid_of_edge[ce[i]]);
            }
            hex
        })
        .collect();

    if amplitude > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (e, edge) in tri.edges().iter().enumerate() {
            if edge.is_boundary() {
                continue;
            }
            let m = mid_of_edge[e];
            let base = verts[m];
            let len = (verts[edge.vertices[1]] - verts[edge.vertices[0]]).norm().as_f64();
            let owners: Vec<usize> = edge.cells.iter().flatten().copied().collect();
            let mut placed = false;
            for _ in 0..MAX_RETRIES {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = amplitude * len * rng.gen_range(0.0..=1.0);
                let d = Vector2::new(T::lit(r * theta.cos()), T::lit(r * theta.sin()));
                verts[m] = base + d;
                if owners.iter().all(|&c| web_cell_ok(&verts, &cells[c])) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                verts[m] = base;
            }
        }
    }
    PolyMesh::new(verts, cells, DomainTag::Square)
}

/// Points on ring `j` of the polar disk triangulation.
fn ring_count(j: usize) -> usize {
    if j == 0 {
        1
    } else {
        7 * j
    }
}

/// Polar triangulation of the unit disk: `n` concentric rings of radius
/// `j/n` carrying `7j` equispaced points each, odd rings rotated by half
/// their spacing, stitched ring to ring.
/// Boundary vertices lie on the unit circle.
pub fn gen_disk_triangles<T: Scalar>(n: usize) -> Result<PolyMesh<T>> {
    if n < 2 {
        return Err(VemError::InvalidArgument(format!("disk mesh needs n >= 2, got {n}")));
    }
    let tau = T::two_pi();
    let mut verts = vec![Point2::new(T::zero(), T::zero())];
    let mut ring_start = vec![0usize];
    for j in 1..=n {
        ring_start.push(verts.len());
        let m = ring_count(j);
        let r = if j == n { T::one() } else { T::from_count(j) / T::from_count(n) };
        let shift = if j % 2 == 1 { T::lit(0.5) } else { T::zero() };
        for i in 0..m {
            let th = tau * (T::from_count(i) + shift) / T::from_count(m);
            verts.push(Point2::new(r * th.cos(), r * th.sin()));
        }
    }
    let mut cells = Vec::new();
    for j in 1..=n {
        let (na, nb) = (ring_count(j - 1), ring_count(j));
        let (sa, sb) = (ring_start[j - 1], ring_start[j]);
        if na == 1 {
            for i in 0..nb {
                cells.push(vec![sa, sb + i, sb + (i + 1) % nb]);
            }
            continue;
        }
        // zipper by angle: fractions i/na and l/nb compared exactly in integers
        let (mut i, mut l) = (0usize, 0usize);
        while i < na || l < nb {
            let take_outer = l < nb && (i == na || (l + 1) * na <= (i + 1) * nb);
            if take_outer {
                cells.push(vec![sa + i % na, sb + l, sb + (l + 1) % nb]);
                l += 1;
            } else {
                cells.push(vec![sa + i % na, sb + l % nb, sa + (i + 1) % na]);
                i += 1;
            }
        }
    }
    PolyMesh::new(verts, cells, DomainTag::Disk)
}

/// Merges vertices closer than `tol`, drops repeated consecutive vertices and
/// returns the compacted vertex list with re-indexed cells.
pub(crate) fn weld<T: Scalar>(
    cells_pts: Vec<Vec<Point2<T>>>,
    tol: f64,
) -> (Vec<Point2<T>>, Vec<Vec<usize>>) {
    let key = |p: &Point2<T>| {
        (
            (p.x.as_f64() / tol).floor() as i64,
            (p.y.as_f64() / tol).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut verts: Vec<Point2<T>> = Vec::new();
    let tol_t = T::lit(tol);
    let mut cells = Vec::with_capacity(cells_pts.len());
    for poly in cells_pts {
        let mut cell: Vec<usize> = Vec::with_capacity(poly.len());
        for p in poly {
            let (kx, ky) = key(&p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &v in list {
                            if (verts[v] - p).norm() <= tol_t {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let v = found.unwrap_or_else(|| {
                verts.push(p);
                grid.entry((kx, ky)).or_default().push(verts.len() - 1);
                verts.len() - 1
            });
            if cell.last() != Some(&v) {
                cell.push(v);
            }
        }
        while cell.len() > 1 && cell.first() == cell.last() {
            cell.pop();
        }
        cells.push(cell);
    }
    (verts, cells)
}
