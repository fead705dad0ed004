//! Clipped Voronoi meshes with Lloyd (centroidal) relaxation.

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generators::weld;
use super::{polygon_centroid, signed_area2, DomainTag, PolyMesh};
use crate::error::{Result, VemError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoronoiDomain {
    /// `[0,1]^2`
    Square,
    /// Unit disk centered at the origin.
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Domain,
    Cut,
}

/// Polygon vertex together with the label of the edge leaving it.
type ClipPoly = Vec<(Point2<f64>, Side)>;

impl VoronoiDomain {
    fn area(self) -> f64 {
        match self {
            VoronoiDomain::Square => 1.0,
            VoronoiDomain::Disk => std::f64::consts::PI,
        }
    }

    fn contains(self, p: &Point2<f64>) -> bool {
        match self {
            VoronoiDomain::Square => (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y),
            VoronoiDomain::Disk => p.coords.norm() <= 1.0,
        }
    }

    fn polygon(self, n_seeds: usize) -> ClipPoly {
        match self {
            VoronoiDomain::Square => vec![
                (Point2::new(0.0, 0.0), Side::Domain),
                (Point2::new(1.0, 0.0), Side::Domain),
                (Point2::new(1.0, 1.0), Side::Domain),
                (Point2::new(0.0, 1.0), Side::Domain),
            ],
            VoronoiDomain::Disk => {
                let m = (64 * (n_seeds as f64).sqrt().ceil() as usize).clamp(256, 4096);
                (0..m)
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / m as f64;
                        (Point2::new(t.cos(), t.sin()), Side::Domain)
                    })
                    .collect()
            }
        }
    }

    fn tag(self) -> DomainTag {
        match self {
            VoronoiDomain::Square => DomainTag::Square,
            VoronoiDomain::Disk => DomainTag::Disk,
        }
    }
}

/// Keeps the part of `poly` with `(x - a) . dir <= 0`.
fn clip(poly: &ClipPoly, a: &Point2<f64>, dir: &Vector2<f64>) -> ClipPoly {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, lab) = poly[i];
        let (q, _) = poly[(i + 1) % n];
        let dp = (p - a).dot(dir);
        let dq = (q - a).dot(dir);
        let pin = dp <= 0.0;
        let qin = dq <= 0.0;
        let cross = || p + (q - p) * (dp / (dp - dq));
        match (pin, qin) {
            (true, true) => out.push((p, lab)),
            (true, false) => {
                out.push((p, lab));
                out.push((cross(), Side::Cut));
            }
            (false, true) => out.push((cross(), lab)),
            (false, false) => {}
        }
    }
    out
}

struct SeedGrid {
    cell: f64,
    lo: Point2<f64>,
    nx: i64,
    ny: i64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SeedGrid {
    fn new(seeds: &[Point2<f64>], cell: f64) -> Self {
        let lo = Point2::new(-1.0, -1.0);
        let nx = (2.0 / cell).ceil() as i64 + 1;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, s) in seeds.iter().enumerate() {
            buckets.entry(Self::key_of(lo, cell, s)).or_default().push(i);
        }
        Self { cell, lo, nx, ny: nx, buckets }
    }

    fn key_of(lo: Point2<f64>, cell: f64, p: &Point2<f64>) -> (i64, i64) {
        (((p.x - lo.x) / cell).floor() as i64, ((p.y - lo.y) / cell).floor() as i64)
    }

    fn ring(&self, center: (i64, i64), r: i64) -> Vec<usize> {
        let mut out = Vec::new();
        for dx in -r..=r {
            for dy in -r..=r {
                if dx.abs().max(dy.abs()) != r {
                    continue;
                }
                if let Some(list) = self.buckets.get(&(center.0 + dx, center.1 + dy)) {
                    out.extend_from_slice(list);
                }
            }
        }
        out
    }
}

fn voronoi_cells(domain: VoronoiDomain, seeds: &[Point2<f64>]) -> Vec<ClipPoly> {
    let base = domain.polygon(seeds.len());
    let spacing = (domain.area() / seeds.len() as f64).sqrt();
    let grid = SeedGrid::new(seeds, spacing);
    seeds
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut poly = base.clone();
            let center = SeedGrid::key_of(grid.lo, grid.cell, s);
            let mut r = 0i64;
            loop {
                let mut ring = grid.ring(center, r);
                ring.retain(|&j| j != i);
                ring.sort_by(|&a, &b| {
                    let da = (seeds[a] - s).norm_squared();
                    let db = (seeds[b] - s).norm_squared();
                    da.total_cmp(&db).then(a.cmp(&b))
                });
                for j in ring {
                    let sj = seeds[j];
                    let mid = Point2::from((s.coords + sj.coords) * 0.5);
                    poly = clip(&poly, &mid, &(sj - s));
                }
                let reach = poly.iter().map(|(p, _)| (p - s).norm()).fold(0.0, f64::max);
                // seeds in ring r+1 are at least r * cell away
                if (r as f64) * grid.cell > 2.0 * reach || r > grid.nx.max(grid.ny) {
                    break;
                }
                r += 1;
            }
            poly
        })
        .collect()
}

fn centroid_of(poly: &ClipPoly) -> Point2<f64> {
    let pts: Vec<_> = poly.iter().map(|(p, _)| *p).collect();
    polygon_centroid(&pts)
}

/// Turns a disk cell clipped against the fine boundary polygon into a cell
/// whose boundary vertices lie on the circle, spaced roughly `spacing` apart.
fn finish_disk_cell(poly: &ClipPoly, spacing: f64) -> Vec<Point2<f64>> {
    let n = poly.len();
    let kept: Vec<(Point2<f64>, Side, bool)> = (0..n)
        .filter_map(|i| {
            let prev = poly[(i + n - 1) % n].1;
            let (p, next) = poly[i];
            match (prev, next) {
                (Side::Domain, Side::Domain) => None,
                (Side::Cut, Side::Cut) => Some((p, next, false)),
                _ => Some((p / p.coords.norm(), next, true)),
            }
        })
        .collect();
    let mut out = Vec::with_capacity(kept.len() + 8);
    let m = kept.len();
    for i in 0..m {
        let (p, side, _) = kept[i];
        out.push(p);
        if side == Side::Domain {
            let q = kept[(i + 1) % m].0;
            let a0 = p.y.atan2(p.x);
            let mut a1 = q.y.atan2(q.x);
            if a1 <= a0 {
                a1 += std::f64::consts::TAU;
            }
            let segs = ((a1 - a0) / spacing).ceil().max(1.0) as usize;
            for s in 1..segs {
                let t = a0 + (a1 - a0) * s as f64 / segs as f64;
                out.push(Point2::new(t.cos(), t.sin()));
            }
        }
    }
    out
}

/// Clipped Voronoi mesh of the given seeds after `lloyd_iters` centroidal
/// relaxation sweeps.
pub fn voronoi_from_seeds<T: Scalar>(
    domain: VoronoiDomain,
    seeds: Vec<Point2<f64>>,
    lloyd_iters: usize,
) -> Result<PolyMesh<T>> {
    if seeds.len() < 4 {
        return Err(VemError::InvalidArgument(format!(
            "Voronoi mesh needs at least 4 seeds, got {}",
            seeds.len()
        )));
    }
    if let Some(p) = seeds.iter().find(|p| !domain.contains(p)) {
        return Err(VemError::InvalidArgument(format!("seed ({}, {}) outside the domain", p.x, p.y)));
    }
    let mut seeds = seeds;
    let spacing = (domain.area() / seeds.len() as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    for attempt in 0..10 {
        dejitter_duplicates(&mut seeds, spacing, &mut rng);
        for _ in 0..lloyd_iters {
            let cells = voronoi_cells(domain, &seeds);
            seeds = cells.iter().map(centroid_of).collect();
            dejitter_duplicates(&mut seeds, spacing, &mut rng);
        }
        let cells = voronoi_cells(domain, &seeds);
        let polys: Vec<Vec<Point2<T>>> = cells
            .iter()
            .map(|c| {
                let pts = match domain {
                    VoronoiDomain::Square => c.iter().map(|(p, _)| *p).collect(),
                    VoronoiDomain::Disk => finish_disk_cell(c, spacing),
                };
                pts.into_iter().map(|p| Point2::new(T::lit(p.x), T::lit(p.y))).collect()
            })
            .collect();
        let (verts, cells) = weld(polys, 1e-9);
        let valid_cells = cells.iter().all(|c| {
            c.len() >= 3 && {
                let p: Vec<_> = c.iter().map(|&v| verts[v]).collect();
                signed_area2(&p) > T::zero()
            }
        });
        if valid_cells {
            match PolyMesh::new(verts, cells, domain.tag()) {
                Ok(m) => return Ok(m),
                Err(e) => log::warn!("voronoi attempt {attempt} rejected: {e}"),
            }
        }
        for s in seeds.iter_mut() {
            let j = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let cand = *s + j * (1e-4 * spacing);
            if domain.contains(&cand) {
                *s = cand;
            }
        }
    }
    Err(VemError::InvalidMesh("could not build a valid Voronoi mesh".into()))
}

fn dejitter_duplicates(seeds: &mut [Point2<f64>], spacing: f64, rng: &mut ChaCha8Rng) {
    let tol = 1e-10 * spacing;
    let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
    for i in 0..seeds.len() {
        let key = |p: &Point2<f64>| ((p.x / tol).round() as i64, (p.y / tol).round() as i64);
        while seen.contains_key(&key(&seeds[i])) {
            let d = Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (1e-3 * spacing);
            seeds[i] += d;
        }
        seen.insert(key(&seeds[i]), i);
    }
}

/// Centroidal Voronoi mesh from `n_seeds` uniformly drawn seeds.
pub fn gen_voronoi_cvt<T: Scalar>(
    domain: VoronoiDomain,
    n_seeds: usize,
    lloyd_iters: usize,
    seed: u64,
) -> Result<PolyMesh<T>> {
    if n_seeds < 4 {
        return Err(VemError::InvalidArgument(format!("n_seeds must be >= 4, got {n_seeds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = Vec::with_capacity(n_seeds);
    while seeds.len() < n_seeds {
        let p = match domain {
            VoronoiDomain::Square => Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            VoronoiDomain::Disk => Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        };
        if domain.contains(&p) {
            seeds.push(p);
        }
    }
    voronoi_from_seeds(domain, seeds, lloyd_iters)
}
