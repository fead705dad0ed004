//! Named mesh families and per-level seed derivation.

use std::fmt;
use std::str::FromStr;

use polyvem::mesh::{
    gen_disk_triangles, gen_square_quads, gen_square_triangles, gen_voronoi_cvt, gen_web_hexagons, VoronoiDomain,
};
use polyvem::Mesh;

use crate::cases::CaseDomain;
use crate::error::CliError;

/// Lloyd sweeps for the `voronoi` family.
pub const LLOYD_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFamily {
    /// Distorted `n x n` quadrilaterals on the unit square.
    Quad,
    /// Structured triangles on the unit square.
    Tri,
    /// Perturbed hexagonal web on the unit square.
    Web,
    /// Centroidal Voronoi cells, about `n^2` per unit area.
    Voronoi,
    /// Polar triangulation of the unit disk.
    DiskTri,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 5] =
        [MeshFamily::Quad, MeshFamily::Tri, MeshFamily::Web, MeshFamily::Voronoi, MeshFamily::DiskTri];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Quad => "quad",
            MeshFamily::Tri => "tri",
            MeshFamily::Web => "web",
            MeshFamily::Voronoi => "voronoi",
            MeshFamily::DiskTri => "disk-tri",
        }
    }

    pub fn supports(self, domain: CaseDomain) -> bool {
        match self {
            MeshFamily::Voronoi => true,
            MeshFamily::DiskTri => domain == CaseDomain::Disk,
            _ => domain == CaseDomain::Square,
        }
    }

    /// Whether the generator consumes the seed.
    pub fn is_random(self) -> bool {
        matches!(self, MeshFamily::Quad | MeshFamily::Web | MeshFamily::Voronoi)
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeshFamily::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = MeshFamily::ALL.iter().map(|f| f.name()).collect();
            format!("unknown mesh family '{s}', expected one of {}", names.join(", "))
        })
    }
}

/// Seed of level `n` derived from a run's base seed.
pub fn level_seed(base: u64, n: usize) -> u64 {
    base ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn build_mesh(
    family: MeshFamily,
    domain: CaseDomain,
    n: usize,
    distortion: f64,
    seed: u64,
) -> Result<Mesh, CliError> {
    if !family.supports(domain) {
        return Err(CliError::InvalidValue {
            key: "family".into(),
            msg: format!("family {family} does not mesh the {domain:?} domain"),
        });
    }
    let mesh = match family {
        MeshFamily::Quad => gen_square_quads(n, distortion, seed)?,
        MeshFamily::Tri => gen_square_triangles(n)?,
        MeshFamily::Web => gen_web_hexagons(n, seed)?,
        MeshFamily::DiskTri => gen_disk_triangles(n)?,
        MeshFamily::Voronoi => {
            let (vd, area) = match domain {
                CaseDomain::Square => (VoronoiDomain::Square, 1.0),
                CaseDomain::Disk => (VoronoiDomain::Disk, std::f64::consts::PI),
            };
            let seeds = ((area * (n * n) as f64).round() as usize).max(4);
            gen_voronoi_cvt(vd, seeds, LLOYD_ITERS, seed)?
        }
    };
    Ok(mesh)
}
