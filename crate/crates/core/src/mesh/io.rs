//! Plain-text mesh format.
//!
//! ```text
//! polyvem-mesh v1
//! vertices N
//! x y            (N lines)
//! cells M
//! k i1 ... ik    (M lines, 0-based, counter-clockwise)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point2;

use super::{DomainTag, PolyMesh};
use crate::error::{Result, VemError};
use crate::scalar::Scalar;

pub const MESH_HEADER: &str = "polyvem-mesh v1";

/// Serializes a mesh. Coordinates use the shortest representation that
/// parses back to the same value.
pub fn write_mesh_string<T: Scalar>(mesh: &PolyMesh<T>) -> String {
    let mut s = String::new();
    s.push_str(MESH_HEADER);
    s.push('\n');
    let _ = writeln!(s, "vertices {}", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
    let _ = writeln!(s, "cells {}", mesh.num_cells());
    for cell in mesh.cells() {
        let _ = write!(s, "{}", cell.len());
        for v in cell {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_mesh<T: Scalar>(mesh: &PolyMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_mesh_string(mesh))?;
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_content().ok_or_else(|| VemError::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_count(line: usize, text: &str, keyword: &str) -> Result<usize> {
    let mut it = text.split_whitespace();
    if it.next() != Some(keyword) {
        return Err(VemError::Parse { line, msg: format!("expected `{keyword} <count>`") });
    }
    let n = it
        .next()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| VemError::Parse { line, msg: format!("bad {keyword} count") })?;
    if it.next().is_some() {
        return Err(VemError::Parse { line, msg: "trailing tokens".into() });
    }
    Ok(n)
}

fn guess_domain<T: Scalar>(verts: &[Point2<T>]) -> DomainTag {
    let tol = T::lit(1e-12);
    let Some(first) = verts.first() else {
        return DomainTag::Custom;
    };
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (first.x, first.y, first.x, first.y);
    for p in verts {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let one = T::one();
    if lo_x.abs() < tol && lo_y.abs() < tol && (hi_x - one).abs() < tol && (hi_y - one).abs() < tol {
        return DomainTag::Square;
    }
    if (hi_x - one).abs() < tol
        && (lo_x + one).abs() < tol
        && verts.iter().all(|p| p.coords.norm() <= one + tol)
    {
        return DomainTag::Disk;
    }
    DomainTag::Custom
}

/// Parses the text format. Clockwise cells are reversed with a warning.
pub fn read_mesh_str<T: Scalar>(text: &str) -> Result<PolyMesh<T>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, header) = lines.expect("header")?;
    if header != MESH_HEADER {
        return Err(VemError::Parse { line: ln, msg: format!("expected header `{MESH_HEADER}`") });
    }
    let (ln, t) = lines.expect("`vertices <count>`")?;
    let nv = parse_count(ln, t, "vertices")?;
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, t) = lines.expect("vertex coordinates")?;
        let tok: Vec<&str> = t.split_whitespace().collect();
        if tok.len() != 2 {
            return Err(VemError::Parse { line: ln, msg: format!("expected `x y`, got {} tokens", tok.len()) });
        }
        let mut xy = [T::zero(); 2];
        for (slot, s) in xy.iter_mut().zip(&tok) {
            *slot = s
                .parse::<T>()
                .map_err(|_| VemError::Parse { line: ln, msg: format!("bad coordinate `{s}`") })?;
            if !slot.is_finite() {
                return Err(VemError::Parse { line: ln, msg: format!("non-finite coordinate `{s}`") });
            }
        }
        verts.push(Point2::new(xy[0], xy[1]));
    }
    let (ln, t) = lines.expect("`cells <count>`")?;
    let nc = parse_count(ln, t, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for c in 0..nc {
        let (ln, t) = lines.expect("cell")?;
        let tok: Vec<usize> = t
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| VemError::Parse { line: ln, msg: "bad integer in cell".into() })?;
        let k = *tok
            .first()
            .ok_or_else(|| VemError::Parse { line: ln, msg: "empty cell line".into() })?;
        if tok.len() != k + 1 {
            return Err(VemError::Parse {
                line: ln,
                msg: format!("cell declares {k} vertices but lists {}", tok.len() - 1),
            });
        }
        if let Some(&bad) = tok[1..].iter().find(|&&v| v >= nv) {
            return Err(VemError::Parse {
                line: ln,
                msg: format!("cell {c}: vertex index {bad} out of range"),
            });
        }
        cells.push(tok[1..].to_vec());
    }
    if let Some((ln, _)) = lines.next_content() {
        return Err(VemError::Parse { line: ln, msg: "unexpected content after cells".into() });
    }
    let domain = guess_domain(&verts);
    let (mesh, flipped) = PolyMesh::new_reorienting(verts, cells, domain)?;
    for c in flipped {
        log::warn!("cell {c}: clockwise orientation, reversed");
    }
    Ok(mesh)
}

pub fn read_mesh<T: Scalar>(path: impl AsRef<Path>) -> Result<PolyMesh<T>> {
    let text = std::fs::read_to_string(path)?;
    read_mesh_str(&text)
}
