use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::assembly::{Discretization, FlowState};
use crate::error::{Result, VemError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Vertex,
    Centroid,
}

/// `Pi0_k u_h` and `p_h` of one cell evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub cell: usize,
    pub kind: SampleKind,
    pub x: f64,
    pub y: f64,
    pub u1: f64,
    pub u2: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Vtk,
    Csv,
}

impl FromStr for FieldFormat {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vtk" => Ok(Self::Vtk),
            "csv" => Ok(Self::Csv),
            _ => Err(VemError::InvalidArgument(format!("unknown field format '{s}' (expected vtk or csv)"))),
        }
    }
}

/// Per-cell samples at the cell vertices (in cell order) then the centroid.
pub fn sample_fields<T: Scalar>(disc: &Discretization<T>, state: &FlowState<T>) -> Vec<FieldSample> {
    let d = &disc.dofs;
    let mut out = Vec::new();
    for (c, op) in disc.ops.iter().enumerate() {
        let pi0 = &op.pi0 * d.gather(c, &state.u);
        let pc = op.pressure_to_monomial(&state.p.rows(d.pressure_range(c).start, d.n_p).into_owned());
        let pb = op.basis(disc.k - 1);
        let pts = op.points.iter().map(|x| (SampleKind::Vertex, *x)).chain(std::iter::once((SampleKind::Centroid, op.centroid)));
        for (kind, x) in pts {
            let u = op.eval_vector(&pi0, &x);
            let p = pb.eval(&x).iter().zip(pc.iter()).fold(T::zero(), |s, (m, a)| s + *m * *a);
            out.push(FieldSample {
                cell: c,
                kind,
                x: x.x.as_f64(),
                y: x.y.as_f64(),
                u1: u.x.as_f64(),
                u2: u.y.as_f64(),
                p: p.as_f64(),
            });
        }
    }
    out
}

const CSV_HEADER: &str = "cell,kind,x,y,u1,u2,p";

pub fn write_field_csv(samples: &[FieldSample]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for f in samples {
        let kind = match f.kind {
            SampleKind::Vertex => "vertex",
            SampleKind::Centroid => "centroid",
        };
        writeln!(s, "{},{kind},{},{},{},{},{}", f.cell, f.x, f.y, f.u1, f.u2, f.p).expect("string write");
    }
    s
}

pub fn read_field_csv(text: &str) -> Result<Vec<FieldSample>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(VemError::Parse { line: 1, msg: format!("expected header '{CSV_HEADER}'") }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| VemError::Parse { line: i + 1, msg };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("'{s}': {e}")));
        let kind = match f[1] {
            "vertex" => SampleKind::Vertex,
            "centroid" => SampleKind::Centroid,
            other => return Err(err(format!("unknown sample kind '{other}'"))),
        };
        out.push(FieldSample {
            cell: f[0].parse().map_err(|e| err(format!("'{}': {e}", f[0])))?,
            kind,
            x: num(f[2])?,
            y: num(f[3])?,
            u1: num(f[4])?,
            u2: num(f[5])?,
            p: num(f[6])?,
        });
    }
    Ok(out)
}

/// Legacy ASCII VTK: one polygon per cell over private copies of its
/// vertices, one vertex cell per centroid, point data `velocity` and
/// `pressure`.
pub fn write_vtk(samples: &[FieldSample]) -> String {
    let mut s = String::new();
    s += "# vtk DataFile Version 3.0\npolyvem fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    writeln!(s, "POINTS {} double", samples.len()).expect("string write");
    for f in samples {
        writeln!(s, "{} {} 0", f.x, f.y).expect("string write");
    }
    // group samples by cell
    let mut cells: Vec<(Vec<usize>, usize)> = Vec::new();
    for (i, f) in samples.iter().enumerate() {
        if cells.len() <= f.cell {
            cells.resize(f.cell + 1, (Vec::new(), usize::MAX));
        }
        match f.kind {
            SampleKind::Vertex => cells[f.cell].0.push(i),
            SampleKind::Centroid => cells[f.cell].1 = i,
        }
    }
    let cells: Vec<_> = cells.into_iter().filter(|(v, _)| !v.is_empty()).collect();
    let n_cells = 2 * cells.len();
    let size: usize = cells.iter().map(|(v, _)| v.len() + 1 + 2).sum();
    writeln!(s, "CELLS {n_cells} {size}").expect("string write");
    for (v, _) in &cells {
        let ids: Vec<String> = v.iter().map(|i| i.to_string()).collect();
        writeln!(s, "{} {}", v.len(), ids.join(" ")).expect("string write");
    }
    for (_, c) in &cells {
        writeln!(s, "1 {c}").expect("string write");
    }
    writeln!(s, "CELL_TYPES {n_cells}").expect("string write");
    for _ in &cells {
        s += "7\n";
    }
    for _ in &cells {
        s += "1\n";
    }
    writeln!(s, "POINT_DATA {}", samples.len()).expect("string write");
    s += "VECTORS velocity double\n";
    for f in samples {
        writeln!(s, "{} {} 0", f.u1, f.u2).expect("string write");
    }
    s += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for f in samples {
        writeln!(s, "{}", f.p).expect("string write");
    }
    s
}

pub fn export_fields<T: Scalar>(
    disc: &Discretization<T>,
    state: &FlowState<T>,
    path: impl AsRef<Path>,
    format: FieldFormat,
) -> Result<()> {
    let samples = sample_fields(disc, state);
    let text = match format {
        FieldFormat::Vtk => write_vtk(&samples),
        FieldFormat::Csv => write_field_csv(&samples),
    };
    std::fs::write(path, text)?;
    Ok(())
}

