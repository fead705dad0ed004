use nalgebra::{DMatrix, DVector, Point2, Vector2};
use rayon::prelude::*;

use super::dofmap::DofMap;
use crate::element::{ConvectionMode, ElementOperators, QuadDegrees};
use crate::error::Result;
use crate::mesh::PolyMesh;
use crate::scalar::Scalar;
use crate::sparse::{CscMatrix, TripletBuilder};

/// A vector field usable from worker threads.
pub type VectorField<'a, T> = &'a (dyn Fn(&Point2<T>) -> Vector2<T> + Sync);

/// Mesh, DoF numbering and every cell's local operators.
#[derive(Debug, Clone)]
pub struct Discretization<T: Scalar> {
    pub mesh: PolyMesh<T>,
    pub k: usize,
    pub degrees: QuadDegrees,
    pub dofs: DofMap<T>,
    pub ops: Vec<ElementOperators<T>>,
}

impl<T: Scalar> Discretization<T> {
    pub fn new(mesh: PolyMesh<T>, k: usize, degrees: QuadDegrees) -> Result<Self> {
        let dofs = DofMap::new(&mesh, k)?;
        let ops = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| ElementOperators::for_cell(&mesh, c, k, degrees))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, k, degrees, dofs, ops })
    }

    /// Index of the pressure coefficient `a` of cell `c` in the bordered system.
    pub fn pressure_row(&self, c: usize, a: usize) -> usize {
        self.dofs.n_active + c * self.dofs.n_p + a
    }

    /// Index of the mean-pressure multiplier.
    pub fn multiplier_row(&self) -> usize {
        self.dofs.n_active + self.dofs.n_pressure
    }

    /// `int_E q_a` for every pressure coefficient: the zero-mean constraint.
    pub fn pressure_mean_weights(&self) -> DVector<T> {
        let np = self.dofs.n_p;
        let mut m = DVector::zeros(self.dofs.n_pressure);
        for (c, op) in self.ops.iter().enumerate() {
            for a in 0..np {
                m[c * np + a] = op.pressure_mean[a];
            }
        }
        m
    }
}

/// Viscosity, per-cell load vectors and the Dirichlet lift.
#[derive(Debug, Clone)]
pub struct Problem<T: Scalar> {
    pub nu: T,
    pub loads: Vec<DVector<T>>,
    /// Full velocity vector with boundary values at Dirichlet DoFs.
    pub lift: DVector<T>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(disc: &Discretization<T>, nu: T, f: VectorField<'_, T>, bc: VectorField<'_, T>) -> Result<Self> {
        let loads = disc.ops.par_iter().map(|op| op.load(f)).collect();
        let lift = disc.dofs.dirichlet_values(bc)?;
        Ok(Self { nu, loads, lift })
    }
}

/// Bordered saddle-point system on `[u_active, p, lambda]`.
#[derive(Debug, Clone)]
pub struct SaddleSystem<T: Scalar> {
    pub matrix: CscMatrix<T>,
    pub rhs: DVector<T>,
    pub n_active: usize,
    pub n_pressure: usize,
}

/// Velocity, pressure coefficients and the mean-pressure multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T: Scalar> {
    pub u: DVector<T>,
    pub p: DVector<T>,
    pub lambda: T,
}

impl<T: Scalar> FlowState<T> {
    /// Boundary values from `lift`, zero elsewhere.
    pub fn from_lift(disc: &Discretization<T>, lift: &DVector<T>) -> Self {
        Self { u: lift.clone(), p: DVector::zeros(disc.dofs.n_pressure), lambda: T::zero() }
    }

    /// Rebuilds the full state from a bordered-system solution.
    pub fn from_system(disc: &Discretization<T>, x: &DVector<T>, lift: &DVector<T>) -> Self {
        let d = &disc.dofs;
        let mut u = lift.clone();
        for g in 0..d.n_velocity {
            if let Some(a) = d.active[g] {
                u[g] = x[a];
            }
        }
        let p = x.rows(d.n_active, d.n_pressure).into_owned();
        Self { u, p, lambda: x[d.n_active + d.n_pressure] }
    }

    /// Adds a bordered-system increment (Dirichlet DoFs unchanged).
    pub fn add_step(&mut self, disc: &Discretization<T>, dx: &DVector<T>, scale: T) {
        let d = &disc.dofs;
        for g in 0..d.n_velocity {
            if let Some(a) = d.active[g] {
                self.u[g] += dx[a] * scale;
            }
        }
        for i in 0..d.n_pressure {
            self.p[i] += dx[d.n_active + i] * scale;
        }
        self.lambda += dx[d.n_active + d.n_pressure] * scale;
    }
}

/// Scatters local velocity blocks plus the divergence and constraint
/// couplings. With a lift, Dirichlet columns move to the right-hand side.
fn scatter<T: Scalar>(
    disc: &Discretization<T>,
    blocks: &[DMatrix<T>],
    loads: Option<&[DVector<T>]>,
    lift: Option<&DVector<T>>,
) -> SaddleSystem<T> {
    let d = &disc.dofs;
    let n = d.system_size();
    let cap: usize = blocks.iter().map(|b| b.len() + 2 * b.nrows() * d.n_p).sum::<usize>() + 2 * d.n_pressure;
    let mut trip = TripletBuilder::with_capacity(n, n, cap);
    let mut rhs = DVector::zeros(n);
    let lam = disc.multiplier_row();
    for (c, (blk, op)) in blocks.iter().zip(&disc.ops).enumerate() {
        let map = &d.cell_dofs[c];
        let nd = map.len();
        for (i, &gi) in map.iter().enumerate() {
            let Some(ai) = d.active[gi] else { continue };
            if let Some(f) = loads {
                rhs[ai] += f[c][i];
            }
            for (j, &gj) in map.iter().enumerate() {
                let v = blk[(i, j)];
                match d.active[gj] {
                    Some(aj) => trip.push(ai, aj, v),
                    None => {
                        if let Some(g) = lift {
                            rhs[ai] -= v * g[gj];
                        }
                    }
                }
            }
        }
        for a in 0..d.n_p {
            let pr = disc.pressure_row(c, a);
            for j in 0..nd {
                let gj = map[j];
                let v = op.b[(a, j)];
                match d.active[gj] {
                    Some(aj) => {
                        trip.push(pr, aj, v);
                        trip.push(aj, pr, v);
                    }
                    None => {
                        if let Some(g) = lift {
                            rhs[pr] -= v * g[gj];
                        }
                    }
                }
            }
            let m = op.pressure_mean[a];
            trip.push(pr, lam, m);
            trip.push(lam, pr, m);
        }
    }
    SaddleSystem { matrix: trip.build(), rhs, n_active: d.n_active, n_pressure: d.n_pressure }
}

/// Stokes system `nu A` with loads and lifted boundary data.
pub fn assemble_stokes<T: Scalar>(disc: &Discretization<T>, prob: &Problem<T>) -> SaddleSystem<T> {
    let blocks: Vec<DMatrix<T>> = disc.ops.par_iter().map(|op| &op.stiffness * prob.nu).collect();
    scatter(disc, &blocks, Some(&prob.loads), Some(&prob.lift))
}

/// Oseen system with convection frozen at the full velocity `w`.
pub fn assemble_oseen<T: Scalar>(
    disc: &Discretization<T>,
    prob: &Problem<T>,
    w: &DVector<T>,
    mode: ConvectionMode,
) -> SaddleSystem<T> {
    let blocks: Vec<DMatrix<T>> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let wl = disc.dofs.gather(c, w);
            &op.stiffness * prob.nu + op.convection_matrix(&wl, mode)
        })
        .collect();
    scatter(disc, &blocks, Some(&prob.loads), Some(&prob.lift))
}

/// Nonlinear residual on the bordered unknowns:
/// `[nu A u + c(u; u, .) + B^T p - F ; B u + m lambda ; m . p]`.
pub fn residual<T: Scalar>(
    disc: &Discretization<T>,
    prob: &Problem<T>,
    state: &FlowState<T>,
    mode: Option<ConvectionMode>,
) -> DVector<T> {
    let d = &disc.dofs;
    let locals: Vec<(DVector<T>, DVector<T>)> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let ul = d.gather(c, &state.u);
            let mut r = &op.stiffness * &ul * prob.nu - &prob.loads[c];
            if let Some(m) = mode {
                r += op.convection_residual(&ul, m);
            }
            let bu = &op.b * &ul;
            (r, bu)
        })
        .collect();
    let mut res = DVector::zeros(d.system_size());
    let lam = disc.multiplier_row();
    for (c, ((r, bu), op)) in locals.iter().zip(&disc.ops).enumerate() {
        let pr = d.pressure_range(c);
        let pc = state.p.rows(pr.start, d.n_p);
        let btp = op.b.transpose() * pc;
        for (i, &g) in d.cell_dofs[c].iter().enumerate() {
            if let Some(a) = d.active[g] {
                res[a] += r[i] + btp[i];
            }
        }
        for a in 0..d.n_p {
            let m = op.pressure_mean[a];
            res[disc.pressure_row(c, a)] += bu[a] + m * state.lambda;
            res[lam] += m * pc[a];
        }
    }
    res
}

/// Newton residual and Jacobian at `state`. `mode = None` drops convection
/// (Stokes).
pub fn assemble_newton<T: Scalar>(
    disc: &Discretization<T>,
    prob: &Problem<T>,
    state: &FlowState<T>,
    mode: Option<ConvectionMode>,
) -> (DVector<T>, CscMatrix<T>) {
    let blocks: Vec<DMatrix<T>> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let mut k = &op.stiffness * prob.nu;
            if let Some(m) = mode {
                k += op.convection_jacobian(&disc.dofs.gather(c, &state.u), m);
            }
            k
        })
        .collect();
    let sys = scatter(disc, &blocks, None, None);
    (residual(disc, prob, state, mode), sys.matrix)
}

/// Per-cell `P_{k-1}` coefficients of `div u_h`.
pub fn divergence_coeffs<T: Scalar>(disc: &Discretization<T>, u: &DVector<T>) -> Vec<DVector<T>> {
    disc.ops
        .iter()
        .enumerate()
        .map(|(c, op)| op.divergence_coeffs(&disc.dofs.gather(c, u)))
        .collect()
}

/// Full velocity DoF vector interpolating `u` (divergence optional).
pub fn interpolate<T: Scalar>(
    disc: &Discretization<T>,
    u: VectorField<'_, T>,
    div: Option<&(dyn Fn(&Point2<T>) -> T + Sync)>,
) -> DVector<T> {
    let d = &disc.dofs;
    let locals: Vec<DVector<T>> = disc
        .ops
        .par_iter()
        .map(|op| match div {
            Some(f) => op.interpolate(u, Some(f)),
            None => op.interpolate(u, None),
        })
        .collect();
    let mut out = DVector::zeros(d.n_velocity);
    for (c, l) in locals.iter().enumerate() {
        for (i, &g) in d.cell_dofs[c].iter().enumerate() {
            out[g] = l[i];
        }
    }
    out
}
