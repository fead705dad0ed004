use nalgebra::{DVector, Matrix2, Point2, Vector2};
use rayon::prelude::*;

use crate::assembly::{Discretization, FlowState};
use crate::polyquad::poly_dim;
use crate::scalar::Scalar;

/// Exact velocity, its gradient (`grad[(c, d)] = d u_c / d x_d`) and
/// pressure.
pub struct ExactFields<'a, T: Scalar> {
    pub u: &'a (dyn Fn(&Point2<T>) -> Vector2<T> + Sync),
    pub grad: &'a (dyn Fn(&Point2<T>) -> Matrix2<T> + Sync),
    pub p: &'a (dyn Fn(&Point2<T>) -> T + Sync),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// `(sum_E |grad u - Pi0_{k-1} grad u_h|^2_E)^{1/2}`.
    pub u_h1: f64,
    /// `(sum_E |u - Pi0_k u_h|^2_E)^{1/2}`.
    pub u_l2: f64,
    /// Max over internal vertices and internal edge nodes of `|u - u_h|`.
    pub u_linf: f64,
    /// `L2` error of the zero-mean normalized pressures.
    pub p_l2: f64,
    pub div_inf: f64,
    /// Largest cell diameter.
    pub h: f64,
    /// Free velocity DoFs plus zero-mean pressure DoFs.
    pub ndof: usize,
}

struct CellErr<T> {
    h1: T,
    l2: T,
    p_sq: T,
}

/// Error measures of `state` against the exact solution, with quadrature of
/// the element's load degree.
pub fn compute_errors<T: Scalar>(disc: &Discretization<T>, state: &FlowState<T>, exact: &ExactFields<'_, T>) -> ErrorReport {
    let d = &disc.dofs;
    let k = disc.k;
    let nk = poly_dim(k as isize);
    let pressures: Vec<DVector<T>> = disc
        .ops
        .iter()
        .enumerate()
        .map(|(c, op)| op.pressure_to_monomial(&state.p.rows(d.pressure_range(c).start, d.n_p).into_owned()))
        .collect();
    let eval_p = |c: usize, m1: &[T]| m1.iter().zip(pressures[c].iter()).fold(T::zero(), |s, (m, a)| s + *m * *a);
    // mean of p - p_h first, so the L2 error needs no cancellation
    let shifts: Vec<(T, T)> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let rule = op.rule(op.degrees.load(k));
            let b = op.basis(k - 1);
            let mut s = T::zero();
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                s += *w * ((exact.p)(x) - eval_p(c, &b.eval(x)));
            }
            (s, op.area)
        })
        .collect();
    let (mut shift, mut total) = (T::zero(), T::zero());
    for (s, a) in shifts {
        shift += s;
        total += a;
    }
    let shift = shift / total;
    let cells: Vec<CellErr<T>> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let ul = d.gather(c, &state.u);
            let pi0 = &op.pi0 * &ul;
            let grads: Vec<DVector<T>> = op.pi0_grad.iter().map(|g| g * &ul).collect();
            let rule = op.rule(op.degrees.load(k));
            let bk = op.basis(k);
            let bk1 = op.basis(k - 1);
            let mut e = CellErr { h1: T::zero(), l2: T::zero(), p_sq: T::zero() };
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let m = bk.eval(x);
                let m1 = bk1.eval(x);
                let mut uh = Vector2::zeros();
                for i in 0..nk {
                    uh.x += pi0[i] * m[i];
                    uh.y += pi0[nk + i] * m[i];
                }
                let g = (exact.grad)(x);
                let mut gh = Matrix2::zeros();
                for i in 0..m1.len() {
                    for cd in 0..4 {
                        gh[(cd / 2, cd % 2)] += grads[cd][i] * m1[i];
                    }
                }
                let dp = (exact.p)(x) - eval_p(c, &m1) - shift;
                e.h1 += *w * (g - gh).norm_squared();
                e.l2 += *w * ((exact.u)(x) - uh).norm_squared();
                e.p_sq += *w * dp * dp;
            }
            e
        })
        .collect();
    let mut h1 = T::zero();
    let mut l2 = T::zero();
    let mut p_sq = T::zero();
    for e in &cells {
        h1 += e.h1;
        l2 += e.l2;
        p_sq += e.p_sq;
    }
    let p_l2 = p_sq.sqrt();

    let mut linf = T::zero();
    for (pi, x) in d.points.iter().enumerate() {
        if d.internal_point[pi] {
            let u = (exact.u)(x);
            let diff = Vector2::new(u.x - state.u[2 * pi], u.y - state.u[2 * pi + 1]);
            linf = linf.max(diff.norm());
        }
    }
    ErrorReport {
        u_h1: h1.sqrt().as_f64(),
        u_l2: l2.sqrt().as_f64(),
        u_linf: linf.as_f64(),
        p_l2: p_l2.as_f64(),
        div_inf: div_inf_norm(disc, &state.u).as_f64(),
        h: disc.mesh.max_diameter().as_f64(),
        ndof: d.num_free_velocity() + d.num_free_pressure(),
    }
}

/// Max of `|div u_h|` over cell vertices and quadrature points.
pub fn div_inf_norm<T: Scalar>(disc: &Discretization<T>, u: &DVector<T>) -> T {
    let k = disc.k;
    let per_cell: Vec<T> = disc
        .ops
        .par_iter()
        .enumerate()
        .map(|(c, op)| {
            let dc = op.divergence_coeffs(&disc.dofs.gather(c, u));
            let b = op.basis(k - 1);
            let rule = op.rule(op.degrees.bilinear(k));
            rule.points
                .iter()
                .chain(op.points.iter())
                .map(|x| b.eval(x).iter().zip(dc.iter()).fold(T::zero(), |s, (m, a)| s + *m * *a).abs())
                .fold(T::zero(), |a, b| a.max(b))
        })
        .collect();
    per_cell.into_iter().fold(T::zero(), |a, b| a.max(b))
}
