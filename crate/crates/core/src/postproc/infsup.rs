use nalgebra::{DMatrix, DVector, Point2, SymmetricEigen, Vector2};

use crate::assembly::{assemble_stokes, Discretization, Problem};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::sparse::SparseLu;

const MAX_LANCZOS: usize = 120;

/// Discrete inf-sup constant: square root of the smallest nonzero
/// eigenvalue of `B A^{-1} B^T q = beta^2 M q`, with `A` the velocity
/// stiffness on the free DoFs and `M` the pressure mass matrix.
///
/// Lanczos on `(B A^{-1} B^T)^{-1} M` restricted to zero-mean pressures,
/// each step one solve with the bordered Stokes matrix.
pub fn infsup_estimate<T: Scalar>(disc: &Discretization<T>) -> Result<T> {
    let zero = |_: &Point2<T>| Vector2::zeros();
    let prob = Problem::new(disc, T::one(), &zero, &zero)?;
    let sys = assemble_stokes(disc, &prob).matrix;
    let lu = SparseLu::factor_static(&sys)?;
    let na = disc.dofs.n_active;
    let np = disc.dofs.n_pressure;
    if np < 2 {
        return Ok(T::zero());
    }
    // pressure basis is orthonormal in |E|^{-1} int_E, so M is diagonal
    let mut mass = DVector::<T>::zeros(np);
    for (c, op) in disc.ops.iter().enumerate() {
        for a in disc.dofs.pressure_range(c) {
            mass[a] = op.area;
        }
    }
    let mean = disc.pressure_mean_weights();
    let dot = |x: &DVector<T>, y: &DVector<T>| x.iter().zip(y.iter()).zip(mass.iter()).fold(T::zero(), |s, ((a, b), m)| s + *a * *b * *m);
    // M-orthogonal complement of the constants is `mean . p = 0`
    let project = |x: &mut DVector<T>| {
        let t = mean.dot(x) / mean.dot(&mean.component_div(&mass));
        *x -= mean.component_div(&mass) * t;
    };
    let apply = |x: &DVector<T>| -> DVector<T> {
        let mut rhs = DVector::zeros(sys.nrows);
        rhs.rows_mut(na, np).copy_from(&x.component_mul(&mass));
        let (sol, _) = lu.solve_refined(&sys, &rhs, T::epsilon(), 30);
        let mut p: DVector<T> = -sol.rows(na, np).into_owned();
        project(&mut p);
        p
    };

    let mut v = DVector::from_fn(np, |i, _| T::lit(((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5));
    project(&mut v);
    v /= dot(&v, &v).sqrt();
    let mut basis: Vec<DVector<T>> = vec![v];
    let (mut alpha, mut beta): (Vec<T>, Vec<T>) = (Vec::new(), Vec::new());
    let mut theta_prev = T::zero();
    let steps = MAX_LANCZOS.min(np - 1);
    for j in 0..steps {
        let mut w = apply(&basis[j]);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for q in &basis {
            let c = dot(&w, q);
            w -= q * c;
        }
        let theta = largest_ritz(&alpha, &beta);
        if j > 4 && (theta - theta_prev).abs() <= T::lit(1e-12) * theta {
            theta_prev = theta;
            break;
        }
        theta_prev = theta;
        let b = dot(&w, &w).sqrt();
        if b <= T::lit(1e-14) * theta.abs() {
            break;
        }
        beta.push(b);
        basis.push(w / b);
    }
    if theta_prev <= T::zero() {
        return Ok(T::zero());
    }
    Ok((T::one() / theta_prev).sqrt())
}

fn largest_ritz<T: Scalar>(alpha: &[T], beta: &[T]) -> T {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            T::zero()
        }
    });
    SymmetricEigen::new(t).eigenvalues.iter().copied().fold(T::min_value().unwrap_or(-T::one()), |a, b| a.max(b))
}
