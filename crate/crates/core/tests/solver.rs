use nalgebra::{DVector, Point2, Vector2};
use polyvem::assembly::{assemble_stokes, interpolate, Discretization, Problem, SaddleSystem};
use polyvem::element::{ConvectionMode, QuadDegrees};
use polyvem::mesh::{gen_square_quads, gen_square_triangles, gen_web_hexagons, PolyMesh};
use polyvem::solver::{linear_solve, solve_navier_stokes, solve_stokes, NonlinearOptions, Phase};
use polyvem::sparse::{CscMatrix, TripletBuilder};
use polyvem::VemError;
use std::f64::consts::PI;

fn disc(mesh: PolyMesh<f64>) -> Discretization<f64> {
    Discretization::new(mesh, 2, QuadDegrees::default()).unwrap()
}

fn zero(_: &Point2<f64>) -> Vector2<f64> {
    Vector2::zeros()
}

#[test]
fn identity_system_returns_rhs() {
    let n = 7;
    let rhs = DVector::from_fn(n, |i, _| i as f64 - 2.5);
    let sys = SaddleSystem { matrix: CscMatrix::identity(n), rhs: rhs.clone(), n_active: n, n_pressure: 0 };
    assert_eq!(linear_solve(&sys).unwrap(), rhs);
}

#[test]
fn dropping_the_mean_constraint_is_singular() {
    let d = disc(gen_square_quads(3, 0.0, 0).unwrap());
    let prob = Problem::new(&d, 1.0, &zero, &zero).unwrap();
    let full = assemble_stokes(&d, &prob);
    let n = full.matrix.nrows - 1;
    let mut t = TripletBuilder::new(n, n);
    for j in 0..n {
        for idx in full.matrix.colptr[j]..full.matrix.colptr[j + 1] {
            if full.matrix.rowind[idx] < n {
                t.push(full.matrix.rowind[idx], j, full.matrix.values[idx]);
            }
        }
    }
    let sys = SaddleSystem { matrix: t.build(), rhs: DVector::from_element(n, 1.0), n_active: full.n_active, n_pressure: full.n_pressure };
    match linear_solve(&sys) {
        Err(VemError::SingularMatrix { column }) => assert!(column < n),
        other => panic!("expected a singular matrix error, got {other:?}"),
    }
}

#[test]
fn zero_data_converges_immediately() {
    let d = disc(gen_web_hexagons(3, 1).unwrap());
    let prob = Problem::new(&d, 0.01, &zero, &zero).unwrap();
    let (st, rep) = solve_navier_stokes(&d, &prob, &NonlinearOptions::default()).unwrap();
    assert!(rep.converged);
    assert!(rep.picard_iterations + rep.newton_iterations <= 1);
    assert_eq!(st.u.amax(), 0.0);
    assert_eq!(st.p.amax(), 0.0);
}

#[test]
fn zero_load_stokes_gives_zero_solution() {
    let d = disc(gen_square_triangles(4).unwrap());
    let prob = Problem::new(&d, 1.0, &zero, &zero).unwrap();
    let (st, rep) = solve_stokes(&d, &prob).unwrap();
    assert!(rep.converged);
    assert_eq!(st.u.amax(), 0.0);
}

// u = (y^2, x^2), p = x - 1/2: polynomial solution inside the discrete space
fn poly_problem(d: &Discretization<f64>, nu: f64) -> Problem<f64> {
    let f = move |x: &Point2<f64>| {
        Vector2::new(-2.0 * nu + 2.0 * x.y * x.x * x.x - 1.0, -2.0 * nu + 2.0 * x.x * x.y * x.y)
    };
    Problem::new(d, nu, &f, &|x: &Point2<f64>| Vector2::new(x.y * x.y, x.x * x.x)).unwrap()
}

#[test]
fn navier_stokes_patch_test_plain_mode() {
    for mesh in [gen_square_quads(2, 0.0, 0).unwrap(), gen_web_hexagons(3, 2).unwrap()] {
        let d = disc(mesh);
        let prob = poly_problem(&d, 0.05);
        let (st, rep) = solve_navier_stokes(&d, &prob, &NonlinearOptions::default()).unwrap();
        assert!(rep.converged, "{:?}", rep.history);
        let exact = interpolate(&d, &|x: &Point2<f64>| Vector2::new(x.y * x.y, x.x * x.x), Some(&|_: &Point2<f64>| 0.0));
        assert!((&st.u - exact).amax() < 1e-10);
    }
}

fn vortex_problem(d: &Discretization<f64>, nu: f64) -> Problem<f64> {
    // u = curl of sin(pi x)^2 sin(pi y)^2 / pi, p = sin(pi x) cos(pi y)
    let f = move |x: &Point2<f64>| {
        let (sx, cx, sy, cy) = ((PI * x.x).sin(), (PI * x.x).cos(), (PI * x.y).sin(), (PI * x.y).cos());
        let u = Vector2::new(2.0 * sx * sx * sy * cy, -2.0 * sx * cx * sy * sy);
        let g = nalgebra::Matrix2::new(
            4.0 * PI * sx * cx * sy * cy,
            2.0 * PI * sx * sx * (cy * cy - sy * sy),
            -2.0 * PI * (cx * cx - sx * sx) * sy * sy,
            -4.0 * PI * sx * cx * sy * cy,
        );
        let lap = Vector2::new(
            2.0 * PI * PI * (2.0 * (cx * cx - sx * sx) * sy * cy - 4.0 * sx * sx * sy * cy),
            -2.0 * PI * PI * (-4.0 * sx * cx * sy * sy + 2.0 * sx * cx * (cy * cy - sy * sy)),
        );
        let gp = Vector2::new(PI * cx * cy, -PI * sx * sy);
        -lap * nu + g * u - gp
    };
    Problem::new(d, nu, &f, &zero).unwrap()
}

#[test]
fn newton_tail_is_quadratic_and_monotone() {
    let d = disc(gen_square_triangles(8).unwrap());
    let prob = vortex_problem(&d, 0.01);
    let opts = NonlinearOptions { picard_max: 2, ..Default::default() };
    let (_, rep) = solve_navier_stokes(&d, &prob, &opts).unwrap();
    assert!(rep.converged, "{:?}", rep.history);
    let newton: Vec<f64> = rep.history.iter().filter(|(p, _)| *p == Phase::Newton).map(|(_, r)| *r).collect();
    assert!(newton.len() >= 2);
    for w in newton.windows(2) {
        assert!(w[1] <= w[0]);
    }
    // quadratic contraction while the residual is above roundoff
    let scale = rep.reference_norm;
    for w in newton.windows(2) {
        if w[0] > 1e-9 * scale && w[0] < 1e-2 * scale {
            assert!(w[1] / scale <= 1e3 * (w[0] / scale).powi(2) + 1e-12, "{newton:?}");
        }
    }
}

#[test]
fn plain_and_skew_agree_within_discretization_error() {
    let errs: Vec<f64> = [4usize, 8]
        .iter()
        .map(|&n| {
            let d = disc(gen_square_quads(n, 0.0, 0).unwrap());
            let prob = vortex_problem(&d, 0.1);
            let solve = |mode| {
                let opts = NonlinearOptions { mode, ..Default::default() };
                let (st, rep) = solve_navier_stokes(&d, &prob, &opts).unwrap();
                assert!(rep.converged);
                st.u
            };
            (solve(ConvectionMode::Plain) - solve(ConvectionMode::Skew)).amax()
        })
        .collect();
    assert!(errs[1] < errs[0]);
    assert!(errs[1] < 0.05);
}

#[test]
fn continuation_reaches_small_viscosity() {
    let d = disc(gen_square_quads(6, 0.0, 0).unwrap());
    let prob = vortex_problem(&d, 1e-3);
    let opts = NonlinearOptions { continuation: true, ..Default::default() };
    let (_, rep) = solve_navier_stokes(&d, &prob, &opts).unwrap();
    assert!(rep.converged, "{:?} {:e}", rep.history, rep.reference_norm);
    assert_eq!(rep.continuation_steps, vec![1e-1, 1e-2]);
}

#[test]
fn invalid_options_are_rejected() {
    let d = disc(gen_square_quads(2, 0.0, 0).unwrap());
    let prob = Problem::new(&d, 1.0, &zero, &zero).unwrap();
    for opts in [
        NonlinearOptions { tol_rel: 0.0, ..Default::default() },
        NonlinearOptions { damping: 1.5, ..Default::default() },
        NonlinearOptions { picard_max: 0, newton_max: 0, ..Default::default() },
    ] {
        assert!(matches!(solve_navier_stokes(&d, &prob, &opts), Err(VemError::InvalidArgument(_))));
    }
}

#[test]
fn nonconvergence_is_reported_not_raised() {
    let d = disc(gen_square_quads(4, 0.0, 0).unwrap());
    let prob = vortex_problem(&d, 1e-3);
    let opts = NonlinearOptions { picard_max: 0, newton_max: 1, ..Default::default() };
    let (_, rep) = solve_navier_stokes(&d, &prob, &opts).unwrap();
    assert!(!rep.converged);
    assert_eq!(rep.newton_iterations, 1);
    assert!(rep.history.len() >= 2);
}
