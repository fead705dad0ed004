use nalgebra::{DMatrix, DVector, Point2, Vector2};
use polyvem::element::{ConvectionMode, ElementOperators, QuadDegrees};
use polyvem::polyquad::{exponents, poly_dim};
use rand::{Rng, SeedableRng};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn cells() -> Vec<Vec<Point2<f64>>> {
    vec![
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
        vec![Point2::new(0.1, 0.2), Point2::new(0.4, 0.15), Point2::new(0.3, 0.5)],
        // non-convex hexagon
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.55, 0.08),
            Point2::new(1.0, 0.0),
            Point2::new(0.62, 0.45),
            Point2::new(0.5, 1.0),
            Point2::new(0.35, 0.48),
        ],
        // pentagon with a collinear vertex
        vec![
            Point2::new(2.0, 1.0),
            Point2::new(2.1, 1.0),
            Point2::new(2.2, 1.0),
            Point2::new(2.25, 1.1),
            Point2::new(2.05, 1.15),
        ],
    ]
}

fn random_poly(rng: &mut ChaCha8Rng, k: usize) -> DVector<f64> {
    let n = 2 * poly_dim(k as isize);
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

#[test]
fn projectors_reproduce_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 2..=4 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            for _ in 0..3 {
                let p = random_poly(&mut rng, k);
                let d = op.dofs_of_poly(&p);
                let e1 = (&op.pi_nabla * &d - &p).amax();
                let e2 = (&op.pi0 * &d - &p).amax();
                // roundoff grows with the degree of the monomial basis
                let tol = if k <= 3 { 1e-11 } else { 1e-10 };
                assert!(e1 < tol, "k={k} pi_nabla err {e1}");
                assert!(e2 < tol, "k={k} pi0 err {e2}");
            }
        }
    }
}

#[test]
fn interpolation_of_polynomial_matches_poly_dofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 2..=4 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            let p = random_poly(&mut rng, k);
            let f = |x: &Point2<f64>| op.eval_vector(&p, x);
            let d1 = op.interpolate(&f, None);
            let d2 = op.dofs_of_poly(&p);
            assert!((d1 - d2).amax() < 1e-8);
        }
    }
}

#[test]
fn gradient_projection_is_exact_on_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 2..=4 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            let p = random_poly(&mut rng, k);
            let d = op.dofs_of_poly(&p);
            let nk = poly_dim(k as isize);
            let nk1 = poly_dim(k as isize - 1);
            let grad = polyvem::polyquad::gradient_matrix::<f64>(k, op.h);
            for c in 0..2 {
                let gc = &grad * p.rows(c * nk, nk);
                for dd in 0..2 {
                    let exact = gc.rows(dd * nk1, nk1);
                    let got = &op.pi0_grad[2 * c + dd] * &d;
                    assert!((got - exact).amax() < 1e-10 / op.h.min(1.0));
                }
            }
        }
    }
}

#[test]
fn stiffness_kernel_and_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 2..=4 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            let nk = poly_dim(k as isize);
            let mut c = DVector::zeros(2 * nk);
            c[0] = 1.3;
            c[nk] = -0.4;
            let dc = op.dofs_of_poly(&c);
            let kerr = (&op.stiffness * &dc).amax() / op.stiffness.amax();
            assert!(kerr < 1e-13, "k={k}: {kerr:e}");
            // S vanishes on polynomials
            for _ in 0..3 {
                let p = random_poly(&mut rng, k);
                let dp = op.dofs_of_poly(&p);
                assert!((&op.stabilization * &dp).amax() < 1e-10);
                // k-consistency: a_h(p, phi_i) = a(p, Pi phi_i)
                let lhs = &op.stiffness * &dp;
                let rhs = op.pi_nabla.transpose() * ga_full(&op) * &p;
                assert!((lhs - rhs).amax() < 1e-10 * op.stiffness.amax().max(1.0));
            }
            // symmetric positive semidefinite with a 2D kernel
            assert!((&op.stiffness - op.stiffness.transpose()).amax() < 1e-12);
            let eig = op.stiffness.clone().symmetric_eigenvalues();
            let mut ev: Vec<f64> = eig.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            let top = ev[ev.len() - 1];
            assert!(ev[0] > -1e-12 * top && ev[1] < 1e-12 * top && ev[2] > 1e-6, "{:?}", &ev[..3]);
            assert!(op.alpha > 0.0);
        }
    }
}

fn ga_full(op: &ElementOperators<f64>) -> DMatrix<f64> {
    let k = op.k();
    let e = exponents(k);
    let nk = e.len();
    let mut g = DMatrix::zeros(2 * nk, 2 * nk);
    for i in 0..nk {
        for j in 0..nk {
            let (a, b) = (e[i], e[j]);
            let mut s = 0.0;
            if a[0] > 0 && b[0] > 0 {
                s += (a[0] * b[0]) as f64 * op.moments.get(a[0] + b[0] - 2, a[1] + b[1]);
            }
            if a[1] > 0 && b[1] > 0 {
                s += (a[1] * b[1]) as f64 * op.moments.get(a[0] + b[0], a[1] + b[1] - 2);
            }
            g[(i, j)] = s / (op.h * op.h);
            g[(nk + i, nk + j)] = s / (op.h * op.h);
        }
    }
    g
}

#[test]
fn divergence_two_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 2..=4 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            let v = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
            let via_coeffs = &op.div_basis * &op.mass_km1 * op.divergence_coeffs(&v);
            let direct = &op.b * &v;
            assert!((via_coeffs - direct).amax() < 1e-12);
        }
    }
}

#[test]
fn identity_field_has_divergence_two() {
    for pts in cells() {
        let op = ElementOperators::new(&pts, 2, QuadDegrees::default()).unwrap();
        let d = op.interpolate(&|x: &Point2<f64>| x.coords, Some(&|_: &Point2<f64>| 2.0));
        let b = &op.b * &d;
        assert!((b[0] - 2.0 * op.pressure_mean[0]).abs() < 1e-13);
        let dc = op.divergence_coeffs(&d);
        assert!((dc[0] - 2.0).abs() < 1e-12 && dc.rows(1, dc.len() - 1).amax() < 1e-12);
    }
}

#[test]
fn skew_form_annihilates() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 2..=3 {
        for pts in cells() {
            let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
            let w = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
            let v = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
            let c = op.convection_matrix(&w, ConvectionMode::Skew);
            let val = (v.transpose() * c * &v)[(0, 0)];
            assert!(val.abs() <= 1e-12 * w.norm() * v.norm_squared());
        }
    }
}

#[test]
fn convection_on_polynomials_matches_direct_quadrature() {
    // w = (1, 0), u linear: all projections are exact
    let pts = &cells()[0];
    let op = ElementOperators::new(pts, 2, QuadDegrees::default()).unwrap();
    let w = op.interpolate(&|_| Vector2::new(1.0, 0.0), None);
    let u = op.interpolate(&|x| Vector2::new(2.0 * x.x + x.y, -x.x), None);
    let v = op.interpolate(&|x| Vector2::new(x.y * x.y, x.x * x.y), None);
    // (grad u) w = (2, -1); int (2 y^2 - x y) over the unit square = 2/3 - 1/4
    let got = op.trilinear(&w, &u, &v);
    assert!((got - (2.0 / 3.0 - 0.25)).abs() < 1e-12, "{got}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for mode in [ConvectionMode::Plain, ConvectionMode::Skew] {
        for pts in cells() {
            let op = ElementOperators::new(&pts, 2, QuadDegrees::default()).unwrap();
            let u = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
            let j = op.convection_jacobian(&u, mode);
            let eps = 1e-7;
            for col in 0..op.ndofs() {
                let mut up = u.clone();
                let mut um = u.clone();
                up[col] += eps;
                um[col] -= eps;
                let fd = (op.convection_residual(&up, mode) - op.convection_residual(&um, mode)) / (2.0 * eps);
                let err = (fd - j.column(col)).amax() / j.amax();
                assert!(err < 1e-5, "{mode} col {col}: {err}");
            }
        }
    }
}

#[test]
fn load_of_polynomial_is_exact_pairing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for pts in cells() {
        let op = ElementOperators::new(&pts, 2, QuadDegrees::default()).unwrap();
        let f = random_poly(&mut rng, 2);
        let load = op.load(&|x| op.eval_vector(&f, x));
        // (f, v) = f . (moments of v) for polynomial f
        let via_m = op.moment.transpose() * &f;
        assert!((load - via_m).amax() < 1e-12);
    }
}

// star-shaped about the origin, radii and angles jittered
fn star_polygon(radii: &[f64], jitter: &[f64]) -> Vec<Point2<f64>> {
    let n = radii.len();
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.4 * jitter[i]) / n as f64;
            Point2::new(radii[i] * t.cos(), radii[i] * t.sin())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn projector_reproduction_on_random_cells(
        radii in prop::collection::vec(0.4f64..1.0, 3..9),
        seed in any::<u64>(),
        k in 2usize..4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jitter: Vec<f64> = (0..radii.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pts = star_polygon(&radii, &jitter);
        let op = ElementOperators::new(&pts, k, QuadDegrees::default()).unwrap();
        let p = random_poly(&mut rng, k);
        let d = op.dofs_of_poly(&p);
        prop_assert!((&op.pi_nabla * &d - &p).amax() < 1e-10);
        prop_assert!((&op.pi0 * &d - &p).amax() < 1e-10);
        prop_assert!((&op.stabilization * &d).amax() < 1e-9);
    }

    #[test]
    fn skew_annihilation_on_random_cells(
        radii in prop::collection::vec(0.4f64..1.0, 3..9),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jitter: Vec<f64> = (0..radii.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let op = ElementOperators::new(&star_polygon(&radii, &jitter), 2, QuadDegrees::default()).unwrap();
        let w = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(op.ndofs(), |_, _| rng.gen_range(-1.0..1.0));
        let val = (v.transpose() * op.convection_matrix(&w, ConvectionMode::Skew) * &v)[(0, 0)];
        prop_assert!(val.abs() <= 1e-12 * w.norm() * v.norm_squared());
    }
}
