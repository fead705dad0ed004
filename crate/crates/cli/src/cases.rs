//! Registered benchmark problems with closed-form solutions and loads.
//!
//! Sign convention of the momentum equation:
//! `-nu lap u + (grad u) u - grad p = f`, `div u = 0`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Point2, Vector2};
use polyvem::element::ConvectionMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::families::MeshFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseDomain {
    Square,
    Disk,
}

/// One benchmark: exact solution, load and default discretization.
#[derive(Clone)]
pub struct BenchmarkCase {
    pub name: &'static str,
    pub description: &'static str,
    pub domain: CaseDomain,
    pub nu: f64,
    /// `false` drops the convective term (Stokes).
    pub navier_stokes: bool,
    pub mode: ConvectionMode,
    pub family: MeshFamily,
    pub distortion: f64,
    pub levels: Vec<usize>,
    pub u: fn(&Point2<f64>) -> Vector2<f64>,
    /// `grad[(c, d)] = d u_c / d x_d`.
    pub grad: fn(&Point2<f64>) -> Matrix2<f64>,
    pub p: fn(&Point2<f64>) -> f64,
    /// Load for a given viscosity.
    pub f: fn(&Point2<f64>, f64) -> Vector2<f64>,
}

impl std::fmt::Debug for BenchmarkCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BenchmarkCase").field("name", &self.name).field("nu", &self.nu).finish_non_exhaustive()
    }
}

fn trig(x: &Point2<f64>) -> (f64, f64, f64, f64) {
    let a = 2.0 * PI;
    ((a * x.x).sin(), (a * x.x).cos(), (a * x.y).sin(), (a * x.y).cos())
}

// hydrostatic pressures
fn zero_u(_: &Point2<f64>) -> Vector2<f64> {
    Vector2::zeros()
}

fn zero_grad(_: &Point2<f64>) -> Matrix2<f64> {
    Matrix2::zeros()
}

fn t1_p1(x: &Point2<f64>) -> f64 {
    x.x.powi(3) - x.y.powi(3)
}

fn t1_f1(x: &Point2<f64>, _: f64) -> Vector2<f64> {
    -Vector2::new(3.0 * x.x * x.x, -3.0 * x.y * x.y)
}

fn t1_p2(x: &Point2<f64>) -> f64 {
    let (sx, _, sy, _) = trig(x);
    sx * sy
}

fn t1_f2(x: &Point2<f64>, _: f64) -> Vector2<f64> {
    let (sx, cx, sy, cy) = trig(x);
    -2.0 * PI * Vector2::new(cx * sy, sx * cy)
}

// vanishing load on the disk
fn t2_u1(x: &Point2<f64>) -> Vector2<f64> {
    Vector2::new(-x.y, x.x)
}

fn t2_grad1(_: &Point2<f64>) -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

fn t2_p1(x: &Point2<f64>) -> f64 {
    -(x.x * x.x + x.y * x.y) / 2.0 + 0.25
}

fn t2_u2(x: &Point2<f64>) -> Vector2<f64> {
    3.0 * Vector2::new(x.x * x.x - x.y * x.y, -2.0 * x.x * x.y)
}

fn t2_grad2(x: &Point2<f64>) -> Matrix2<f64> {
    6.0 * Matrix2::new(x.x, -x.y, -x.y, -x.x)
}

fn t2_p2(x: &Point2<f64>) -> f64 {
    let r2 = x.x * x.x + x.y * x.y;
    4.5 * r2 * r2 - 1.5
}

fn zero_f(_: &Point2<f64>, _: f64) -> Vector2<f64> {
    Vector2::zeros()
}

// polynomial flow
fn g(t: f64) -> [f64; 4] {
    [
        t * t * (1.0 - t) * (1.0 - t),
        2.0 * t - 6.0 * t * t + 4.0 * t.powi(3),
        2.0 - 12.0 * t + 12.0 * t * t,
        -12.0 + 24.0 * t,
    ]
}

fn t3_u(x: &Point2<f64>) -> Vector2<f64> {
    let (gx, gy) = (g(x.x), g(x.y));
    0.1 * Vector2::new(gx[0] * gy[1], -gy[0] * gx[1])
}

fn t3_grad(x: &Point2<f64>) -> Matrix2<f64> {
    let (gx, gy) = (g(x.x), g(x.y));
    0.1 * Matrix2::new(gx[1] * gy[1], gx[0] * gy[2], -gy[0] * gx[2], -gy[1] * gx[1])
}

fn t3_p(x: &Point2<f64>) -> f64 {
    (x.x * x.y).powi(3) - 1.0 / 16.0
}

fn t3_f(x: &Point2<f64>, nu: f64) -> Vector2<f64> {
    let (gx, gy) = (g(x.x), g(x.y));
    let lap = 0.1 * Vector2::new(gx[2] * gy[1] + gx[0] * gy[3], -(gy[2] * gx[1] + gy[0] * gx[3]));
    let gp = Vector2::new(3.0 * x.x * x.x * x.y.powi(3), 3.0 * x.x.powi(3) * x.y * x.y);
    -nu * lap + t3_grad(x) * t3_u(x) - gp
}

// trigonometric vortex
fn t4_u(x: &Point2<f64>) -> Vector2<f64> {
    let (sx, cx, sy, cy) = trig(x);
    0.5 * Vector2::new(sx * sx * sy * cy, -sy * sy * sx * cx)
}

fn t4_grad(x: &Point2<f64>) -> Matrix2<f64> {
    let a = 2.0 * PI;
    let (sx, cx, sy, cy) = trig(x);
    Matrix2::new(
        a * sx * cx * sy * cy,
        0.5 * a * sx * sx * (cy * cy - sy * sy),
        -0.5 * a * sy * sy * (cx * cx - sx * sx),
        -a * sy * cy * sx * cx,
    )
}

fn t4_lap(x: &Point2<f64>) -> Vector2<f64> {
    let a2 = 4.0 * PI * PI;
    let (sx, cx, sy, cy) = trig(x);
    Vector2::new(
        a2 * sy * cy * (cx * cx - sx * sx) - 2.0 * a2 * sx * sx * sy * cy,
        2.0 * a2 * sy * sy * sx * cx - a2 * sx * cx * (cy * cy - sy * sy),
    )
}

fn t4_p(x: &Point2<f64>) -> f64 {
    let (sx, _, _, cy) = trig(x);
    PI * PI * sx * cy
}

fn t4_f(x: &Point2<f64>, nu: f64) -> Vector2<f64> {
    let (sx, cx, sy, cy) = trig(x);
    let gp = 2.0 * PI.powi(3) * Vector2::new(cx * cy, -sx * sy);
    -nu * t4_lap(x) + t4_grad(x) * t4_u(x) - gp
}

fn t5_p(x: &Point2<f64>) -> f64 {
    let (sx, _, _, cy) = trig(x);
    sx * cy
}

fn t5_f(x: &Point2<f64>, nu: f64) -> Vector2<f64> {
    let (sx, cx, sy, cy) = trig(x);
    let gp = 2.0 * PI * Vector2::new(cx * cy, -sx * sy);
    -nu * t4_lap(x) - gp
}

/// All registered cases.
pub fn registry() -> Vec<BenchmarkCase> {
    let square = |name, description, nu, ns, family, distortion, levels: &[usize], u, grad, p, f| BenchmarkCase {
        name,
        description,
        domain: CaseDomain::Square,
        nu,
        navier_stokes: ns,
        mode: ConvectionMode::Plain,
        family,
        distortion,
        levels: levels.to_vec(),
        u,
        grad,
        p,
        f,
    };
    vec![
        square(
            "test1_p1",
            "hydrostatic Stokes, p = x^3 - y^3",
            1.0,
            false,
            MeshFamily::Quad,
            0.3,
            &[10, 20, 40],
            zero_u,
            zero_grad,
            t1_p1,
            t1_f1,
        ),
        square(
            "test1_p2",
            "hydrostatic Stokes, p = sin(2 pi x) sin(2 pi y)",
            1.0,
            false,
            MeshFamily::Quad,
            0.3,
            &[10, 20, 40],
            zero_u,
            zero_grad,
            t1_p2,
            t1_f2,
        ),
        BenchmarkCase {
            name: "test2_u1",
            description: "rigid rotation on the disk, f = 0",
            domain: CaseDomain::Disk,
            nu: 1.0,
            navier_stokes: true,
            mode: ConvectionMode::Plain,
            family: MeshFamily::DiskTri,
            distortion: 0.0,
            levels: vec![5, 10, 20],
            u: t2_u1,
            grad: t2_grad1,
            p: t2_p1,
            f: zero_f,
        },
        BenchmarkCase {
            name: "test2_u2",
            description: "quadratic potential flow on the disk, f = 0",
            domain: CaseDomain::Disk,
            nu: 1.0,
            navier_stokes: true,
            mode: ConvectionMode::Plain,
            family: MeshFamily::DiskTri,
            distortion: 0.0,
            levels: vec![5, 10, 20],
            u: t2_u2,
            grad: t2_grad2,
            p: t2_p2,
            f: zero_f,
        },
        square(
            "test3",
            "polynomial Navier-Stokes flow for viscosity sweeps",
            1e-1,
            true,
            MeshFamily::Tri,
            0.0,
            &[20],
            t3_u,
            t3_grad,
            t3_p,
            t3_f,
        ),
        square(
            "test4",
            "trigonometric Navier-Stokes vortex, nu = 0.1",
            0.1,
            true,
            MeshFamily::Tri,
            0.0,
            &[5, 10, 20, 40],
            t4_u,
            t4_grad,
            t4_p,
            t4_f,
        ),
        square(
            "test5",
            "trigonometric Stokes vortex on distorted quads",
            1.0,
            false,
            MeshFamily::Quad,
            0.5,
            &[10, 20, 40],
            t4_u,
            t4_grad,
            t5_p,
            t5_f,
        ),
    ]
}

pub fn case_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name).collect()
}

pub fn find_case(name: &str) -> Result<BenchmarkCase, CliError> {
    registry()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| CliError::UnknownCase { name: name.to_string(), available: case_names().join(", ") })
}

/// Max residuals of the closed forms at random points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    /// `|-nu lap u + (grad u) u - grad p - f|`, derivatives by differences.
    pub momentum: f64,
    /// Supplied gradient against differences of `u`.
    pub gradient: f64,
    pub divergence: f64,
}

impl Verification {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.gradient).max(self.divergence)
    }
}

/// Checks a case at `n_points` random points with sixth-order central
/// differences (step `1e-3`).
pub fn verify_case(case: &BenchmarkCase, n_points: usize, seed: u64) -> Verification {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-3;
    let d1 = |f: &dyn Fn(f64) -> f64| {
        (45.0 * (f(h) - f(-h)) - 9.0 * (f(2.0 * h) - f(-2.0 * h)) + (f(3.0 * h) - f(-3.0 * h))) / (60.0 * h)
    };
    let d2 = |f: &dyn Fn(f64) -> f64| {
        (2.0 * (f(3.0 * h) + f(-3.0 * h)) - 27.0 * (f(2.0 * h) + f(-2.0 * h)) + 270.0 * (f(h) + f(-h))
            - 490.0 * f(0.0))
            / (180.0 * h * h)
    };
    let mut out = Verification { momentum: 0.0, gradient: 0.0, divergence: 0.0 };
    for _ in 0..n_points {
        let x = match case.domain {
            CaseDomain::Square => Point2::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)),
            CaseDomain::Disk => {
                let r = 0.98 * rng.gen::<f64>().sqrt();
                let t = rng.gen_range(0.0..2.0 * PI);
                Point2::new(r * t.cos(), r * t.sin())
            }
        };
        let ux = |s: f64| (case.u)(&Point2::new(x.x + s, x.y));
        let uy = |s: f64| (case.u)(&Point2::new(x.x, x.y + s));
        let mut grad = Matrix2::zeros();
        let mut lap = Vector2::zeros();
        for c in 0..2 {
            grad[(c, 0)] = d1(&|s| ux(s)[c]);
            grad[(c, 1)] = d1(&|s| uy(s)[c]);
            lap[c] = d2(&|s| ux(s)[c]) + d2(&|s| uy(s)[c]);
        }
        let gp = Vector2::new(
            d1(&|s| (case.p)(&Point2::new(x.x + s, x.y))),
            d1(&|s| (case.p)(&Point2::new(x.x, x.y + s))),
        );
        let u = (case.u)(&x);
        let mut lhs = -case.nu * lap - gp;
        if case.navier_stokes {
            lhs += grad * u;
        }
        out.momentum = out.momentum.max((lhs - (case.f)(&x, case.nu)).amax());
        out.gradient = out.gradient.max((grad - (case.grad)(&x)).amax());
        out.divergence = out.divergence.max((grad[(0, 0)] + grad[(1, 1)]).abs());
    }
    out
}
