//! Gauss rules on intervals, triangles, polygons and edges.

use nalgebra::{DMatrix, Point2};

use crate::error::{Result, VemError};
use crate::mesh::{polygon_centroid, signed_area2};
use crate::scalar::Scalar;

/// Legendre polynomial `P_n(x)` and `P_{n-1}(x)`.
fn legendre<T: Scalar>(n: usize, x: T) -> (T, T) {
    let (mut p0, mut p1) = (T::one(), x);
    if n == 0 {
        return (p0, T::zero());
    }
    for j in 1..n {
        let jj = T::from_count(j);
        let p2 = ((jj + jj + T::one()) * x * p1 - jj * p0) / (jj + T::one());
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nn = T::from_count(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut z = T::lit(-guess);
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, pm1) = legendre(n, z);
            dp = nn * (z * p - pm1) / (z * z - T::one());
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= T::lit(4.0) * T::epsilon() {
                let (p, pm1) = legendre(n, z);
                dp = nn * (z * p - pm1) / (z * z - T::one());
                break;
            }
        }
        x[i] = z;
        w[i] = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
    }
    (x, w)
}

/// `n`-point Gauss-Lobatto nodes on `[-1, 1]` (endpoints included), ascending.
pub fn gauss_lobatto_nodes<T: Scalar>(n: usize) -> Vec<T> {
    assert!(n >= 2);
    let m = n - 1;
    let mm = T::from_count(m * (m + 1));
    let mut x = vec![T::zero(); n];
    x[0] = -T::one();
    x[m] = T::one();
    for i in 1..m {
        let mut z = T::lit(-(std::f64::consts::PI * i as f64 / m as f64).cos());
        for _ in 0..100 {
            let (p, pm1) = legendre(m, z);
            let d1 = T::from_count(m) * (z * p - pm1) / (z * z - T::one());
            let d2 = (T::lit(2.0) * z * d1 - mm * p) / (T::one() - z * z);
            let dz = d1 / d2;
            z -= dz;
            if dz.abs() <= T::lit(4.0) * T::epsilon() {
                break;
            }
        }
        x[i] = z;
    }
    x
}

/// Points, positive weights and the polynomial degree integrated exactly.
#[derive(Debug, Clone)]
pub struct QuadRule<T: Scalar> {
    pub points: Vec<Point2<T>>,
    pub weights: Vec<T>,
    pub degree: usize,
}

impl<T: Scalar> QuadRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point2<T>) -> T) -> T {
        self.points.iter().zip(&self.weights).fold(T::zero(), |s, (p, w)| s + *w * f(p))
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |s, w| s + *w)
    }
}

/// Collapsed Gauss rule on the triangle `abc`, exact for degree `d`.
pub fn triangle_rule<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: usize) -> QuadRule<T> {
    let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), degree: d };
    push_triangle(&mut rule, a, b, c, d);
    rule
}

fn push_triangle<T: Scalar>(rule: &mut QuadRule<T>, a: Point2<T>, b: Point2<T>, c: Point2<T>, d: usize) {
    let two_area = ((b - a).perp(&(c - a))).abs();
    let nu = (d + 3) / 2;
    let nv = (d + 2) / 2;
    let (xu, wu) = gauss_legendre::<T>(nu);
    let (xv, wv) = gauss_legendre::<T>(nv);
    let half = T::lit(0.5);
    for (u, wu) in xu.iter().zip(&wu) {
        let u = (*u + T::one()) * half;
        for (v, wv) in xv.iter().zip(&wv) {
            let v = (*v + T::one()) * half;
            // P = (1-u) a + u ((1-v) b + v c), dP = 2|T| u du dv
            let p = a.coords * (T::one() - u) + (b.coords * (T::one() - v) + c.coords * v) * u;
            rule.points.push(Point2::from(p));
            rule.weights.push(*wu * *wv * half * half * two_area * u);
        }
    }
}

/// Triangles `(i, j, l)` covering a simple counter-clockwise polygon.
pub fn triangulate<T: Scalar>(pts: &[Point2<T>]) -> Vec<[usize; 3]> {
    let n = pts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    let orient = |i: usize, j: usize, l: usize| (pts[j] - pts[i]).perp(&(pts[l] - pts[i]));
    let inside = |p: &Point2<T>, a: usize, b: usize, c: usize| {
        let o1 = (pts[b] - pts[a]).perp(&(p - pts[a]));
        let o2 = (pts[c] - pts[b]).perp(&(p - pts[b]));
        let o3 = (pts[a] - pts[c]).perp(&(p - pts[c]));
        o1 >= T::zero() && o2 >= T::zero() && o3 >= T::zero()
    };
    while idx.len() > 3 {
        let m = idx.len();
        let mut cut = None;
        for i in 0..m {
            let (a, b, c) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            if orient(a, b, c) <= T::zero() {
                continue;
            }
            let blocked = idx
                .iter()
                .any(|&v| v != a && v != b && v != c && pts[v] != pts[a] && inside(&pts[v], a, b, c));
            if !blocked {
                cut = Some(i);
                break;
            }
        }
        // only collinear vertices left to remove: drop one without a triangle
        let i = match cut {
            Some(i) => {
                tris.push([idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]]);
                i
            }
            None => (0..m)
                .find(|&i| orient(idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]) == T::zero())
                .unwrap_or(0),
        };
        idx.remove(i);
    }
    if orient(idx[0], idx[1], idx[2]) > T::zero() {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

/// Quadrature on a simple counter-clockwise polygon exact for degree `d`:
/// a fan from the centroid when it sees every edge, ear clipping otherwise.
pub fn quad_rule<T: Scalar>(pts: &[Point2<T>], d: usize) -> Result<QuadRule<T>> {
    let n = pts.len();
    let a2 = if n >= 3 { signed_area2(pts) } else { T::zero() };
    if !(a2 > T::zero()) {
        return Err(VemError::InvalidArgument("degenerate polygon: non-positive area".into()));
    }
    let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), degree: d };
    let c = polygon_centroid(pts);
    let tol = a2 * T::lit(1e-10);
    let fan = (0..n).all(|i| (pts[i] - c).perp(&(pts[(i + 1) % n] - c)) > tol);
    if fan {
        for i in 0..n {
            push_triangle(&mut rule, c, pts[i], pts[(i + 1) % n], d);
        }
    } else {
        for [i, j, l] in triangulate(pts) {
            push_triangle(&mut rule, pts[i], pts[j], pts[l], d);
        }
    }
    Ok(rule)
}

/// Gauss rule on the segment `ab` exact for degree `d`; weights include the
/// segment length.
pub fn edge_quadrature<T: Scalar>(a: Point2<T>, b: Point2<T>, d: usize) -> QuadRule<T> {
    let (t, w) = edge_gauss::<T>(d);
    let len = (b - a).norm();
    QuadRule {
        points: t.iter().map(|&s| a + (b - a) * s).collect(),
        weights: w.iter().map(|&wi| wi * len).collect(),
        degree: d,
    }
}

/// Gauss nodes and weights on `[0, 1]` exact for degree `d`.
pub fn edge_gauss<T: Scalar>(d: usize) -> (Vec<T>, Vec<T>) {
    let n = d / 2 + 1;
    let (x, w) = gauss_legendre::<T>(n);
    let half = T::lit(0.5);
    (x.iter().map(|&s| (s + T::one()) * half).collect(), w.iter().map(|&wi| wi * half).collect())
}

/// Parameters in `[0, 1]` of the `k + 1` nodes carrying velocity values on an
/// edge: both endpoints and `k - 1` interior Gauss-Lobatto points (the
/// midpoint for `k = 2`).
pub fn edge_nodes<T: Scalar>(k: usize) -> Vec<T> {
    let half = T::lit(0.5);
    gauss_lobatto_nodes::<T>(k + 1).into_iter().map(|s| (s + T::one()) * half).collect()
}

/// Values at `t` of the Lagrange polynomials on `nodes`.
pub fn lagrange_basis<T: Scalar>(nodes: &[T], t: T) -> Vec<T> {
    (0..nodes.len())
        .map(|j| {
            nodes.iter().enumerate().filter(|&(l, _)| l != j).fold(T::one(), |acc, (_, &tl)| {
                acc * (t - tl) / (nodes[j] - tl)
            })
        })
        .collect()
}

/// Vandermonde matrix `V_{jl} = t_j^l` of the edge nodes.
pub fn edge_vandermonde<T: Scalar>(k: usize) -> DMatrix<T> {
    let t = edge_nodes::<T>(k);
    DMatrix::from_fn(k + 1, k + 1, |j, l| t[j].powi(l as i32))
}

/// Maps the `k + 1` nodal values on an edge to the coefficients of the
/// interpolating polynomial in the edge parameter `t in [0, 1]`.
pub fn boundary_trace_matrix<T: Scalar>(k: usize) -> DMatrix<T> {
    edge_vandermonde::<T>(k).try_inverse().expect("edge nodes are distinct")
}
