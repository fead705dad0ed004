//! Scaled monomials `m_a(x) = ((x - x_E) / h_E)^a` and their bookkeeping.

use nalgebra::{Point2, Vector2};

use crate::scalar::Scalar;

/// Dimension of `P_k` in two variables; zero for negative degrees.
pub fn poly_dim(k: isize) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

/// Position of the exponent `(a, b)`: degree blocks in increasing order,
/// inside a block `(d,0), (d-1,1), ..., (0,d)`.
#[inline]
pub fn mono_index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// All exponents up to total degree `k` in [`mono_index`] order.
pub fn exponents(k: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::with_capacity(poly_dim(k as isize));
    for d in 0..=k {
        for b in 0..=d {
            out.push([d - b, b]);
        }
    }
    out
}

/// Scaled monomial basis of `P_k(E)`.
#[derive(Debug, Clone)]
pub struct ScaledMonomialBasis<T: Scalar> {
    pub degree: usize,
    pub center: Point2<T>,
    pub h: T,
}

impl<T: Scalar> ScaledMonomialBasis<T> {
    pub fn new(degree: usize, center: Point2<T>, h: T) -> Self {
        Self { degree, center, h }
    }

    pub fn len(&self) -> usize {
        poly_dim(self.degree as isize)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scaled local coordinates of `p`.
    #[inline]
    pub fn local(&self, p: &Point2<T>) -> (T, T) {
        ((p.x - self.center.x) / self.h, (p.y - self.center.y) / self.h)
    }

    /// Values of every monomial at `p`.
    pub fn eval(&self, p: &Point2<T>) -> Vec<T> {
        let (x, y) = self.local(p);
        eval_local(self.degree, x, y)
    }

    /// Gradients of every monomial at `p` (with the `1/h` factor).
    pub fn eval_grad(&self, p: &Point2<T>) -> Vec<Vector2<T>> {
        let (x, y) = self.local(p);
        let vals = eval_local(self.degree.saturating_sub(1), x, y);
        exponents(self.degree)
            .iter()
            .map(|&[a, b]| {
                let gx = if a > 0 { T::from_count(a) * vals[mono_index(a - 1, b)] } else { T::zero() };
                let gy = if b > 0 { T::from_count(b) * vals[mono_index(a, b - 1)] } else { T::zero() };
                Vector2::new(gx, gy) / self.h
            })
            .collect()
    }

    /// Evaluates `sum c_a m_a` at `p`.
    pub fn eval_poly(&self, coeffs: &[T], p: &Point2<T>) -> T {
        let v = self.eval(p);
        coeffs.iter().zip(&v).fold(T::zero(), |s, (c, m)| s + *c * *m)
    }
}

/// Monomials `x^a y^b` of degree `<= k` in [`mono_index`] order.
pub fn eval_local<T: Scalar>(k: usize, x: T, y: T) -> Vec<T> {
    let mut out = Vec::with_capacity(poly_dim(k as isize));
    out.push(T::one());
    for d in 1..=k {
        let start = out.len() - d;
        // degree d from degree d-1: x * (first d entries), then y * last
        for b in 0..d {
            let v = out[start + b] * x;
            out.push(v);
        }
        let v = out[start + d - 1] * y;
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_exponents_agree() {
        for (i, &[a, b]) in exponents(6).iter().enumerate() {
            assert_eq!(mono_index(a, b), i);
        }
        assert_eq!(poly_dim(2), 6);
        assert_eq!(poly_dim(-1), 0);
    }

    #[test]
    fn eval_local_matches_powers() {
        let (x, y) = (0.3f64, -0.7f64);
        let v = eval_local(5, x, y);
        for (i, &[a, b]) in exponents(5).iter().enumerate() {
            assert!((v[i] - x.powi(a as i32) * y.powi(b as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_by_finite_differences() {
        let basis = ScaledMonomialBasis::<f64>::new(4, Point2::new(0.2, 0.1), 0.5);
        let p = Point2::new(0.35, -0.05);
        let g = basis.eval_grad(&p);
        let e = 1e-6;
        let px = basis.eval(&Point2::new(p.x + e, p.y));
        let mx = basis.eval(&Point2::new(p.x - e, p.y));
        let py = basis.eval(&Point2::new(p.x, p.y + e));
        let my = basis.eval(&Point2::new(p.x, p.y - e));
        for i in 0..basis.len() {
            assert!((g[i].x - (px[i] - mx[i]) / (2.0 * e)).abs() < 1e-8);
            assert!((g[i].y - (py[i] - my[i]) / (2.0 * e)).abs() < 1e-8);
        }
    }
}
