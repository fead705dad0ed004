//! Exact differential operators on scaled monomial coefficients, the
//! gradient / rotated decomposition of vector polynomials, and monomial
//! moments.
//!
//! Vector polynomials in `[P_n]^2` are stored as `2 * dim P_n` coefficients,
//! first component first.

use nalgebra::DMatrix;

use super::basis::{exponents, mono_index, poly_dim, ScaledMonomialBasis};
use super::quadrature::QuadRule;
use crate::scalar::Scalar;

fn dim(n: isize) -> usize {
    poly_dim(n)
}

/// Gradient `P_k -> [P_{k-1}]^2`.
pub fn gradient_matrix<T: Scalar>(k: usize, h: T) -> DMatrix<T> {
    let nl = dim(k as isize - 1);
    let mut g = DMatrix::zeros(2 * nl, dim(k as isize));
    for (j, &[a, b]) in exponents(k).iter().enumerate() {
        if a > 0 {
            g[(mono_index(a - 1, b), j)] = T::from_count(a) / h;
        }
        if b > 0 {
            g[(nl + mono_index(a, b - 1), j)] = T::from_count(b) / h;
        }
    }
    g
}

/// Divergence `[P_k]^2 -> P_{k-1}`.
pub fn divergence_matrix<T: Scalar>(k: usize, h: T) -> DMatrix<T> {
    let g = gradient_matrix::<T>(k, h);
    let nl = dim(k as isize - 1);
    let n = dim(k as isize);
    let mut d = DMatrix::zeros(nl, 2 * n);
    d.view_mut((0, 0), (nl, n)).copy_from(&g.view((0, 0), (nl, n)));
    d.view_mut((0, n), (nl, n)).copy_from(&g.view((nl, 0), (nl, n)));
    d
}

/// Scalar Laplacian `P_k -> P_{k-2}`.
pub fn laplacian_matrix<T: Scalar>(k: usize, h: T) -> DMatrix<T> {
    let nl = dim(k as isize - 2);
    let mut l = DMatrix::zeros(nl, dim(k as isize));
    let h2 = h * h;
    for (j, &[a, b]) in exponents(k).iter().enumerate() {
        if a > 1 {
            l[(mono_index(a - 2, b), j)] += T::from_count(a * (a - 1)) / h2;
        }
        if b > 1 {
            l[(mono_index(a, b - 2), j)] += T::from_count(b * (b - 1)) / h2;
        }
    }
    l
}

/// Vector Laplacian `[P_k]^2 -> [P_{k-2}]^2`.
pub fn vector_laplacian_matrix<T: Scalar>(k: usize, h: T) -> DMatrix<T> {
    let l = laplacian_matrix::<T>(k, h);
    let (r, c) = l.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(&l);
    out.view_mut((r, c), (r, c)).copy_from(&l);
    out
}

/// `rot v = d_x v_2 - d_y v_1` restricted to `x^perp P_{k-1}`, in the
/// coefficients of `x^perp m_g`, `|g| <= k-1`. It is diagonal:
/// `rot(x^perp m_g) = -(|g| + 2) / h m_g`.
pub fn rot_matrix<T: Scalar>(k: usize, h: T) -> DMatrix<T> {
    let n = dim(k as isize - 1);
    let mut r = DMatrix::zeros(n, n);
    for (i, &[a, b]) in exponents(k.saturating_sub(1)).iter().enumerate().take(n) {
        r[(i, i)] = -T::from_count(a + b + 2) / h;
    }
    r
}

/// Coefficients in `[P_n]^2` of `x^perp m_g = (m_{g+e2}, -m_{g+e1})`, where
/// `x^perp` uses scaled coordinates.
pub fn perp_coeffs<T: Scalar>(n: usize, g: [usize; 2]) -> Vec<(usize, T)> {
    let np = dim(n as isize);
    vec![(mono_index(g[0], g[1] + 1), T::one()), (np + mono_index(g[0] + 1, g[1]), -T::one())]
}

/// Coefficients in `[P_n]^2` of the scaled gradient `h grad m_b`.
pub fn scaled_grad_coeffs<T: Scalar>(n: usize, b: [usize; 2]) -> Vec<(usize, T)> {
    let np = dim(n as isize);
    let mut out = Vec::with_capacity(2);
    if b[0] > 0 {
        out.push((mono_index(b[0] - 1, b[1]), T::from_count(b[0])));
    }
    if b[1] > 0 {
        out.push((np + mono_index(b[0], b[1] - 1), T::from_count(b[1])));
    }
    out
}

/// Basis of `[P_n]^2` arranged as `h grad m_b` (`1 <= |b| <= n+1`) followed
/// by `x^perp m_g` (`|g| <= n-1`).
#[derive(Debug, Clone)]
pub struct VectorPolyBasis<T: Scalar> {
    pub degree: usize,
    /// Columns: the basis members in monomial coefficients.
    pub to_monomial: DMatrix<T>,
    /// Inverse of `to_monomial`: block coefficients of a monomial vector.
    pub from_monomial: DMatrix<T>,
}

impl<T: Scalar> VectorPolyBasis<T> {
    pub fn new(n: usize) -> Self {
        let np = dim(n as isize);
        let ng = dim(n as isize + 1) - 1;
        let mut z = DMatrix::zeros(2 * np, 2 * np);
        for (j, &b) in exponents(n + 1).iter().enumerate().skip(1) {
            for (r, v) in scaled_grad_coeffs::<T>(n, b) {
                z[(r, j - 1)] = v;
            }
        }
        if n >= 1 {
            for (j, &g) in exponents(n - 1).iter().enumerate() {
                for (r, v) in perp_coeffs::<T>(n, g) {
                    z[(r, ng + j)] = v;
                }
            }
        }
        let from = z.clone().try_inverse().expect("vector polynomial basis is complete");
        Self { degree: n, to_monomial: z, from_monomial: from }
    }

    /// Number of gradient members, `dim P_{n+1} - 1`.
    pub fn num_grad(&self) -> usize {
        dim(self.degree as isize + 1) - 1
    }

    /// Number of rotated members, `dim P_{n-1}` (the space `G_n^perp`).
    pub fn num_perp(&self) -> usize {
        dim(self.degree as isize - 1)
    }

    /// Dimension of the nested rotated subspace `x^perp P_{n-3}`.
    pub fn num_perp_sub(&self) -> usize {
        dim(self.degree as isize - 3)
    }

    pub fn len(&self) -> usize {
        self.to_monomial.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Integrals `I_a = int_E m_a` for all `|a| <= degree`.
#[derive(Debug, Clone)]
pub struct MomentTable<T: Scalar> {
    pub degree: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn new(basis: &ScaledMonomialBasis<T>, rule: &QuadRule<T>) -> Self {
        let d = basis.degree;
        let mut values = vec![T::zero(); dim(d as isize)];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            for (v, m) in values.iter_mut().zip(basis.eval(p)) {
                *v += *w * m;
            }
        }
        Self { degree: d, values }
    }

    /// `int_E m_{(a,b)}`.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> T {
        self.values[mono_index(a, b)]
    }

    /// `int_E m_x m_y`.
    #[inline]
    pub fn product(&self, x: [usize; 2], y: [usize; 2]) -> T {
        self.get(x[0] + y[0], x[1] + y[1])
    }
}

/// Mass matrix `H_ij = int_E m_i m_j` on `P_k`; needs moments of degree `2k`.
pub fn gram_matrix<T: Scalar>(moments: &MomentTable<T>, k: usize) -> DMatrix<T> {
    assert!(moments.degree >= 2 * k);
    let e = exponents(k);
    DMatrix::from_fn(e.len(), e.len(), |i, j| moments.product(e[i], e[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyquad::quad_rule;
    use nalgebra::{DVector, Point2};

    #[test]
    fn grad_of_constant_vanishes() {
        let g = gradient_matrix::<f64>(3, 0.7);
        assert!(g.column(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn perp_block_divergence_is_tangential_derivative() {
        // div(x^perp m_g) = (a m_{g-e1+e2} - b m_{g+e1-e2}) / h, zero only for g = 0
        let h = 0.3;
        for n in 1..6 {
            let vb = VectorPolyBasis::<f64>::new(n);
            let d = divergence_matrix::<f64>(n, h);
            let perp = vb.to_monomial.columns(vb.num_grad(), vb.num_perp());
            let div = d * perp;
            for (j, &[a, b]) in exponents(n - 1).iter().enumerate() {
                let mut expect = DVector::zeros(poly_dim(n as isize - 1));
                if a > 0 {
                    expect[mono_index(a - 1, b + 1)] += a as f64 / h;
                }
                if b > 0 {
                    expect[mono_index(a + 1, b - 1)] -= b as f64 / h;
                }
                assert!((div.column(j) - expect).abs().max() < 1e-13);
            }
            assert!(div.column(0).abs().max() == 0.0);
        }
    }

    #[test]
    fn rot_on_g2_is_nonsingular() {
        let r = rot_matrix::<f64>(2, 1.0);
        assert_eq!(r.shape(), (3, 3));
        assert!(r.determinant().abs() > 1.0);
        // check against the generic operator
        let h = 0.4;
        let grad = gradient_matrix::<f64>(2, h);
        let np = 6;
        let nl = 3;
        for (i, &g) in exponents(1).iter().enumerate() {
            let mut v = DVector::zeros(2 * np);
            for (r, c) in perp_coeffs::<f64>(2, g) {
                v[r] = c;
            }
            let gx = &grad * v.rows(np, np); // grad of v2
            let gy = &grad * v.rows(0, np); // grad of v1
            let rot = gx.rows(0, nl) - gy.rows(nl, nl);
            let expect = rot_matrix::<f64>(2, h).column(i).into_owned();
            assert!((rot - expect).abs().max() < 1e-14);
        }
    }

    #[test]
    fn decomposition_reconstructs() {
        for n in 0..6 {
            let vb = VectorPolyBasis::<f64>::new(n);
            assert_eq!(vb.num_grad() + vb.num_perp(), vb.len());
            let id = &vb.to_monomial * &vb.from_monomial;
            assert!((id - DMatrix::identity(vb.len(), vb.len())).abs().max() < 1e-12);
        }
    }

    #[test]
    fn square_gram_k1() {
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let rule = quad_rule(&sq, 2).unwrap();
        let h = 2f64.sqrt();
        let basis = ScaledMonomialBasis::new(2, Point2::new(0.5, 0.5), h);
        let m = MomentTable::new(&basis, &rule);
        let g = gram_matrix(&m, 1);
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((g[(1, 1)] - 1.0 / 12.0 / (h * h)).abs() < 1e-15);
        assert!((g[(2, 2)] - 1.0 / 12.0 / (h * h)).abs() < 1e-15);
        assert!(g[(1, 2)].abs() < 1e-15);
    }
}
