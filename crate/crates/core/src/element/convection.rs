use nalgebra::{DMatrix, DVector};

use super::operators::ElementOperators;
use crate::polyquad::poly_dim;
use crate::scalar::Scalar;

/// Which discrete trilinear form is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvectionMode {
    /// `c_h(w; u, v) = int (Pi0 grad u)(Pi0 w) . Pi0 v`.
    #[default]
    Plain,
    /// `(c_h(w; u, v) - c_h(w; v, u)) / 2`.
    Skew,
}

impl std::str::FromStr for ConvectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Self::Plain),
            "skew" => Ok(Self::Skew),
            _ => Err(format!("unknown convection mode `{s}` (expected plain or skew)")),
        }
    }
}

impl std::fmt::Display for ConvectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::Skew => "skew",
        })
    }
}

/// Projected values at one quadrature point.
struct ConvPoint<T: Scalar> {
    weight: T,
    /// Rows `c`: `(Pi0 v)_c` at the point.
    val: DMatrix<T>,
    /// Rows `2c + d`: `(Pi0 grad v)_{cd}` at the point.
    grad: DMatrix<T>,
}

impl<T: Scalar> ElementOperators<T> {
    fn conv_points(&self) -> Vec<ConvPoint<T>> {
        let k = self.k();
        let nk = poly_dim(k as isize);
        let nk1 = poly_dim(k as isize - 1);
        let nd = self.ndofs();
        let rule = self.rule(self.degrees.trilinear(k));
        let bk = self.basis(k);
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| {
                let m = bk.eval(x);
                let mk = nalgebra::RowDVector::from_row_slice(&m);
                let mk1 = nalgebra::RowDVector::from_row_slice(&m[..nk1]);
                let mut val = DMatrix::zeros(2, nd);
                for c in 0..2 {
                    val.row_mut(c).copy_from(&(&mk * self.pi0.rows(c * nk, nk)));
                }
                let mut grad = DMatrix::zeros(4, nd);
                for cd in 0..4 {
                    grad.row_mut(cd).copy_from(&(&mk1 * &self.pi0_grad[cd]));
                }
                ConvPoint { weight: *w, val, grad }
            })
            .collect()
    }

    /// `C(w)_{ij} = c_h(w; phi_j, phi_i)` (plain) or its skew-symmetric part.
    pub fn convection_matrix(&self, w: &DVector<T>, mode: ConvectionMode) -> DMatrix<T> {
        let nd = self.ndofs();
        let mut c = DMatrix::zeros(nd, nd);
        for p in self.conv_points() {
            let wv = &p.val * w;
            // rows c: sum_d (grad_{cd} phi_j) w_d
            let mut g = DMatrix::zeros(2, nd);
            for ci in 0..2 {
                let row = p.grad.row(2 * ci) * wv[0] + p.grad.row(2 * ci + 1) * wv[1];
                g.row_mut(ci).copy_from(&row);
            }
            c.gemm_tr(p.weight, &p.val, &g, T::one());
        }
        match mode {
            ConvectionMode::Plain => c,
            ConvectionMode::Skew => (&c - c.transpose()) * T::lit(0.5),
        }
    }

    /// Local convection residual `r_i = c(u; u, phi_i)` in the chosen form.
    pub fn convection_residual(&self, u: &DVector<T>, mode: ConvectionMode) -> DVector<T> {
        self.convection_matrix(u, mode) * u
    }

    /// Jacobian of [`ElementOperators::convection_residual`] at `u`.
    pub fn convection_jacobian(&self, u: &DVector<T>, mode: ConvectionMode) -> DMatrix<T> {
        let nd = self.ndofs();
        let mut cm = DMatrix::zeros(nd, nd);
        // dp_{ij} = c(phi_j; u, phi_i)
        let mut dp = DMatrix::zeros(nd, nd);
        // e_{ij} = c(phi_j; phi_i, u)
        let mut e = DMatrix::zeros(nd, nd);
        for p in self.conv_points() {
            let uv = &p.val * u;
            let gu = &p.grad * u;
            let mut g = DMatrix::zeros(2, nd);
            let mut t = DMatrix::zeros(2, nd);
            for ci in 0..2 {
                g.row_mut(ci).copy_from(&(p.grad.row(2 * ci) * uv[0] + p.grad.row(2 * ci + 1) * uv[1]));
                t.row_mut(ci).copy_from(&(p.val.row(0) * gu[2 * ci] + p.val.row(1) * gu[2 * ci + 1]));
            }
            cm.gemm_tr(p.weight, &p.val, &g, T::one());
            dp.gemm_tr(p.weight, &p.val, &t, T::one());
            if mode == ConvectionMode::Skew {
                // sum_c u_c grad_{cd} phi_i, paired with (phi_j)_d
                let mut s = DMatrix::zeros(2, nd);
                for d in 0..2 {
                    s.row_mut(d).copy_from(&(p.grad.row(d) * uv[0] + p.grad.row(2 + d) * uv[1]));
                }
                e.gemm_tr(p.weight, &s, &p.val, T::one());
            }
        }
        match mode {
            ConvectionMode::Plain => cm + dp,
            ConvectionMode::Skew => (&cm + &dp - &e - cm.transpose()) * T::lit(0.5),
        }
    }

    /// `c_h(w; u, v)` of the plain form.
    pub fn trilinear(&self, w: &DVector<T>, u: &DVector<T>, v: &DVector<T>) -> T {
        (v.transpose() * self.convection_matrix(w, ConvectionMode::Plain) * u)[(0, 0)]
    }
}
