use nalgebra::{DMatrix, DVector, Point2, SymmetricEigen, Vector2};

use super::layout::DofLayout;
use crate::error::{Result, VemError};
use crate::mesh::{polygon_centroid, signed_area2, PolyMesh};
use crate::polyquad::{
    edge_gauss, edge_nodes, exponents, gram_matrix, lagrange_basis, laplacian_matrix, mono_index,
    perp_coeffs, poly_dim, quad_rule, MomentTable, QuadRule, ScaledMonomialBasis, VectorPolyBasis,
};
use crate::scalar::Scalar;

/// Exactness degrees of the quadrature rules used per cell. `None` selects
/// the default for the polynomial degree `k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadDegrees {
    /// Polynomial moments and mass matrices (default `2k + 2`, at least `2k`).
    pub bilinear: Option<usize>,
    /// Convection integrands (default `3k`).
    pub trilinear: Option<usize>,
    /// Non-polynomial data: loads, interpolation, errors (default `2k + 3`).
    pub load: Option<usize>,
}

impl QuadDegrees {
    pub fn bilinear(&self, k: usize) -> usize {
        self.bilinear.unwrap_or(2 * k + 2).max(2 * k)
    }

    pub fn trilinear(&self, k: usize) -> usize {
        self.trilinear.unwrap_or(3 * k).max(3 * k - 1)
    }

    pub fn load(&self, k: usize) -> usize {
        self.load.unwrap_or(2 * k + 3)
    }
}

/// Every local object of the method on one cell.
///
/// Vector polynomials are stored as `2 * dim P_k` scaled-monomial
/// coefficients (first component, then second); all operator matrices act on
/// local DoF vectors ordered by [`DofLayout`].
#[derive(Debug, Clone)]
pub struct ElementOperators<T: Scalar> {
    pub layout: DofLayout,
    pub degrees: QuadDegrees,
    pub points: Vec<Point2<T>>,
    pub centroid: Point2<T>,
    pub h: T,
    pub area: T,
    /// Position of each boundary node (`n_boundary / 2` entries, DoF `2i + c`).
    pub nodes: Vec<Point2<T>>,
    /// Moments `int_E m_a` up to degree `bilinear`.
    pub moments: MomentTable<T>,
    /// Mass matrix of `P_k`.
    pub mass_k: DMatrix<T>,
    /// Mass matrix of `P_{k-1}`.
    pub mass_km1: DMatrix<T>,
    /// DoFs to the coefficients of the H1-seminorm projection.
    pub pi_nabla: DMatrix<T>,
    /// DoFs to the moments against the monomial basis of `[P_k]^2`.
    pub moment: DMatrix<T>,
    /// DoFs to the coefficients of the L2 projection onto `[P_k]^2`.
    pub pi0: DMatrix<T>,
    /// `pi0_grad[2c + d]`: DoFs to the `P_{k-1}` coefficients of the L2
    /// projection of `d v_c / d x_d`.
    pub pi0_grad: [DMatrix<T>; 4],
    /// DoFs to the `P_{k-1}` coefficients of `div v`.
    pub div: DMatrix<T>,
    /// `b[a, :] . v = int_E q_a div v` with `q_a` the pressure basis
    /// (`div_basis` rows).
    pub b: DMatrix<T>,
    /// `int_E q_a` for the pressure basis.
    pub pressure_mean: DVector<T>,
    /// Rows: monomial coefficients of the `P_{k-1}` family orthonormal in
    /// `|E|^{-1} int_E`, testing the divergence DoFs.
    pub div_basis: DMatrix<T>,
    /// Rows: coefficients of the orthonormalized `x^perp P_{k-3}` family
    /// testing the interior moment DoFs.
    pub perp_basis: DMatrix<T>,
    /// DoFs of each basis polynomial `m_a e_c` (columns).
    pub poly_dofs: DMatrix<T>,
    pub consistency: DMatrix<T>,
    pub stabilization: DMatrix<T>,
    pub alpha: T,
    /// `consistency + alpha * stabilization`.
    pub stiffness: DMatrix<T>,
}

struct EdgeData<T: Scalar> {
    normal: Vector2<T>,
    length: T,
    /// Gauss points on the edge.
    points: Vec<Point2<T>>,
    weights: Vec<T>,
    /// `lag[q][j]`: Lagrange basis of node `j` at point `q`.
    lag: Vec<Vec<T>>,
}

/// Lower-triangular `Q` with `Q G Q^T = I` (Gram-Schmidt in basis order).
fn orthonormalizer<T: Scalar>(gram: DMatrix<T>) -> Option<DMatrix<T>> {
    let n = gram.nrows();
    if n == 0 {
        return Some(gram);
    }
    let l = gram.cholesky()?.unpack();
    l.solve_lower_triangular(&DMatrix::identity(n, n))
}

fn singular(what: &str) -> VemError {
    VemError::DegenerateCell { cell: usize::MAX, msg: format!("singular {what}") }
}

impl<T: Scalar> ElementOperators<T> {
    /// Operators of cell `c` of `mesh`.
    pub fn for_cell(mesh: &PolyMesh<T>, c: usize, k: usize, degrees: QuadDegrees) -> Result<Self> {
        Self::new(&mesh.cell_points(c), k, degrees).map_err(|e| match e {
            VemError::DegenerateCell { msg, .. } => VemError::DegenerateCell { cell: c, msg },
            other => other,
        })
    }

    /// Operators of a simple counter-clockwise polygon.
    pub fn new(points: &[Point2<T>], k: usize, degrees: QuadDegrees) -> Result<Self> {
        let n_e = points.len();
        let layout = DofLayout::new(k, n_e)?;
        let nd = layout.total;
        let area = signed_area2(points) * T::lit(0.5);
        if !(area > T::zero()) {
            return Err(VemError::DegenerateCell { cell: usize::MAX, msg: "non-positive area".into() });
        }
        let centroid = polygon_centroid(points);
        let mut h = T::zero();
        for i in 0..n_e {
            for j in (i + 1)..n_e {
                h = h.max((points[i] - points[j]).norm());
            }
        }
        let nk = poly_dim(k as isize);
        let nk1 = poly_dim(k as isize - 1);
        let exps_k = exponents(k);

        let bdeg = degrees.bilinear(k);
        let rule = quad_rule(points, bdeg)?;
        let moments = MomentTable::new(&ScaledMonomialBasis::new(bdeg, centroid, h), &rule);
        let mass_k = gram_matrix(&moments, k);
        let mass_km1 = gram_matrix(&moments, k - 1);
        let basis_hi = ScaledMonomialBasis::new(k + 1, centroid, h);

        // boundary nodes and edge rules
        let tn = edge_nodes::<T>(k);
        let (tq, wq) = edge_gauss::<T>(2 * k + 2);
        let lag: Vec<Vec<T>> = tq.iter().map(|&t| lagrange_basis(&tn, t)).collect();
        let mut nodes = vec![Point2::origin(); layout.n_boundary() / 2];
        let mut edges = Vec::with_capacity(n_e);
        for i in 0..n_e {
            let a = points[i];
            let bpt = points[(i + 1) % n_e];
            let t = bpt - a;
            let length = t.norm();
            for j in 0..=k {
                nodes[layout.edge_node(i, j, 0) / 2] = a + t * tn[j];
            }
            edges.push(EdgeData {
                normal: Vector2::new(t.y / length, -t.x / length),
                length,
                points: tq.iter().map(|&s| a + t * s).collect(),
                weights: wq.clone(),
                lag: lag.clone(),
            });
        }
        // row r with r . dofs = int_{dE} g(x, n) . v
        let boundary_functional = |g: &dyn Fn(&Point2<T>, &Vector2<T>) -> Vector2<T>| {
            let mut r = DVector::<T>::zeros(nd);
            for (i, e) in edges.iter().enumerate() {
                for q in 0..e.points.len() {
                    let gv = g(&e.points[q], &e.normal) * (e.weights[q] * e.length);
                    for j in 0..=k {
                        let l = e.lag[q][j];
                        r[layout.edge_node(i, j, 0)] += gv.x * l;
                        r[layout.edge_node(i, j, 1)] += gv.y * l;
                    }
                }
            }
            r
        };

        let div_basis = orthonormalizer(&mass_km1 / area).ok_or_else(|| singular("P_{k-1} mass matrix"))?;
        let exps_km3 = if k >= 3 { exponents(k - 3) } else { Vec::new() };
        let perp_gram = DMatrix::from_fn(exps_km3.len(), exps_km3.len(), |i, j| {
            let (a, bb) = (exps_km3[i], exps_km3[j]);
            (moments.get(a[0] + bb[0], a[1] + bb[1] + 2) + moments.get(a[0] + bb[0] + 2, a[1] + bb[1])) / area
        });
        let perp_basis = orthonormalizer(perp_gram).ok_or_else(|| singular("x^perp Gram matrix"))?;
        let div_inv = div_basis.clone().solve_lower_triangular(&DMatrix::identity(nk1, nk1)).expect("triangular");
        let perp_inv = perp_basis
            .clone()
            .solve_lower_triangular(&DMatrix::identity(exps_km3.len(), exps_km3.len()))
            .expect("triangular");

        // divergence: moments against P_{k-1}, then coefficients
        let flux = boundary_functional(&|_, n| *n);
        let mut bq = DMatrix::<T>::zeros(nk1, nd);
        bq.row_mut(0).copy_from(&(flux * div_basis[(0, 0)]).transpose());
        for a in 1..nk1 {
            bq[(a, layout.div(a))] = area / h;
        }
        let b_mono = &div_inv * &bq;
        let b = bq;
        let pressure_mean = &div_basis * DVector::from_fn(nk1, |a, _| moments.values[a]);
        let mass_km1_lu = mass_km1.clone().lu();
        let div = mass_km1_lu.solve(&b_mono).ok_or_else(|| singular("P_{k-1} mass matrix"))?;

        // int v . grad m_beta = -int m_beta div v + int_{dE} m_beta v . n
        let exps_k1 = exponents(k - 1);
        let grad_moment = |beta: [usize; 2]| -> DVector<T> {
            let bi = mono_index(beta[0], beta[1]);
            let mut r = boundary_functional(&|x, n| n * basis_hi.eval(x)[bi]);
            for (ai, &al) in exps_k1.iter().enumerate() {
                let w = moments.product(al, beta);
                r.axpy(-w, &div.row(ai).transpose(), T::one());
            }
            r
        };
        let perp_moment = |g: usize| -> DVector<T> {
            let mut r = DVector::zeros(nd);
            for j in 0..=g {
                r[layout.gperp(j)] = area * perp_inv[(g, j)];
            }
            r
        };

        // H1 seminorm projection
        let ga = DMatrix::from_fn(nk, nk, |i, j| {
            let (a, bb) = (exps_k[i], exps_k[j]);
            let mut s = T::zero();
            if a[0] > 0 && bb[0] > 0 {
                s += T::from_count(a[0] * bb[0]) * moments.get(a[0] + bb[0] - 2, a[1] + bb[1]);
            }
            if a[1] > 0 && bb[1] > 0 {
                s += T::from_count(a[1] * bb[1]) * moments.get(a[0] + bb[0], a[1] + bb[1] - 2);
            }
            s / (h * h)
        });
        let vb_low = VectorPolyBasis::<T>::new(k - 2);
        let lap = laplacian_matrix::<T>(k, h);
        let nkm2 = poly_dim(k as isize - 2);
        let grad_low: Vec<DVector<T>> =
            exponents(k - 1).iter().skip(1).map(|&bt| grad_moment(bt) * h).collect();
        let mut g_mat = DMatrix::<T>::zeros(2 * nk, 2 * nk);
        let mut rhs = DMatrix::<T>::zeros(2 * nk, nd);
        let basis_k = ScaledMonomialBasis::new(k, centroid, h);
        for c in 0..2 {
            for (ai, _) in exps_k.iter().enumerate() {
                let row = c * nk + ai;
                if ai == 0 {
                    for (bi, &bt) in exps_k.iter().enumerate() {
                        g_mat[(row, c * nk + bi)] = moments.get(bt[0], bt[1]);
                    }
                    // int v_c = h int v . grad m_{e_c}
                    let e = if c == 0 { [1, 0] } else { [0, 1] };
                    rhs.row_mut(row).copy_from(&(grad_moment(e) * h).transpose());
                    continue;
                }
                for bi in 0..nk {
                    g_mat[(row, c * nk + bi)] = ga[(ai, bi)];
                }
                // Delta(m_a e_c) in [P_{k-2}]^2, split into gradients and x^perp parts
                let mut lap_vec = DVector::<T>::zeros(2 * nkm2);
                for r in 0..nkm2 {
                    lap_vec[c * nkm2 + r] = lap[(r, ai)];
                }
                let coef = &vb_low.from_monomial * lap_vec;
                let mut r = boundary_functional(&|x, n| {
                    let gm = basis_k.eval_grad(x)[ai].dot(n);
                    if c == 0 {
                        Vector2::new(gm, T::zero())
                    } else {
                        Vector2::new(T::zero(), gm)
                    }
                });
                for (j, gl) in grad_low.iter().enumerate() {
                    r.axpy(-coef[j], gl, T::one());
                }
                for g in 0..vb_low.num_perp() {
                    r.axpy(-coef[vb_low.num_grad() + g], &perp_moment(g), T::one());
                }
                rhs.row_mut(row).copy_from(&r.transpose());
            }
        }
        let pi_nabla = g_mat.lu().solve(&rhs).ok_or_else(|| singular("H1 projection system"))?;

        // full moments against [P_k]^2
        let mut mass_full = DMatrix::<T>::zeros(2 * nk, 2 * nk);
        mass_full.view_mut((0, 0), (nk, nk)).copy_from(&mass_k);
        mass_full.view_mut((nk, nk), (nk, nk)).copy_from(&mass_k);
        let vb = VectorPolyBasis::<T>::new(k);
        let ngrad = vb.num_grad();
        let nsub = vb.num_perp_sub();
        let mut mom = DMatrix::<T>::zeros(2 * nk, nd);
        for (j, &bt) in exponents(k + 1).iter().enumerate().skip(1) {
            mom.row_mut(j - 1).copy_from(&(grad_moment(bt) * h).transpose());
        }
        for g in 0..nsub {
            mom.row_mut(ngrad + g).copy_from(&perp_moment(g).transpose());
        }
        // complement of x^perp P_{k-3} inside x^perp P_{k-1}, L2-orthogonalized
        let perp_vec = |g: usize| {
            let mut v = DVector::<T>::zeros(2 * nk);
            for (r, val) in perp_coeffs::<T>(k, exponents(k - 1)[g]) {
                v[r] = val;
            }
            v
        };
        let sub: Vec<DVector<T>> = (0..nsub).map(perp_vec).collect();
        let sub_gram = DMatrix::from_fn(nsub, nsub, |i, j| (sub[i].transpose() * &mass_full * &sub[j])[(0, 0)]);
        let sub_lu = sub_gram.lu();
        let proj_pn = mass_full.clone() * &pi_nabla;
        for g in nsub..vb.num_perp() {
            let full = perp_vec(g);
            let mut row = DVector::<T>::zeros(nd);
            let mut gt = full.clone();
            if nsub > 0 {
                let r = DVector::from_fn(nsub, |i, _| (sub[i].transpose() * &mass_full * &full)[(0, 0)]);
                let cf = sub_lu.solve(&r).ok_or_else(|| singular("x^perp Gram matrix"))?;
                for i in 0..nsub {
                    gt.axpy(-cf[i], &sub[i], T::one());
                    row.axpy(cf[i], &perp_moment(i), T::one());
                }
            }
            row += proj_pn.transpose() * gt;
            mom.row_mut(ngrad + g).copy_from(&row.transpose());
        }
        let moment = vb.from_monomial.transpose() * mom;
        let pi0 = mass_full.clone().lu().solve(&moment).ok_or_else(|| singular("P_k mass matrix"))?;

        // L2 projection of the gradient
        let basis_km1 = ScaledMonomialBasis::new(k - 1, centroid, h);
        let pi0_grad: [DMatrix<T>; 4] = std::array::from_fn(|cd| {
            let (c, d) = (cd / 2, cd % 2);
            let mut rows = DMatrix::<T>::zeros(nk1, nd);
            for (ai, &al) in exps_k1.iter().enumerate() {
                let mut r = boundary_functional(&|x, n| {
                    let v = basis_km1.eval(x)[ai] * n[d];
                    if c == 0 {
                        Vector2::new(v, T::zero())
                    } else {
                        Vector2::new(T::zero(), v)
                    }
                });
                if al[d] > 0 {
                    let lower = if d == 0 { mono_index(al[0] - 1, al[1]) } else { mono_index(al[0], al[1] - 1) };
                    let f = T::from_count(al[d]) / h;
                    r.axpy(-f, &moment.row(c * nk + lower).transpose(), T::one());
                }
                rows.row_mut(ai).copy_from(&r.transpose());
            }
            mass_km1_lu.solve(&rows).expect("mass matrix already factored")
        });

        // DoFs of the basis polynomials
        let mut poly_dofs = DMatrix::<T>::zeros(nd, 2 * nk);
        for (ni, x) in nodes.iter().enumerate() {
            let m = basis_k.eval(x);
            for ai in 0..nk {
                poly_dofs[(2 * ni, ai)] = m[ai];
                poly_dofs[(2 * ni + 1, nk + ai)] = m[ai];
            }
        }
        // monomial-tested moments first, then the orthonormal combinations
        let ng = exps_km3.len();
        let mut perp_m = DMatrix::<T>::zeros(ng, 2 * nk);
        let mut div_m = DMatrix::<T>::zeros(nk1, 2 * nk);
        for (ai, &al) in exps_k.iter().enumerate() {
            for (g, &gm) in exps_km3.iter().enumerate() {
                perp_m[(g, ai)] = moments.get(al[0] + gm[0], al[1] + gm[1] + 1) / area;
                perp_m[(g, nk + ai)] = -moments.get(al[0] + gm[0] + 1, al[1] + gm[1]) / area;
            }
            for (bi, &bt) in exps_k1.iter().enumerate() {
                if al[0] > 0 {
                    div_m[(bi, ai)] = T::from_count(al[0]) * moments.get(al[0] - 1 + bt[0], al[1] + bt[1]) / area;
                }
                if al[1] > 0 {
                    div_m[(bi, nk + ai)] =
                        T::from_count(al[1]) * moments.get(al[0] + bt[0], al[1] - 1 + bt[1]) / area;
                }
            }
        }
        let perp_q = &perp_basis * perp_m;
        let div_q = &div_basis * div_m;
        for j in 0..2 * nk {
            for g in 0..ng {
                poly_dofs[(layout.gperp(g), j)] = perp_q[(g, j)];
            }
            for bi in 1..nk1 {
                poly_dofs[(layout.div(bi), j)] = div_q[(bi, j)];
            }
        }

        // stiffness with dofi-dofi stabilization
        let mut ga_full = DMatrix::<T>::zeros(2 * nk, 2 * nk);
        ga_full.view_mut((0, 0), (nk, nk)).copy_from(&ga);
        ga_full.view_mut((nk, nk), (nk, nk)).copy_from(&ga);
        let consistency = {
            let kc = pi_nabla.transpose() * &ga_full * &pi_nabla;
            (&kc + kc.transpose()) * T::lit(0.5)
        };
        let eig = SymmetricEigen::new(consistency.clone()).eigenvalues;
        let lmax = eig.iter().fold(T::zero(), |m, v| m.max(*v));
        let thr = lmax * T::lit(1e-12);
        let (mut sum, mut cnt) = (T::zero(), 0usize);
        for v in eig.iter() {
            if *v > thr {
                sum += *v;
                cnt += 1;
            }
        }
        if cnt == 0 {
            return Err(singular("consistency matrix (no positive eigenvalue)"));
        }
        let alpha = sum / T::from_count(cnt);
        let ip = DMatrix::<T>::identity(nd, nd) - &poly_dofs * &pi_nabla;
        let stabilization = ip.transpose() * &ip;
        let stiffness = &consistency + &stabilization * alpha;

        Ok(Self {
            layout,
            degrees,
            points: points.to_vec(),
            centroid,
            h,
            area,
            nodes,
            moments,
            mass_k,
            mass_km1,
            pi_nabla,
            moment,
            pi0,
            pi0_grad,
            div,
            b,
            pressure_mean,
            div_basis,
            perp_basis,
            poly_dofs,
            consistency,
            stabilization,
            alpha,
            stiffness,
        })
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn ndofs(&self) -> usize {
        self.layout.total
    }

    /// Scaled monomial basis of `P_n` on this cell.
    pub fn basis(&self, n: usize) -> ScaledMonomialBasis<T> {
        ScaledMonomialBasis::new(n, self.centroid, self.h)
    }

    /// Quadrature rule of the given exactness on the cell.
    pub fn rule(&self, degree: usize) -> QuadRule<T> {
        quad_rule(&self.points, degree).expect("cell validated at construction")
    }

    /// Evaluates a vector polynomial given by `2 dim P_k` coefficients.
    pub fn eval_vector(&self, coeffs: &DVector<T>, x: &Point2<T>) -> Vector2<T> {
        let nk = poly_dim(self.k() as isize);
        let m = self.basis(self.k()).eval(x);
        let mut v = Vector2::zeros();
        for (i, mi) in m.iter().enumerate() {
            v.x += coeffs[i] * *mi;
            v.y += coeffs[nk + i] * *mi;
        }
        v
    }

    /// DoFs of a vector polynomial given by its `[P_k]^2` coefficients.
    pub fn dofs_of_poly(&self, coeffs: &DVector<T>) -> DVector<T> {
        &self.poly_dofs * coeffs
    }

    /// DoF interpolation of a smooth field. Without an explicit divergence,
    /// central differences with step `1e-6 h_E` are used.
    pub fn interpolate(
        &self,
        u: &dyn Fn(&Point2<T>) -> Vector2<T>,
        div: Option<&dyn Fn(&Point2<T>) -> T>,
    ) -> DVector<T> {
        let l = &self.layout;
        let k = l.k;
        let mut out = DVector::zeros(l.total);
        for (i, x) in self.nodes.iter().enumerate() {
            let v = u(x);
            out[2 * i] = v.x;
            out[2 * i + 1] = v.y;
        }
        let rule = self.rule(self.degrees.load(k));
        let step = self.h * T::lit(1e-6);
        let fd_div = |x: &Point2<T>| {
            let ex = Vector2::new(step, T::zero());
            let ey = Vector2::new(T::zero(), step);
            ((u(&(x + ex)).x - u(&(x - ex)).x) + (u(&(x + ey)).y - u(&(x - ey)).y)) / (step + step)
        };
        let nb_basis = self.basis(k - 1);
        let exps_km3 = if k >= 3 { exponents(k - 3) } else { Vec::new() };
        let mut perp_m = DVector::<T>::zeros(l.n_gperp);
        let mut div_m = DVector::<T>::zeros(l.n_p);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let m = nb_basis.eval(x);
            let v = u(x);
            let (xs, ys) = nb_basis.local(x);
            for (g, &gm) in exps_km3.iter().enumerate() {
                let mg = m[mono_index(gm[0], gm[1])];
                perp_m[g] += *w * (v.x * ys - v.y * xs) * mg;
            }
            let dv = match div {
                Some(f) => f(x),
                None => fd_div(x),
            };
            for a in 0..l.n_p {
                div_m[a] += *w * dv * m[a];
            }
        }
        let perp_q = &self.perp_basis * perp_m / self.area;
        let div_q = &self.div_basis * div_m * (self.h / self.area);
        for g in 0..l.n_gperp {
            out[l.gperp(g)] = perp_q[g];
        }
        for a in 1..l.n_p {
            out[l.div(a)] = div_q[a];
        }
        out
    }

    /// Load vector `(f, Pi0 phi_i)` for each basis function.
    pub fn load(&self, f: &dyn Fn(&Point2<T>) -> Vector2<T>) -> DVector<T> {
        let k = self.k();
        let nk = poly_dim(k as isize);
        let rule = self.rule(self.degrees.load(k));
        let basis = self.basis(k);
        let mut mom = DVector::<T>::zeros(2 * nk);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let fv = f(x);
            for (i, m) in basis.eval(x).into_iter().enumerate() {
                mom[i] += *w * fv.x * m;
                mom[nk + i] += *w * fv.y * m;
            }
        }
        self.pi0.transpose() * mom
    }

    /// Scaled-monomial coefficients of a pressure given in the cell's
    /// pressure basis.
    pub fn pressure_to_monomial(&self, coeffs: &DVector<T>) -> DVector<T> {
        self.div_basis.transpose() * coeffs
    }

    /// `P_{k-1}` coefficients of `div v`.
    pub fn divergence_coeffs(&self, dofs: &DVector<T>) -> DVector<T> {
        &self.div * dofs
    }
}
