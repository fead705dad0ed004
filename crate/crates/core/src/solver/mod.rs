//! Linear solves of the bordered system and the Picard/Newton iteration.

use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::assembly::{assemble_newton, assemble_oseen, assemble_stokes, residual, Discretization, FlowState, Problem, SaddleSystem};
use crate::element::ConvectionMode;
use crate::error::{Result, VemError};
use crate::scalar::Scalar;
use crate::sparse::solve_sparse;

/// Settings of the nonlinear iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearOptions<T: Scalar> {
    pub picard_max: usize,
    pub newton_max: usize,
    /// Residual tolerance relative to the reference norm.
    pub tol_rel: T,
    pub tol_abs: T,
    pub mode: ConvectionMode,
    /// Initial Newton step length in `(0, 1]`, halved on residual increase
    /// down to 1/16.
    pub damping: T,
    /// Picard hands over to Newton once the residual dropped by this factor.
    pub picard_reduction: T,
    /// Solve a sequence of larger viscosities first, dividing by ten from
    /// `continuation_start` down to the target.
    pub continuation: bool,
    pub continuation_start: T,
}

impl<T: Scalar> Default for NonlinearOptions<T> {
    fn default() -> Self {
        Self {
            picard_max: 15,
            newton_max: 25,
            tol_rel: T::lit(1e-10),
            tol_abs: T::lit(1e-13),
            mode: ConvectionMode::Plain,
            damping: T::one(),
            picard_reduction: T::lit(1e-2),
            continuation: false,
            continuation_start: T::lit(1e-1),
        }
    }
}

impl<T: Scalar> NonlinearOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(VemError::InvalidArgument(m.to_string()));
        if !(self.tol_rel > T::zero()) || !(self.tol_abs > T::zero()) {
            return bad("tolerances must be positive");
        }
        if self.picard_max + self.newton_max == 0 {
            return bad("picard_max + newton_max must be >= 1");
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return bad("damping must lie in (0, 1]");
        }
        if !(self.picard_reduction > T::zero() && self.picard_reduction < T::one()) {
            return bad("picard_reduction must lie in (0, 1)");
        }
        if self.continuation && !(self.continuation_start > T::zero()) {
            return bad("continuation_start must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Stokes,
    Picard,
    Newton,
}

/// Outcome of a solve. `history` holds `(phase, residual norm)` after each
/// step, starting with the initial guess of every viscosity stage. A Picard
/// step that increased the residual is recorded but not kept.
#[derive(Debug, Clone)]
pub struct SolveReport<T: Scalar> {
    pub picard_iterations: usize,
    pub newton_iterations: usize,
    pub history: Vec<(Phase, T)>,
    pub final_residual: T,
    /// Norm the relative tolerance refers to.
    pub reference_norm: T,
    pub converged: bool,
    /// Viscosities solved before the target when continuation is on.
    pub continuation_steps: Vec<T>,
    pub wall_time: Duration,
}

impl<T: Scalar> SolveReport<T> {
    fn new(reference_norm: T) -> Self {
        Self {
            picard_iterations: 0,
            newton_iterations: 0,
            history: Vec::new(),
            final_residual: T::zero(),
            reference_norm,
            converged: false,
            continuation_steps: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }
}

/// Direct solve of a bordered system with iterative refinement to
/// `1e-11 |rhs|`.
pub fn linear_solve<T: Scalar>(system: &SaddleSystem<T>) -> Result<DVector<T>> {
    solve_matrix(&system.matrix, &system.rhs)
}

fn solve_matrix<T: Scalar>(a: &crate::sparse::CscMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let (x, res) = solve_sparse(a, b)?;
    let tol = T::lit(1e-11).max(T::epsilon() * T::lit(100.0));
    if res > tol * b.norm() {
        log::warn!("linear solve residual {:e} above {:e} relative", res.as_f64(), tol.as_f64());
    }
    Ok(x)
}

/// Single Stokes solve.
pub fn solve_stokes<T: Scalar>(disc: &Discretization<T>, prob: &Problem<T>) -> Result<(FlowState<T>, SolveReport<T>)> {
    let start = Instant::now();
    let sys = assemble_stokes(disc, prob);
    let x = linear_solve(&sys)?;
    let state = FlowState::from_system(disc, &x, &prob.lift);
    let r = residual(disc, prob, &state, None).norm();
    let mut rep = SolveReport::new(sys.rhs.norm());
    rep.history.push((Phase::Stokes, r));
    rep.final_residual = r;
    rep.converged = true;
    rep.wall_time = start.elapsed();
    Ok((state, rep))
}

/// Picard warm start from the Stokes solution, then damped Newton.
pub fn solve_navier_stokes<T: Scalar>(
    disc: &Discretization<T>,
    prob: &Problem<T>,
    opts: &NonlinearOptions<T>,
) -> Result<(FlowState<T>, SolveReport<T>)> {
    opts.validate()?;
    let start = Instant::now();
    let stokes = assemble_stokes(disc, prob);
    let reference = stokes.rhs.norm();
    let state = FlowState::from_system(disc, &linear_solve(&stokes)?, &prob.lift);
    let mut rep = SolveReport::new(reference);

    let mut nus = Vec::new();
    if opts.continuation {
        let mut nu = opts.continuation_start;
        while nu > prob.nu * T::lit(1.0 + 1e-9) {
            nus.push(nu);
            nu /= T::lit(10.0);
        }
    }
    let mut state = state;
    for &nu in &nus {
        let p = Problem { nu, ..prob.clone() };
        let mut sub = SolveReport::new(reference);
        state = iterate(disc, &p, opts, state, &mut sub)?;
        rep.picard_iterations += sub.picard_iterations;
        rep.newton_iterations += sub.newton_iterations;
        rep.history.extend(sub.history);
        rep.continuation_steps.push(nu);
        if !sub.converged {
            log::warn!("continuation step nu = {:e} did not converge", nu.as_f64());
        }
    }
    state = iterate(disc, prob, opts, state, &mut rep)?;
    rep.wall_time = start.elapsed();
    Ok((state, rep))
}

fn iterate<T: Scalar>(
    disc: &Discretization<T>,
    prob: &Problem<T>,
    opts: &NonlinearOptions<T>,
    mut state: FlowState<T>,
    rep: &mut SolveReport<T>,
) -> Result<FlowState<T>> {
    let mode = Some(opts.mode);
    let tol = (opts.tol_rel * rep.reference_norm).max(opts.tol_abs);
    let mut r = residual(disc, prob, &state, mode).norm();
    rep.history.push((Phase::Stokes, r));
    let r0 = r;
    let finish = |rep: &mut SolveReport<T>, r: T| {
        rep.final_residual = r;
        rep.converged = r <= tol;
    };
    if r <= tol {
        finish(rep, r);
        return Ok(state);
    }

    // Picard until enough reduction; an increase hands over to Newton from
    // the better iterate
    let mut picard = 0;
    while picard < opts.picard_max && r > opts.picard_reduction * r0 && r > tol {
        let sys = assemble_oseen(disc, prob, &state.u, opts.mode);
        let next = FlowState::from_system(disc, &linear_solve(&sys)?, &prob.lift);
        let rn = residual(disc, prob, &next, mode).norm();
        picard += 1;
        rep.picard_iterations += 1;
        rep.history.push((Phase::Picard, rn));
        if !(rn < r) {
            break;
        }
        state = next;
        r = rn;
    }

    let floor = T::lit(1.0 / 16.0);
    let mut newton = 0;
    while r > tol && newton < opts.newton_max {
        let (res, jac) = assemble_newton(disc, prob, &state, mode);
        let dx = solve_matrix(&jac, &(-res))?;
        let mut s = opts.damping;
        let mut trial;
        let mut rt;
        loop {
            trial = state.clone();
            trial.add_step(disc, &dx, s);
            rt = residual(disc, prob, &trial, mode).norm();
            if rt < r || s <= floor {
                break;
            }
            s *= T::lit(0.5);
        }
        state = trial;
        r = rt;
        newton += 1;
        rep.newton_iterations += 1;
        rep.history.push((Phase::Newton, r));
        if !r.is_finite() {
            break;
        }
    }
    finish(rep, r);
    Ok(state)
}
