//! Convergence studies: one solve per mesh level, then tables and plot data.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use nalgebra::Point2;
use polyvem::assembly::assemble_stokes;
use polyvem::postproc::{compute_errors, eoc, export_fields, ErrorReport, ExactFields, FieldFormat};
use polyvem::solver::{solve_navier_stokes, solve_stokes};
use polyvem::{Discretization, Problem};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::families::{build_mesh, level_seed};

pub const RESULTS_HEADER: &str =
    "h,ndof,err_u_h1,err_u_l2,err_u_linf,err_p_l2,div_inf,rate_u_h1,rate_u_l2,rate_u_linf,rate_p_l2";

/// Error columns that get a rate, in CSV order.
pub const RATE_COLUMNS: [&str; 4] = ["u_h1", "u_l2", "u_linf", "p_l2"];

#[derive(Debug, Clone)]
pub struct LevelResult {
    pub n: usize,
    pub seed: u64,
    /// Nominal mesh size `1/n`.
    pub h: f64,
    pub num_cells: usize,
    /// `None` when the level failed before a solution existed.
    pub errors: Option<ErrorReport>,
    pub converged: bool,
    pub picard_iterations: usize,
    pub newton_iterations: usize,
    pub final_residual: f64,
    pub wall_time: Duration,
    pub failure: Option<String>,
}

impl LevelResult {
    fn error_column(&self, name: &str) -> f64 {
        let Some(e) = &self.errors else { return f64::NAN };
        match name {
            "u_h1" => e.u_h1,
            "u_l2" => e.u_l2,
            "u_linf" => e.u_linf,
            "p_l2" => e.p_l2,
            _ => unreachable!("unknown error column {name}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub levels: Vec<LevelResult>,
}

impl RunOutcome {
    pub fn h(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.levels.iter().map(|l| l.error_column(name)).collect()
    }

    /// Rate from the previous level into each level; `None` for the first
    /// level and where an error is not positive.
    pub fn rates(&self, name: &str) -> Vec<Option<f64>> {
        if self.levels.is_empty() {
            return Vec::new();
        }
        let mut r = vec![None];
        r.extend(eoc(&self.h(), &self.column(name)));
        r
    }

    pub fn all_converged(&self) -> bool {
        self.levels.iter().all(|l| l.converged)
    }

    pub fn results_csv(&self) -> String {
        let rates: Vec<Vec<Option<f64>>> = RATE_COLUMNS.iter().map(|c| self.rates(c)).collect();
        let mut s = String::from(RESULTS_HEADER);
        s.push('\n');
        for (i, l) in self.levels.iter().enumerate() {
            let e = l.errors.unwrap_or(ErrorReport {
                u_h1: f64::NAN,
                u_l2: f64::NAN,
                u_linf: f64::NAN,
                p_l2: f64::NAN,
                div_inf: f64::NAN,
                h: f64::NAN,
                ndof: 0,
            });
            let _ = write!(
                s,
                "{:e},{},{:e},{:e},{:e},{:e},{:e}",
                l.h, e.ndof, e.u_h1, e.u_l2, e.u_linf, e.p_l2, e.div_inf
            );
            for r in &rates {
                match r[i] {
                    Some(v) => {
                        let _ = write!(s, ",{v:.4}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn solver_csv(&self) -> String {
        let mut s = String::from("n,cells,converged,picard,newton,final_residual,wall_seconds,failure\n");
        for l in &self.levels {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:e},{:.3},{}",
                l.n,
                l.num_cells,
                l.converged,
                l.picard_iterations,
                l.newton_iterations,
                l.final_residual,
                l.wall_time.as_secs_f64(),
                l.failure.as_deref().unwrap_or("").replace(',', ";")
            );
        }
        s
    }

    pub fn seeds_text(&self) -> String {
        let mut s = format!("# base seed {}, family {}\nn,seed\n", self.config.seed, self.config.family);
        for l in &self.levels {
            let _ = writeln!(s, "{},{}", l.n, l.seed);
        }
        s
    }

    /// Human-readable rate table.
    pub fn rate_summary(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "case {}  k = {}  nu = {:e}  mode = {}  family = {}\n",
            c.case.name, c.k, c.nu, c.solver.mode, c.family
        );
        let _ = write!(s, "{:>10} {:>8}", "h", "ndof");
        for name in RATE_COLUMNS {
            let _ = write!(s, " {:>12} {:>6}", format!("err_{name}"), "rate");
        }
        let _ = writeln!(s, " {:>10}", "div_inf");
        let rates: Vec<_> = RATE_COLUMNS.iter().map(|c| self.rates(c)).collect();
        for (i, l) in self.levels.iter().enumerate() {
            let ndof = l.errors.map_or(0, |e| e.ndof);
            let _ = write!(s, "{:>10.4e} {:>8}", l.h, ndof);
            for (j, name) in RATE_COLUMNS.iter().enumerate() {
                let r = rates[j][i].map_or("-".to_string(), |r| format!("{r:.2}"));
                let _ = write!(s, " {:>12.4e} {:>6}", l.error_column(name), r);
            }
            let div = l.errors.map_or(f64::NAN, |e| e.div_inf);
            let _ = write!(s, " {div:>10.2e}");
            if !l.converged {
                s.push_str("  (not converged)");
            }
            s.push('\n');
        }
        s
    }

    pub fn plot_data(&self) -> String {
        let mut s = String::from("# h err_u_h1 err_u_l2 err_u_linf err_p_l2\n");
        for l in &self.levels {
            let _ = write!(s, "{:e}", l.h);
            for name in RATE_COLUMNS {
                let _ = write!(s, " {:e}", l.error_column(name));
            }
            s.push('\n');
        }
        s
    }

    pub fn plot_script(&self) -> String {
        format!(
            "set terminal pngcairo size 800,600\n\
             set output 'convergence.png'\n\
             set title '{} (k = {}, nu = {:e})'\n\
             set logscale xy\n\
             set xlabel 'h'\n\
             set ylabel 'error'\n\
             set key bottom right\n\
             plot 'plot.dat' using 1:2 with linespoints title 'u H1', \\\n\
             \x20    'plot.dat' using 1:3 with linespoints title 'u L2', \\\n\
             \x20    'plot.dat' using 1:4 with linespoints title 'u Linf', \\\n\
             \x20    'plot.dat' using 1:5 with linespoints title 'p L2'\n",
            self.config.case.name, self.config.k, self.config.nu
        )
    }
}

/// Solves one level; errors after a solution exists are reported, not
/// propagated.
pub fn run_level(cfg: &RunConfig, n: usize, out_dir: Option<&Path>) -> Result<LevelResult, CliError> {
    let case = &cfg.case;
    let seed = level_seed(cfg.seed, n);
    let mesh = build_mesh(cfg.family, case.domain, n, cfg.distortion, seed)?;
    let num_cells = mesh.num_cells();
    let disc = Discretization::new(mesh, cfg.k, cfg.degrees)?;
    let nu = cfg.nu;
    let f = move |x: &Point2<f64>| (case.f)(x, nu);
    let prob = Problem::new(&disc, nu, &f, &case.u)?;
    let solved = if case.navier_stokes {
        solve_navier_stokes(&disc, &prob, &cfg.solver)
    } else {
        solve_stokes(&disc, &prob)
    };
    let mut result = LevelResult {
        n,
        seed,
        h: 1.0 / n as f64,
        num_cells,
        errors: None,
        converged: false,
        picard_iterations: 0,
        newton_iterations: 0,
        final_residual: f64::NAN,
        wall_time: Duration::ZERO,
        failure: None,
    };
    let (state, report) = match solved {
        Ok(s) => s,
        Err(e) => {
            log::warn!("{} n = {n}: {e}", case.name);
            result.failure = Some(e.to_string());
            return Ok(result);
        }
    };
    result.converged = report.converged;
    result.picard_iterations = report.picard_iterations;
    result.newton_iterations = report.newton_iterations;
    result.final_residual = report.final_residual;
    result.wall_time = report.wall_time;
    if !report.converged {
        log::warn!("{} n = {n}: nonlinear solver did not converge", case.name);
        result.failure = Some("nonlinear solver did not converge".into());
    }
    let exact = ExactFields { u: &case.u, grad: &case.grad, p: &case.p };
    result.errors = Some(compute_errors(&disc, &state, &exact));
    if let Some(dir) = out_dir {
        if let Some(fmt) = cfg.export_fields {
            let ext = match fmt {
                FieldFormat::Vtk => "vtk",
                FieldFormat::Csv => "csv",
            };
            export_fields(&disc, &state, dir.join(format!("fields_n{n}.{ext}")), fmt)?;
        }
        if cfg.export_matrix {
            assemble_stokes(&disc, &prob).matrix.write_coo(dir.join(format!("stokes_n{n}.coo")))?;
        }
    }
    log::info!("{} n = {n}: {:?}", case.name, result.errors);
    Ok(result)
}

fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs every level of the config. With an output directory, writes
/// `config.txt`, `seeds.txt`, `results.csv`, `solver.csv`, `rates.txt`,
/// `plot.dat` and `plot.gp`.
pub fn run_case(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("config.txt"), &cfg.to_text())?;
    }
    let mut outcome = RunOutcome { config: cfg.clone(), levels: Vec::new() };
    for &n in &cfg.levels {
        outcome.levels.push(run_level(cfg, n, out_dir)?);
        if let Some(dir) = out_dir {
            write_atomic(&dir.join("results.csv"), &outcome.results_csv())?;
            write_atomic(&dir.join("solver.csv"), &outcome.solver_csv())?;
        }
    }
    if let Some(dir) = out_dir {
        write_atomic(&dir.join("seeds.txt"), &outcome.seeds_text())?;
        write_atomic(&dir.join("rates.txt"), &outcome.rate_summary())?;
        write_atomic(&dir.join("plot.dat"), &outcome.plot_data())?;
        write_atomic(&dir.join("plot.gp"), &outcome.plot_script())?;
    }
    Ok(outcome)
}
