//! Newton iteration with load stepping and multiplicative updates.
//!
//! Loads (and the applied magnetic field) are ramped linearly. Each load step
//! is solved by Newton's method on the reduced system; an increment that
//! rotates any node by more than `pi/2`, a singular tangent or a failure to
//! converge restores the last equilibrium and halves the load increment.

use std::time::{Duration, Instant};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DVector;

use crate::error::{Result, ShellError};
use crate::fem::assembly::{
    apply_boundary_conditions, assemble, Assembly, GlobalSystem, ShellModel, ShellState,
};
use crate::fem::sparse::SparseMatrix;

/// Rejects Newton increments rotating a node by more than this angle.
pub const MAX_INCREMENT_ANGLE: f64 = std::f64::consts::FRAC_PI_2;

/// Systems up to this size are solved densely.
const DENSE_LIMIT: usize = 240;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Absolute bound on the residual norm.
    pub tol_residual: f64,
    /// Bound relative to `max(|f_ext + f_mag|, |f_int|)` on the free DOFs.
    pub tol_relative: f64,
    /// Residual evaluations allowed per load increment.
    pub max_iters: usize,
    pub load_steps: usize,
    /// Scale applied to every Newton increment, in `(0, 1]`.
    pub damping: f64,
    /// How many times a load increment may be halved.
    pub max_halvings: usize,
    /// Echo `step iter residual` lines to standard output.
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol_residual: 1e-12,
            tol_relative: 1e-8,
            max_iters: 50,
            load_steps: 20,
            damping: 1.0,
            max_halvings: 8,
            verbose: false,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| Err(ShellError::config(key, msg));
        if !(self.tol_residual > 0.0) {
            return bad("solver.tol_residual", "must be positive");
        }
        if !(self.tol_relative > 0.0) {
            return bad("solver.tol_relative", "must be positive");
        }
        if self.max_iters == 0 {
            return bad("solver.max_iters", "must be at least 1");
        }
        if self.load_steps == 0 {
            return bad("solver.load_steps", "must be at least 1");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("solver.damping", "must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub load_factor: f64,
    /// Residual evaluations of the step, rejected attempts included.
    pub iterations: usize,
    /// Residual norms of the final sub-increment.
    pub residuals: Vec<f64>,
    pub substeps: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub steps: Vec<StepReport>,
    pub converged: bool,
    pub wall_time: Duration,
    /// `step iter residual` lines in order of evaluation.
    pub log: Vec<String>,
}

impl SolveReport {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }
}

/// Passed to the observer after every converged load step.
pub struct StepInfo<'a> {
    pub report: &'a StepReport,
    pub assembly: &'a Assembly,
}

fn condition_estimate(a: &SparseMatrix) -> f64 {
    if a.nrows > 2000 {
        return f64::INFINITY;
    }
    let sv = a.to_dense().singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

/// Solves `A x = b` by LU with partial pivoting (dense for small systems,
/// sparse otherwise) and verifies the normwise backward error
/// `|A x - b| / (|A| |x| + |b|)`.
pub fn solve_linear(a: &SparseMatrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.nrows;
    if a.ncols != n || b.len() != n {
        return Err(ShellError::Domain(format!(
            "linear system shape {}x{} with right-hand side {}",
            a.nrows,
            a.ncols,
            b.len()
        )));
    }
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(DVector::zeros(n));
    }
    let singular = |message: String| ShellError::Singular {
        condition: condition_estimate(a),
        message,
    };
    // A few rounds of iterative refinement recover the digits lost to the
    // membrane/bending stiffness contrast of thin shells.
    let refine = |solve: &dyn Fn(&DVector<f64>) -> Option<DVector<f64>>| -> Result<DVector<f64>> {
        let mut x = solve(b).ok_or_else(|| singular("zero pivot in LU".into()))?;
        for _ in 0..3 {
            let r = b - a.matvec(&x);
            if r.norm() <= 1e-14 * bnorm {
                break;
            }
            match solve(&r) {
                Some(dx) => x += dx,
                None => break,
            }
        }
        Ok(x)
    };
    let x = if n <= DENSE_LIMIT {
        let lu = a.to_dense().lu();
        refine(&|rhs| lu.solve(rhs))?
    } else {
        let triplets: Vec<Triplet<usize, usize, f64>> = a
            .triplets()
            .map(|(i, j, v)| Triplet::new(i, j, v))
            .collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| ShellError::Domain(format!("sparse matrix construction failed: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|e| singular(format!("sparse LU failed: {e:?}")))?;
        refine(&|rhs| {
            let col = Col::<f64>::from_fn(n, |i| rhs[i]);
            let sol = lu.solve(&col);
            Some(DVector::from_fn(n, |i, _| sol[i]))
        })?
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(singular("non-finite solution".into()));
    }
    let backward = (a.matvec(&x) - b).norm() / (a.frobenius_norm() * x.norm() + bnorm);
    if !(backward < 1e-10) {
        return Err(singular(format!(
            "linear backward error {backward:.3e} exceeds 1e-10"
        )));
    }
    Ok(x)
}

/// Solves the reduced system and expands the increment to all DOFs.
pub fn newton_step(system: &GlobalSystem, num_dofs: usize) -> Result<DVector<f64>> {
    let x = solve_linear(&system.a, &system.b)?;
    Ok(system.expand(&x, num_dofs))
}

/// `g <- g exp(eta)` on nodes and evaluation points. Fails without touching
/// the state if a rotation increment exceeds [`MAX_INCREMENT_ANGLE`].
pub fn update_configuration(
    model: &ShellModel,
    state: &mut ShellState,
    eta: &DVector<f64>,
) -> Result<()> {
    let angle = ShellState::max_increment_angle(eta);
    if !(angle <= MAX_INCREMENT_ANGLE) {
        return Err(ShellError::Domain(format!(
            "rotation increment {angle:.3} exceeds pi/2"
        )));
    }
    state.apply_increment(model, eta);
    Ok(())
}

struct Increment {
    residuals: Vec<f64>,
    assembly: Assembly,
}

fn free_norm(v: &DVector<f64>, free: &[usize]) -> f64 {
    free.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
}

fn newton_at(
    model: &ShellModel,
    state: &mut ShellState,
    load_factor: f64,
    step: usize,
    settings: &SolverSettings,
    log: &mut Vec<String>,
) -> Result<Increment> {
    let n = model.num_dofs();
    let mut residuals = Vec::new();
    for iter in 1..=settings.max_iters {
        let asm = assemble(model, state, load_factor, true);
        let system = apply_boundary_conditions(&asm, &model.mesh)?;
        let r = system.b.norm();
        residuals.push(r);
        let line = format!("{step} {iter} {r:.6e}");
        if settings.verbose {
            println!("{line}");
        }
        log.push(line);
        let load = free_norm(&(&asm.f_ext + &asm.f_mag), &system.free);
        let internal = free_norm(&asm.f_int, &system.free);
        if r <= settings.tol_residual || r <= settings.tol_relative * load.max(internal) {
            return Ok(Increment {
                residuals,
                assembly: asm,
            });
        }
        if iter == settings.max_iters {
            break;
        }
        let eta = newton_step(&system, n)? * settings.damping;
        update_configuration(model, state, &eta)?;
    }
    Err(ShellError::NonConvergence {
        step,
        iterations: settings.max_iters,
        residual: *residuals.last().unwrap_or(&f64::NAN),
        history: residuals,
    })
}

/// Ramps the loads of `model` from zero to full over `settings.load_steps`
/// steps, updating `state` in place. `observer` runs after every converged
/// step.
pub fn solve<F>(
    model: &ShellModel,
    state: &mut ShellState,
    settings: &SolverSettings,
    mut observer: F,
) -> Result<SolveReport>
where
    F: FnMut(&StepInfo, &ShellState),
{
    settings.validate()?;
    let start = Instant::now();
    let mut report = SolveReport::default();
    let mut current = 0.0;
    for step in 1..=settings.load_steps {
        let target = step as f64 / settings.load_steps as f64;
        let mut delta = target - current;
        let mut halvings = 0;
        let log_start = report.log.len();
        let mut substeps = 0;
        let last = loop {
            let trial = if current + delta >= target - 1e-14 {
                target
            } else {
                current + delta
            };
            let saved = state.clone();
            match newton_at(model, state, trial, step, settings, &mut report.log) {
                Ok(inc) => {
                    substeps += 1;
                    current = trial;
                    if trial == target {
                        break inc;
                    }
                }
                Err(err) => {
                    *state = saved;
                    let retry = matches!(
                        err,
                        ShellError::NonConvergence { .. }
                            | ShellError::Singular { .. }
                            | ShellError::Domain(_)
                    );
                    if !retry || halvings >= settings.max_halvings {
                        report.wall_time = start.elapsed();
                        return Err(err);
                    }
                    halvings += 1;
                    delta *= 0.5;
                }
            }
        };
        let step_report = StepReport {
            step,
            load_factor: target,
            iterations: report.log.len() - log_start,
            residuals: last.residuals,
            substeps,
        };
        observer(
            &StepInfo {
                report: &step_report,
                assembly: &last.assembly,
            },
            state,
        );
        report.steps.push(step_report);
    }
    report.converged = true;
    report.wall_time = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 2.0), (1, 1, 3.0)]);
        let x = solve_linear(&a, &DVector::zeros(2)).unwrap();
        assert_eq!(x, DVector::zeros(2));
    }

    #[test]
    fn scalar_system() {
        let a = SparseMatrix::from_triplets(1, 1, vec![(0, 0, 4.0)]);
        let x = solve_linear(&a, &DVector::from_vec(vec![2.0])).unwrap();
        assert_eq!(x[0], 0.5);
    }

    #[test]
    fn singular_system_reports_condition() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        );
        match solve_linear(&a, &DVector::from_vec(vec![1.0, 0.0])) {
            Err(ShellError::Singular { condition, .. }) => assert!(condition > 1e12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn sparse_path_matches_dense() {
        let n = DENSE_LIMIT + 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + (i % 7) as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.5));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, t);
        let b = DVector::from_fn(n, |i, _| (i as f64).sin());
        let x = solve_linear(&a, &b).unwrap();
        let dense = a.to_dense().lu().solve(&b).unwrap();
        assert!((x - dense).norm() < 1e-12 * b.norm());
    }
}
