//! Method dispatch: runs one instance through the selected solution path and
//! assembles the run report.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use dgp1_core::optics::{self, IntensityFrame, OpticalConfig};
use dgp1_core::{bp, mvm, ParadoxicalInstance};

use crate::report::{InstanceDescriptor, OpticsReport, RunReport, SolutionRecord};
use crate::Method;

/// Everything a solve run needs beyond the instance itself.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    pub eps: f64,
    pub seed: u64,
    pub threads: usize,
    pub optical: OpticalConfig,
    /// Where the instance came from, echoed into the report.
    pub source: Option<String>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Mvm,
            eps: 0.0,
            seed: 0,
            threads: 1,
            optical: OpticalConfig::default(),
            source: None,
        }
    }
}

/// Runs the instance through the selected path. `on_frame` receives every
/// detected frame when the method is optics (pass a no-op otherwise).
pub fn run_solve_frames(
    inst: &ParadoxicalInstance,
    opts: &SolveOptions,
    on_frame: impl FnMut(&IntensityFrame),
) -> Result<RunReport> {
    if !(opts.eps >= 0.0 && opts.eps.is_finite()) {
        bail!("--eps must be a nonnegative real, got {}", opts.eps);
    }
    let descriptor = InstanceDescriptor::new(inst, opts.source.clone());
    let warnings = inst.warnings();
    let aug = inst.augment();

    let report = |solutions: Vec<SolutionRecord>,
                  feasible: bool,
                  timing_ns: u64,
                  threads: usize,
                  optics: Option<OpticsReport>| RunReport {
        schema: crate::REPORT_SCHEMA,
        instance: descriptor.clone(),
        method: opts.method.name().to_owned(),
        eps: opts.eps,
        feasible,
        solution_count: solutions.len(),
        solutions,
        timing_ns,
        threads,
        warnings: warnings.clone(),
        optics,
    };

    match opts.method {
        Method::Bp => {
            let started = Instant::now();
            let realizations = bp::solve_bp(&aug, opts.eps).context("branch-and-prune failed")?;
            let timing_ns = started.elapsed().as_nanos() as u64;
            let solutions: Vec<SolutionRecord> = realizations
                .iter()
                .map(|r| {
                    let row = mvm::encode_signs(&r.signs).expect("solver emits valid signs");
                    SolutionRecord::new(row, r)
                })
                .collect();
            let feasible = !solutions.is_empty();
            Ok(report(solutions, feasible, timing_ns, 1, None))
        }
        Method::Mvm => {
            let started = Instant::now();
            let rows = mvm::feasible_rows_threaded(aug.y(), opts.eps, opts.threads)
                .context("sign-matrix scan failed")?;
            let timing_ns = started.elapsed().as_nanos() as u64;
            let solutions: Vec<SolutionRecord> = rows
                .iter()
                .map(|&i| {
                    let r = mvm::reconstruct_solution(i, &aug).expect("scan emits valid rows");
                    SolutionRecord::new(i, &r)
                })
                .collect();
            let feasible = !solutions.is_empty();
            Ok(report(solutions, feasible, timing_ns, opts.threads, None))
        }
        Method::Optics => {
            let started = Instant::now();
            let run = optics::solve_optical_frames(inst, &opts.optical, opts.seed, on_frame)
                .context("optical simulation failed")?;
            let timing_ns = started.elapsed().as_nanos() as u64;

            // Candidates re-checked exactly: quantization and noise can
            // promote near-zero rows, never silently drop true ones.
            let mut verified_rows = Vec::new();
            let mut false_positive_rows = Vec::new();
            let mut solutions = Vec::new();
            for &row in &run.candidate_rows {
                let r = mvm::reconstruct_solution(row, &aug).expect("device emits valid rows");
                if r.closure_residual() <= opts.eps {
                    verified_rows.push(row);
                    solutions.push(SolutionRecord::new(row, &r));
                } else {
                    false_positive_rows.push(row);
                }
            }

            let optics_report = OpticsReport {
                config: opts.optical.clone(),
                frames_used: run.frames_used,
                candidate_rows: run.candidate_rows.clone(),
                verified_rows,
                false_positive_rows,
                detection_threshold: run.detection_threshold,
                amplitude_error_bound: run.amplitude_error_bound,
                scale: run.scale,
                all_zero_chain: run.all_zero_chain,
                per_frame_min_intensity: run.per_frame_min_intensity.clone(),
                throughput_macs_per_second: optics::throughput(&opts.optical),
                modeled: optics::modeled_run(&opts.optical, inst.n())?,
            };
            Ok(report(solutions, run.feasible, timing_ns, 1, Some(optics_report)))
        }
    }
}

/// [`run_solve_frames`] without frame retention.
pub fn run_solve(inst: &ParadoxicalInstance, opts: &SolveOptions) -> Result<RunReport> {
    run_solve_frames(inst, opts, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_instance() -> ParadoxicalInstance {
        ParadoxicalInstance::new(4, vec![4.0, 2.0, 3.0], 1.0).unwrap()
    }

    #[test]
    fn all_three_methods_agree_on_the_reference_instance() {
        let inst = reference_instance();
        let mut reports = Vec::new();
        for method in [Method::Bp, Method::Mvm, Method::Optics] {
            let opts = SolveOptions { method, ..SolveOptions::default() };
            reports.push(run_solve(&inst, &opts).unwrap());
        }
        for report in &reports {
            assert!(report.feasible);
            assert_eq!(report.solution_count, 2);
            let rows: Vec<u64> = report.solutions.iter().map(|s| s.row).collect();
            assert_eq!(rows, vec![7, 10]);
            assert_eq!(report.solutions[0].positions, vec![0.0, -4.0, -2.0, 1.0, 0.0]);
            assert_eq!(report.solutions[1].positions, vec![0.0, 4.0, 2.0, -1.0, 0.0]);
        }
        assert!(reports[2].optics.is_some());
        let optics = reports[2].optics.as_ref().unwrap();
        assert_eq!(optics.candidate_rows, vec![7, 10]);
        assert!(optics.false_positive_rows.is_empty());
    }

    #[test]
    fn infeasible_singleton_reports_cleanly() {
        let inst = ParadoxicalInstance::new(1, vec![], 1.0).unwrap();
        let opts = SolveOptions::default();
        let report = run_solve(&inst, &opts).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.solution_count, 0);
        assert!(report.solutions.is_empty());
    }

    #[test]
    fn threaded_mvm_matches_single_thread() {
        let inst = dgp1_core::instance::generate_feasible(10, 3, 10.0).unwrap();
        let single = run_solve(&inst, &SolveOptions::default()).unwrap();
        let threaded = run_solve(
            &inst,
            &SolveOptions { threads: 4, ..SolveOptions::default() },
        )
        .unwrap();
        let rows =
            |r: &RunReport| r.solutions.iter().map(|s| s.row).collect::<Vec<_>>();
        assert_eq!(rows(&single), rows(&threaded));
    }

    #[test]
    fn negative_eps_is_rejected() {
        let inst = reference_instance();
        let opts = SolveOptions { eps: -1.0, ..SolveOptions::default() };
        assert!(run_solve(&inst, &opts).is_err());
    }

    #[test]
    fn csv_rendering_lists_solutions() {
        let inst = reference_instance();
        let report = run_solve(&inst, &SolveOptions::default()).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "row,signs,positions");
        assert_eq!(lines[1], "7,-1 1 1 -1,0 -4 -2 1 0");
        assert_eq!(lines[2], "10,1 -1 -1 1,0 4 2 -1 0");
    }
}
