//! Benchmark harness: times each method over a size range on reproducible
//! random instances and reports the simulated MAC count alongside the
//! modeled optical wall time.

use std::time::Instant;

use anyhow::{bail, Result};
use dgp1_core::optics::{self, OpticalConfig};
use dgp1_core::{bp, instance, mvm, ENUMERATION_CAP};
use serde::Serialize;

use crate::Method;

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub n_lo: usize,
    pub n_hi: usize,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub seed: u64,
    pub dmax: f64,
    pub threads: usize,
}

/// One timed repetition. `mean_wall_ns` and `min_wall_ns` aggregate over all
/// repeats of the same `(n, method)` cell, so each row carries both its own
/// timing and the cell summary.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub method: String,
    pub repeat: usize,
    pub wall_ns: u64,
    pub mean_wall_ns: u64,
    pub min_wall_ns: u64,
    /// Simulated multiply-accumulate count of the full scan, `2^n * n`.
    pub mac_count: u64,
    /// Wall time the optical device model predicts for the same MAC count.
    pub modeled_optical_seconds: f64,
}

pub const CSV_HEADER: &str =
    "n,method,repeat,wall_ns,mean_wall_ns,min_wall_ns,mac_count,modeled_optical_seconds";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.method,
            r.repeat,
            r.wall_ns,
            r.mean_wall_ns,
            r.min_wall_ns,
            r.mac_count,
            r.modeled_optical_seconds
        ));
    }
    out
}

fn time_one(method: Method, inst: &instance::ParadoxicalInstance, spec: &BenchSpec) -> Result<u64> {
    let aug = inst.augment();
    let started = Instant::now();
    match method {
        Method::Bp => {
            let sols = bp::solve_bp(&aug, 0.0)?;
            std::hint::black_box(sols);
        }
        Method::Mvm => {
            let rows = mvm::feasible_rows_threaded(aug.y(), 0.0, spec.threads)?;
            std::hint::black_box(rows);
        }
        Method::Optics => {
            let run = optics::solve_optical(inst, &OpticalConfig::default(), spec.seed)?;
            std::hint::black_box(run);
        }
    }
    Ok(started.elapsed().as_nanos() as u64)
}

/// Runs the whole sweep. Instances are drawn by `generate_random` with a
/// per-size seed derived from the base seed, so a sweep is reproducible and
/// every method times the same instance at a given size.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    if spec.n_lo < 2 {
        bail!("benchmark sizes start at n = 2, got {}", spec.n_lo);
    }
    if spec.n_hi > ENUMERATION_CAP {
        bail!("size {} exceeds the enumeration cap {}", spec.n_hi, ENUMERATION_CAP);
    }
    if spec.repeats == 0 {
        bail!("--repeats must be positive");
    }
    if !(spec.dmax > 0.0 && spec.dmax.is_finite()) {
        bail!("--dmax must be a positive real, got {}", spec.dmax);
    }
    let device = OpticalConfig::default();
    let mut rows = Vec::new();
    for n in spec.n_lo..=spec.n_hi {
        let inst = instance::generate_random(n, spec.seed.wrapping_add(n as u64), spec.dmax)?;
        let modeled = optics::modeled_run(&device, n)?;
        for &method in &spec.methods {
            let walls: Vec<u64> = (0..spec.repeats)
                .map(|_| time_one(method, &inst, spec))
                .collect::<Result<_>>()?;
            let mean = walls.iter().sum::<u64>() / walls.len() as u64;
            let min = *walls.iter().min().expect("repeats is positive");
            for (repeat, wall_ns) in walls.into_iter().enumerate() {
                rows.push(BenchRow {
                    n,
                    method: method.name().to_owned(),
                    repeat,
                    wall_ns,
                    mean_wall_ns: mean,
                    min_wall_ns: min,
                    mac_count: (1u64 << n) * n as u64,
                    modeled_optical_seconds: modeled.seconds,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> BenchSpec {
        BenchSpec {
            n_lo: 4,
            n_hi: 6,
            methods: vec![Method::Mvm],
            repeats: 3,
            seed: 0,
            dmax: 10.0,
            threads: 1,
        }
    }

    #[test]
    fn mac_counts_and_row_multiplicity() {
        let rows = run_bench(&small_spec()).unwrap();
        assert_eq!(rows.len(), 3 * 3); // three sizes, three repeats
        for r in &rows {
            assert_eq!(r.mac_count, (1u64 << r.n) * r.n as u64);
            assert!(r.min_wall_ns <= r.wall_ns);
            assert!(r.min_wall_ns <= r.mean_wall_ns);
        }
        let n4: Vec<_> = rows.iter().filter(|r| r.n == 4).collect();
        assert_eq!(n4.len(), 3);
    }

    #[test]
    fn modeled_time_is_mac_count_over_throughput() {
        let rows = run_bench(&small_spec()).unwrap();
        let peak = optics::throughput(&OpticalConfig::default());
        for r in &rows {
            assert_eq!(r.modeled_optical_seconds, r.mac_count as f64 / peak);
        }
    }

    #[test]
    fn spec_guards() {
        let mut spec = small_spec();
        spec.n_hi = ENUMERATION_CAP + 1;
        assert!(run_bench(&spec).is_err());
        let mut spec = small_spec();
        spec.repeats = 0;
        assert!(run_bench(&spec).is_err());
        let mut spec = small_spec();
        spec.n_lo = 1;
        spec.n_hi = 1;
        assert!(run_bench(&spec).is_err());
    }

    #[test]
    fn csv_has_the_documented_header() {
        let rows = run_bench(&small_spec()).unwrap();
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
