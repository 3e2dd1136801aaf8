//! Phase-transition experiments.
//!
//! A grid run sweeps compression ratio `delta = m / d` and relative cosparsity
//! `rho = (d - l) / m`. Every cell draws `trials_per_cell` independent
//! instances (fresh cosparse signal, fresh measurement matrix) against one
//! shared analysis operator and runs every configured solver on each. A trial
//! counts as a success when the relative error `||x^ - x|| / ||x||` is below
//! `success_tol`.
//!
//! Every trial has its own seed derived from the master seed and the cell
//! coordinates, and per-trial records are merged in a fixed order, so the
//! resulting [`PhaseGrid`] does not depend on how trials were scheduled. Only
//! the wall-clock fields vary between runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abs;
use crate::error::{Error, Result};
use crate::model::{self, AnalysisOperator, RngSeed};
use crate::solvers::{SolverConfig, SolverKind, SolverStatus};

/// Relative error below which a recovery counts as perfect.
pub const DEFAULT_SUCCESS_TOL: f64 = 1e-6;

const OPERATOR_STREAM: u64 = 0x6f70_6572;
const TRIAL_STREAM: u64 = 0x7472_6961;

/// The 19 grid coordinates `0.05, 0.10, ..., 0.95`.
pub fn default_axis() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// The solvers compared in a standard run: OMP-k, OMP-eps, TST and BP through
/// the augmented system, and GAP on the analysis problem.
pub fn default_solvers() -> Vec<SolverConfig> {
    [
        SolverKind::OmpK,
        SolverKind::OmpEps,
        SolverKind::Tst,
        SolverKind::Bp,
        SolverKind::GapBaseline,
    ]
    .into_iter()
    .map(SolverConfig::new)
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub d: usize,
    pub n_rows: usize,
    pub delta_values: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub trials_per_cell: usize,
    /// Solvers to run. A missing `k` is filled per instance: `N - l` for
    /// OMP-k, TST and the synthesis oracle, `l` for GAP.
    pub solvers: Vec<SolverConfig>,
    pub success_tol: f64,
    pub master_seed: RngSeed,
    /// Draw a new operator for every cell instead of one for the whole grid.
    pub operator_per_cell: bool,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            d: 200,
            n_rows: 240,
            delta_values: default_axis(),
            rho_values: default_axis(),
            trials_per_cell: 100,
            solvers: default_solvers(),
            success_tol: DEFAULT_SUCCESS_TOL,
            master_seed: RngSeed(0),
            operator_per_cell: false,
            jobs: None,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n_rows < self.d {
            return Err(Error::InvalidParameter(format!(
                "grid needs N >= d >= 1, got N = {}, d = {}",
                self.n_rows, self.d
            )));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidParameter("no solvers configured".into()));
        }
        if !(self.success_tol > 0.0) {
            return Err(Error::InvalidParameter("success tolerance must be positive".into()));
        }
        for &delta in &self.delta_values {
            for &rho in &self.rho_values {
                model::grid_dimensions(delta, rho, self.d)?;
            }
        }
        Ok(())
    }

    pub fn instance_count(&self) -> usize {
        self.delta_values.len() * self.rho_values.len() * self.trials_per_cell
    }

    pub fn operator_seed(&self, delta: f64, rho: f64) -> RngSeed {
        let base = self.master_seed.derive(OPERATOR_STREAM);
        if self.operator_per_cell {
            base.derive(delta.to_bits()).derive(rho.to_bits())
        } else {
            base
        }
    }

    pub fn trial_seed(&self, delta: f64, rho: f64, trial: usize) -> RngSeed {
        self.master_seed
            .derive(TRIAL_STREAM)
            .derive(delta.to_bits())
            .derive(rho.to_bits())
            .derive(trial as u64)
    }

    pub fn build_operator(&self, delta: f64, rho: f64) -> Result<AnalysisOperator> {
        model::generate_tight_frame(self.n_rows, self.d, self.operator_seed(delta, rho))
    }
}

/// One solver's result on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrial {
    pub solver: SolverKind,
    pub relative_error: f64,
    pub elapsed: Duration,
    pub success: bool,
    /// `None` when the solver returned an error; the estimate is then taken
    /// to be zero.
    pub status: Option<SolverStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub delta: f64,
    pub rho: f64,
    pub trial: usize,
    pub seed: RngSeed,
    pub m: usize,
    pub l: usize,
    pub outcomes: Vec<SolverTrial>,
    /// Instance generation failed; every solver is recorded as failed.
    pub generation_failed: bool,
}

fn configure(cfg: &SolverConfig, n_rows: usize, l: usize) -> SolverConfig {
    let mut cfg = cfg.clone();
    if cfg.k.is_none() {
        match cfg.kind {
            SolverKind::OmpK | SolverKind::Tst | SolverKind::OracleSynthesis => cfg.k = Some(n_rows - l),
            SolverKind::GapBaseline => cfg.k = Some(l),
            _ => {}
        }
    }
    cfg
}

/// Generates and solves one trial. Never fails: generation or solver errors
/// are recorded as failed outcomes.
pub fn run_trial(
    spec: &GridSpec,
    op: &AnalysisOperator,
    delta: f64,
    rho: f64,
    trial: usize,
) -> CellResult {
    let seed = spec.trial_seed(delta, rho, trial);
    let (m, l) = model::grid_dimensions(delta, rho, op.dim()).unwrap_or((0, 0));
    let inst = match model::make_instance(op, delta, rho, seed) {
        Ok(inst) => inst,
        Err(_) => {
            let outcomes = spec
                .solvers
                .iter()
                .map(|cfg| SolverTrial {
                    solver: cfg.kind,
                    relative_error: 1.0,
                    elapsed: Duration::ZERO,
                    success: false,
                    status: None,
                })
                .collect();
            return CellResult {
                delta,
                rho,
                trial,
                seed,
                m,
                l,
                outcomes,
                generation_failed: true,
            };
        }
    };
    let x_norm = inst.x.norm();
    let outcomes = spec
        .solvers
        .iter()
        .map(|cfg| {
            let cfg = configure(cfg, op.n_rows(), inst.l());
            match abs::recover(op, &inst.m_mat, &inst.y, &cfg) {
                Ok(report) => {
                    let relative_error = (&report.x_hat - &inst.x).norm() / x_norm;
                    SolverTrial {
                        solver: cfg.kind,
                        relative_error,
                        elapsed: report.elapsed,
                        success: relative_error < spec.success_tol,
                        status: Some(report.status),
                    }
                }
                Err(_) => SolverTrial {
                    solver: cfg.kind,
                    relative_error: 1.0,
                    elapsed: Duration::ZERO,
                    success: false,
                    status: None,
                },
            }
        })
        .collect();
    CellResult {
        delta,
        rho,
        trial,
        seed,
        m: inst.m(),
        l: inst.l(),
        outcomes,
        generation_failed: false,
    }
}

/// All trials of one `(delta, rho)` cell, run sequentially.
pub fn run_cell(spec: &GridSpec, op: &AnalysisOperator, delta: f64, rho: f64) -> Result<Vec<CellResult>> {
    model::grid_dimensions(delta, rho, op.dim())?;
    Ok((0..spec.trials_per_cell)
        .map(|trial| run_trial(spec, op, delta, rho, trial))
        .collect())
}

/// Aggregated statistics of one solver on one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub solver: SolverKind,
    pub delta: f64,
    pub rho: f64,
    pub successes: usize,
    pub trials: usize,
    pub total_time_s: f64,
    pub mean_rel_err: f64,
}

impl GridCell {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Success and timing table over `(solver, delta, rho)`, kept sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseGrid {
    cells: Vec<GridCell>,
}

fn cell_order(a: &GridCell, b: &GridCell) -> std::cmp::Ordering {
    a.solver
        .cmp(&b.solver)
        .then(a.delta.total_cmp(&b.delta))
        .then(a.rho.total_cmp(&b.rho))
}

impl PhaseGrid {
    pub fn from_cells(mut cells: Vec<GridCell>) -> Self {
        cells.sort_by(cell_order);
        Self { cells }
    }

    /// Aggregates per-trial records. Records are summed in the order given.
    pub fn from_results(solvers: &[SolverKind], results: &[CellResult]) -> Self {
        let mut cells: Vec<GridCell> = Vec::new();
        for r in results {
            for o in &r.outcomes {
                let pos = cells
                    .iter()
                    .position(|c| c.solver == o.solver && c.delta == r.delta && c.rho == r.rho);
                let cell = match pos {
                    Some(p) => &mut cells[p],
                    None => {
                        cells.push(GridCell {
                            solver: o.solver,
                            delta: r.delta,
                            rho: r.rho,
                            successes: 0,
                            trials: 0,
                            total_time_s: 0.0,
                            mean_rel_err: 0.0,
                        });
                        cells.last_mut().expect("just pushed")
                    }
                };
                cell.trials += 1;
                cell.successes += o.success as usize;
                cell.total_time_s += o.elapsed.as_secs_f64();
                // Running sum; divided below.
                cell.mean_rel_err += o.relative_error;
            }
        }
        for c in &mut cells {
            if c.trials > 0 {
                c.mean_rel_err /= c.trials as f64;
            }
        }
        cells.retain(|c| solvers.contains(&c.solver));
        Self::from_cells(cells)
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn solvers(&self) -> Vec<SolverKind> {
        let mut s: Vec<SolverKind> = self.cells.iter().map(|c| c.solver).collect();
        s.dedup();
        s
    }

    fn axis(&self, f: impl Fn(&GridCell) -> f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.cells.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.axis(|c| c.delta)
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.axis(|c| c.rho)
    }

    pub fn cell(&self, solver: SolverKind, delta: f64, rho: f64) -> Option<&GridCell> {
        self.cells
            .iter()
            .find(|c| c.solver == solver && c.delta == delta && c.rho == rho)
    }

    pub fn success_rate(&self, solver: SolverKind, delta: f64, rho: f64) -> Option<f64> {
        self.cell(solver, delta, rho).map(GridCell::success_rate)
    }

    /// Unweighted mean of the per-cell success rates of one solver.
    pub fn mean_success_rate(&self, solver: SolverKind) -> Option<f64> {
        let rates: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.solver == solver)
            .map(GridCell::success_rate)
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    pub fn total_time(&self, solver: SolverKind) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.solver == solver)
            .map(|c| c.total_time_s)
            .sum()
    }

    /// Copy with every timing field zeroed, for byte-reproducible exports.
    pub fn without_timing(&self) -> Self {
        let mut g = self.clone();
        for c in &mut g.cells {
            c.total_time_s = 0.0;
        }
        g
    }
}

/// Runs every cell of the grid, trials in parallel.
pub fn run_grid(spec: &GridSpec) -> Result<PhaseGrid> {
    run_grid_with_progress(spec, &|_, _| {})
}

/// As [`run_grid`], calling `progress(done, total)` after every trial.
pub fn run_grid_with_progress(
    spec: &GridSpec,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<PhaseGrid> {
    spec.validate()?;
    let cells: Vec<(f64, f64)> = spec
        .delta_values
        .iter()
        .flat_map(|&d| spec.rho_values.iter().map(move |&r| (d, r)))
        .collect();
    let operators: Vec<AnalysisOperator> = if spec.operator_per_cell {
        cells
            .iter()
            .map(|&(d, r)| spec.build_operator(d, r))
            .collect::<Result<_>>()?
    } else {
        vec![spec.build_operator(0.0, 0.0)?]
    };
    let work: Vec<(usize, f64, f64, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &(d, r))| (0..spec.trials_per_cell).map(move |t| (ci, d, r, t)))
        .collect();
    let total = work.len();
    let done = AtomicUsize::new(0);
    let run = || -> Vec<CellResult> {
        work.par_iter()
            .map(|&(ci, d, r, t)| {
                let op = &operators[if spec.operator_per_cell { ci } else { 0 }];
                let result = run_trial(spec, op, d, r, t);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                result
            })
            .collect()
    };
    let results = match spec.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let kinds: Vec<SolverKind> = spec.solvers.iter().map(|c| c.kind).collect();
    let mut grid = PhaseGrid::from_results(&kinds, &results);
    // Cells with zero trials still appear in the table.
    for &(d, r) in &cells {
        for &k in &kinds {
            if grid.cell(k, d, r).is_none() {
                grid.cells.push(GridCell {
                    solver: k,
                    delta: d,
                    rho: r,
                    successes: 0,
                    trials: 0,
                    total_time_s: 0.0,
                    mean_rel_err: 0.0,
                });
            }
        }
    }
    Ok(PhaseGrid::from_cells(grid.cells))
}

pub const CSV_HEADER: &str = "solver,delta,rho,successes,trials,success_rate,total_time_s,mean_rel_err";

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    solver: String,
    delta: f64,
    rho: f64,
    successes: usize,
    trials: usize,
    success_rate: f64,
    total_time_s: f64,
    mean_rel_err: f64,
}

/// CSV text of the grid, one row per `(solver, delta, rho)`. Floats use the
/// shortest representation that parses back to the same value.
pub fn grid_to_csv(grid: &PhaseGrid) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.solver,
            c.delta,
            c.rho,
            c.successes,
            c.trials,
            c.success_rate(),
            c.total_time_s,
            c.mean_rel_err
        );
    }
    out
}

pub fn export_csv(grid: &PhaseGrid, path: &Path) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("refusing to export an empty grid".into()));
    }
    fs::write(path, grid_to_csv(grid)).map_err(|e| Error::io(path, e))
}

pub fn grid_from_csv(text: &str) -> std::result::Result<PhaseGrid, String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err("unexpected CSV header".into());
    }
    let mut cells = Vec::new();
    for row in reader.deserialize::<CsvRow>() {
        let row = row.map_err(|e| e.to_string())?;
        let solver = row.solver.parse::<SolverKind>().map_err(|e| e.to_string())?;
        cells.push(GridCell {
            solver,
            delta: row.delta,
            rho: row.rho,
            successes: row.successes,
            trials: row.trials,
            total_time_s: row.total_time_s,
            mean_rel_err: row.mean_rel_err,
        });
    }
    Ok(PhaseGrid::from_cells(cells))
}

pub fn import_csv(path: &Path) -> Result<PhaseGrid> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    grid_from_csv(&text).map_err(|reason| Error::format(path, reason))
}

/// Plain (P2) graymap of one solver's success rates: `rho` increases down the
/// rows, `delta` to the right, and each pixel is `round(255 * rate)`, so
/// white is 100% recovery and black 0%. Missing cells are black.
pub fn success_map_pgm(grid: &PhaseGrid, solver: SolverKind) -> Result<String> {
    if !grid.solvers().contains(&solver) {
        return Err(Error::InvalidParameter(format!("solver {solver} is not in the grid")));
    }
    let deltas = grid.deltas();
    let rhos = grid.rhos();
    let mut out = format!("P2\n# {solver} success rate\n{} {}\n255\n", deltas.len(), rhos.len());
    for &rho in &rhos {
        let row: Vec<String> = deltas
            .iter()
            .map(|&delta| {
                let rate = grid.success_rate(solver, delta, rho).unwrap_or(0.0);
                ((255.0 * rate).round() as u8).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn export_success_map(grid: &PhaseGrid, solver: SolverKind, path: &Path) -> Result<()> {
    let text = success_map_pgm(grid, solver)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Total wall-clock time per solver over the whole grid, one column each.
pub fn timing_table(grid: &PhaseGrid) -> String {
    let solvers = grid.solvers();
    let width = 12;
    let mut out = String::from("Total running times (seconds)\n");
    for s in &solvers {
        let _ = write!(out, "{:>width$}", s.name());
    }
    out.push('\n');
    for s in &solvers {
        let _ = write!(out, "{:>width$.3}", grid.total_time(*s));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> GridSpec {
        GridSpec {
            d: 12,
            n_rows: 15,
            delta_values: vec![0.5, 1.0],
            rho_values: vec![0.25, 0.5],
            trials_per_cell: 3,
            solvers: default_solvers(),
            master_seed: RngSeed(7),
            ..GridSpec::default()
        }
    }

    #[test]
    fn default_axis_values() {
        let axis = default_axis();
        assert_eq!(axis.len(), 19);
        assert_eq!(axis[0], 0.05);
        assert_eq!(axis[2], 0.15);
        assert_eq!(axis[18], 0.95);
        assert_eq!(GridSpec::default().instance_count(), 36_100);
    }

    #[test]
    fn empty_cell() {
        let spec = GridSpec {
            trials_per_cell: 0,
            ..small_spec()
        };
        let op = spec.build_operator(0.0, 0.0).unwrap();
        assert!(run_cell(&spec, &op, 0.5, 0.5).unwrap().is_empty());
    }

    #[test]
    fn single_cell_grid() {
        let spec = GridSpec {
            delta_values: vec![0.5],
            rho_values: vec![0.5],
            trials_per_cell: 1,
            ..small_spec()
        };
        let grid = run_grid(&spec).unwrap();
        assert_eq!(grid.cells().len(), 5);
        assert_eq!(grid.deltas(), vec![0.5]);
        let csv = grid_to_csv(&grid);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with(CSV_HEADER));
    }

    #[test]
    fn grid_counts_and_rates() {
        let spec = small_spec();
        let grid = run_grid(&spec).unwrap();
        assert_eq!(grid.cells().len(), 4 * 5);
        for c in grid.cells() {
            assert_eq!(c.trials, 3);
            assert!(c.successes <= c.trials);
            assert!((0.0..=1.0).contains(&c.success_rate()));
            assert!(c.mean_rel_err >= 0.0);
        }
        // Easy corner: all measurements, few free dimensions.
        assert_eq!(grid.success_rate(SolverKind::Bp, 1.0, 0.25), Some(1.0));
        assert_eq!(grid.success_rate(SolverKind::OmpEps, 1.0, 0.25), Some(1.0));
    }

    #[test]
    fn scheduling_does_not_change_results() {
        let spec = small_spec();
        let a = run_grid(&GridSpec { jobs: Some(1), ..spec.clone() }).unwrap();
        let b = run_grid(&GridSpec { jobs: Some(3), ..spec }).unwrap();
        assert_eq!(grid_to_csv(&a.without_timing()), grid_to_csv(&b.without_timing()));
    }

    #[test]
    fn csv_round_trip() {
        let grid = run_grid(&small_spec()).unwrap();
        let back = grid_from_csv(&grid_to_csv(&grid)).unwrap();
        assert_eq!(back, grid);
    }

    #[test]
    fn tighter_tolerance_never_adds_successes() {
        let spec = small_spec();
        let op = spec.build_operator(0.0, 0.0).unwrap();
        let loose = run_cell(&GridSpec { success_tol: 1e-3, ..spec.clone() }, &op, 0.5, 0.5).unwrap();
        let tight = run_cell(&GridSpec { success_tol: 1e-12, ..spec }, &op, 0.5, 0.5).unwrap();
        for (l, t) in loose.iter().zip(&tight) {
            for (lo, to) in l.outcomes.iter().zip(&t.outcomes) {
                assert_eq!(lo.relative_error, to.relative_error);
                assert!(lo.success || !to.success);
            }
        }
    }

    fn uniform_grid(rate_successes: usize) -> PhaseGrid {
        let mut cells = Vec::new();
        for &delta in &[0.1, 0.2, 0.3] {
            for &rho in &[0.1, 0.2] {
                cells.push(GridCell {
                    solver: SolverKind::Bp,
                    delta,
                    rho,
                    successes: rate_successes,
                    trials: 4,
                    total_time_s: 0.5,
                    mean_rel_err: 0.0,
                });
            }
        }
        PhaseGrid::from_cells(cells)
    }

    #[test]
    fn pgm_extremes() {
        let white = success_map_pgm(&uniform_grid(4), SolverKind::Bp).unwrap();
        let lines: Vec<&str> = white.lines().collect();
        assert_eq!(lines[0], "P2");
        assert_eq!(lines[2], "3 2");
        assert_eq!(lines[3], "255");
        assert_eq!(lines[4], "255 255 255");
        assert_eq!(lines.len(), 6);
        let black = success_map_pgm(&uniform_grid(0), SolverKind::Bp).unwrap();
        assert!(black.lines().skip(4).all(|l| l == "0 0 0"));
        assert!(success_map_pgm(&uniform_grid(0), SolverKind::Tst).is_err());
    }

    #[test]
    fn pgm_orientation() {
        let mut cells = uniform_grid(0).cells().to_vec();
        for c in &mut cells {
            if c.delta == 0.3 && c.rho == 0.2 {
                c.successes = 2;
            }
        }
        let pgm = success_map_pgm(&PhaseGrid::from_cells(cells), SolverKind::Bp).unwrap();
        // Bottom row is the largest rho, rightmost column the largest delta.
        assert_eq!(pgm.lines().last().unwrap(), "0 0 128");
    }

    #[test]
    fn timing_table_shape() {
        let table = timing_table(&uniform_grid(1));
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].trim(), "bp");
        assert_eq!(lines[2].trim(), "3.000");
    }

    #[test]
    fn export_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(export_csv(&PhaseGrid::default(), &dir.path().join("a.csv")).is_err());
        let err = export_csv(&uniform_grid(1), Path::new("/nonexistent/dir/a.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn invalid_specs() {
        let bad = GridSpec {
            delta_values: vec![1.5],
            ..small_spec()
        };
        assert!(run_grid(&bad).is_err());
        let bad = GridSpec {
            n_rows: 5,
            ..small_spec()
        };
        assert!(bad.validate().is_err());
    }
}
