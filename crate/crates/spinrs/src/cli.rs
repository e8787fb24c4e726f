//! Configuration schema, trajectory/summary serialization and the
//! simulate / check / compare commands. All file writes go through a
//! temp-file + rename so readers never observe partial output.

use crate::checks::{run_suite, CheckParams};
use crate::dynamics::{
    conserved_report, integrate, HamiltonianSpec, IntegratorConfig, Method, RSState, Trajectory,
};
use crate::error::{Error, Result};
use crate::factorization::{factorization_residual, solve, SolveOptions};
use crate::lie_typea::{CartanVector, Dimension, GroupElement, SimpleSubset};
use crate::linalg::CMat;
use crate::rmatrix::RMatrixSpec;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

type C = Complex<f64>;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum PiPrime {
    Keyword(String),
    Indices(Vec<usize>),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HamTerm {
    pub power: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub q: Vec<f64>,
    pub g_re: Vec<Vec<f64>>,
    #[serde(default)]
    pub g_im: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// "rk4", "rk45" or "factorization".
    pub method: String,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_rtol() -> f64 {
    1e-9
}
fn default_atol() -> f64 {
    1e-12
}
fn default_step() -> f64 {
    1e-3
}
fn default_max_steps() -> usize {
    1_000_000
}
fn default_kappa() -> f64 {
    0.5
}
fn default_mode() -> String {
    "hermitian".to_string()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub pi_prime: PiPrime,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub hamiltonian: Vec<HamTerm>,
    pub initial: InitialData,
    pub time: TimeSpec,
    pub solver: SolverSpec,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization")
    }

    fn validate(&self) -> Result<()> {
        if self.mode != "hermitian" && self.mode != "complex" {
            return Err(Error::Config(format!(
                "mode must be 'hermitian' or 'complex', got '{}'",
                self.mode
            )));
        }
        match &self.pi_prime {
            PiPrime::Keyword(k) if k == "full" => {}
            PiPrime::Keyword(k) => {
                return Err(Error::Config(format!(
                    "pi_prime must be \"full\" or a list of simple-root indices, got \"{k}\""
                )))
            }
            PiPrime::Indices(_) => {}
        }
        if self.time.samples < 2 {
            return Err(Error::Config("time.samples must be at least 2".into()));
        }
        if self.time.t1 <= self.time.t0 {
            return Err(Error::Config("time.t1 must exceed time.t0".into()));
        }
        match self.solver.method.as_str() {
            "rk4" | "rk45" | "factorization" => {}
            m => {
                return Err(Error::Config(format!(
                    "solver.method must be rk4, rk45 or factorization, got '{m}'"
                )))
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> Result<Dimension> {
        Dimension::new(self.n).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn subset(&self) -> Result<SimpleSubset> {
        let dim = self.dimension()?;
        match &self.pi_prime {
            PiPrime::Keyword(_) => Ok(SimpleSubset::full(dim)),
            PiPrime::Indices(ix) => SimpleSubset::new(dim, ix.iter().copied())
                .map_err(|e| Error::Config(e.to_string())),
        }
    }

    pub fn rmatrix(&self) -> Result<RMatrixSpec<f64>> {
        RMatrixSpec::new(self.dimension()?, self.subset()?, self.kappa)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec<f64>> {
        let poly: Vec<(u32, C)> = self
            .hamiltonian
            .iter()
            .map(|t| (t.power, C::new(t.re, t.im)))
            .collect();
        HamiltonianSpec::new(poly).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<RSState<f64>> {
        let dim = self.dimension()?;
        let m = dim.size();
        if self.initial.q.len() != m {
            return Err(Error::Config(format!(
                "initial.q needs {m} entries, got {}",
                self.initial.q.len()
            )));
        }
        let q = CartanVector::from_real(&self.initial.q)
            .map_err(|e| Error::Config(e.to_string()))?;
        let g_re = &self.initial.g_re;
        if g_re.len() != m || g_re.iter().any(|row| row.len() != m) {
            return Err(Error::Config(format!("initial.g_re must be {m}x{m}")));
        }
        if let Some(g_im) = &self.initial.g_im {
            if g_im.len() != m || g_im.iter().any(|row| row.len() != m) {
                return Err(Error::Config(format!("initial.g_im must be {m}x{m}")));
            }
        }
        let mat = CMat::from_fn(m, |i, j| {
            C::new(
                g_re[i][j],
                self.initial.g_im.as_ref().map_or(0.0, |g| g[i][j]),
            )
        });
        let g = GroupElement::new(mat).map_err(|e| Error::Config(e.to_string()))?;
        if self.mode == "hermitian" && !g.is_hermitian(1e-10) {
            return Err(Error::Config(
                "hermitian mode requires a Hermitian initial g".into(),
            ));
        }
        RSState::new(q, g).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn t_grid(&self) -> Vec<f64> {
        let n = self.time.samples;
        (0..n)
            .map(|k| {
                self.time.t0 + (self.time.t1 - self.time.t0) * k as f64 / (n - 1) as f64
            })
            .collect()
    }
}

/// One float at 17 significant digits.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory<f64>, complex_mode: bool) -> String {
    let m = traj.states[0].g.size();
    let n = m - 1;
    let mut header = vec!["t".to_string()];
    for i in 0..m {
        header.push(format!("q_{i}"));
    }
    for i in 0..m {
        for j in 0..m {
            header.push(format!("re_g_{i}{j}"));
            header.push(format!("im_g_{i}{j}"));
        }
    }
    for k in 1..=n {
        header.push(format!("c_{k}"));
    }
    if complex_mode {
        for k in 1..=n {
            header.push(format!("im_c_{k}"));
        }
    }
    let mut out = header.join(", ");
    out.push('\n');
    for (row, s) in traj.states.iter().enumerate() {
        let mut cols = vec![fmt(traj.times[row])];
        for z in s.q.entries() {
            cols.push(fmt(z.re));
        }
        for i in 0..m {
            for j in 0..m {
                cols.push(fmt(s.g.mat()[(i, j)].re));
                cols.push(fmt(s.g.mat()[(i, j)].im));
            }
        }
        for k in 0..n {
            cols.push(fmt(traj.conserved[row][k].re));
        }
        if complex_mode {
            for k in 0..n {
                cols.push(fmt(traj.conserved[row][k].im));
            }
        }
        out.push_str(&cols.join(", "));
        out.push('\n');
    }
    out
}

/// Parse a trajectory CSV back into (times, states); the inverse of
/// `trajectory_csv` up to the dropped imaginary parts of q.
pub fn parse_trajectory_csv(text: &str, n: usize) -> Result<(Vec<f64>, Vec<RSState<f64>>)> {
    let m = n + 1;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?;
    let ncols = header.split(',').count();
    if ncols < 1 + m + 2 * m * m + n {
        return Err(Error::Config("CSV has too few columns".into()));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("CSV line {}: {e}", lineno + 2)))
            })
            .collect::<Result<_>>()?;
        if vals.len() != ncols {
            return Err(Error::Config(format!(
                "CSV line {}: expected {ncols} columns, got {}",
                lineno + 2,
                vals.len()
            )));
        }
        times.push(vals[0]);
        let q = CartanVector::from_real(&vals[1..1 + m])?;
        let base = 1 + m;
        let g = CMat::from_fn(m, |i, j| {
            let k = base + 2 * (i * m + j);
            C::new(vals[k], vals[k + 1])
        });
        states.push(RSState::new(q, GroupElement::new(g)?)?);
    }
    Ok((times, states))
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RunSummary {
    pub solver: String,
    pub trace_drifts: Vec<f64>,
    pub spectrum_drift: f64,
    pub factorization_residual: Option<f64>,
    pub gauge_condition_residual: Option<f64>,
    pub breakdown: Option<f64>,
    pub wall_clock_seconds: f64,
    pub t0: f64,
    pub t1: f64,
    pub samples_requested: usize,
    pub samples_produced: usize,
    pub steps: usize,
    pub max_projection_correction: f64,
}

/// Write with a temp file + rename so the target is never partial.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)
            .map_err(|e| Error::Config(format!("create {}: {e}", tmp.display())))?;
        f.write_all(contents.as_bytes())
            .map_err(|e| Error::Config(format!("write {}: {e}", tmp.display())))?;
    }
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::Config(format!("rename to {}: {e}", path.display())))?;
    Ok(())
}

#[derive(Debug)]
pub struct SimulateOutcome {
    pub summary: RunSummary,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    /// True when the run hit a wall or eigenvalue collision and the
    /// trajectory is partial.
    pub broke_down: bool,
}

pub fn cmd_simulate(config: &RunConfig, out_dir: &Path) -> Result<SimulateOutcome> {
    let started = std::time::Instant::now();
    let spec = config.rmatrix()?;
    let ham = config.hamiltonian()?;
    let s0 = config.initial_state()?;
    let grid = config.t_grid();
    let complex_mode = config.mode == "complex";

    let (traj, fact_res, gauge_res) = match config.solver.method.as_str() {
        "factorization" => {
            let res = solve(&spec, &ham, &s0, &grid, &SolveOptions::default())?;
            let fr = factorization_residual(&res, &ham, &s0, config.kappa)?;
            (res.traj, Some(fr), Some(res.gauge_residual))
        }
        method => {
            let cfg = IntegratorConfig {
                method: if method == "rk4" { Method::Rk4 } else { Method::Rk45 },
                step: config.solver.step,
                rtol: config.solver.rtol,
                atol: config.solver.atol,
                max_steps: config.solver.max_steps,
                wall_tol: crate::rmatrix::WALL_TOL,
            };
            (integrate(&spec, &ham, &s0, &grid, &cfg)?, None, None)
        }
    };

    let report = conserved_report(&traj)?;
    let summary = RunSummary {
        solver: traj.meta.solver.clone(),
        trace_drifts: report.trace_drifts,
        spectrum_drift: report.spectrum_drift,
        factorization_residual: fact_res,
        gauge_condition_residual: gauge_res,
        breakdown: traj.meta.breakdown,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        t0: config.time.t0,
        t1: config.time.t1,
        samples_requested: config.time.samples,
        samples_produced: traj.times.len(),
        steps: traj.meta.steps,
        max_projection_correction: traj.meta.max_projection_correction,
    };

    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Config(format!("out dir {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("trajectory.csv");
    let summary_path = out_dir.join("summary.json");
    atomic_write(&csv_path, &trajectory_csv(&traj, complex_mode))?;
    atomic_write(
        &summary_path,
        &serde_json::to_string_pretty(&summary).expect("summary serialization"),
    )?;
    let broke_down = summary.breakdown.is_some();
    Ok(SimulateOutcome {
        summary,
        csv_path,
        summary_path,
        broke_down,
    })
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CompareRow {
    pub solver: String,
    pub rtol: Option<f64>,
    pub sup_error_q: f64,
    pub sup_error_g: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CompareTable {
    pub reference: String,
    pub rows: Vec<CompareRow>,
}

/// Accuracy/cost table: both solvers against a factorization reference
/// on a 4x finer grid.
pub fn cmd_compare(config: &RunConfig, rtol_list: &[f64]) -> Result<CompareTable> {
    if rtol_list.is_empty() {
        return Err(Error::Config("compare needs at least one rtol".into()));
    }
    let spec = config.rmatrix()?;
    let ham = config.hamiltonian()?;
    let s0 = config.initial_state()?;
    let grid = config.t_grid();
    // reference: factorization on a grid 4x finer, sampled back down
    let fine: Vec<f64> = {
        let nfine = (grid.len() - 1) * 4 + 1;
        (0..nfine)
            .map(|k| {
                config.time.t0
                    + (config.time.t1 - config.time.t0) * k as f64 / (nfine - 1) as f64
            })
            .collect()
    };
    let reference = solve(&spec, &ham, &s0, &fine, &SolveOptions::default())?;
    let ref_states: Vec<&RSState<f64>> = grid
        .iter()
        .enumerate()
        .map(|(k, _)| &reference.traj.states[k * 4])
        .collect();

    let sup_err = |states: &[RSState<f64>]| -> (f64, f64) {
        let mut eq = 0.0_f64;
        let mut eg = 0.0_f64;
        for (s, r) in states.iter().zip(&ref_states) {
            eq = eq.max(s.q.sub(&r.q).norm_inf());
            eg = eg.max((s.g.mat() - r.g.mat()).frobenius_norm());
        }
        (eq, eg)
    };

    let mut rows = Vec::new();
    let t = std::time::Instant::now();
    let fact = solve(&spec, &ham, &s0, &grid, &SolveOptions::default())?;
    let (eq, eg) = sup_err(&fact.traj.states);
    rows.push(CompareRow {
        solver: "factorization".into(),
        rtol: None,
        sup_error_q: eq,
        sup_error_g: eg,
        wall_clock_seconds: t.elapsed().as_secs_f64(),
    });
    for &rtol in rtol_list {
        let t = std::time::Instant::now();
        let cfg = IntegratorConfig::rk45(rtol, (rtol * 1e-3).max(1e-15));
        let traj = integrate(&spec, &ham, &s0, &grid, &cfg)?;
        let (eq, eg) = sup_err(&traj.states);
        rows.push(CompareRow {
            solver: "rk45".into(),
            rtol: Some(rtol),
            sup_error_q: eq,
            sup_error_g: eg,
            wall_clock_seconds: t.elapsed().as_secs_f64(),
        });
    }
    Ok(CompareTable {
        reference: "factorization, grid refined 4x".into(),
        rows,
    })
}

pub struct CheckOutcome {
    pub lines: Vec<String>,
    pub all_passed: bool,
}

pub fn cmd_check(
    suite: &str,
    n: usize,
    pi_prime: &str,
    kappa: f64,
    seed: u64,
    samples: usize,
) -> Result<CheckOutcome> {
    let dim = Dimension::new(n).map_err(|e| Error::Config(e.to_string()))?;
    let subset = if pi_prime == "full" {
        SimpleSubset::full(dim)
    } else {
        let ix: Vec<usize> = pi_prime
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Config(format!("pi_prime: {e}")))
            })
            .collect::<Result<_>>()?;
        SimpleSubset::new(dim, ix).map_err(|e| Error::Config(e.to_string()))?
    };
    let params = CheckParams {
        dim,
        subset,
        kappa,
        samples,
        seed,
    };
    let reports = run_suite(suite, &params)?;
    let mut all_passed = true;
    let lines = reports
        .iter()
        .map(|r| {
            all_passed &= r.passed;
            format!(
                "{:24} samples={:5} statistic={:12.5e} tolerance={:8.1e} {} ({})",
                r.name,
                r.samples,
                r.statistic,
                r.tolerance,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            )
        })
        .collect();
    Ok(CheckOutcome { lines, all_passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_config() -> RunConfig {
        RunConfig::parse(
            r#"{
                "n": 1,
                "pi_prime": "full",
                "hamiltonian": [{"power": 1, "re": 1.0}],
                "initial": {
                    "q": [1.0, -1.0],
                    "g_re": [[2.0, 0.0], [0.0, 0.5]]
                },
                "time": {"t0": 0.0, "t1": 1.0, "samples": 11},
                "solver": {"method": "rk45"}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn config_round_trip_is_byte_identical() {
        let cfg = demo_config();
        let s1 = cfg.to_json();
        let cfg2 = RunConfig::parse(&s1).unwrap();
        let s2 = cfg2.to_json();
        assert_eq!(s1, s2);
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"n": 1, "pi_prime": "full", "hamiltonian": [{"power":1,"re":1.0}],
            "initial": {"q":[1.0,-1.0],"g_re":[[2.0,0.0],[0.0,0.5]]},
            "time": {"t0":0.0,"t1":1.0,"samples":5},
            "solver": {"method":"rk45"},
            "extra_key": true}"#;
        assert!(matches!(RunConfig::parse(bad), Err(Error::Config(_))));
        let bad_nested = r#"{"n": 1, "pi_prime": "full", "hamiltonian": [{"power":1,"re":1.0}],
            "initial": {"q":[1.0,-1.0],"g_re":[[2.0,0.0],[0.0,0.5]],"oops":1},
            "time": {"t0":0.0,"t1":1.0,"samples":5},
            "solver": {"method":"rk45"}}"#;
        assert!(RunConfig::parse(bad_nested).is_err());
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = demo_config();
        cfg.mode = "quantum".into();
        assert!(cfg.validate().is_err());
        let mut cfg = demo_config();
        cfg.solver.method = "euler".into();
        assert!(cfg.validate().is_err());
        let mut cfg = demo_config();
        cfg.time.samples = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = demo_config();
        cfg.pi_prime = PiPrime::Keyword("none".into());
        assert!(cfg.validate().is_err());
        // non-Hermitian g in hermitian mode
        let mut cfg = demo_config();
        cfg.initial.g_re = vec![vec![2.0, 0.3], vec![0.0, 0.5]];
        assert!(cfg.initial_state().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let cfg = demo_config();
        let spec = cfg.rmatrix().unwrap();
        let ham = cfg.hamiltonian().unwrap();
        let s0 = cfg.initial_state().unwrap();
        let traj = integrate(
            &spec,
            &ham,
            &s0,
            &cfg.t_grid(),
            &IntegratorConfig::rk45(1e-10, 1e-13),
        )
        .unwrap();
        let csv = trajectory_csv(&traj, false);
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("t, q_0, q_1, re_g_00, im_g_00"));
        assert!(header.ends_with("c_1"));
        let (times, states) = parse_trajectory_csv(&csv, 1).unwrap();
        assert_eq!(times.len(), traj.times.len());
        for (a, b) in states.iter().zip(&traj.states) {
            assert!(a.q.sub(&b.q).norm_inf() < 1e-14);
            assert!((a.g.mat() - b.g.mat()).max_abs() < 1e-14);
        }
        // complex mode appends im_c_k
        let csv = trajectory_csv(&traj, true);
        assert!(csv.lines().next().unwrap().ends_with("im_c_1"));
    }

    #[test]
    fn simulate_diagonal_demo() {
        let cfg = demo_config();
        let dir = tempfile::tempdir().unwrap();
        let out = cmd_simulate(&cfg, dir.path()).unwrap();
        assert!(!out.broke_down);
        assert!(out.csv_path.exists() && out.summary_path.exists());
        // linear q column, constant g
        let text = std::fs::read_to_string(&out.csv_path).unwrap();
        let (times, states) = parse_trajectory_csv(&text, 1).unwrap();
        for (t, s) in times.iter().zip(&states) {
            assert!((s.q.entries()[0].re - (1.0 - 0.375 * t)).abs() < 1e-8);
            assert!((s.g.mat()[(0, 0)] - C::new(2.0, 0.0)).norm() < 1e-8);
        }
        // factorization solver agrees
        let mut cfg2 = cfg.clone();
        cfg2.solver.method = "factorization".into();
        let dir2 = tempfile::tempdir().unwrap();
        let out2 = cmd_simulate(&cfg2, dir2.path()).unwrap();
        assert!(out2.summary.factorization_residual.unwrap() < 1e-8);
        let text2 = std::fs::read_to_string(&out2.csv_path).unwrap();
        let (_, states2) = parse_trajectory_csv(&text2, 1).unwrap();
        for (a, b) in states.iter().zip(&states2) {
            assert!(a.q.sub(&b.q).norm_inf() < 1e-6);
            assert!((a.g.mat() - b.g.mat()).max_abs() < 1e-6);
        }
    }

    #[test]
    fn simulate_wall_start_breaks_down() {
        let mut cfg = demo_config();
        cfg.initial.q = vec![0.0, 0.0];
        let dir = tempfile::tempdir().unwrap();
        match cmd_simulate(&cfg, dir.path()) {
            Ok(out) => {
                assert!(out.broke_down);
                assert!(out.summary.breakdown.unwrap() <= cfg.time.t0 + 1e-12);
            }
            Err(err) => assert!(matches!(err, Error::Singularity { .. }), "got {err:?}"),
        }
    }

    #[test]
    fn compare_table() {
        let cfg = demo_config();
        let table = cmd_compare(&cfg, &[1e-6, 1e-10]).unwrap();
        assert_eq!(table.rows.len(), 3);
        // RK error tracks rtol: looser tolerance, bigger error
        let e6 = table.rows[1].sup_error_q.max(table.rows[1].sup_error_g);
        let e10 = table.rows[2].sup_error_q.max(table.rows[2].sup_error_g);
        assert!(e10 <= e6 + 1e-12);
        assert!(cmd_compare(&cfg, &[]).is_err());
        // determinism on the error columns
        let again = cmd_compare(&cfg, &[1e-6, 1e-10]).unwrap();
        for (a, b) in table.rows.iter().zip(&again.rows) {
            assert_eq!(a.sup_error_q, b.sup_error_q);
            assert_eq!(a.sup_error_g, b.sup_error_g);
        }
    }

    #[test]
    fn check_command() {
        let out = cmd_check("skew", 1, "full", 0.5, 1, 25).unwrap();
        assert!(out.all_passed);
        assert_eq!(out.lines.len(), 1);
        assert!(out.lines[0].contains("PASS"));
        // corrupted kappa makes mdybe fail
        let out = cmd_check("mdybe", 2, "full", 1.0, 1, 25).unwrap();
        assert!(!out.all_passed);
        // bad subset spec is a config error
        assert!(cmd_check("skew", 1, "banana", 0.5, 1, 5).is_err());
    }

    #[test]
    fn gauge_backend_is_default_anchor() {
        // solver id recorded in the summary names the backend
        let mut cfg = demo_config();
        cfg.solver.method = "factorization".into();
        let dir = tempfile::tempdir().unwrap();
        let out = cmd_simulate(&cfg, dir.path()).unwrap();
        assert_eq!(out.summary.solver, "factorization/anchor");
    }
}
