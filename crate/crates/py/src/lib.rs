//! Python bindings mirroring the `armplan` CLI surface: generate or load
//! scenarios, solve them exactly, validate traces, and run benchmark trials.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use armplan::bench::{self, Family, RunParams};
use armplan::guidance::Strategy;
use armplan::motion::MotionModel;
use armplan::plan_check::{check_plan, format_plan, parse_plan};
use armplan::scenario;
use armplan::solver::solve_mapf;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A rearrangement problem: workspace geometry plus per-object start and
/// goal placements.
#[pyclass(frozen, name = "Scenario")]
struct PyScenario {
    inner: scenario::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Builds a scenario from one of the named generator families.
    /// Same arguments, same scenario, byte for byte.
    #[staticmethod]
    #[pyo3(signature = (family, arms, objects, seed = 0))]
    fn generate(family: &str, arms: usize, objects: usize, seed: u64) -> PyResult<Self> {
        let family: Family = family.parse().map_err(value_err)?;
        let inner = bench::generate(family, arms, objects, seed).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = scenario::Scenario::load(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id()
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.clone()
    }

    #[getter]
    fn arms(&self) -> usize {
        self.inner.arms.len()
    }

    #[getter]
    fn objects(&self) -> usize {
        self.inner.objects.len()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Solves the scenario exactly, returning the canonical minimum
    /// synchronized schedule or None when no horizon admits one.
    fn solve(&self) -> PyResult<Option<PyPlan>> {
        let g = self.inner.validate().map_err(value_err)?;
        let init = self.inner.initial_projection(&g);
        let goal = self.inner.goal_projection(&g);
        match solve_mapf(&g, &init, &goal) {
            Ok(Some(plan)) => Ok(Some(PyPlan {
                n_steps: plan.n_steps,
                objective: plan.objective,
                per_object_actions: plan.per_object_actions.clone(),
                per_object_cost: plan.per_object_cost.clone(),
                paths: plan
                    .paths
                    .iter()
                    .map(|p| p.iter().map(|&v| g.vertex(v).name.clone()).collect())
                    .collect(),
                trace: format_plan(&g, &plan.paths),
            })),
            Ok(None) => Ok(None),
            Err(e) => Err(PyRuntimeError::new_err(e.to_string())),
        }
    }

    /// Re-checks a schedule trace (the `trace()` text format) against this
    /// scenario and returns `(n_steps, max_actions)`. Raises ValueError when
    /// any rule is broken.
    fn validate_trace(&self, text: &str) -> PyResult<(usize, usize)> {
        let g = self.inner.validate().map_err(value_err)?;
        let paths = parse_plan(&g, text).map_err(value_err)?;
        let init = self.inner.initial_projection(&g);
        let goal = self.inner.goal_projection(&g);
        let stats = check_plan(&g, &init, &goal, &paths).map_err(value_err)?;
        Ok((stats.n_steps, stats.max_actions))
    }

    /// Runs independent planner trials and re-executes every claimed
    /// solution before counting it, exactly like `armplan run`.
    #[pyo3(signature = (strategy = "smart", *, trials = 1, seed = 0, budget_ms = 2000, pure_guidance = false, motion = "free", d_min = 0.1))]
    #[allow(clippy::too_many_arguments)]
    fn run(
        &self,
        strategy: &str,
        trials: u64,
        seed: u64,
        budget_ms: u64,
        pure_guidance: bool,
        motion: &str,
        d_min: f64,
    ) -> PyResult<PyReport> {
        let strategy: Strategy = strategy.parse().map_err(value_err)?;
        let motion = match motion {
            "free" => MotionModel::FreeSpace,
            "interference" => MotionModel::Interference { d_min },
            other => return Err(value_err(format!("unknown motion model {other:?}"))),
        };
        let params = RunParams { strategy, budget_ms, trials, seed, motion, pure_guidance };
        let report = bench::run(&self.inner, &params).map_err(value_err)?;
        Ok(PyReport {
            summary: bench::summarize(&report.rows),
            csv: bench::render_csv(&report.rows),
            trials: report.rows.len(),
            successes: report.rows.iter().filter(|r| r.success).count(),
            violations: report.violations,
            mapf_steps: report.mapf_steps,
        })
    }

    fn __repr__(&self) -> String {
        format!("Scenario({})", self.inner.id())
    }
}

/// An exact synchronized schedule: per-object vertex paths over slices
/// `0..=n_steps` plus the solved min-max objective.
#[pyclass(frozen, name = "Plan")]
struct PyPlan {
    #[pyo3(get)]
    n_steps: usize,
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    per_object_actions: Vec<usize>,
    #[pyo3(get)]
    per_object_cost: Vec<f64>,
    #[pyo3(get)]
    paths: Vec<Vec<String>>,
    trace: String,
}

#[pymethods]
impl PyPlan {
    /// Renders the schedule as the tab-separated `object step vertex` text
    /// accepted by `validate_trace` and `armplan validate`.
    fn trace(&self) -> String {
        self.trace.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Plan(n_steps={}, objective={:.3}, max_actions={})",
            self.n_steps,
            self.objective,
            self.per_object_actions.iter().copied().max().unwrap_or(0)
        )
    }
}

/// Aggregate of one benchmark invocation over a single scenario.
#[pyclass(frozen, name = "Report")]
struct PyReport {
    #[pyo3(get)]
    summary: String,
    #[pyo3(get)]
    csv: String,
    #[pyo3(get)]
    trials: usize,
    #[pyo3(get)]
    successes: usize,
    #[pyo3(get)]
    violations: usize,
    #[pyo3(get)]
    mapf_steps: Option<usize>,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "Report({}/{} solved, {} violations)",
            self.successes, self.trials, self.violations
        )
    }
}

/// Names of the generator families accepted by `Scenario.generate`.
#[pyfunction]
fn families() -> Vec<&'static str> {
    vec!["switch", "side_to_side", "random", "swap_buffer"]
}

/// Names of the guidance strategies accepted by `Scenario.run`.
#[pyfunction]
fn strategies() -> Vec<&'static str> {
    vec![Strategy::Smart.name(), Strategy::Sequential.name(), Strategy::Greedy.name()]
}

#[pymodule]
fn armplan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    Ok(())
}
