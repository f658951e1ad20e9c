//! Python bindings: a thin `Model` class over the game parameters plus
//! module-level functions for the critical curves, equilibrium selection,
//! and the N-player solve/simulate pipeline.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use spinmfg::equilibrium::{self, DEFAULT_GRID, DEFAULT_TOL};
use spinmfg::hjb::{solve_hjb, HjbConfig, RateConvention};
use spinmfg::sim::{monte_carlo, InitMode, LookupMode, SimConfig};
use spinmfg::{curves, selection, LocalField, ModelParams, SpinState, TerminalMean};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field_of(y: f64) -> PyResult<LocalField> {
    if y > 0.0 {
        Ok(LocalField::Plus)
    } else if y < 0.0 {
        Ok(LocalField::Minus)
    } else {
        Err(PyValueError::new_err("field sign must be nonzero"))
    }
}

fn spin_of(x: i64) -> PyResult<SpinState> {
    match x {
        1 => Ok(SpinState::Up),
        -1 => Ok(SpinState::Down),
        other => Err(PyValueError::new_err(format!("spin must be -1 or +1, got {other}"))),
    }
}

/// One game instance (T, eps, m0).
#[pyclass]
#[derive(Clone)]
struct Model {
    params: ModelParams,
}

#[pymethods]
impl Model {
    #[new]
    fn new(horizon: f64, eps: f64, m0: f64) -> PyResult<Self> {
        Ok(Self { params: ModelParams::new(horizon, eps, m0).map_err(err)? })
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.params.horizon
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.params.field_strength
    }

    #[getter]
    fn m0(&self) -> f64 {
        self.params.initial_mean
    }

    /// HJB gap z(t, y) for a candidate terminal mean m.
    fn z_gap(&self, t: f64, y_sign: f64, m: f64) -> PyResult<f64> {
        spinmfg::mfg::z_gap(t, field_of(y_sign)?, TerminalMean::new(m).map_err(err)?, &self.params)
            .map_err(err)
    }

    /// Value function V(t, x, y) for a candidate terminal mean m.
    fn value_function(&self, t: f64, x: i64, y_sign: f64, m: f64) -> PyResult<f64> {
        spinmfg::mfg::value_function(
            t,
            spin_of(x)?,
            field_of(y_sign)?,
            TerminalMean::new(m).map_err(err)?,
            &self.params,
        )
        .map_err(err)
    }

    /// Optimal flip rate u*(t, x, y) for a candidate terminal mean m.
    fn optimal_rate(&self, t: f64, x: i64, y_sign: f64, m: f64) -> PyResult<f64> {
        spinmfg::mfg::optimal_rate(
            t,
            spin_of(x)?,
            field_of(y_sign)?,
            TerminalMean::new(m).map_err(err)?,
            &self.params,
        )
        .map_err(err)
    }

    /// Conditional mean m(t, y) for a candidate terminal mean m.
    fn conditional_mean(&self, t: f64, y_sign: f64, m: f64) -> PyResult<f64> {
        spinmfg::mfg::conditional_mean(
            t,
            field_of(y_sign)?,
            TerminalMean::new(m).map_err(err)?,
            &self.params,
        )
        .map_err(err)
    }

    /// Consistency function F(m); zeros are the equilibria.
    fn consistency_f(&self, m: f64) -> PyResult<f64> {
        Ok(spinmfg::mfg::consistency_f(TerminalMean::new(m).map_err(err)?, &self.params))
    }

    /// All equilibria as (m, class, tangent) triples.
    fn find_equilibria(&self) -> PyResult<Vec<(f64, String, bool)>> {
        Ok(equilibrium::find_equilibria(&self.params, DEFAULT_GRID, DEFAULT_TOL)
            .map_err(err)?
            .into_iter()
            .map(|e| (e.m, e.class.label().to_string(), e.tangent))
            .collect())
    }

    /// Per-class counts [PC, PI, UC, UI] and the phase-diagram region id.
    fn region_signature(&self) -> PyResult<([u8; 4], Option<u8>)> {
        let sig = equilibrium::region_signature(&self.params).map_err(err)?;
        Ok((sig.counts, sig.region_id))
    }

    /// The selection prediction: (m, class, j_minus, j_plus, j_total).
    fn predict_selected(&self) -> PyResult<(f64, String, f64, f64, f64)> {
        let r = selection::predict_selected(&self.params).map_err(err)?;
        Ok((
            r.chosen.m,
            r.chosen.class.label().to_string(),
            r.chosen_costs.j_minus,
            r.chosen_costs.j_plus,
            r.chosen_costs.j_total,
        ))
    }

    /// The equilibrium minimizing the total cost: (m, class).
    fn min_total_cost_equilibrium(&self) -> PyResult<(f64, String)> {
        let e = selection::min_total_cost_equilibrium(&self.params).map_err(err)?;
        Ok((e.m, e.class.label().to_string()))
    }
}

#[pyfunction]
fn t_star(eps: f64, m0: f64) -> PyResult<f64> {
    curves::t_star(eps, m0).map_err(err)
}

#[pyfunction]
fn eps_star1(m0: f64) -> PyResult<f64> {
    curves::eps_star1(m0).map_err(err)
}

#[pyfunction]
fn eps_star2(m0: f64) -> PyResult<f64> {
    curves::eps_star2(m0).map_err(err)
}

#[pyfunction]
fn eps_star3(m0: f64) -> PyResult<f64> {
    curves::eps_star3(m0).map_err(err)
}

#[pyfunction]
fn t_c_polarized(eps: f64, m0: f64) -> PyResult<Option<f64>> {
    curves::t_c_polarized(eps, m0).map_err(err)
}

#[pyfunction]
fn t_c_unpolarized(eps: f64, m0: f64) -> PyResult<Vec<f64>> {
    curves::t_c_unpolarized(eps, m0).map_err(err)
}

#[pyfunction]
fn branch_crossing_times(eps: f64, m0: f64, t_lo: f64, t_hi: f64) -> PyResult<Vec<f64>> {
    selection::branch_crossing_times(eps, m0, (t_lo, t_hi)).map_err(err)
}

#[pyfunction]
fn state_count(n: usize, n_eps: usize) -> PyResult<usize> {
    spinmfg::hjb::state_count(n, n_eps).map_err(err)
}

/// Solve the N-player HJB and run the Monte Carlo in one call.
/// Returns (mean, sd, cost_minus, cost_plus, samples).
#[pyfunction]
#[pyo3(signature = (n, n_eps, horizon, eps, m0, steps=2000, replications=100, seed=0,
                    convention="paper_printed", init="expected", lookup="unshifted"))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    n: usize,
    n_eps: usize,
    horizon: f64,
    eps: f64,
    m0: f64,
    steps: usize,
    replications: usize,
    seed: u64,
    convention: &str,
    init: &str,
    lookup: &str,
) -> PyResult<(f64, Option<f64>, f64, f64, Vec<f64>)> {
    let params = ModelParams::new(horizon, eps, m0).map_err(err)?;
    let cfg = HjbConfig::new(n, n_eps, steps, RateConvention::parse(convention).map_err(err)?, params)
        .map_err(err)?;
    let (_, control) = solve_hjb(&cfg).map_err(err)?;
    let sim_cfg = SimConfig {
        n_players: n,
        n_eps,
        replications,
        seed,
        params,
        init: InitMode::parse(init).map_err(err)?,
        lookup: LookupMode::parse(lookup).map_err(err)?,
    };
    let s = monte_carlo(&sim_cfg, &control).map_err(err)?;
    Ok((s.mean, s.sd, s.cost_minus, s.cost_plus, s.samples))
}

#[pymodule]
fn spinmfg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(t_star, m)?)?;
    m.add_function(wrap_pyfunction!(eps_star1, m)?)?;
    m.add_function(wrap_pyfunction!(eps_star2, m)?)?;
    m.add_function(wrap_pyfunction!(eps_star3, m)?)?;
    m.add_function(wrap_pyfunction!(t_c_polarized, m)?)?;
    m.add_function(wrap_pyfunction!(t_c_unpolarized, m)?)?;
    m.add_function(wrap_pyfunction!(branch_crossing_times, m)?)?;
    m.add_function(wrap_pyfunction!(state_count, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
