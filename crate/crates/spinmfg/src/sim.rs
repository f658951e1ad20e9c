//! Continuous-time Markov chain simulation of the N-player population driven
//! by a tabulated equilibrium control.
//!
//! Within each control-grid interval the four aggregate rates are constant
//! given the state, so the jump simulation is exact: sample an exponential
//! waiting time against the total rate, resample at grid boundaries and after
//! each jump. Running costs accumulate per (x, y)-class from the same rates
//! that drive the jumps, which equals the player average by exchangeability.

use crate::error::{Error, Result};
use crate::hjb::ControlTable;
use crate::params::ModelParams;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the initial up-counts are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitMode {
    /// Deterministic expected counts: total = round(N(1+m₀)/2), split across
    /// the field subpopulations proportionally with the remainder on the -ε
    /// side. This is the Table-2-reproducing default.
    ExpectedCounts,
    /// Independent spins: n⁺ ~ Bin(nε, (1+m₀)/2), n⁻ ~ Bin(N-nε, (1+m₀)/2).
    Binomial,
}

impl InitMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "expected" => Ok(InitMode::ExpectedCounts),
            "binomial" => Ok(InitMode::Binomial),
            other => Err(Error::InvalidParameter(format!("unknown init mode '{other}'"))),
        }
    }
}

/// Which count arguments the flip-rate lookups use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LookupMode {
    /// All four rates evaluated at the current aggregate state. Default;
    /// reproduces the reference experiments.
    Unshifted,
    /// Down-flip rates evaluated at n⁺-1 / n⁻-1 (down-flippers exclude
    /// themselves from the count arguments).
    AsPrinted,
}

impl LookupMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unshifted" => Ok(LookupMode::Unshifted),
            "as_printed" => Ok(LookupMode::AsPrinted),
            other => Err(Error::InvalidParameter(format!("unknown lookup mode '{other}'"))),
        }
    }
}

/// Configuration of a Monte Carlo run against a solved control table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_players: usize,
    pub n_eps: usize,
    pub replications: usize,
    pub seed: u64,
    pub params: ModelParams,
    pub init: InitMode,
    pub lookup: LookupMode,
}

impl SimConfig {
    /// Checks that the control table was solved for exactly this setup.
    pub fn validate_against(&self, control: &ControlTable) -> Result<()> {
        let c = &control.config;
        if c.n_others != self.n_players {
            return Err(Error::ControlMismatch(format!(
                "table N = {}, simulation N = {}",
                c.n_others, self.n_players
            )));
        }
        if c.n_eps != self.n_eps {
            return Err(Error::ControlMismatch(format!(
                "table n_eps = {}, simulation n_eps = {}",
                c.n_eps, self.n_eps
            )));
        }
        let (a, b) = (c.params, self.params);
        if a.horizon != b.horizon || a.field_strength != b.field_strength
            || a.initial_mean != b.initial_mean
        {
            return Err(Error::ControlMismatch(format!("table params {a:?}, simulation {b:?}")));
        }
        Ok(())
    }
}

/// One simulated path of the sufficient statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub jump_times: Vec<f64>,
    pub states: Vec<(u32, u32)>,
    pub terminal_mean: f64,
}

/// Terminal mean and realized per-subpopulation costs of one replication.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub terminal_mean: f64,
    pub cost_minus: f64,
    pub cost_plus: f64,
}

/// Monte Carlo statistics over replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimSummary {
    pub mean: f64,
    /// Sample standard deviation; None for a single replication.
    pub sd: Option<f64>,
    pub samples: Vec<f64>,
    /// Average realized cost (running + terminal) of the y = -ε subpopulation.
    pub cost_minus: f64,
    /// Average realized cost of the y = +ε subpopulation.
    pub cost_plus: f64,
    /// Per-replication terminal means and costs, in replication order.
    pub outcomes: Vec<ReplicationOutcome>,
}

/// Binomial initial counts: each player starts up with probability (1+m₀)/2.
pub fn sample_initial<R: Rng>(m0: f64, n: usize, n_eps: usize, rng: &mut R) -> (usize, usize) {
    let p = ((1.0 + m0) / 2.0).clamp(0.0, 1.0);
    let np = Binomial::new(n_eps as u64, p).expect("valid p").sample(rng) as usize;
    let nm = Binomial::new((n - n_eps) as u64, p).expect("valid p").sample(rng) as usize;
    (np, nm)
}

/// Deterministic expected counts with the total rounded half away from zero
/// and the remainder assigned to the -ε subpopulation.
pub fn expected_counts(m0: f64, n: usize, n_eps: usize) -> (usize, usize) {
    let total = (n as f64 * (1.0 + m0) / 2.0).round() as usize;
    let total = total.min(n);
    let lo = total.saturating_sub(n - n_eps);
    let hi = n_eps.min(total);
    let np = ((total * n_eps) as f64 / n as f64).floor() as usize;
    let np = np.clamp(lo, hi);
    (np, total - np)
}

fn initial_counts<R: Rng>(cfg: &SimConfig, rng: &mut R) -> (usize, usize) {
    match cfg.init {
        InitMode::Binomial => {
            sample_initial(cfg.params.initial_mean, cfg.n_players, cfg.n_eps, rng)
        }
        InitMode::ExpectedCounts => expected_counts(cfg.params.initial_mean, cfg.n_players, cfg.n_eps),
    }
}

struct Rates {
    up_plus: f64,   // n+ -> n+ + 1
    down_plus: f64, // n+ -> n+ - 1
    up_minus: f64,  // n- -> n- + 1
    down_minus: f64,
    // individual rates per class, for the running-cost bookkeeping
    u_up_plus: f64,
    u_down_plus: f64,
    u_up_minus: f64,
    u_down_minus: f64,
}

fn rates_at(
    control: &ControlTable,
    lookup: LookupMode,
    k: usize,
    n: usize,
    n_eps: usize,
    np: usize,
    nm: usize,
) -> Rates {
    let u_up_plus = control.rate_at(k, 0, 1, np, nm);
    let u_up_minus = control.rate_at(k, 0, 0, np, nm);
    let (u_down_plus, u_down_minus) = match lookup {
        LookupMode::Unshifted => (control.rate_at(k, 1, 1, np, nm), control.rate_at(k, 1, 0, np, nm)),
        LookupMode::AsPrinted => (
            if np >= 1 { control.rate_at(k, 1, 1, np - 1, nm) } else { 0.0 },
            if nm >= 1 { control.rate_at(k, 1, 0, np, nm - 1) } else { 0.0 },
        ),
    };
    Rates {
        up_plus: (n_eps - np) as f64 * u_up_plus,
        down_plus: np as f64 * u_down_plus,
        up_minus: (n - n_eps - nm) as f64 * u_up_minus,
        down_minus: nm as f64 * u_down_minus,
        u_up_plus,
        u_down_plus,
        u_up_minus,
        u_down_minus,
    }
}

/// Simulates one path. Exact for the piecewise-constant tabulated control:
/// rates are refreshed at every jump and at every grid boundary.
pub fn simulate_path<R: Rng>(
    cfg: &SimConfig,
    control: &ControlTable,
    rng: &mut R,
) -> (Trajectory, ReplicationOutcome) {
    let (n, n_eps) = (cfg.n_players, cfg.n_eps);
    let k_steps = control.config.time_steps;
    let horizon = cfg.params.horizon;
    let h = horizon / k_steps as f64;
    let (mut np, mut nm) = initial_counts(cfg, rng);

    let mut jump_times = Vec::new();
    let mut states = vec![(np as u32, nm as u32)];
    let (mut run_minus, mut run_plus) = (0.0f64, 0.0f64);
    let mut t = 0.0f64;

    for k in 0..k_steps {
        let t_next = if k + 1 == k_steps { horizon } else { (k + 1) as f64 * h };
        loop {
            let r = rates_at(control, cfg.lookup, k, n, n_eps, np, nm);
            let total = r.up_plus + r.down_plus + r.up_minus + r.down_minus;
            // running cost per class over the span about to elapse:
            // sum over members of u^2/2 = (aggregate rate) * u / 2
            let mut span = t_next - t;
            let mut jumped = false;
            let mut pick = 0.0;
            if total > 0.0 {
                let wait = loop {
                    let u: f64 = rng.gen();
                    let w = -(1.0 - u).ln() / total;
                    if w > 0.0 {
                        break w;
                    }
                };
                if t + wait < t_next {
                    span = wait;
                    jumped = true;
                    pick = rng.gen::<f64>() * total;
                }
            }
            run_plus += 0.5 * span * (r.up_plus * r.u_up_plus + r.down_plus * r.u_down_plus);
            run_minus += 0.5 * span * (r.up_minus * r.u_up_minus + r.down_minus * r.u_down_minus);
            t += span;
            if !jumped {
                t = t_next;
                break;
            }
            if pick < r.up_plus {
                np += 1;
            } else if pick < r.up_plus + r.down_plus {
                np -= 1;
            } else if pick < r.up_plus + r.down_plus + r.up_minus {
                nm += 1;
            } else {
                nm -= 1;
            }
            jump_times.push(t);
            states.push((np as u32, nm as u32));
        }
    }

    let terminal_mean = 2.0 * (np + nm) as f64 / n as f64 - 1.0;
    let eps = cfg.params.field_strength;
    // terminal reward -x_i(T)(m_N(T) + y_i), averaged inside each subpopulation
    let plus_size = n_eps.max(1) as f64;
    let minus_size = (n - n_eps).max(1) as f64;
    let term_plus = -(2.0 * np as f64 - n_eps as f64) * (terminal_mean + eps) / plus_size;
    let term_minus =
        -(2.0 * nm as f64 - (n - n_eps) as f64) * (terminal_mean - eps) / minus_size;
    let outcome = ReplicationOutcome {
        terminal_mean,
        cost_minus: run_minus / minus_size + term_minus,
        cost_plus: run_plus / plus_size + term_plus,
    };
    (Trajectory { jump_times, states, terminal_mean }, outcome)
}

fn replication_rng(seed: u64, replication: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

fn summarize(outcomes: &[ReplicationOutcome]) -> SimSummary {
    let s = outcomes.len();
    let samples: Vec<f64> = outcomes.iter().map(|o| o.terminal_mean).collect();
    let mean = samples.iter().sum::<f64>() / s as f64;
    let sd = if s >= 2 {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (s - 1) as f64;
        Some(var.sqrt())
    } else {
        None
    };
    SimSummary {
        mean,
        sd,
        samples,
        cost_minus: outcomes.iter().map(|o| o.cost_minus).sum::<f64>() / s as f64,
        cost_plus: outcomes.iter().map(|o| o.cost_plus).sum::<f64>() / s as f64,
        outcomes: outcomes.to_vec(),
    }
}

/// Runs S independent replications from per-replication RNG streams and
/// reduces them in replication order. Identical seed and config give a
/// bit-identical summary at any thread count.
pub fn monte_carlo(cfg: &SimConfig, control: &ControlTable) -> Result<SimSummary> {
    if cfg.replications == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    cfg.validate_against(control)?;
    let outcomes: Vec<ReplicationOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(cfg.seed, r as u64);
            simulate_path(cfg, control, &mut rng).1
        })
        .collect();
    Ok(summarize(&outcomes))
}

/// Sampled-field variant: each replication draws nε ~ Bin(N, ½) and uses a
/// control table re-solved for that count (cached). Much heavier than the
/// fixed-split default.
pub fn monte_carlo_sampled_neps<F>(cfg: &SimConfig, mut solve: F) -> Result<SimSummary>
where
    F: FnMut(usize) -> Result<ControlTable>,
{
    if cfg.replications == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    let mut cache: std::collections::HashMap<usize, ControlTable> = Default::default();
    let mut outcomes = Vec::with_capacity(cfg.replications);
    for r in 0..cfg.replications {
        let mut rng = replication_rng(cfg.seed, r as u64);
        let n_eps =
            Binomial::new(cfg.n_players as u64, 0.5).unwrap().sample(&mut rng) as usize;
        if !cache.contains_key(&n_eps) {
            cache.insert(n_eps, solve(n_eps)?);
        }
        let control = &cache[&n_eps];
        let rep_cfg = SimConfig { n_eps, ..*cfg };
        rep_cfg.validate_against(control)?;
        outcomes.push(simulate_path(&rep_cfg, control, &mut rng).1);
    }
    Ok(summarize(&outcomes))
}

/// One point of a horizon sweep: simulation statistics next to the
/// mean-field prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub horizon: f64,
    pub summary: SimSummary,
    pub predicted: crate::selection::SelectionResult,
}

/// Sweep template: everything but the horizon.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub n_players: usize,
    pub n_eps: usize,
    pub time_steps: usize,
    pub rate_convention: crate::hjb::RateConvention,
    pub replications: usize,
    pub seed: u64,
    pub init: InitMode,
    pub lookup: LookupMode,
}

/// For each horizon: solve the HJB, run the Monte Carlo, and pair the result
/// with the selection prediction.
pub fn selection_sweep(
    eps: f64,
    m0: f64,
    horizons: &[f64],
    sweep: &SweepConfig,
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let params = ModelParams::new(t, eps, m0)?;
        let hjb_cfg = crate::hjb::HjbConfig::new(
            sweep.n_players,
            sweep.n_eps,
            sweep.time_steps,
            sweep.rate_convention,
            params,
        )?;
        let (_, control) = crate::hjb::solve_hjb(&hjb_cfg)?;
        let sim_cfg = SimConfig {
            n_players: sweep.n_players,
            n_eps: sweep.n_eps,
            replications: sweep.replications,
            seed: sweep.seed,
            params,
            init: sweep.init,
            lookup: sweep.lookup,
        };
        let summary = monte_carlo(&sim_cfg, &control)?;
        let predicted = crate::selection::predict_selected(&params)?;
        out.push(SweepPoint { horizon: t, summary, predicted });
    }
    Ok(out)
}
