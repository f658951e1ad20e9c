//! Symmetric N-player HJB system and its backward integration.
//!
//! The representative player faces N opponents whose states are summarized by
//! (n⁺, n⁻): the up-counts inside the +ε and -ε field subpopulations (sizes
//! nε and N-nε). The value function V(x, y, n⁺, n⁻, t) then solves a system
//! of 4(nε+1)(N-nε+1) coupled ODEs, closed by requiring every opponent to use
//! the same feedback α* = (flip gap)⁻ read from the table itself.
//!
//! Terminal condition: V(x, y, n⁺, n⁻, T) = -x (m + y) with
//! m = 2(n⁺+n⁻+1_{x=1})/(N+1) - 1, i.e. the full cost reward including the
//! private-field term.
//!
//! Two conventions are provided for the count arguments opponents pass to
//! their own feedback. `PaperPrinted` adds the representative's spin
//! indicator 1_{x=1} to the flipping side's count; `PerspectiveShift`
//! attaches the representative's full (spin, field) indicator
//! (1_{x=1,y=+ε} to n⁺ and 1_{x=1,y=-ε} to n⁻), clamped into range at
//! corner states. The conventions agree on single-field populations and
//! differ by the indicator placement otherwise; the difference is O(1/N)
//! pointwise but moves the finite-N basin boundary, so it matters near
//! selection switches.

use crate::error::{Error, Result};
use crate::params::{LocalField, ModelParams, SpinState};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Default number of uniform time steps; sized so that doubling it moves
/// t = 0 values by less than 1e-6 anywhere in the N <= 30, T <= 10 envelope.
pub const DEFAULT_STEPS: usize = 2_500;
/// Blow-up guard: solved values must stay within this bound.
const VALUE_BOUND: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateConvention {
    /// The representative contributes her spin indicator to the flipping
    /// side's count, without a field indicator.
    PaperPrinted,
    /// The flipping player's counts corrected by the representative's full
    /// (spin, field) indicator.
    PerspectiveShift,
}

impl RateConvention {
    pub fn label(self) -> &'static str {
        match self {
            RateConvention::PaperPrinted => "paper_printed",
            RateConvention::PerspectiveShift => "perspective_shift",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "paper_printed" => Ok(RateConvention::PaperPrinted),
            "perspective_shift" => Ok(RateConvention::PerspectiveShift),
            other => Err(Error::InvalidParameter(format!("unknown rate convention '{other}'"))),
        }
    }
}

/// Configuration of one HJB solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HjbConfig {
    /// Number of opponents N (the population has N+1 players).
    pub n_others: usize,
    /// Count of +ε fields among the opponents.
    pub n_eps: usize,
    /// Uniform backward time steps K; stored index k corresponds to t = kT/K.
    pub time_steps: usize,
    pub rate_convention: RateConvention,
    pub params: ModelParams,
}

impl HjbConfig {
    pub fn new(
        n_others: usize,
        n_eps: usize,
        time_steps: usize,
        rate_convention: RateConvention,
        params: ModelParams,
    ) -> Result<Self> {
        if n_others == 0 {
            return Err(Error::InvalidParameter("need at least one opponent".into()));
        }
        if n_eps > n_others {
            return Err(Error::InvalidParameter(format!(
                "n_eps = {n_eps} exceeds N = {n_others}"
            )));
        }
        if time_steps < 100 {
            return Err(Error::InvalidParameter(format!(
                "time_steps = {time_steps}, need at least 100"
            )));
        }
        Ok(Self { n_others, n_eps, time_steps, rate_convention, params })
    }

    pub fn state_count(&self) -> usize {
        state_count(self.n_others, self.n_eps).expect("validated at construction")
    }
}

/// Dimension of the symmetric HJB system: 4 (nε+1)(N-nε+1).
pub fn state_count(n_others: usize, n_eps: usize) -> Result<usize> {
    if n_eps > n_others {
        return Err(Error::Domain(format!("state_count: n_eps = {n_eps} > N = {n_others}")));
    }
    Ok(4 * (n_eps + 1) * (n_others - n_eps + 1))
}

#[derive(Debug, Clone, Copy)]
struct Dims {
    np_len: usize,
    nm_len: usize,
}

impl Dims {
    fn of(cfg: &HjbConfig) -> Self {
        Dims { np_len: cfg.n_eps + 1, nm_len: cfg.n_others - cfg.n_eps + 1 }
    }

    #[inline]
    fn idx(&self, xi: usize, yi: usize, np: usize, nm: usize) -> usize {
        ((xi * 2 + yi) * self.np_len + np) * self.nm_len + nm
    }

    fn len(&self) -> usize {
        4 * self.np_len * self.nm_len
    }
}

fn spin_index(x: SpinState) -> usize {
    match x {
        SpinState::Down => 0,
        SpinState::Up => 1,
    }
}

fn field_index(y: LocalField) -> usize {
    match y {
        LocalField::Minus => 0,
        LocalField::Plus => 1,
    }
}

/// Solved value function on the uniform time grid; index k holds t = kT/K.
#[derive(Debug, Clone)]
pub struct ValueTable {
    pub config: HjbConfig,
    data: Vec<f64>,
}

/// Tabulated equilibrium feedback α*, same index space as [`ValueTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTable {
    pub config: HjbConfig,
    data: Vec<f64>,
}

impl ValueTable {
    pub fn get(&self, k: usize, x: SpinState, y: LocalField, np: usize, nm: usize) -> f64 {
        let d = Dims::of(&self.config);
        self.data[k * d.len() + d.idx(spin_index(x), field_index(y), np, nm)]
    }

    fn slice(&self, k: usize) -> &[f64] {
        let n = Dims::of(&self.config).len();
        &self.data[k * n..(k + 1) * n]
    }
}

impl ControlTable {
    pub fn get(&self, k: usize, x: SpinState, y: LocalField, np: usize, nm: usize) -> f64 {
        let d = Dims::of(&self.config);
        self.data[k * d.len() + d.idx(spin_index(x), field_index(y), np, nm)]
    }

    #[inline]
    pub(crate) fn rate_at(&self, k: usize, xi: usize, yi: usize, np: usize, nm: usize) -> f64 {
        let d = Dims::of(&self.config);
        self.data[k * d.len() + d.idx(xi, yi, np, nm)]
    }
}

/// Terminal slice V(·, T) = -x (m + y), m = 2(n⁺+n⁻+1_{x=1})/(N+1) - 1.
pub fn terminal_condition(cfg: &HjbConfig) -> Vec<f64> {
    let d = Dims::of(cfg);
    let n = cfg.n_others;
    let eps = cfg.params.field_strength;
    let mut v = vec![0.0; d.len()];
    for (xi, xv) in [(0usize, -1.0), (1usize, 1.0)] {
        for (yi, yv) in [(0usize, -eps), (1usize, eps)] {
            for np in 0..d.np_len {
                for nm in 0..d.nm_len {
                    let ones = np + nm + usize::from(xi == 1);
                    let mbar = 2.0 * ones as f64 / (n as f64 + 1.0) - 1.0;
                    v[d.idx(xi, yi, np, nm)] = -xv * (mbar + yv);
                }
            }
        }
    }
    v
}

/// Feedback rate read from a value slice: (V(-x,·) - V(x,·))⁻.
pub fn feedback_rate(
    table: &ValueTable,
    k: usize,
    x: SpinState,
    y: LocalField,
    np: usize,
    nm: usize,
) -> f64 {
    let gap = table.get(k, x.flipped(), y, np, nm) - table.get(k, x, y, np, nm);
    (-gap).max(0.0)
}

/// One opponent-class transition: who flips and how the counts move.
/// (jx, jy) is the flipping player's state, (dnp, dnm) the count change.
const TRANSITIONS: [(usize, usize, isize, isize); 4] = [
    (0, 1, 1, 0),  // γ⁺: a (-1, +ε) opponent flips up
    (1, 1, -1, 0), // δ⁺: a (+1, +ε) opponent flips down
    (0, 0, 0, 1),  // γ⁻: a (-1, -ε) opponent flips up
    (1, 0, 0, -1), // δ⁻: a (+1, -ε) opponent flips down
];

/// Count-argument shifts the flipping opponent applies when reading her own
/// feedback, given the representative's (xi, yi).
#[inline]
fn beta_shifts(
    convention: RateConvention,
    jx: usize,
    jy: usize,
    xi: usize,
    yi: usize,
) -> (isize, isize) {
    let rep_up = xi == 1;
    match convention {
        RateConvention::PerspectiveShift => {
            let sp = isize::from(rep_up && yi == 1) - isize::from(jx == 1 && jy == 1);
            let sm = isize::from(rep_up && yi == 0) - isize::from(jx == 1 && jy == 0);
            (sp, sm)
        }
        RateConvention::PaperPrinted => {
            let shift = isize::from(rep_up) - isize::from(jx == 1);
            if jy == 1 {
                (shift, 0)
            } else {
                (0, shift)
            }
        }
    }
}

/// dV/dt of one slice per the equilibrium-closed HJB: the own running-cost
/// term ½((ΔV)⁻)² minus the four opponent-transition terms, with neighbor
/// differences taken at the representative's own field.
pub fn hjb_rhs(cfg: &HjbConfig, v: &[f64], out: &mut [f64]) {
    let d = Dims::of(cfg);
    let neps = cfg.n_eps;
    let nrest = cfg.n_others - cfg.n_eps;
    // feedback of every potential flipper, from the same slice
    let mut alpha = vec![0.0; d.len()];
    for xi in 0..2 {
        for yi in 0..2 {
            for np in 0..d.np_len {
                for nm in 0..d.nm_len {
                    let gap = v[d.idx(1 - xi, yi, np, nm)] - v[d.idx(xi, yi, np, nm)];
                    alpha[d.idx(xi, yi, np, nm)] = (-gap).max(0.0);
                }
            }
        }
    }
    for xi in 0..2 {
        for yi in 0..2 {
            for np in 0..d.np_len {
                for nm in 0..d.nm_len {
                    let here = d.idx(xi, yi, np, nm);
                    let gap = v[d.idx(1 - xi, yi, np, nm)] - v[here];
                    let mut acc = 0.5 * gap.min(0.0) * gap.min(0.0);
                    for (jx, jy, dnp, dnm) in TRANSITIONS {
                        let pref = match (jx, jy) {
                            (0, 1) => neps - np,
                            (1, 1) => np,
                            (0, 0) => nrest - nm,
                            _ => nm,
                        };
                        if pref == 0 {
                            continue;
                        }
                        let tnp = np as isize + dnp;
                        let tnm = nm as isize + dnm;
                        // prefactors vanish exactly where the target would
                        // leave the lattice, so this indexing is total
                        let (tnp, tnm) = (tnp as usize, tnm as usize);
                        let (sp, sm) = beta_shifts(cfg.rate_convention, jx, jy, xi, yi);
                        let anp = (np as isize + sp).clamp(0, (d.np_len - 1) as isize) as usize;
                        let anm = (nm as isize + sm).clamp(0, (d.nm_len - 1) as isize) as usize;
                        let beta = alpha[d.idx(jx, jy, anp, anm)];
                        acc -= pref as f64 * beta * (v[d.idx(xi, yi, tnp, tnm)] - v[here]);
                    }
                    out[here] = acc;
                }
            }
        }
    }
}

/// Integrates the system backward from t = T with the classical fixed-step
/// fourth-order scheme and tabulates both the values and the feedback rates
/// at every grid index.
pub fn solve_hjb(cfg: &HjbConfig) -> Result<(ValueTable, ControlTable)> {
    let d = Dims::of(cfg);
    let n_states = d.len();
    let k_steps = cfg.time_steps;
    let h = cfg.params.horizon / k_steps as f64;

    let mut data = vec![0.0; (k_steps + 1) * n_states];
    let terminal = terminal_condition(cfg);
    data[k_steps * n_states..].copy_from_slice(&terminal);

    let mut cur = terminal;
    let mut k1 = vec![0.0; n_states];
    let mut k2 = vec![0.0; n_states];
    let mut k3 = vec![0.0; n_states];
    let mut k4 = vec![0.0; n_states];
    let mut tmp = vec![0.0; n_states];

    for k in (0..k_steps).rev() {
        // dV/dτ = -rhs in reversed time τ = T - t
        hjb_rhs(cfg, &cur, &mut k1);
        for i in 0..n_states {
            tmp[i] = cur[i] - 0.5 * h * k1[i];
        }
        hjb_rhs(cfg, &tmp, &mut k2);
        for i in 0..n_states {
            tmp[i] = cur[i] - 0.5 * h * k2[i];
        }
        hjb_rhs(cfg, &tmp, &mut k3);
        for i in 0..n_states {
            tmp[i] = cur[i] - h * k3[i];
        }
        hjb_rhs(cfg, &tmp, &mut k4);
        let mut worst = 0.0f64;
        for i in 0..n_states {
            cur[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            worst = worst.max(cur[i].abs());
        }
        if !(worst <= VALUE_BOUND) {
            return Err(Error::BlowUp { value: worst, step: k });
        }
        data[k * n_states..(k + 1) * n_states].copy_from_slice(&cur);
    }

    let values = ValueTable { config: *cfg, data };
    let mut rates = vec![0.0; (k_steps + 1) * n_states];
    for k in 0..=k_steps {
        let slice = values.slice(k);
        for xi in 0..2 {
            for yi in 0..2 {
                for np in 0..d.np_len {
                    for nm in 0..d.nm_len {
                        let gap = slice[d.idx(1 - xi, yi, np, nm)] - slice[d.idx(xi, yi, np, nm)];
                        rates[k * n_states + d.idx(xi, yi, np, nm)] = (-gap).max(0.0);
                    }
                }
            }
        }
    }
    let control = ControlTable { config: *cfg, data: rates };
    Ok((values, control))
}

/// Full (non-symmetric) N-player HJB on the complete state space {-1,1}^n,
/// for n ≤ 3. Returns per-player value functions on the whole time grid,
/// indexed (k, player, state bitmask) with bit i set when x_i = +1.
/// Test oracle for the symmetric reduction.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub n_players: usize,
    pub steps: usize,
    data: Vec<f64>,
}

impl OracleSolution {
    pub fn get(&self, k: usize, player: usize, state: usize) -> f64 {
        let s = 1 << self.n_players;
        self.data[(k * self.n_players + player) * s + state]
    }
}

pub fn full_hjb_oracle(
    fields: &[LocalField],
    p: &ModelParams,
    steps: usize,
) -> Result<OracleSolution> {
    let n = fields.len();
    if n == 0 || n > 3 {
        return Err(Error::OracleTooLarge { max: 3, got: n });
    }
    let s = 1usize << n;
    let eps = p.field_strength;
    let ys: Vec<f64> = fields.iter().map(|f| f.signed(eps)).collect();

    let mut cur = vec![0.0; n * s];
    for st in 0..s {
        let m_n: f64 =
            (0..n).map(|i| if st >> i & 1 == 1 { 1.0 } else { -1.0 }).sum::<f64>() / n as f64;
        for (i, &y) in ys.iter().enumerate() {
            let x = if st >> i & 1 == 1 { 1.0 } else { -1.0 };
            cur[i * s + st] = -x * (m_n + y);
        }
    }

    let rhs = |v: &[f64], out: &mut [f64]| {
        let mut u = vec![0.0; n * s];
        for j in 0..n {
            for st in 0..s {
                let gap = v[j * s + (st ^ (1 << j))] - v[j * s + st];
                u[j * s + st] = (-gap).max(0.0);
            }
        }
        for i in 0..n {
            for st in 0..s {
                let mut acc = 0.5 * u[i * s + st] * u[i * s + st];
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    acc -= u[j * s + st] * (v[i * s + (st ^ (1 << j))] - v[i * s + st]);
                }
                out[i * s + st] = acc;
            }
        }
    };

    let h = p.horizon / steps as f64;
    let dim = n * s;
    let mut data = vec![0.0; (steps + 1) * dim];
    data[steps * dim..].copy_from_slice(&cur);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    for k in (0..steps).rev() {
        rhs(&cur, &mut k1);
        for i in 0..dim {
            tmp[i] = cur[i] - 0.5 * h * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = cur[i] - 0.5 * h * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = cur[i] - h * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..dim {
            cur[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        data[k * dim..(k + 1) * dim].copy_from_slice(&cur);
    }
    Ok(OracleSolution { n_players: n, steps, data })
}

// ---- control table file format ----
//
// Little-endian binary, versioned:
//   magic   8 bytes  "SPINMFG1"
//   N       u32      opponents
//   neps    u32
//   K       u32      time steps
//   conv    u8       0 = paper_printed, 1 = perspective_shift
//   pad     3 bytes  zero
//   eps     f64
//   m0      f64
//   T       f64
//   count   u64      = 4 (neps+1)(N-neps+1)(K+1)
//   rates   count x f64, row-major over (x, y, n+, n-, k); x: -1 then +1,
//           y: -eps then +eps, k fastest

const MAGIC: &[u8; 8] = b"SPINMFG1";

impl ControlTable {
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let cfg = &self.config;
        let d = Dims::of(cfg);
        w.write_all(MAGIC)?;
        w.write_all(&(cfg.n_others as u32).to_le_bytes())?;
        w.write_all(&(cfg.n_eps as u32).to_le_bytes())?;
        w.write_all(&(cfg.time_steps as u32).to_le_bytes())?;
        let conv: u8 = match cfg.rate_convention {
            RateConvention::PaperPrinted => 0,
            RateConvention::PerspectiveShift => 1,
        };
        w.write_all(&[conv, 0, 0, 0])?;
        w.write_all(&cfg.params.field_strength.to_le_bytes())?;
        w.write_all(&cfg.params.initial_mean.to_le_bytes())?;
        w.write_all(&cfg.params.horizon.to_le_bytes())?;
        let count = (d.len() * (cfg.time_steps + 1)) as u64;
        w.write_all(&count.to_le_bytes())?;
        let n_states = d.len();
        for xi in 0..2 {
            for yi in 0..2 {
                for np in 0..d.np_len {
                    for nm in 0..d.nm_len {
                        let idx = d.idx(xi, yi, np, nm);
                        for k in 0..=cfg.time_steps {
                            w.write_all(&self.data[k * n_states + idx].to_le_bytes())?;
                        }
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<ControlTable> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadControlFile("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let n_others = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4)?;
        let n_eps = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4)?;
        let time_steps = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4)?;
        let rate_convention = match b4[0] {
            0 => RateConvention::PaperPrinted,
            1 => RateConvention::PerspectiveShift,
            c => return Err(Error::BadControlFile(format!("unknown convention byte {c}"))),
        };
        r.read_exact(&mut b8)?;
        let field_strength = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let initial_mean = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let horizon = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let params = ModelParams::new(horizon, field_strength, initial_mean)
            .map_err(|e| Error::BadControlFile(e.to_string()))?;
        let cfg = HjbConfig::new(n_others, n_eps, time_steps, rate_convention, params)
            .map_err(|e| Error::BadControlFile(e.to_string()))?;
        let d = Dims::of(&cfg);
        let n_states = d.len();
        if count != n_states * (time_steps + 1) {
            return Err(Error::BadControlFile(format!(
                "count {count} inconsistent with dimensions {n_states} x {}",
                time_steps + 1
            )));
        }
        let mut data = vec![0.0; count];
        for xi in 0..2 {
            for yi in 0..2 {
                for np in 0..d.np_len {
                    for nm in 0..d.nm_len {
                        let idx = d.idx(xi, yi, np, nm);
                        for k in 0..=time_steps {
                            r.read_exact(&mut b8)?;
                            data[k * n_states + idx] = f64::from_le_bytes(b8);
                        }
                    }
                }
            }
        }
        Ok(ControlTable { config: cfg, data })
    }
}
