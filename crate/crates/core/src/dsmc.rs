//! Direct simulation Monte Carlo for the kinetic equation: majorant
//! (no-time-counter) pair selection for collisions, exact exponential
//! relaxation for the party drift, Lie splitting between the two.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{collide_direct, sample_delta, CollisionParams};
use crate::diagnostics::{flow_state, histogram_with_flow, DiagnosticsSink, FlowState};
use crate::equilibrium::{EnergyClosure, MjSampler, MjState};
use crate::error::{Error, Result, StateDump};
use crate::kinematics::{moller_velocity, opinion_to_momentum, Momentum};
use crate::par::{for_each_mut, map_chunks, ExecMode};

/// Pair weight relative to the Moller velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// rate proportional to g (invariant flux F = g p0 p0*)
    #[default]
    Moller,
    /// F = g/(p0 p0*) taken literally, i.e. rate proportional to
    /// g/(p0 p0*)^2
    LiteralFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpinionRange {
    pub lo: f64,
    pub hi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialCondition {
    /// opinions uniform in m on each range, ranges picked by weight; an end
    /// at +-1 is open
    Ranges { ranges: Vec<OpinionRange> },
    /// Maxwell-Juttner at unit density
    Juttner { chi: f64, mbar: f64 },
}

impl InitialCondition {
    /// Symmetric band lo <= |m| < hi.
    pub fn symmetric_band(lo: f64, hi: f64) -> Self {
        InitialCondition::Ranges {
            ranges: vec![OpinionRange { lo, hi, weight: 1.0 }, OpinionRange { lo: -hi, hi: -lo, weight: 1.0 }],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub lambda: f64,
    pub delta_amp: f64,
    pub a_rate: f64,
    pub b_rate: f64,
    pub m_party: f64,
    pub n_particles: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub init: InitialCondition,
    /// flow records every this many steps
    pub output_every: u64,
    /// histogram snapshots every this many steps; 0 keeps only the last
    pub histogram_every: u64,
    pub histogram_bins: usize,
    pub kernel: KernelKind,
    pub closure: EnergyClosure,
    pub exec: ExecMode,
}

impl SimConfig {
    /// Step keeping about 0.1 expected candidate collisions per particle.
    pub fn default_dt(a_rate: f64) -> f64 {
        0.1 / a_rate
    }

    pub fn collision_params(&self) -> Result<CollisionParams> {
        CollisionParams::new(self.lambda, self.delta_amp)
    }

    pub fn steps(&self) -> u64 {
        ((self.t_end / self.dt).round() as u64).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.collision_params()?;
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be positive and finite, got {v}")))
            }
        };
        pos("a_rate", self.a_rate)?;
        pos("dt", self.dt)?;
        pos("t_end", self.t_end)?;
        if !(self.b_rate >= 0.0) || !self.b_rate.is_finite() {
            return Err(Error::config("b_rate", format!("must be >= 0, got {}", self.b_rate)));
        }
        if !(self.m_party.abs() < 1.0) {
            return Err(Error::config("m_party", format!("must satisfy |m_p| < 1, got {}", self.m_party)));
        }
        if self.n_particles < 2 {
            return Err(Error::config("n_particles", format!("need at least 2, got {}", self.n_particles)));
        }
        if self.output_every == 0 {
            return Err(Error::config("output_every", "must be at least 1"));
        }
        if self.histogram_bins < 10 {
            return Err(Error::config("histogram_bins", "must be at least 10"));
        }
        // per-pair majorant probability 2 A dt / N
        if 2.0 * self.a_rate * self.dt / self.n_particles as f64 >= 0.1 {
            return Err(Error::config("dt", "per-pair majorant probability must stay below 0.1"));
        }
        if let ExecMode::Parallel { chunks } = self.exec {
            if chunks == 0 || self.n_particles / chunks < 2 {
                return Err(Error::config("exec", "each chunk needs at least 2 particles"));
            }
        }
        match &self.init {
            InitialCondition::Ranges { ranges } => {
                if ranges.is_empty() {
                    return Err(Error::config("init", "no opinion ranges given"));
                }
                for r in ranges {
                    if !(-1.0 <= r.lo && r.lo < r.hi && r.hi <= 1.0) {
                        return Err(Error::config(
                            "init",
                            format!("range [{}, {}) must satisfy -1 <= lo < hi <= 1", r.lo, r.hi),
                        ));
                    }
                    if !(r.weight > 0.0) || !r.weight.is_finite() {
                        return Err(Error::config("init", format!("range weight must be positive, got {}", r.weight)));
                    }
                }
            }
            InitialCondition::Juttner { chi, mbar } => {
                MjState::new(1.0, *mbar, *chi).map_err(|e| Error::config("init", e.to_string()))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleState {
    pub momenta: Vec<f64>,
    pub time: f64,
    pub step: u64,
    pub rng: ChaCha8Rng,
    pub collision_count: u64,
    pub candidate_count: u64,
}

impl EnsembleState {
    pub fn from_momenta(momenta: Vec<f64>, seed: u64) -> Self {
        Self {
            momenta,
            time: 0.0,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            collision_count: 0,
            candidate_count: 0,
        }
    }

    pub fn acceptance_ratio(&self) -> f64 {
        if self.candidate_count == 0 {
            0.0
        } else {
            self.collision_count as f64 / self.candidate_count as f64
        }
    }
}

pub fn init_ensemble(config: &SimConfig) -> Result<EnsembleState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_particles;
    let mut momenta = Vec::with_capacity(n);
    match &config.init {
        InitialCondition::Ranges { ranges } => {
            let total: f64 = ranges.iter().map(|r| r.weight).sum();
            for _ in 0..n {
                let mut pick = rng.random::<f64>() * total;
                let mut chosen = &ranges[ranges.len() - 1];
                for r in ranges {
                    if pick < r.weight {
                        chosen = r;
                        break;
                    }
                    pick -= r.weight;
                }
                let m = loop {
                    let m = chosen.lo + (chosen.hi - chosen.lo) * rng.random::<f64>();
                    if m.abs() < 1.0 {
                        break m;
                    }
                };
                momenta.push(opinion_to_momentum(m)?.p());
            }
        }
        InitialCondition::Juttner { chi, mbar } => {
            let sampler = MjSampler::new(&MjState::new(1.0, *mbar, *chi)?);
            for _ in 0..n {
                momenta.push(sampler.sample(&mut rng).p());
            }
        }
    }
    Ok(EnsembleState { momenta, time: 0.0, step: 0, rng, collision_count: 0, candidate_count: 0 })
}

fn stochastic_round<R: Rng + ?Sized>(x: f64, rng: &mut R) -> u64 {
    let base = x.floor();
    base as u64 + u64::from(rng.random::<f64>() < x - base)
}

/// Collides within `group`, with pair rate A g / len. Returns
/// (candidates, accepted).
fn collide_group<R: Rng + ?Sized>(
    group: &mut [f64],
    params: &CollisionParams,
    a_rate: f64,
    kernel: KernelKind,
    dt: f64,
    rng: &mut R,
) -> Result<(u64, u64)> {
    let n = group.len();
    if n < 2 {
        return Ok((0, 0));
    }
    // N(N-1)/2 pairs times majorant 2A/N times dt
    let cand = stochastic_round((n - 1) as f64 * a_rate * dt, rng);
    let mut accepted = 0;
    for _ in 0..cand {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (Momentum(group[i]), Momentum(group[j]));
        let g = moller_velocity(a, b);
        if !(g <= 2.0) {
            return Err(Error::Invariant(format!(
                "Moller velocity {g} exceeds the majorant 2 for p = {}, {}",
                a.0, b.0
            )));
        }
        let weight = match kernel {
            KernelKind::Moller => 0.5 * g,
            KernelKind::LiteralFlux => {
                let e = a.energy() * b.energy();
                0.5 * g / (e * e)
            }
        };
        if rng.random::<f64>() < weight {
            let delta = if params.delta_amp > 0.0 { sample_delta(params.delta_amp, rng.random()) } else { 0.0 };
            let out = collide_direct(a, b, params, delta);
            group[i] = out.p_out.0;
            group[j] = out.pstar_out.0;
            accepted += 1;
        }
    }
    Ok((cand, accepted))
}

pub fn collision_step(state: &mut EnsembleState, config: &SimConfig, dt: f64) -> Result<()> {
    let params = config.collision_params()?;
    match config.exec {
        ExecMode::Deterministic => {
            let (c, a) = collide_group(&mut state.momenta, &params, config.a_rate, config.kernel, dt, &mut state.rng)?;
            state.candidate_count += c;
            state.collision_count += a;
        }
        ExecMode::Parallel { chunks } => {
            state.momenta.shuffle(&mut state.rng);
            let len = state.momenta.len().div_ceil(chunks);
            let seeds: Vec<u64> = (0..state.momenta.len().div_ceil(len)).map(|_| state.rng.next_u64()).collect();
            let (a_rate, kernel) = (config.a_rate, config.kernel);
            let results = map_chunks(&mut state.momenta, len, &seeds, |group, seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                collide_group(group, &params, a_rate, kernel, dt, &mut rng)
            });
            for r in results {
                let (c, a) = r?;
                state.candidate_count += c;
                state.collision_count += a;
            }
        }
    }
    Ok(())
}

/// p <- P + (p - P) e^{-B dt}, exact for any dt.
pub fn vlasov_step(state: &mut EnsembleState, config: &SimConfig, dt: f64) -> Result<()> {
    if config.b_rate == 0.0 {
        return Ok(());
    }
    let target = opinion_to_momentum(config.m_party)?.p();
    let decay = (-config.b_rate * dt).exp();
    let relax = move |p: &mut f64| *p = target + (*p - target) * decay;
    match config.exec {
        ExecMode::Deterministic => state.momenta.iter_mut().for_each(relax),
        ExecMode::Parallel { .. } => for_each_mut(&mut state.momenta, relax),
    }
    Ok(())
}

/// Collisions, then drift; advances the clock and checks for NaN.
pub fn advance(state: &mut EnsembleState, config: &SimConfig, dt: f64) -> Result<()> {
    collision_step(state, config, dt)?;
    vlasov_step(state, config, dt)?;
    state.step += 1;
    state.time = state.step as f64 * dt;
    if let Some(index) = state.momenta.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite(Box::new(StateDump {
            time: state.time,
            step: state.step,
            index,
            momenta: state.momenta.clone(),
        })));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: u64,
    pub final_time: f64,
    pub collisions: u64,
    pub candidates: u64,
    pub acceptance_ratio: f64,
    pub final_flow: FlowState,
}

/// Runs from t = 0 to t_end. Flow records go to the sink at step 0, every
/// `output_every` steps and at the end; histograms every
/// `histogram_every` steps (if non-zero) and at the end.
pub fn run<S: DiagnosticsSink + ?Sized>(config: &SimConfig, sink: &mut S) -> Result<RunSummary> {
    let mut state = init_ensemble(config)?;
    run_from(&mut state, config, sink)
}

pub fn run_from<S: DiagnosticsSink + ?Sized>(
    state: &mut EnsembleState,
    config: &SimConfig,
    sink: &mut S,
) -> Result<RunSummary> {
    config.validate()?;
    let steps = config.steps();
    let emit = |state: &EnsembleState, sink: &mut S, hist: bool| -> Result<FlowState> {
        let flow = flow_state(&state.momenta, state.time, config.closure)?;
        sink.flow(&flow)?;
        if hist {
            let h = histogram_with_flow(&state.momenta, config.histogram_bins, &flow)?;
            sink.histogram(state.time, &h)?;
        }
        Ok(flow)
    };
    let hist_due = |s: u64| config.histogram_every > 0 && s.is_multiple_of(config.histogram_every);
    let mut last = emit(state, sink, hist_due(0))?;
    for s in 1..=steps {
        advance(state, config, config.dt)?;
        if s % config.output_every == 0 || s == steps {
            last = emit(state, sink, hist_due(s) || s == steps)?;
        }
    }
    Ok(RunSummary {
        steps,
        final_time: state.time,
        collisions: state.collision_count,
        candidates: state.candidate_count,
        acceptance_ratio: state.acceptance_ratio(),
        final_flow: last,
    })
}

/// Deterministic stream for run `index` derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index + 1);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base() -> SimConfig {
        SimConfig {
            lambda: 0.0,
            delta_amp: 0.0,
            a_rate: 1.0,
            b_rate: 0.0,
            m_party: 0.0,
            n_particles: 1000,
            dt: 0.1,
            t_end: 1.0,
            seed: 7,
            init: InitialCondition::symmetric_band(0.99, 1.0),
            output_every: 1,
            histogram_every: 0,
            histogram_bins: 50,
            kernel: KernelKind::Moller,
            closure: EnergyClosure::MjConsistent,
            exec: ExecMode::Deterministic,
        }
    }

    #[test]
    fn vlasov_examples() {
        let mut cfg = base();
        cfg.b_rate = 0.1;
        let mut st = EnsembleState::from_momenta(vec![1.0], 0);
        vlasov_step(&mut st, &cfg, 1.0).unwrap();
        assert!((st.momenta[0] - (-0.1f64).exp()).abs() < 1e-15);
        let mut st = EnsembleState::from_momenta(vec![3.0, -2.0], 0);
        cfg.m_party = 0.6;
        vlasov_step(&mut st, &cfg, 1e6).unwrap();
        assert!(st.momenta.iter().all(|&p| (p - 0.75).abs() < 1e-15));
        cfg.b_rate = 0.0;
        let mut st = EnsembleState::from_momenta(vec![3.0, -2.0], 0);
        vlasov_step(&mut st, &cfg, 1.0).unwrap();
        assert_eq!(st.momenta, vec![3.0, -2.0]);
    }

    #[test]
    fn two_particles_meet_at_midpoint() {
        let mut cfg = base();
        cfg.n_particles = 2;
        cfg.dt = 0.01;
        let mut st = EnsembleState::from_momenta(vec![0.75, -0.75], 3);
        while st.collision_count == 0 {
            collision_step(&mut st, &cfg, 1.0).unwrap();
        }
        assert_eq!(st.momenta, vec![0.0, 0.0]);
    }

    #[test]
    fn config_validation_names_fields() {
        let mut c = base();
        c.lambda = 2.0;
        assert!(c.validate().unwrap_err().to_string().contains("lambda"));
        let mut c = base();
        c.init = InitialCondition::Ranges { ranges: vec![] };
        assert!(c.validate().unwrap_err().to_string().contains("init"));
        let mut c = base();
        c.init = InitialCondition::Ranges { ranges: vec![OpinionRange { lo: 0.3, hi: 0.2, weight: 1.0 }] };
        assert!(c.validate().is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..6).map(|i| derive_seed(42, i)).collect();
        for i in 0..6 {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
    }
}
