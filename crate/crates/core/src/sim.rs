//! Cycle-level simulation with periodic, estimated best-response updates.
//!
//! Each cycle the target transmits, the jammer reacts after `T_AJ` with an
//! exponential burst of mean `y`, and the target then stays silent for a
//! uniform draw on `[0, x]`. Every `update_period_cycles` cycles both
//! players estimate the opponent from the last window and best-respond.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Uniform};

use crate::best_response::{
    best_response_jammer, best_response_target, best_response_target_slope, chi_slope,
};
use crate::error::{Error, Result};
use crate::model::{GameParams, StrategyProfile, UtilityPair};
use crate::nash::{nash_closed_form, s_prime_bounds};

pub const RNG_NAME: &str = "ChaCha8";
pub const DEFAULT_UPDATE_PERIOD: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// Sample mean of jam bursts for `y`, bias-corrected maximum of the
    /// silences for `x`.
    #[default]
    SampleMeanYMaxX,
    /// Each player sees the opponent's strategy exactly.
    PerfectObservation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    TargetEstimatesY,
    JammerEstimatesX,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: GameParams,
    pub update_period_cycles: usize,
    pub total_cycles: usize,
    pub rng_seed: u64,
    pub estimator: Estimator,
    /// Starting profile; drawn from the seed when absent.
    pub initial: Option<StrategyProfile>,
}

impl SimConfig {
    pub fn new(params: GameParams, total_cycles: usize, rng_seed: u64) -> Self {
        SimConfig {
            params,
            update_period_cycles: DEFAULT_UPDATE_PERIOD,
            total_cycles,
            rng_seed,
            estimator: Estimator::default(),
            initial: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.update_period_cycles < 1 {
            return Err(Error::InvalidSimConfig(
                "update_period_cycles must be at least 1",
            ));
        }
        if self.total_cycles < self.update_period_cycles {
            return Err(Error::InvalidSimConfig(
                "total_cycles must be at least update_period_cycles",
            ));
        }
        if let Some(s) = &self.initial {
            s.validate(&self.params)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEvent {
    pub index: usize,
    pub silence_drawn: f64,
    pub jam_drawn: f64,
    pub bits_conveyed: f64,
    pub jam_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub update_index: usize,
    pub x: f64,
    pub y: f64,
    /// `None` for the initial profile.
    pub x_estimated_by_jammer: Option<f64>,
    pub y_estimated_by_target: Option<f64>,
}

impl HistoryEntry {
    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub rng: &'static str,
    pub rng_seed: u64,
    pub update_period_cycles: usize,
    pub events: Vec<CycleEvent>,
    pub strategy_history: Vec<HistoryEntry>,
    /// Bits conveyed over elapsed time (reaction delay, jamming, silence).
    pub realized_capacity: f64,
    pub realized_utilities: UtilityPair,
}

impl SimTrace {
    pub fn final_profile(&self) -> StrategyProfile {
        self.strategy_history
            .last()
            .expect("history always holds the initial profile")
            .profile()
    }

    pub fn total_jam_energy(&self) -> f64 {
        self.events.iter().map(|e| e.jam_energy).sum()
    }
}

pub fn estimate_opponent(observations: &[CycleEvent], role: Role) -> Result<f64> {
    if observations.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let n = observations.len() as f64;
    Ok(match role {
        Role::TargetEstimatesY => observations.iter().map(|e| e.jam_drawn).sum::<f64>() / n,
        Role::JammerEstimatesX => {
            let max = observations
                .iter()
                .map(|e| e.silence_drawn)
                .fold(0.0, f64::max);
            (n + 1.0) / n * max
        }
    })
}

fn random_start(p: &GameParams, rng: &mut ChaCha8Rng) -> Result<StrategyProfile> {
    let s = s_prime_bounds(p)?;
    let x = rng.random_range(p.x_min()..=10.0 * s.x_max);
    let y = rng.random_range(0.0..=10.0 * s.y_max.max(s.x_min));
    Ok(StrategyProfile::new(x, y))
}

fn draw_cycle(
    p: &GameParams,
    s: &StrategyProfile,
    index: usize,
    rng: &mut ChaCha8Rng,
) -> CycleEvent {
    let jam = if s.y > 0.0 {
        Exp::new(1.0 / s.y).expect("positive rate").sample(rng)
    } else {
        0.0
    };
    let silence = Uniform::new_inclusive(0.0, s.x)
        .expect("x is positive")
        .sample(rng);
    CycleEvent {
        index,
        silence_drawn: silence,
        jam_drawn: jam,
        bits_conveyed: (s.x / p.delta).log2(),
        jam_energy: jam * p.p_j,
    }
}

/// Runs one simulation. Deterministic in `cfg.rng_seed`.
pub fn run_sim(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let p = &cfg.params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut current = match cfg.initial {
        Some(s) => s,
        None => random_start(p, &mut rng)?,
    };

    let mut history = vec![HistoryEntry {
        update_index: 0,
        x: current.x,
        y: current.y,
        x_estimated_by_jammer: None,
        y_estimated_by_target: None,
    }];
    let mut events = Vec::with_capacity(cfg.total_cycles);
    let mut elapsed = 0.0;
    let mut bits = 0.0;
    let period = cfg.update_period_cycles;

    for i in 0..cfg.total_cycles {
        let ev = draw_cycle(p, &current, i, &mut rng);
        elapsed += p.t_aj + ev.jam_drawn + ev.silence_drawn;
        bits += ev.bits_conveyed;
        events.push(ev);

        if (i + 1) % period == 0 {
            let window = &events[i + 1 - period..=i];
            let (x_est, y_est) = match cfg.estimator {
                Estimator::SampleMeanYMaxX => (
                    estimate_opponent(window, Role::JammerEstimatesX)?,
                    estimate_opponent(window, Role::TargetEstimatesY)?,
                ),
                Estimator::PerfectObservation => (current.x, current.y),
            };
            current = StrategyProfile::new(
                best_response_target(p, y_est),
                best_response_jammer(p, x_est.max(p.x_min()))?,
            );
            history.push(HistoryEntry {
                update_index: history.len(),
                x: current.x,
                y: current.y,
                x_estimated_by_jammer: Some(x_est),
                y_estimated_by_target: Some(y_est),
            });
        }
    }

    let realized_capacity = bits / elapsed;
    let n = events.len() as f64;
    let mean_jam = events.iter().map(|e| e.jam_drawn).sum::<f64>() / n;
    let realized_utilities = UtilityPair {
        u_t: realized_capacity - p.target_cost(),
        u_j: -realized_capacity - p.c_t * mean_jam * p.p_j,
    };
    Ok(SimTrace {
        rng: RNG_NAME,
        rng_seed: cfg.rng_seed,
        update_period_cycles: period,
        events,
        strategy_history: history,
        realized_capacity,
        realized_utilities,
    })
}

/// First update index from which every later profile stays at the NE, up
/// to the noise the estimators leave at equilibrium.
///
/// The band is three standard errors of the window estimates taken at the
/// NE itself (`y/√n` for the exponential mean, `x/√(n(n+2))` for the
/// corrected maximum), carried through the slope of the best response. At
/// a border NE the target's estimate is exactly zero, so `x` must match
/// `b_T(0)` exactly.
pub fn updates_to_ne(p: &GameParams, trace: &SimTrace) -> Result<Option<usize>> {
    let ne = nash_closed_form(p)?.profile;
    let n = trace.update_period_cycles as f64;
    let se_y = ne.y / n.sqrt();
    let se_x = ne.x / (n * (n + 2.0)).sqrt();
    let band_x = 3.0 * best_response_target_slope(p, ne.y) * se_y;
    let band_y = 3.0 * chi_slope(p, ne.x)?.abs() * se_x;
    let at_ne = |s: &HistoryEntry| {
        (s.x - ne.x).abs() <= 1e-9 * ne.x + band_x
            && (s.y - ne.y).abs() <= 1e-9 * ne.y.max(p.delta) + band_y
    };
    let h = &trace.strategy_history;
    let stays = h.iter().rev().take_while(|s| at_ne(s)).count();
    Ok((stays > 0).then(|| h.len() - stays))
}
