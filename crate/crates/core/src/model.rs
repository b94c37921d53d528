//! Game parameters, strategy profiles, capacity and utilities.
//!
//! All quantities are SI: seconds, watts, bit/s. Cost weights are in
//! bit/(s·J).

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Physical and economic constants of one game instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    /// Jammer reaction delay `T_AJ`.
    pub t_aj: f64,
    /// Clock precision `Δ`.
    pub delta: f64,
    /// Target transmit power.
    pub p_t: f64,
    /// Jammer transmit power.
    pub p_j: f64,
    /// Packet duration.
    pub t_p: f64,
    /// Jammer energy weight `c_T`.
    pub c_t: f64,
    /// Target energy weight `c_T*`.
    pub c_t_star: f64,
}

impl GameParams {
    /// Reaction delay 15 µs, clock precision 1 µs, 2 W for both nodes, 50 µs
    /// packets. The target's energy weight is zero.
    pub fn baseline(c_t: f64) -> Self {
        GameParams {
            t_aj: 15e-6,
            delta: 1e-6,
            p_t: 2.0,
            p_j: 2.0,
            t_p: 50e-6,
            c_t,
            c_t_star: 0.0,
        }
    }

    /// The simulation scenario: 20 µs packets, `c_T = 8e9`, `c_T* = 1e6`.
    pub fn sim_baseline() -> Self {
        GameParams {
            t_p: 20e-6,
            c_t: 8e9,
            c_t_star: 1e6,
            ..Self::baseline(8e9)
        }
    }

    pub fn with_c_t(self, c_t: f64) -> Self {
        GameParams { c_t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_aj", self.t_aj),
            ("delta", self.delta),
            ("p_t", self.p_t),
            ("p_j", self.p_j),
            ("t_p", self.t_p),
            ("c_t", self.c_t),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if !(self.c_t_star.is_finite() && self.c_t_star >= 0.0) {
            return Err(Error::InvalidParams {
                name: "c_t_star",
                value: self.c_t_star,
                reason: "must be finite and non-negative",
            });
        }
        Ok(())
    }

    /// `η = c_T · P_J · ln 2`.
    pub fn eta(&self) -> f64 {
        self.c_t * self.p_j * LN_2
    }

    /// Smallest admissible silence bound, `2Δ` (one bit per cycle).
    pub fn x_min(&self) -> f64 {
        2.0 * self.delta
    }

    /// Per-cycle energy cost of the target, `c_T* · T_P · P_T`.
    pub fn target_cost(&self) -> f64 {
        self.c_t_star * self.t_p * self.p_t
    }
}

/// A point `(x, y)`: the target's maximum silence and the jammer's mean
/// jamming duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyProfile {
    pub x: f64,
    pub y: f64,
}

impl StrategyProfile {
    pub fn new(x: f64, y: f64) -> Self {
        StrategyProfile { x, y }
    }

    pub fn validate(&self, p: &GameParams) -> Result<()> {
        if !(self.x.is_finite() && self.x >= p.x_min()) {
            return Err(Error::InvalidStrategy {
                x: self.x,
                y: self.y,
                reason: "x must be at least 2·delta",
            });
        }
        if !(self.y.is_finite() && self.y >= 0.0) {
            return Err(Error::InvalidStrategy {
                x: self.x,
                y: self.y,
                reason: "y must be non-negative",
            });
        }
        Ok(())
    }

    /// Sup norm of the difference on the `Δ`-scaled profile.
    pub fn scaled_distance(&self, other: &StrategyProfile, delta: f64) -> f64 {
        let dx = (self.x - other.x).abs() / delta;
        let dy = (self.y - other.y).abs() / delta;
        dx.max(dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityPair {
    pub u_t: f64,
    pub u_j: f64,
}

/// Expected cycle length `T_AJ + y + x/2`.
pub fn cycle_duration(p: &GameParams, s: &StrategyProfile) -> Result<f64> {
    s.validate(p)?;
    Ok(p.t_aj + s.y + s.x / 2.0)
}

/// Timing-channel capacity `log2(x/Δ) / (T_AJ + y + x/2)` in bit/s.
pub fn capacity(p: &GameParams, s: &StrategyProfile) -> Result<f64> {
    let t = cycle_duration(p, s)?;
    Ok((s.x / p.delta).log2() / t)
}

/// Target and jammer utilities.
pub fn utilities(p: &GameParams, s: &StrategyProfile) -> Result<UtilityPair> {
    let c = capacity(p, s)?;
    Ok(UtilityPair {
        u_t: c - p.target_cost(),
        u_j: -c - p.c_t * s.y * p.p_j,
    })
}
