//! Nash equilibrium: closed form, best-response dynamics (BRD) and the
//! contraction certificate for BRD.

use std::f64::consts::LN_2;

use crate::best_response::{
    best_response_jammer, best_response_target, best_response_target_slope, chi_slope, psi,
    thresholds, w0, x_hat,
};
use crate::error::Result;
use crate::model::{utilities, GameParams, StrategyProfile, UtilityPair};

/// Default BRD step tolerance on the `Δ`-scaled profile.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    InteriorNe,
    BorderNe,
    StackelbergExact,
    StackelbergApprox,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::InteriorNe => "interior",
            Regime::BorderNe => "border",
            Regime::StackelbergExact => "se_exact",
            Regime::StackelbergApprox => "se_approx",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    pub regime: Regime,
    pub utilities: UtilityPair,
}

impl EquilibriumResult {
    pub(crate) fn new(p: &GameParams, profile: StrategyProfile, regime: Regime) -> Result<Self> {
        let utilities = utilities(p, &profile)?;
        Ok(EquilibriumResult {
            profile,
            regime,
            utilities,
        })
    }
}

/// Bounds of the absorbing set `S' = [x_m, x_M] × [0, y_M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SPrime {
    pub x_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl SPrime {
    /// Membership with a relative slack on each bound.
    pub fn contains(&self, s: &StrategyProfile, slack: f64) -> bool {
        let tol_x = slack * self.x_max;
        let tol_y = slack * self.y_max.max(self.x_min);
        s.x >= self.x_min - tol_x
            && s.x <= self.x_max + tol_x
            && s.y >= -tol_y
            && s.y <= self.y_max + tol_y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCert {
    /// Largest Jacobian infinity norm of the best-response map over `S'`.
    pub jb_max: f64,
    /// Whether `c_T` exceeds the sufficient convergence threshold.
    pub condition_ct_holds: bool,
    /// The threshold itself.
    pub c_t_threshold: f64,
    /// Upper bound on the step index after which a BRD step is at most
    /// `epsilon`; `None` when `jb_max >= 1`.
    pub predicted_max_iterations: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrdTrace {
    /// `iterates[0]` is the starting profile.
    pub iterates: Vec<StrategyProfile>,
    pub converged: bool,
    pub iterations_used: usize,
    pub certificate: Option<ConvergenceCert>,
}

impl BrdTrace {
    pub fn last(&self) -> StrategyProfile {
        *self.iterates.last().expect("trace always holds the start")
    }

    /// Scaled sup-norm length of each update, in order.
    pub fn steps(&self, delta: f64) -> Vec<f64> {
        self.iterates
            .windows(2)
            .map(|w| w[1].scaled_distance(&w[0], delta))
            .collect()
    }

    /// First iterate index whose `x` and `y` are both within `rel` of
    /// `target` (relative to each component, `y` falls back to absolute
    /// `rel·Δ` when the target is zero).
    pub fn first_within(&self, target: &StrategyProfile, rel: f64, delta: f64) -> Option<usize> {
        self.iterates.iter().position(|s| {
            let ex = (s.x - target.x).abs() <= rel * target.x;
            let ey = (s.y - target.y).abs() <= rel * target.y.max(delta);
            ex && ey
        })
    }
}

/// Unique NE in closed form. Interior when `c_T < c̃_T`, otherwise on the
/// border `y = 0` at `x = b_T(0)`.
pub fn nash_closed_form(p: &GameParams) -> Result<EquilibriumResult> {
    p.validate()?;
    let th = thresholds(p);
    if p.c_t < th.c_t_tilde {
        let half_w = 0.5 * w0(8.0 / (p.eta() * p.delta * p.delta));
        let x = p.delta * half_w.exp();
        let y = 0.5 * p.delta * (half_w - 1.0) * half_w.exp() - p.t_aj;
        // Rounding can push y below zero right at the regime boundary.
        if y > 0.0 {
            return EquilibriumResult::new(p, StrategyProfile::new(x, y), Regime::InteriorNe);
        }
    }
    border_ne(p)
}

pub(crate) fn border_ne(p: &GameParams) -> Result<EquilibriumResult> {
    let x = best_response_target(p, 0.0);
    EquilibriumResult::new(p, StrategyProfile::new(x, 0.0), Regime::BorderNe)
}

/// One simultaneous update `(x, y) -> (b_T(y), b_J(x))`.
pub fn brd_step(p: &GameParams, s: &StrategyProfile) -> Result<StrategyProfile> {
    Ok(StrategyProfile::new(
        best_response_target(p, s.y),
        best_response_jammer(p, s.x)?,
    ))
}

/// Best-response dynamics with simultaneous updates.
///
/// Stops when an update moves the `Δ`-scaled profile by at most
/// `tol · max(1, |s|)` in sup norm, or after `max_iter` updates. Not
/// converging is reported through `converged = false`, not as an error.
pub fn brd(p: &GameParams, start: StrategyProfile, tol: f64, max_iter: usize) -> Result<BrdTrace> {
    p.validate()?;
    start.validate(p)?;
    let mut iterates = vec![start];
    let mut converged = false;
    let mut current = start;
    for _ in 0..max_iter {
        let next = brd_step(p, &current)?;
        let step = next.scaled_distance(&current, p.delta);
        let scale = (next.x.max(next.y) / p.delta).max(1.0);
        iterates.push(next);
        current = next;
        if step <= tol * scale {
            converged = true;
            break;
        }
    }
    let certificate = Some(convergence_certificate(p, tol, start)?);
    Ok(BrdTrace {
        iterations_used: iterates.len() - 1,
        iterates,
        converged,
        certificate,
    })
}

pub fn s_prime_bounds(p: &GameParams) -> Result<SPrime> {
    let x_min = best_response_target(p, 0.0);
    let y_max = best_response_jammer(p, x_hat(p).max(p.delta))?;
    let x_max = best_response_target(p, y_max);
    Ok(SPrime {
        x_min,
        x_max,
        y_max,
    })
}

/// `c_T'`: above it the BRD is a contraction on `S'`.
pub fn convergence_threshold(p: &GameParams) -> f64 {
    let w1 = psi(p, 0.0) + 1.0;
    1.0 / (9.0 * p.delta * p.delta * LN_2 * p.p_j) / (w1 * (2.0 * w1).exp())
}

/// Contraction certificate for BRD started at `start`.
///
/// The jammer's slope uses the unclamped `χ'`, which bounds the clamped
/// response's slope from above.
pub fn convergence_certificate(
    p: &GameParams,
    epsilon: f64,
    start: StrategyProfile,
) -> Result<ConvergenceCert> {
    let bounds = s_prime_bounds(p)?;
    // |db_T/dy| is decreasing in y; |χ'| is monotone in its bracketed
    // term, so the extremes sit at the ends of [x_m, x_M].
    let target_slope = best_response_target_slope(p, 0.0);
    let jammer_slope = chi_slope(p, bounds.x_min)?
        .abs()
        .max(chi_slope(p, bounds.x_max)?.abs());
    let jb_max = target_slope.max(jammer_slope);

    let c_t_threshold = convergence_threshold(p);
    let first = brd_step(p, &start)?;
    let d = first.scaled_distance(&start, p.delta);
    let predicted_max_iterations = if jb_max < 1.0 {
        if d <= epsilon {
            Some(1)
        } else {
            let n = ((epsilon / d).ln() / jb_max.ln()).ceil();
            Some((n as u64).max(1))
        }
    } else {
        None
    };
    Ok(ConvergenceCert {
        jb_max,
        condition_ct_holds: p.c_t > c_t_threshold,
        c_t_threshold,
        predicted_max_iterations,
    })
}
