//! Stackelberg play with the target as leader.
//!
//! The leader anticipates `b_J` and picks the larger root `x₂` of `χ`, which
//! silences the jammer. When the jammer is already silent at `b_T(0)` the
//! leader simply plays `b_T(0)`.

use std::f64::consts::LN_2;

use crate::best_response::{best_response_target, chi, x_hat};
use crate::error::{Error, Result};
use crate::model::{utilities, GameParams, StrategyProfile};
use crate::nash::{nash_closed_form, EquilibriumResult, Regime};
use crate::special_fn::{lambert_w, WBranch, INV_E};

const MAX_DOUBLINGS: usize = 2048;

/// `U_T(x, b_J(x))` with the jammer's best response substituted.
pub fn leader_utility(p: &GameParams, x: f64) -> Result<f64> {
    if !(x >= p.x_min()) {
        return Err(Error::Domain {
            what: "leader_utility",
            value: x,
        });
    }
    let bits = (x / p.delta).log2();
    let raw = if chi(p, x)? > 0.0 {
        (p.c_t * p.p_j * bits).sqrt()
    } else {
        bits / (p.t_aj + x / 2.0)
    };
    Ok(raw - p.target_cost())
}

/// Bound on `|d/dx U_T(x, b_J(x))|` between the roots of `χ`.
pub fn leader_slope_bound(p: &GameParams) -> f64 {
    (p.c_t * p.p_j).sqrt() / (4.0 * p.delta * LN_2)
}

/// Default tolerated leader loss `ε*`, relative to the utility at `x̂`.
pub fn default_leader_loss(p: &GameParams) -> f64 {
    let x = x_hat(p).max(p.x_min());
    1e-6 * leader_utility(p, x).map(f64::abs).unwrap_or(1.0)
}

/// Bracket width that keeps the leader's loss below `leader_loss`.
pub fn bracket_width_for_loss(p: &GameParams, leader_loss: f64) -> f64 {
    leader_loss / leader_slope_bound(p)
}

/// Bisects `[lo, hi]` until narrower than `x_tol` (or float resolution).
/// Requires `f(lo) > 0 >= f(hi)`.
fn bisect<F>(mut lo: f64, mut hi: f64, x_tol: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi - lo > x_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Final bisection bracket `(lo, hi)` around the larger root of `χ`, with
/// `χ(lo) > 0 >= χ(hi)` and `hi - lo <= x_tol`.
pub fn upper_root_bracket(p: &GameParams, x_tol: f64) -> Result<(f64, f64)> {
    let lo = x_hat(p).max(p.delta);
    if chi(p, lo)? <= 0.0 {
        return Err(Error::Bracket { lo, hi: lo });
    }
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while chi(p, hi)? > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Bracket { lo, hi });
        }
    }
    bisect(lo, hi, x_tol, |x| chi(p, x))
}

/// Both roots `x₁ < x̂ < x₂` of `χ`, each to within `x_tol`.
pub fn chi_roots(p: &GameParams, x_tol: f64) -> Result<(f64, f64)> {
    let (a, b) = upper_root_bracket(p, x_tol)?;
    let top = x_hat(p).max(p.delta);
    // χ(Δ) = -T_AJ - Δ/2 < 0, so [Δ, x̂] brackets the smaller root.
    let (c, d) = bisect(p.delta, top, x_tol, |x| chi(p, x).map(|v| -v))?;
    Ok((0.5 * (c + d), 0.5 * (a + b)))
}

/// Exact Stackelberg equilibrium, bisecting `χ` down to a bracket of width
/// `x_tol`. The jammer's strategy is exactly zero.
pub fn stackelberg_exact(p: &GameParams, x_tol: f64) -> Result<EquilibriumResult> {
    p.validate()?;
    let x = stackelberg_x(p, x_tol)?;
    EquilibriumResult::new(p, StrategyProfile::new(x, 0.0), Regime::StackelbergExact)
}

/// [`stackelberg_exact`] with the bracket set by [`default_leader_loss`].
pub fn stackelberg_exact_default(p: &GameParams) -> Result<EquilibriumResult> {
    stackelberg_exact(p, bracket_width_for_loss(p, default_leader_loss(p)))
}

pub(crate) fn stackelberg_x(p: &GameParams, x_tol: f64) -> Result<f64> {
    let x_free = best_response_target(p, 0.0);
    // Jammer already silent at the unjammed optimum: nothing to gain.
    if chi(p, x_free)? <= 0.0 {
        return Ok(x_free);
    }
    let (lo, hi) = upper_root_bracket(p, x_tol)?;
    let x = if leader_utility(p, lo)? >= leader_utility(p, hi)? {
        lo
    } else {
        hi
    };
    Ok(x)
}

/// Closed-form approximation of `x_SE` that neglects `T_AJ` next to `x/2`.
pub fn stackelberg_approx(p: &GameParams) -> Result<EquilibriumResult> {
    p.validate()?;
    let x = stackelberg_approx_x(p)?;
    EquilibriumResult::new(p, StrategyProfile::new(x, 0.0), Regime::StackelbergApprox)
}

pub fn stackelberg_approx_x(p: &GameParams) -> Result<f64> {
    let arg = -LN_2 * p.c_t * p.p_j * p.delta * p.delta / 2.0;
    if arg < -INV_E {
        return Err(Error::ApproxUndefined { arg });
    }
    let w = lambert_w(arg, WBranch::Minus1)?;
    Ok(p.delta * (-0.5 * w).exp())
}

/// `U_T(x'_SE, b_J(x'_SE)) / U_T(x_SE, b_J(x_SE))`.
pub fn approximation_accuracy(p: &GameParams) -> Result<f64> {
    let exact = stackelberg_exact_default(p)?;
    let approx = stackelberg_approx_x(p)?;
    Ok(leader_utility(p, approx)? / leader_utility(p, exact.profile.x)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovementReport {
    pub u_t_ne: f64,
    pub u_t_se: f64,
    pub u_j_ne: f64,
    pub u_j_se: f64,
    pub improved: bool,
}

/// Compares both players' utilities at the NE and the exact SE.
pub fn improvement_report(p: &GameParams) -> Result<ImprovementReport> {
    let ne = nash_closed_form(p)?;
    let se = stackelberg_exact_default(p)?;
    let u_se = utilities(p, &se.profile)?;
    Ok(ImprovementReport {
        u_t_ne: ne.utilities.u_t,
        u_t_se: u_se.u_t,
        u_j_ne: ne.utilities.u_j,
        u_j_se: u_se.u_j,
        improved: u_se.u_t > ne.utilities.u_t + 1e-12,
    })
}
