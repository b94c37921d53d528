//! Closed-form best responses and the jammer's regime thresholds.

use std::f64::consts::{E, LN_2};

use crate::error::{Error, Result};
use crate::model::GameParams;
use crate::special_fn::{lambert_w, WBranch};

/// Principal branch for arguments that are non-negative by construction.
pub(crate) fn w0(z: f64) -> f64 {
    lambert_w(z, WBranch::Principal).expect("non-negative argument is in the principal domain")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Weight above which the jammer's best response is claimed to vanish
    /// for every `x`.
    pub c_t_max: f64,
    /// Weight at which the NE moves from the interior to the border `y = 0`.
    pub c_t_tilde: f64,
}

/// `ψ(y) = W0(2(T_AJ + y) / (eΔ))`.
pub fn psi(p: &GameParams, y: f64) -> f64 {
    w0(2.0 * (p.t_aj + y) / (E * p.delta))
}

/// `χ(x) = sqrt(ln(x/Δ) / η) - T_AJ - x/2`, the unclamped jammer response.
pub fn chi(p: &GameParams, x: f64) -> Result<f64> {
    if !(x >= p.delta) {
        return Err(Error::Domain {
            what: "chi",
            value: x,
        });
    }
    Ok(((x / p.delta).ln() / p.eta()).sqrt() - p.t_aj - x / 2.0)
}

/// `dχ/dx = (1/(x sqrt(η ln(x/Δ))) - 1) / 2`. Unbounded as `x -> Δ`.
pub fn chi_slope(p: &GameParams, x: f64) -> Result<f64> {
    if !(x > p.delta) {
        return Err(Error::Domain {
            what: "chi_slope",
            value: x,
        });
    }
    let l = (x / p.delta).ln();
    Ok(0.5 * (1.0 / (x * (p.eta() * l).sqrt()) - 1.0))
}

/// `b_T(y) = Δ e^{ψ(y) + 1}`.
pub fn best_response_target(p: &GameParams, y: f64) -> f64 {
    p.delta * (psi(p, y) + 1.0).exp()
}

/// `db_T/dy = 2 / (ψ(y) + 1)`.
pub fn best_response_target_slope(p: &GameParams, y: f64) -> f64 {
    2.0 / (psi(p, y) + 1.0)
}

/// `b_J(x) = max(χ(x), 0)`.
pub fn best_response_jammer(p: &GameParams, x: f64) -> Result<f64> {
    Ok(chi(p, x)?.max(0.0))
}

/// Maximiser of `χ`: `x̂ = Δ e^{W0(2/(ηΔ²))/2}`.
pub fn x_hat(p: &GameParams) -> f64 {
    p.delta * (0.5 * w0(2.0 / (p.eta() * p.delta * p.delta))).exp()
}

/// True when `χ(x̂) <= 0`, i.e. the jammer's best response is zero
/// everywhere.
pub fn jammer_inhibited(p: &GameParams) -> bool {
    let xh = x_hat(p).max(p.delta);
    chi(p, xh).map(|c| c <= 0.0).unwrap_or(true)
}

pub fn thresholds(p: &GameParams) -> Thresholds {
    let power = p.p_j * LN_2;
    let c_t_max = 1.0 / power / (2.0 * p.delta * (p.delta + p.t_aj));
    let w = psi(p, 0.0);
    let c_t_tilde = 4.0 / (p.delta * p.delta * power) * (-2.0 * (w + 1.0)).exp() / (w + 1.0);
    Thresholds { c_t_max, c_t_tilde }
}
