//! Real branches of the Lambert W-function.
//!
//! `W(z)` solves `w * exp(w) = z`. On the reals there are two branches: the
//! principal branch `W0` defined on `[-1/e, inf)` with `W0 >= -1`, and the
//! lower branch `W-1` defined on `[-1/e, 0)` with `W-1 <= -1`.
//!
//! Evaluation starts from an asymptotic or branch-point series guess and is
//! refined with Halley steps. Extremely large (or, for `W-1`, extremely
//! small) arguments are refined in log form so `exp(w)` never overflows.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// `1/e`, the branch point is at `-1/e`.
pub const INV_E: f64 = 1.0 / E;

/// Inside this distance from the branch point the series is returned as is.
const BRANCH_SERIES_RADIUS: f64 = 1e-9;

const MAX_ITER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WBranch {
    Principal,
    Minus1,
}

impl WBranch {
    fn sign(self) -> f64 {
        match self {
            WBranch::Principal => 1.0,
            WBranch::Minus1 => -1.0,
        }
    }
}

fn check_domain(z: f64, branch: WBranch) -> Result<()> {
    let ok = match branch {
        WBranch::Principal => z >= -INV_E,
        WBranch::Minus1 => (-INV_E..0.0).contains(&z),
    };
    if ok && !z.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "lambert_w",
            value: z,
        })
    }
}

/// Series in `p = ±sqrt(2(ez + 1))` about the branch point.
fn branch_point_series(z: f64, branch: WBranch) -> f64 {
    let q = (2.0 * (E * z + 1.0)).max(0.0);
    let p = branch.sign() * q.sqrt();
    let p2 = p * p;
    -1.0 + p - p2 / 3.0 + 11.0 / 72.0 * p2 * p - 43.0 / 540.0 * p2 * p2
}

fn initial_guess(z: f64, branch: WBranch) -> f64 {
    if z < -0.25 {
        return branch_point_series(z, branch);
    }
    match branch {
        WBranch::Principal if z < 3.0 => {
            // Winitzki's global approximation.
            let l = z.ln_1p();
            l * (1.0 - l.ln_1p() / (2.0 + l))
        }
        WBranch::Principal => {
            let l1 = z.ln();
            let l2 = l1.ln();
            l1 - l2 + l2 / l1
        }
        WBranch::Minus1 => {
            let l1 = (-z).ln();
            let l2 = (-l1).ln();
            l1 - l2 + l2 / l1
        }
    }
}

fn halley(z: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if f == 0.0 || wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Newton on `w + ln|w| = ln|z|`, used where `exp(w)` would leave the
/// representable range.
fn newton_log_form(z: f64, mut w: f64) -> f64 {
    let target = z.abs().ln();
    for _ in 0..MAX_ITER {
        let g = w + w.abs().ln() - target;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Lambert W on the requested real branch.
///
/// Fails with [`Error::Domain`] for `z < -1/e`, or `z >= 0` on
/// [`WBranch::Minus1`].
pub fn lambert_w(z: f64, branch: WBranch) -> Result<f64> {
    check_domain(z, branch)?;
    if z == -INV_E {
        return Ok(-1.0);
    }
    if branch == WBranch::Principal {
        if z == 0.0 {
            return Ok(0.0);
        }
        if z == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
    }
    if z + INV_E < BRANCH_SERIES_RADIUS {
        return Ok(branch_point_series(z, branch));
    }

    let guess = initial_guess(z, branch);
    let w = match branch {
        WBranch::Principal if z > 1e100 => newton_log_form(z, guess),
        WBranch::Minus1 if z > -1e-100 => newton_log_form(z, guess),
        _ => halley(z, guess),
    };
    Ok(w)
}

/// `W'(z) = W(z) / (z (1 + W(z)))`, evaluated as `1 / (exp(W) (1 + W))` so
/// that the principal branch is well defined at `z = 0`.
pub fn lambert_w_prime(z: f64, branch: WBranch) -> Result<f64> {
    let w = lambert_w(z, branch)?;
    if w == -1.0 {
        return Err(Error::Singular {
            what: "lambert_w_prime",
            value: z,
        });
    }
    Ok(1.0 / (w.exp() * (1.0 + w)))
}
