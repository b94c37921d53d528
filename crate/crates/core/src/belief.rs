//! Leader with imperfect knowledge of the jammer's weight `c_T`.
//!
//! The target assumes a weight `ξ`, commits to the Stackelberg strategy
//! `g(ξ)` for that weight, and is then paid according to the true `c_T`.

use crate::error::{Error, Result};
use crate::model::GameParams;
use crate::quadrature::integrate;
use crate::special_fn::{lambert_w, WBranch};
use crate::stackelberg::{stackelberg_approx_x, stackelberg_x};

const QUAD_REL_TOL: f64 = 1e-10;
const DEFAULT_GRID: usize = 256;

/// Density over the jammer weight.
pub trait Prior {
    fn support(&self) -> (f64, f64);
    fn density(&self, alpha: f64) -> f64;
    /// Points inside the support where the density has kinks.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPrior {
    pub xi_min: f64,
    pub xi_max: f64,
}

impl UniformPrior {
    pub fn new(xi_min: f64, xi_max: f64) -> Result<Self> {
        if !(xi_min > 0.0 && xi_max > xi_min && xi_max.is_finite()) {
            return Err(Error::InvalidPrior("need 0 < xi_min < xi_max"));
        }
        Ok(UniformPrior { xi_min, xi_max })
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.xi_min + self.xi_max)
    }
}

impl Prior for UniformPrior {
    fn support(&self) -> (f64, f64) {
        (self.xi_min, self.xi_max)
    }

    fn density(&self, alpha: f64) -> f64 {
        if alpha >= self.xi_min && alpha <= self.xi_max {
            1.0 / (self.xi_max - self.xi_min)
        } else {
            0.0
        }
    }
}

/// Piecewise-linear density through `(alpha, weight)` knots, normalised to
/// unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPrior {
    knots: Vec<(f64, f64)>,
}

impl TabulatedPrior {
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.len() < 2 || knots[0].0 <= 0.0 || knots.iter().any(|k| k.1 < 0.0) {
            return Err(Error::InvalidPrior(
                "need at least two knots with positive abscissae and non-negative weights",
            ));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidPrior("knot abscissae must be distinct"));
        }
        let mass: f64 = knots
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidPrior("zero total mass"));
        }
        for k in &mut knots {
            k.1 /= mass;
        }
        Ok(TabulatedPrior { knots })
    }
}

impl Prior for TabulatedPrior {
    fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    fn density(&self, alpha: f64) -> f64 {
        let i = self.knots.partition_point(|k| k.0 <= alpha);
        if i == 0 || i == self.knots.len() && alpha > self.knots[i - 1].0 {
            return 0.0;
        }
        if i == self.knots.len() {
            return self.knots[i - 1].1;
        }
        let (a0, f0) = self.knots[i - 1];
        let (a1, f1) = self.knots[i];
        f0 + (f1 - f0) * (alpha - a0) / (a1 - a0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.knots[1..self.knots.len() - 1]
            .iter()
            .map(|k| k.0)
            .collect()
    }
}

fn check_weight(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "jammer weight",
            value: xi,
        })
    }
}

/// Leader strategy `g(ξ)`: the exact SE silence bound for weight `ξ`.
pub fn g_of_xi(p: &GameParams, xi: f64) -> Result<f64> {
    check_weight(xi)?;
    stackelberg_x(&p.with_c_t(xi), 0.0)
}

/// Realised utility under true weight `alpha` for a leader that played
/// `x = g(ξ)`; `xi` only selects the branch.
fn realized_at(p: &GameParams, g: f64, xi: f64, alpha: f64) -> f64 {
    let bits = (g / p.delta).log2();
    if xi > alpha {
        (alpha * p.p_j * bits).sqrt()
    } else {
        bits / (p.t_aj + g / 2.0)
    }
}

/// Target utility when it assumes `ξ` and the true weight is `p.c_t`.
pub fn realized_utility(p: &GameParams, xi: f64) -> Result<f64> {
    let g = g_of_xi(p, xi)?;
    Ok(realized_at(p, g, xi, p.c_t))
}

/// `E_α[U_T^ξ | c_T = α]` by adaptive quadrature over the prior.
pub fn expected_utility_numeric<P: Prior>(p: &GameParams, prior: &P, xi: f64) -> Result<f64> {
    let g = g_of_xi(p, xi)?;
    let (lo, hi) = prior.support();
    let mut cuts = vec![lo];
    cuts.extend(prior.breakpoints());
    if xi > lo && xi < hi {
        cuts.push(xi);
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integrand = |alpha: f64| realized_at(p, g, xi, alpha) * prior.density(alpha);
    Ok(cuts
        .windows(2)
        .map(|w| integrate(integrand, w[0], w[1], QUAD_REL_TOL))
        .sum())
}

/// Closed form of the expected utility under a uniform prior.
pub fn expected_utility_closed(p: &GameParams, prior: &UniformPrior, xi: f64) -> Result<f64> {
    if !(xi >= prior.xi_min && xi <= prior.xi_max) {
        return Err(Error::Domain {
            what: "expected_utility_closed",
            value: xi,
        });
    }
    let g = g_of_xi(p, xi)?;
    Ok(closed_form_with(p, prior, xi, g))
}

fn closed_form_with(p: &GameParams, prior: &UniformPrior, xi: f64, g: f64) -> f64 {
    let bracket =
        xi * prior.xi_max - xi * xi / 3.0 - 2.0 / 3.0 * xi.sqrt() * prior.xi_min.powf(1.5);
    p.p_j * (p.t_aj + g / 2.0) / (prior.xi_max - prior.xi_min) * bracket
}

/// How the leader maps an assumed weight to a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyMap {
    /// Exact root of `χ` for weight `ξ`.
    #[default]
    Exact,
    /// The closed-form approximation `x'_SE`, with `T_AJ` also dropped from
    /// the expected utility so the objective stays consistent with it.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiOpt {
    pub xi: f64,
    pub expected_utility: f64,
    /// The maximiser sits on the edge of the prior support.
    pub at_boundary: bool,
}

fn objective(p: &GameParams, prior: &UniformPrior, map: StrategyMap, xi: f64) -> Result<f64> {
    match map {
        StrategyMap::Exact => Ok(closed_form_with(p, prior, xi, g_of_xi(p, xi)?)),
        StrategyMap::Approx => {
            let g = stackelberg_approx_x(&p.with_c_t(xi))?;
            let q = GameParams { t_aj: 0.0, ..*p };
            Ok(closed_form_with(&q, prior, xi, g))
        }
    }
}

/// Maximiser of the uniform-prior expected utility over the support.
pub fn xi_opt(p: &GameParams, prior: &UniformPrior) -> Result<XiOpt> {
    xi_opt_with(p, prior, StrategyMap::Exact, DEFAULT_GRID)
}

/// Log-grid scan with `grid_points` nodes, then golden-section refinement
/// around the best node.
pub fn xi_opt_with(
    p: &GameParams,
    prior: &UniformPrior,
    map: StrategyMap,
    grid_points: usize,
) -> Result<XiOpt> {
    let n = grid_points.max(3);
    let ratio = prior.xi_max / prior.xi_min;
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                prior.xi_max
            } else {
                prior.xi_min * ratio.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    let values = grid
        .iter()
        .map(|&xi| objective(p, prior, map, xi))
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(p, prior, map, c)?;
    let mut fd = objective(p, prior, map, d)?;
    while b - a > 1e-13 * b {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(p, prior, map, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(p, prior, map, d)?;
        }
    }
    let mut xi = 0.5 * (a + b);
    let mut value = objective(p, prior, map, xi)?;
    // Golden section cannot land on an edge; compare against the edges.
    for edge in [prior.xi_min, prior.xi_max] {
        let v = objective(p, prior, map, edge)?;
        if v > value {
            xi = edge;
            value = v;
        }
    }
    let at_boundary = xi == prior.xi_min || xi == prior.xi_max;
    Ok(XiOpt {
        xi,
        expected_utility: value,
        at_boundary,
    })
}

/// Relative residual of the first-order condition for the uniform-prior
/// objective with the approximate strategy map.
pub fn first_order_residual(p: &GameParams, prior: &UniformPrior, xi: f64) -> Result<f64> {
    let w = lambert_w(
        -p.p_j * std::f64::consts::LN_2 * p.delta * p.delta / 2.0 * xi,
        WBranch::Minus1,
    )?;
    let m = prior.xi_min.powf(1.5) / xi.sqrt();
    let lhs = w / (1.0 + w) * (prior.xi_max - xi / 3.0 - 2.0 / 3.0 * m);
    let rhs = 2.0 * prior.xi_max - 4.0 / 3.0 * xi - 2.0 / 3.0 * m;
    Ok((lhs - rhs) / lhs.abs().max(rhs.abs()))
}

/// Equilibrium efficiency `e(ξ) = U_T^ξ / U_T^{c_T}`.
pub fn efficiency(p: &GameParams, xi: f64) -> Result<f64> {
    let reference = realized_utility(p, p.c_t)?;
    if !(reference > 0.0) {
        return Err(Error::DegenerateUtility { value: reference });
    }
    Ok(realized_utility(p, xi)? / reference)
}
