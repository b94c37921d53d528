//! Parameter sweeps, one table per figure id.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::belief::{efficiency, xi_opt, UniformPrior};
use crate::best_response::{best_response_jammer, best_response_target, chi};
use crate::error::{Error, Result};
use crate::model::{utilities, GameParams, StrategyProfile};
use crate::nash::nash_closed_form;
use crate::report::{Cell, Table};
use crate::stackelberg::{leader_utility, stackelberg_approx_x, stackelberg_exact_default};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    BrX,
    BrY,
    NeX,
    NeY,
    SeX,
    SeY,
    Payoffs,
    Approx,
    Efficiency,
    Comparison,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::BrX,
        Figure::BrY,
        Figure::NeX,
        Figure::NeY,
        Figure::SeX,
        Figure::SeY,
        Figure::Payoffs,
        Figure::Approx,
        Figure::Efficiency,
        Figure::Comparison,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::BrX => "brX",
            Figure::BrY => "brY",
            Figure::NeX => "neX",
            Figure::NeY => "neY",
            Figure::SeX => "seX",
            Figure::SeY => "seY",
            Figure::Payoffs => "payoffs",
            Figure::Approx => "approx",
            Figure::Efficiency => "efficiency",
            Figure::Comparison => "comparison",
        }
    }

    /// The swept quantity: `y` for `brX`, `x` for `brY`, `c_t` otherwise.
    pub fn param(self) -> &'static str {
        match self {
            Figure::BrX => "y",
            Figure::BrY => "x",
            _ => "c_t",
        }
    }

    pub fn header(self) -> Vec<&'static str> {
        match self {
            Figure::BrX => vec!["y", "b_t"],
            Figure::BrY => vec!["x", "chi", "b_j"],
            Figure::NeX => vec!["c_t", "x_ne", "regime"],
            Figure::NeY => vec!["c_t", "y_ne", "regime"],
            Figure::SeX => vec!["c_t", "x_ne", "x_se"],
            Figure::SeY => vec!["c_t", "y_ne", "y_se"],
            Figure::Payoffs => vec!["c_t", "u_t_ne", "u_t_se", "u_j_ne", "u_j_se"],
            Figure::Approx => vec![
                "c_t",
                "x_se",
                "x_se_approx",
                "u_t_se",
                "u_t_approx",
                "accuracy_ratio",
            ],
            Figure::Efficiency => vec!["c_t", "xi_opt", "e_opt", "e_mean", "e_max", "e_min"],
            Figure::Comparison => vec![
                "c_t",
                "u_t_ne",
                "u_j_ne",
                "u_t_se",
                "u_j_se",
                "u_t_case_a",
                "u_j_case_a",
                "u_t_case_b",
                "u_j_case_b",
            ],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_range(a: f64, b: f64, n: usize) -> std::result::Result<Vec<f64>, String> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(format!("log range needs 0 < a < b, got a = {a}, b = {b}"));
    }
    if n < 2 {
        return Err(format!("log range needs at least 2 points, got {n}"));
    }
    let ratio = b / a;
    Ok((0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => a * ratio.powf(i as f64 / (n - 1) as f64),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub prior: UniformPrior,
    /// Worker cap; 0 lets rayon decide.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            prior: UniformPrior {
                xi_min: 1e5,
                xi_max: 1e9,
            },
            threads: 0,
        }
    }
}

fn payoff_row(p: &GameParams) -> Result<(StrategyProfile, [f64; 2], StrategyProfile, [f64; 2])> {
    let ne = nash_closed_form(p)?;
    let se = stackelberg_exact_default(p)?;
    let u = utilities(p, &se.profile)?;
    Ok((
        ne.profile,
        [ne.utilities.u_t, ne.utilities.u_j],
        se.profile,
        [u.u_t, u.u_j],
    ))
}

fn row(fig: Figure, base: &GameParams, v: f64, opts: &SweepOptions, xi: f64) -> Result<Vec<Cell>> {
    let p = base.with_c_t(v);
    Ok(match fig {
        Figure::BrX => vec![v.into(), best_response_target(base, v).into()],
        Figure::BrY => vec![
            v.into(),
            chi(base, v)?.into(),
            best_response_jammer(base, v)?.into(),
        ],
        Figure::NeX | Figure::NeY => {
            let ne = nash_closed_form(&p)?;
            let val = if fig == Figure::NeX {
                ne.profile.x
            } else {
                ne.profile.y
            };
            vec![v.into(), val.into(), Cell::Text(ne.regime.as_str())]
        }
        Figure::SeX | Figure::SeY => {
            let (ne, _, se, _) = payoff_row(&p)?;
            if fig == Figure::SeX {
                vec![v.into(), ne.x.into(), se.x.into()]
            } else {
                vec![v.into(), ne.y.into(), se.y.into()]
            }
        }
        Figure::Payoffs => {
            let (_, une, _, use_) = payoff_row(&p)?;
            vec![
                v.into(),
                une[0].into(),
                use_[0].into(),
                une[1].into(),
                use_[1].into(),
            ]
        }
        Figure::Approx => {
            let se = stackelberg_exact_default(&p)?;
            let u_se = leader_utility(&p, se.profile.x)?;
            match stackelberg_approx_x(&p) {
                Ok(xa) => {
                    let ua = leader_utility(&p, xa)?;
                    vec![
                        v.into(),
                        se.profile.x.into(),
                        xa.into(),
                        u_se.into(),
                        ua.into(),
                        (ua / u_se).into(),
                    ]
                }
                Err(Error::ApproxUndefined { .. }) => vec![
                    v.into(),
                    se.profile.x.into(),
                    Cell::Empty,
                    u_se.into(),
                    Cell::Empty,
                    Cell::Empty,
                ],
                Err(e) => return Err(e),
            }
        }
        Figure::Efficiency => {
            let pr = &opts.prior;
            vec![
                v.into(),
                xi.into(),
                efficiency(&p, xi)?.into(),
                efficiency(&p, pr.mean())?.into(),
                efficiency(&p, pr.xi_max)?.into(),
                efficiency(&p, pr.xi_min)?.into(),
            ]
        }
        Figure::Comparison => {
            let (_, une, _, use_) = payoff_row(&p)?;
            // Case A: the target ignores the jammer and plays b_T(0).
            let xa = best_response_target(&p, 0.0);
            let a = utilities(&p, &StrategyProfile::new(xa, best_response_jammer(&p, xa)?))?;
            // Case B: the jammer assumes x = b_T(0); the target answers it.
            let yb = best_response_jammer(&p, xa)?;
            let b = utilities(&p, &StrategyProfile::new(best_response_target(&p, yb), yb))?;
            vec![
                v.into(),
                une[0].into(),
                une[1].into(),
                use_[0].into(),
                use_[1].into(),
                a.u_t.into(),
                a.u_j.into(),
                b.u_t.into(),
                b.u_j.into(),
            ]
        }
    })
}

/// Evaluates `fig` at every point of `values`. Rows come back in input
/// order whatever the worker count.
pub fn sweep(fig: Figure, base: &GameParams, values: &[f64], opts: &SweepOptions) -> Result<Table> {
    base.validate()?;
    UniformPrior::new(opts.prior.xi_min, opts.prior.xi_max)?;
    let xi = if fig == Figure::Efficiency {
        xi_opt(base, &opts.prior)?.xi
    } else {
        f64::NAN
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .expect("thread pool");
    let rows = pool.install(|| {
        values
            .par_iter()
            .map(|&v| row(fig, base, v, opts, xi))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Table {
        header: fig.header(),
        rows,
    })
}

/// Reads `JAMGAME_THREADS`; unset or unparsable means auto.
pub fn threads_from_env() -> usize {
    std::env::var("JAMGAME_THREADS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}
