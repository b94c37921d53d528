//! Release gate. Every check prints one `criterion N: PASS|FAIL` line with
//! the measured numbers; the process fails if any check fails.
//!
//! `cargo test -p jamgame-verify --test acceptance`

use std::time::{Duration, Instant};

use jamgame::belief::{
    efficiency, expected_utility_closed, expected_utility_numeric, xi_opt, UniformPrior,
};
use jamgame::best_response::{chi, psi, thresholds};
use jamgame::model::utilities;
use jamgame::nash::{brd, convergence_certificate, nash_closed_form, s_prime_bounds, Regime};
use jamgame::sim::{run_sim, updates_to_ne, Estimator, SimConfig};
use jamgame::special_fn::{lambert_w, lambert_w_prime, WBranch, INV_E};
use jamgame::stackelberg::{
    approximation_accuracy, bracket_width_for_loss, default_leader_loss, improvement_report,
    leader_utility, stackelberg_exact,
};
use jamgame::sweep::log_range;
use jamgame::{GameParams, StrategyProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {tag} | {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c_grid(n: usize) -> Vec<f64> {
    log_range(1e5, 1e9, n).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn random_start(p: &GameParams, rng: &mut ChaCha8Rng, spread: f64) -> StrategyProfile {
    let b = s_prime_bounds(p).unwrap();
    StrategyProfile::new(
        rng.random_range(p.x_min()..=spread * b.x_max),
        rng.random_range(0.0..=spread * b.y_max.max(p.delta)),
    )
}

fn criterion_1_lambert_w() -> bool {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        // half near the branch point, half log-uniform up to 1e300
        let z = if i % 2 == 0 {
            -INV_E + rng.random::<f64>() * INV_E * 1.000_000_1
        } else {
            10f64.powf(rng.random_range(-300.0..300.0))
        };
        let z = z.max(-INV_E);
        let w = lambert_w(z, WBranch::Principal).unwrap();
        worst = worst.max((w * w.exp() - z).abs() / z.abs().max(1.0));
    }
    for i in 0..10_000 {
        let z = if i % 2 == 0 {
            -INV_E * rng.random::<f64>()
        } else {
            -10f64.powf(rng.random_range(-300.0..(-INV_E).abs().log10()))
        };
        let z = z.clamp(-INV_E, -f64::MIN_POSITIVE);
        let w = lambert_w(z, WBranch::Minus1).unwrap();
        let err = if w.exp() == 0.0 {
            // e^W underflows; compare in log form
            ((-w).ln() + w - (-z).ln()).abs() * z.abs()
        } else {
            (w * w.exp() - z).abs()
        };
        worst = worst.max(err / z.abs().max(1.0));
    }

    let mut worst_d = 0.0f64;
    let grid = log_range(1e-8, 1e8, 200).unwrap();
    let mut points: Vec<(f64, WBranch)> = grid.iter().map(|&z| (z, WBranch::Principal)).collect();
    points.extend(
        grid.iter()
            .map(|&z| (-z * 1e-8 * INV_E, WBranch::Principal)),
    );
    points.extend(
        log_range(1e-12, 0.99, 200)
            .unwrap()
            .iter()
            .map(|&u| (-u * INV_E, WBranch::Minus1)),
    );
    for (z, b) in points {
        if (z + INV_E).abs() < 1e-3 * INV_E {
            continue;
        }
        let h = 1e-5 * z.abs().min((z + INV_E).abs());
        let fd = (lambert_w(z + h, b).unwrap() - lambert_w(z - h, b).unwrap()) / (2.0 * h);
        let d = lambert_w_prime(z, b).unwrap();
        worst_d = worst_d.max(rel(fd, d));
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-12 && worst_d <= 1e-6 && within(elapsed, 1.0);
    verdict(
        1,
        pass,
        &format!(
            "max scaled identity residual {worst:.2e}, max derivative rel err {worst_d:.2e}, {:.3}s",
            elapsed.as_secs_f64()
        ),
    );
    pass
}

fn criterion_2_closed_form_is_brd_limit_and_fast() -> bool {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_fp = 0.0f64;
    let mut counts = Vec::new();
    let mut never = 0usize;
    for c in c_grid(50) {
        let p = GameParams::baseline(c);
        let ne = nash_closed_form(&p).unwrap().profile;
        let t = brd(&p, StrategyProfile::new(p.x_min(), 0.0), 1e-12, 1000).unwrap();
        let last = t.last();
        worst_fp = worst_fp
            .max(rel(last.x, ne.x))
            .max((last.y - ne.y).abs() / ne.y.max(p.delta));
        for _ in 0..100 {
            let start = random_start(&p, &mut rng, 100.0);
            let t = brd(&p, start, 0.0, 60).unwrap();
            match t.first_within(&ne, 1e-6, p.delta) {
                Some(k) => counts.push((c, k)),
                None => never += 1,
            }
        }
    }
    let elapsed = t0.elapsed();
    let max = counts.iter().map(|c| c.1).max().unwrap_or(usize::MAX);
    let over_7 = counts.iter().filter(|c| c.1 > 7).count();
    let over_10: Vec<_> = counts.iter().filter(|c| c.1 > 10).collect();
    let mut sorted: Vec<usize> = counts.iter().map(|c| c.1).collect();
    sorted.sort_unstable();
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0);
    if let (Some(first), Some(last)) = (over_10.first(), over_10.last()) {
        println!(
            "  outliers above 10 iterations: {} runs, e.g. c_t = {:.3e} ({} it), c_t = {:.3e} ({} it)",
            over_10.len(),
            first.0,
            first.1,
            last.0,
            last.1
        );
    }
    let pass = worst_fp <= 1e-6 && never == 0 && over_10.is_empty() && within(elapsed, 10.0);
    verdict(
        2,
        pass,
        &format!(
            "fixed point rel err {worst_fp:.2e}; iterations to 1e-6: median {median}, max {max}, \
             {over_7} runs > 7, {} runs > 10, {never} never; {:.2}s",
            over_10.len(),
            elapsed.as_secs_f64()
        ),
    );
    pass
}

fn criterion_3_absorbing_set() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for _ in 0..1000 {
        let c = 10f64.powf(rng.random_range(5.0..9.0));
        let p = GameParams::baseline(c);
        let b = s_prime_bounds(&p).unwrap();
        let start = random_start(&p, &mut rng, 100.0);
        let t = brd(&p, start, 0.0, 50).unwrap();
        if !t.iterates[2..].iter().all(|s| b.contains(s, 1e-12)) {
            failures += 1;
        }
    }
    let pass = failures == 0;
    verdict(
        3,
        pass,
        &format!("{failures} of 1000 runs left S' at some iteration in 2..=50"),
    );
    pass
}

fn criterion_4_certificate_soundness() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = 1e-9;
    let mut covered = 0;
    let mut bad_jb = 0;
    let mut violations = 0;
    let mut worst_slack = i64::MAX;
    for c in log_range(1e5, 1e11, 60).unwrap() {
        let p = GameParams::baseline(c);
        let b = s_prime_bounds(&p).unwrap();
        for _ in 0..20 {
            let start = StrategyProfile::new(
                rng.random_range(b.x_min..=b.x_max),
                rng.random_range(0.0..=b.y_max),
            );
            let cert = convergence_certificate(&p, eps, start).unwrap();
            if !cert.condition_ct_holds {
                continue;
            }
            covered += 1;
            let Some(predicted) = cert.predicted_max_iterations.filter(|_| cert.jb_max < 1.0)
            else {
                bad_jb += 1;
                continue;
            };
            let t = brd(&p, start, 0.0, predicted as usize + 5).unwrap();
            let empirical = t
                .steps(p.delta)
                .iter()
                .position(|&d| d <= eps)
                .unwrap_or(usize::MAX);
            if empirical as u64 > predicted {
                violations += 1;
            }
            worst_slack = worst_slack.min(predicted as i64 - empirical as i64);
        }
    }
    let pass = covered > 0 && bad_jb == 0 && violations == 0;
    verdict(
        4,
        pass,
        &format!(
            "{covered} certified runs, {bad_jb} with jb_max >= 1, {violations} exceeding the \
             predicted count (min slack {worst_slack})"
        ),
    );
    pass
}

fn criterion_5_stackelberg() -> bool {
    let base = GameParams::baseline(1e6);
    let c_tilde = thresholds(&base).c_t_tilde;
    let mut nonzero_y = 0;
    let mut worst_residual = 0.0f64;
    let mut grid_beaten = 0;
    for c in c_grid(50) {
        let p = GameParams::baseline(c);
        let tol = bracket_width_for_loss(&p, default_leader_loss(&p));
        let se = stackelberg_exact(&p, tol).unwrap();
        if se.profile.y != 0.0 {
            nonzero_y += 1;
        }
        let x = se.profile.x;
        worst_residual = worst_residual.max(chi(&p, x).unwrap().abs() / tol);
        let best = leader_utility(&p, x).unwrap();
        for g in log_range(p.x_min(), 10.0 * x, 10_000).unwrap() {
            if leader_utility(&p, g).unwrap() > best {
                grid_beaten += 1;
            }
        }
    }
    let mut wrong_improvement = 0;
    let mut worst_eq = 0.0f64;
    let probe = log_range(1e5, 1e11, 60).unwrap().into_iter().chain([
        0.999 * c_tilde,
        1.001 * c_tilde,
        4e9,
    ]);
    for c in probe {
        let r = improvement_report(&base.with_c_t(c)).unwrap();
        let strictly = r.u_t_se > r.u_t_ne * (1.0 + 1e-9);
        if strictly != (c < c_tilde) {
            wrong_improvement += 1;
        }
        if c >= c_tilde {
            worst_eq = worst_eq.max(rel(r.u_t_se, r.u_t_ne));
        }
    }
    let pass = nonzero_y == 0
        && worst_residual <= 1.0
        && grid_beaten == 0
        && wrong_improvement == 0
        && worst_eq <= 1e-9;
    verdict(
        5,
        pass,
        &format!(
            "y_SE != 0 at {nonzero_y} points; max |chi(x_SE)|/tol {worst_residual:.2e}; \
             {grid_beaten} grid points beat x_SE; {wrong_improvement} wrong improvement flags; \
             max rel gap above c~_T {worst_eq:.1e}"
        ),
    );
    pass
}

fn criterion_6_approximation_accuracy() -> bool {
    let ratios: Vec<(f64, f64)> = c_grid(50)
        .into_iter()
        .map(|c| (c, approximation_accuracy(&GameParams::baseline(c)).unwrap()))
        .collect();
    let (c_min, r_min) = ratios
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let pass = r_min >= 0.82 && ratios.iter().all(|r| r.1 <= 1.0);
    verdict(
        6,
        pass,
        &format!("min accuracy ratio {r_min:.4} at c_t = {c_min:.3e}"),
    );
    pass
}

fn criterion_7_imperfect_knowledge() -> bool {
    let prior = UniformPrior::new(1e5, 1e9).unwrap();
    let base = GameParams::baseline(1e6);
    let opt = xi_opt(&base, &prior).unwrap();

    let mut worst_closed = 0.0f64;
    for xi in log_range(prior.xi_min, prior.xi_max, 20).unwrap() {
        let q = expected_utility_numeric(&base, &prior, xi).unwrap();
        let c = expected_utility_closed(&base, &prior, xi).unwrap();
        worst_closed = worst_closed.max(rel(c, q));
    }

    let mut min = [(f64::INFINITY, 0.0); 3];
    let mut worst_gap = f64::NEG_INFINITY;
    for c in c_grid(50) {
        let p = base.with_c_t(c);
        let e = [
            efficiency(&p, opt.xi).unwrap(),
            efficiency(&p, prior.mean()).unwrap(),
            efficiency(&p, prior.xi_max).unwrap(),
        ];
        for (m, v) in min.iter_mut().zip(e) {
            if v < m.0 {
                *m = (v, c);
            }
        }
        worst_gap = worst_gap.max(e[0] - e[2]);
    }
    let floor_ok = min.iter().all(|m| m.0 > 0.75);
    let gap_ok = worst_gap <= 0.02;
    let closed_ok = worst_closed <= 1e-6;
    let pass = floor_ok && gap_ok && closed_ok;
    verdict(
        7,
        pass,
        &format!(
            "xi_opt = {:.4e}{}; min e(xi_opt) {:.4} at c_t = {:.2e}, min e(xi_mean) {:.4} at \
             c_t = {:.2e}, min e(xi_max) {:.4} at c_t = {:.2e}; max e(xi_opt) - e(xi_max) \
             {worst_gap:.4}; closed form vs quadrature max rel err {worst_closed:.2e}",
            opt.xi,
            if opt.at_boundary { " (boundary)" } else { "" },
            min[0].0,
            min[0].1,
            min[1].0,
            min[1].1,
            min[2].0,
            min[2].1,
        ),
    );
    pass
}

fn criterion_8_simulation() -> bool {
    let t0 = Instant::now();
    let p = GameParams::sim_baseline();
    let mut reached = 0;
    let mut slowest = 0;
    for seed in 0..100u64 {
        let trace = run_sim(&SimConfig::new(p, 200, seed)).unwrap();
        if let Some(k) = updates_to_ne(&p, &trace).unwrap() {
            if k <= 3 + 2 {
                reached += 1;
            }
            slowest = slowest.max(k);
        }
    }

    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for c in [1e5, 1e7, 1e9, 8e9] {
        let q = GameParams::baseline(c);
        let start = random_start(&q, &mut rng, 10.0);
        let mut cfg = SimConfig::new(q, 300, 5);
        cfg.estimator = Estimator::PerfectObservation;
        cfg.initial = Some(start);
        let trace = run_sim(&cfg).unwrap();
        let b = brd(&q, start, -1.0, 30).unwrap();
        for (h, s) in trace.strategy_history.iter().zip(&b.iterates) {
            worst = worst
                .max((h.x - s.x).abs() / s.x)
                .max((h.y - s.y).abs() / s.y.max(q.delta));
        }
        if trace.strategy_history.len() != b.iterates.len() {
            worst = f64::INFINITY;
        }
    }
    let elapsed = t0.elapsed();
    let pass = reached >= 95 && worst <= 1e-9 && within(elapsed, 30.0);
    verdict(
        8,
        pass,
        &format!(
            "{reached}/100 seeds at the NE within 5 updates (slowest {slowest}); \
             perfect-observation vs BRD max rel diff {worst:.1e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
    pass
}

fn criterion_9_utility_shapes_and_interior_identity() -> bool {
    let mut concave_bad = 0;
    let mut decreasing_bad = 0;
    let mut jammer_bad = 0;
    for c in c_grid(10) {
        let p = GameParams::baseline(c);
        let y_m = s_prime_bounds(&p).unwrap().y_max.max(p.delta);
        let u = |x: f64, y: f64| utilities(&p, &StrategyProfile::new(x, y)).unwrap();
        for y in log_range(1e-3 * p.delta, 10.0 * y_m, 20).unwrap() {
            let bt = jamgame::best_response::best_response_target(&p, y);
            for x in log_range(p.x_min() * 1.01, bt * 0.999, 200).unwrap() {
                let h = 1e-3 * x;
                if u(x + h, y).u_t - 2.0 * u(x, y).u_t + u(x - h, y).u_t >= 0.0 {
                    concave_bad += 1;
                }
            }
            for x in log_range(bt * 1.001, 1e3 * bt, 200).unwrap() {
                if u(x * 1.001, y).u_t >= u(x, y).u_t {
                    decreasing_bad += 1;
                }
            }
        }
        for x in log_range(p.x_min(), 1e4 * p.x_min(), 20).unwrap() {
            let h = 1e-3 * y_m;
            for i in 1..200 {
                let y = 10.0 * y_m * i as f64 / 200.0;
                let (a, b, d) = (u(x, y + h).u_j, u(x, y).u_j, u(x, y - h).u_j);
                let noise = 8.0 * f64::EPSILON * (a.abs() + 2.0 * b.abs() + d.abs());
                if a - 2.0 * b + d > noise {
                    jammer_bad += 1;
                }
            }
        }
    }

    let mut worst_identity = 0.0f64;
    let mut not_interior = 0;
    let c_tilde = thresholds(&GameParams::baseline(1e6)).c_t_tilde;
    for c in log_range(1e5, 0.99 * c_tilde, 50).unwrap() {
        let p = GameParams::baseline(c);
        let ne = nash_closed_form(&p).unwrap();
        if ne.regime != Regime::InteriorNe {
            not_interior += 1;
            continue;
        }
        let y = ne.profile.y;
        let w = psi(&p, y);
        worst_identity =
            worst_identity.max(rel((y + p.t_aj).powi(2), w * w / (p.eta() * (w + 1.0))));
    }
    let pass = concave_bad == 0
        && decreasing_bad == 0
        && jammer_bad == 0
        && not_interior == 0
        && worst_identity <= 1e-9;
    verdict(
        9,
        pass,
        &format!(
            "{concave_bad} concavity, {decreasing_bad} monotonicity, {jammer_bad} jammer \
             concavity violations; interior identity max rel err {worst_identity:.2e} \
             ({not_interior} points unexpectedly on the border)"
        ),
    );
    pass
}

fn main() {
    let checks: [fn() -> bool; 9] = [
        criterion_1_lambert_w,
        criterion_2_closed_form_is_brd_limit_and_fast,
        criterion_3_absorbing_set,
        criterion_4_certificate_soundness,
        criterion_5_stackelberg,
        criterion_6_approximation_accuracy,
        criterion_7_imperfect_knowledge,
        criterion_8_simulation,
        criterion_9_utility_shapes_and_interior_identity,
    ];
    let mut failed = 0;
    for (i, check) in checks.iter().enumerate() {
        let ok = std::panic::catch_unwind(check).unwrap_or_else(|_| {
            verdict(i as u32 + 1, false, "panicked");
            false
        });
        if !ok {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
