//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness and exits non-zero when any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lglab::config::ParamSource;
use lglab::{analyze, RunConfig};
use lglab_core::equilibria::{
    count_interior_equilibria, cubic_coefficients, find_interior_equilibria, hopf_point,
    interior_roots, Taxonomy,
};
use lglab_core::ode_sim::{detect_limit_cycle, integrate, long_run_bounds, step_count, Scheme};
use lglab_core::qualitative::{invariant_region, persistence_report};
use lglab_core::sde_sim::{
    comparison_bundle, ensemble, simulate_path, stationary_histogram, EnsembleConfig, NoisePath,
    SdeScheme, StationaryConfig,
};
use lglab_core::{jacobian, vector_field, ModelParams, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Check = Result<String, String>;

fn params(a: f64, b: f64, k1: f64, k2: f64, m: f64) -> ModelParams {
    ModelParams::new(a, b, k1, k2, m).expect("valid parameters")
}

fn stoch(sigma1: f64, sigma2: f64) -> ModelParams {
    params(0.4, 0.1, 0.08, 0.2, 0.0025).with_noise(sigma1, sigma2).expect("valid noise")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Residual of the equilibrium condition along the predator nullcline,
/// written out directly from the vector field.
fn nullcline_residual(p: &ModelParams, big_x: f64) -> f64 {
    let x = p.m + big_x;
    x * (1.0 - x) * (p.k1 + big_x) - p.a * (p.k2 + big_x) * big_x
}

fn grid_sign_changes(p: &ModelParams, n: usize) -> usize {
    let upper = 1.0 - p.m;
    let mut last = 0.0f64;
    let mut changes = 0;
    for i in 0..=n {
        let v = nullcline_residual(p, upper * i as f64 / n as f64);
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let a = rng.random_range(0.05..2.0);
    let b = rng.random_range(0.01..1.0);
    let k1 = log_uniform(rng, -2.5, 0.0);
    let k2 = log_uniform(rng, -2.5, 0.0);
    let m = if rng.random_bool(0.2) { 0.0 } else { log_uniform(rng, -4.0, -0.5) };
    params(a, b, k1, k2, m)
}

fn three_equilibria() -> Check {
    let cfg = RunConfig {
        params: ParamSource::Model(params(0.5, 0.1, 0.08, 0.2, 0.0025)),
        ..RunConfig::default()
    };
    let r = analyze(&cfg).map_err(|e| e.to_string())?;
    let expected = [
        (0.0222589, 0.2197589, Taxonomy::StableFocus),
        (0.0299525, 0.2274525, Taxonomy::Saddle),
        (0.3702886, 0.5677886, Taxonomy::UnstableFocus),
    ];
    ensure(r.equilibria.len() == 3, || {
        format!("{} interior equilibria", r.equilibria.len())
    })?;
    for (e, (x, y, t)) in r.equilibria.iter().zip(expected) {
        ensure((e.x - x).abs() < 1e-5 && (e.y - y).abs() < 1e-5 && e.taxonomy == t, || {
            format!("got ({}, {}) {:?}, want ({x}, {y}) {t:?}", e.x, e.y, e.taxonomy)
        })?;
    }
    let sum = r.index_sum.as_ref().map(|s| s.sum);
    ensure(sum == Some(1), || format!("index sum {sum:?}"))?;
    Ok("3 equilibria within 1e-5, StableFocus/Saddle/UnstableFocus, index sum 1".into())
}

fn count_vs_grid() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let draws: Vec<ModelParams> = (0..1000).map(|_| random_params(&mut rng)).collect();
    let failures: Vec<String> = draws
        .par_iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let predicted = count_interior_equilibria(p).n_predicted;
            let grid = grid_sign_changes(p, 1_000_000);
            if predicted != grid {
                return Some(format!("draw {i} {p:?}: predicted {predicted}, grid {grid}"));
            }
            let c = cubic_coefficients(p);
            let roots = match interior_roots(p) {
                Ok(r) => r,
                Err(e) => return Some(format!("draw {i}: {e}")),
            };
            roots
                .iter()
                .find(|r| c.eval(r.x_shift).abs() >= 1e-10)
                .map(|r| format!("draw {i}: |R({})| = {:e}", r.x_shift, c.eval(r.x_shift).abs()))
        })
        .collect();
    ensure(failures.is_empty(), || format!("{} mismatches, first: {}", failures.len(), failures[0]))?;
    Ok("1000 draws agree with a 1e6-point grid; every |R| < 1e-10".into())
}

fn single_point_cycle() -> Check {
    let p = params(1.0, 0.05, 0.1, 0.1, 0.01);
    let r = detect_limit_cycle(&p, State::new(0.3, 0.3), 1e-3, 600.0, 1200.0).map_err(|e| e.to_string())?;
    ensure(r.found && r.stable, || format!("found={} stable={}", r.found, r.stable))?;
    Ok(format!("stable cycle, period {:.3}", r.period.unwrap_or(f64::NAN)))
}

fn three_point_cycle() -> Check {
    let p = params(0.5, 0.1, 0.08, 0.2, 0.0025);
    let r = detect_limit_cycle(&p, State::new(0.8, 0.9), 1e-3, 1000.0, 2000.0).map_err(|e| e.to_string())?;
    ensure(r.found && r.stable, || format!("found={} stable={}", r.found, r.stable))?;
    let eqs = find_interior_equilibria(&p).map_err(|e| e.to_string())?;
    for e in &eqs {
        ensure(r.x_min < e.x && e.x < r.x_max, || {
            format!("x-extent [{}, {}] misses x* = {}", r.x_min, r.x_max, e.x)
        })?;
    }
    Ok(format!("stable cycle, x in [{:.4}, {:.4}] covers all {} equilibria", r.x_min, r.x_max, eqs.len()))
}

/// Supercritical case: cycles exist for b just below b0 with amplitude
/// growing like the square root of the distance; just above, the focus attracts.
fn hopf_stable_side() -> Check {
    let base = params(1.1, 0.3, 0.08, 0.01, 0.0025);
    let e = find_interior_equilibria(&base).map_err(|e| e.to_string())?[0];
    let h = hopf_point(&base, &e).map_err(|e| e.to_string())?;
    ensure(h.lambda < 0.0, || format!("lambda = {}", h.lambda))?;
    let init = State::new(e.x + 0.01, e.y);
    let amplitude = |delta: f64| -> Result<f64, String> {
        let p = ModelParams { b: h.b0 * (1.0 - delta), ..base };
        let r = detect_limit_cycle(&p, init, 1e-3, 1500.0, 3000.0).map_err(|e| e.to_string())?;
        ensure(r.found && r.stable, || format!("b = b0(1 - {delta}): found={} stable={}", r.found, r.stable))?;
        ensure(r.x_min < e.x && e.x < r.x_max, || "cycle does not surround x*".into())?;
        Ok(r.amplitude_x)
    };
    let (a1, a2) = (amplitude(0.01)?, amplitude(0.02)?);
    let ratio = a2 / a1;
    ensure(a2 < 0.2 && (1.2..=1.7).contains(&ratio), || {
        format!("amplitudes {a1} and {a2}, ratio {ratio} is not near sqrt(2)")
    })?;
    let above = ModelParams { b: h.b0 * 1.02, ..base };
    let last = integrate(&above, init, Scheme::Rk4, 1e-3, 3000.0).map_err(|e| e.to_string())?.last();
    let dist = (last.x - e.x).hypot(last.y - e.y);
    ensure(dist < 1e-3, || format!("b just above b0 ends {dist} from x*"))?;
    Ok(format!(
        "b0 = {:.5}, lambda = {:.4}; cycle amplitudes {a1:.4}, {a2:.4} (ratio {ratio:.3}); focus attracts above b0",
        h.b0, h.lambda
    ))
}

/// Subcritical case: lambda > 0, and just past b0 orbits near the
/// equilibrium are repelled.
fn hopf_repelling_side() -> Check {
    let base = params(0.5, 0.1, 0.08, 0.1, 0.002);
    let e = find_interior_equilibria(&base).map_err(|e| e.to_string())?[0];
    let h = hopf_point(&base, &e).map_err(|e| e.to_string())?;
    ensure(h.lambda > 0.0, || format!("lambda = {}", h.lambda))?;
    let past = ModelParams { b: h.b0 * 0.99, ..base };
    let init = State::new(e.x + 0.01, e.y);
    let tr = integrate(&past, init, Scheme::Rk4, 1e-3, 500.0).map_err(|e| e.to_string())?;
    let far = tr.states.iter().map(|s| (s.x - e.x).hypot(s.y - e.y)).fold(0.0, f64::max);
    ensure(far > 0.05, || format!("orbit stayed within {far} of x*"))?;
    Ok(format!("b0 = {:.5}, lambda = {:.4}; orbit leaves the equilibrium", h.b0, h.lambda))
}

fn invariance_and_persistence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut jobs = Vec::new();
    for _ in 0..50 {
        let p = params(
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..1.0),
            log_uniform(&mut rng, -2.0, 0.0),
            log_uniform(&mut rng, -2.0, 0.0),
            log_uniform(&mut rng, -3.0, -0.3),
        );
        for _ in 0..20 {
            jobs.push((p, State::new(rng.random_range(0.01..1.5), rng.random_range(0.01..2.0))));
        }
    }
    let refuge_free: Vec<(ModelParams, State)> = (0..10)
        .flat_map(|_| {
            let a = rng.random_range(0.05..1.0);
            let k2 = log_uniform(&mut rng, -2.0, 0.0);
            let k1 = a * (1.0 + k2) * rng.random_range(1.1..3.0);
            let p = params(a, rng.random_range(0.1..1.0), k1, k2, 0.0);
            (0..5)
                .map(|_| (p, State::new(rng.random_range(0.01..1.5), rng.random_range(0.01..2.0))))
                .collect::<Vec<_>>()
        })
        .collect();

    let tol = 1e-3;
    let failures: Vec<String> = jobs
        .par_iter()
        .map(|(p, init)| {
            let tr = integrate(p, *init, Scheme::Rk4, 1e-3, 500.0).map_err(|e| e.to_string())?;
            let r = invariant_region(p);
            let b = long_run_bounds(&tr, 0.2).map_err(|e| e.to_string())?;
            ensure(r.contains(tr.last(), tol), || format!("{p:?} from {init:?}: final {:?} outside A", tr.last()))?;
            ensure(
                b.liminf_x >= r.x_lo - tol
                    && b.limsup_x <= r.x_hi + tol
                    && b.liminf_y >= r.y_lo - tol
                    && b.limsup_y <= r.y_hi + tol,
                || format!("{p:?} from {init:?}: tail bounds {b:?} exceed {r:?}"),
            )
        })
        .chain(refuge_free.par_iter().map(|(p, init)| {
            let bound = persistence_report(p)
                .liminf_x_bound
                .ok_or_else(|| format!("{p:?}: no liminf bound"))?;
            let tr = integrate(p, *init, Scheme::Rk4, 1e-3, 500.0).map_err(|e| e.to_string())?;
            let b = long_run_bounds(&tr, 0.2).map_err(|e| e.to_string())?;
            ensure(b.liminf_x >= bound - tol, || {
                format!("{p:?} from {init:?}: liminf x {} < {bound}", b.liminf_x)
            })
        }))
        .filter_map(Result::err)
        .collect();
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!("{} refuge runs and {} refuge-free runs within 1e-3", jobs.len(), refuge_free.len()))
}

fn jacobian_vs_differences() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = loop {
            let s = State::new(rng.random_range(0.001..1.5), rng.random_range(0.001..2.0));
            if (s.x - p.m).abs() > 1e-3 {
                break s;
            }
        };
        let j = jacobian(&p, s).map_err(|e| e.to_string())?;
        let h = 1e-6 * s.x.min(s.y).min((s.x - p.m).abs()).min(1.0);
        let d = |dx: f64, dy: f64| {
            let f = vector_field(&p, State::new(s.x + dx, s.y + dy));
            let g = vector_field(&p, State::new(s.x - dx, s.y - dy));
            ((f.dx - g.dx) / (2.0 * h), (f.dy - g.dy) / (2.0 * h))
        };
        let (c11, c21) = d(h, 0.0);
        let (c12, c22) = d(0.0, h);
        let exact = [j.j11, j.j12, j.j21, j.j22];
        let approx = [c11, c12, c21, c22];
        let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = exact.iter().zip(approx).fold(0.0f64, |m, (e, a)| m.max((e - a).abs()));
        worst = worst.max(err / scale);
    }
    ensure(worst < 1e-6, || format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.2e} over 100 states"))
}

fn deterministic_limit() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (h, t) = (0.01, 50.0);
    for seed in 0..10u64 {
        let p = random_params(&mut rng);
        let init = State::new(rng.random_range(0.05..1.2), rng.random_range(0.05..1.5));
        let euler = integrate(&p, init, Scheme::Euler, h, t).map_err(|e| e.to_string())?;
        let noise = NoisePath::generate(seed, h, step_count(h, t));
        let mil = simulate_path(&p, init, SdeScheme::Milstein, &noise, t).map_err(|e| e.to_string())?;
        ensure(euler.states == mil.states && euler.times == mil.times, || {
            format!("seed {seed}: paths differ for {p:?}")
        })?;
    }
    Ok("10 seeds: sigma = 0 Milstein equals Euler bit for bit".into())
}

fn pathwise_comparison() -> Check {
    let sets = [stoch(0.1, 0.1), stoch(0.3, 0.2), params(0.5, 0.1, 0.08, 0.2, 0.0025).with_noise(0.5, 0.3).unwrap()];
    let init = State::new(0.55, 0.6);
    let failures: Vec<String> = sets
        .par_iter()
        .enumerate()
        .flat_map(|(i, p)| {
            (0..100u64).into_par_iter().filter_map(move |seed| {
                let noise = NoisePath::generate(seed, 0.01, 10_000);
                match comparison_bundle(p, init, &noise, 100.0) {
                    Ok(b) => {
                        let c = b.check_ordering();
                        (!c.holds).then(|| format!("set {i} seed {seed}: {c:?}"))
                    }
                    Err(e) => Some(format!("set {i} seed {seed}: {e}")),
                }
            })
        })
        .collect();
    ensure(failures.is_empty(), || format!("{} violations, first: {}", failures.len(), failures[0]))?;
    Ok("ordering holds at every grid point for 300 paths (slack 1e-9)".into())
}

fn extinction() -> Check {
    let p = stoch(1.5, 0.5);
    let cfg = EnsembleConfig::new(SdeScheme::LogEuler, 1e-3, 500.0);
    let st = ensemble(&p, State::new(0.55, 0.6), &cfg, 200, 0).map_err(|e| e.to_string())?;
    let f = st.extinction;
    ensure(f.x >= 0.8 && f.y >= 0.8, || format!("fractions x {}, y {}", f.x, f.y))?;
    Ok(format!("extinct fractions x {:.3}, y {:.3} over 200 paths", f.x, f.y))
}

fn stationary() -> Check {
    let p = stoch(0.01, 0.01);
    let det = params(0.4, 0.1, 0.08, 0.2, 0.0025);
    let e = find_interior_equilibria(&det).map_err(|e| e.to_string())?[0];
    let init = State::new(0.55, 0.6);
    let cfg = EnsembleConfig::new(SdeScheme::LogEuler, 0.01, 200.0);
    let st = ensemble(&p, init, &cfg, 100, 0).map_err(|e| e.to_string())?;
    let mean = st.checkpoints[0].mean;
    ensure((mean[0] - e.x).abs() < 0.05 && (mean[1] - e.y).abs() < 0.05, || {
        format!("mean {mean:?} vs equilibrium ({}, {})", e.x, e.y)
    })?;
    let sc = StationaryConfig {
        scheme: SdeScheme::LogEuler,
        h: 0.01,
        burn_in: 100.0,
        t_max: 2100.0,
        bins: 50,
        seed: 1,
        second_seed: 2,
    };
    let r = stationary_histogram(&p, init, &sc).map_err(|e| e.to_string())?;
    ensure(r.half_distance < 0.1 && r.cross_seed_distance < 0.15, || {
        format!("half-vs-half {}, cross-seed {}", r.half_distance, r.cross_seed_distance)
    })?;
    Ok(format!(
        "mean ({:.4}, {:.4}); half-vs-half {:.4}, cross-seed {:.4}",
        mean[0], mean[1], r.half_distance, r.cross_seed_distance
    ))
}

fn stochastic_equilibrium() -> Check {
    let p = params(0.4, 0.1, 0.08, 0.2, 0.0025);
    let eqs = find_interior_equilibria(&p).map_err(|e| e.to_string())?;
    ensure(eqs.len() == 1, || format!("{} interior equilibria", eqs.len()))?;
    let e = eqs[0];
    let res = nullcline_residual(&p, e.x - p.m).abs();
    let oracle = p.m + bisect(|x| nullcline_residual(&p, x), 0.0, 1.0 - p.m);
    ensure(res < 1e-10, || format!("residual {res:e}"))?;
    ensure((e.x - oracle).abs() < 1e-9, || format!("x* {} vs bisection {oracle}", e.x))?;
    ensure((e.x - 0.55).abs() < 0.05 && (e.y - 0.75).abs() < 0.05, || format!("({}, {})", e.x, e.y))?;
    ensure(e.s > 0.0 && e.p_det > 0.0, || format!("s {}, p {}", e.s, e.p_det))?;
    Ok(format!("({:.6}, {:.6}), residual {res:.1e}, s {:.4}, p {:.4}", e.x, e.y, e.s, e.p_det))
}

fn convergence_orders() -> Check {
    let p = params(0.5, 0.1, 0.08, 0.2, 0.0025);
    let init = State::new(0.8, 0.9);
    let end = |h: f64| integrate(&p, init, Scheme::Rk4, h, 10.0).map(|t| t.last());
    let err = |h: f64| -> Result<f64, String> {
        let (a, r) = (end(h).map_err(|e| e.to_string())?, end(h / 8.0).map_err(|e| e.to_string())?);
        Ok((a.x - r.x).hypot(a.y - r.y))
    };
    let rk4 = err(0.1)? / err(0.05)?;
    ensure((8.0..=32.0).contains(&rk4), || format!("RK4 ratio {rk4}"))?;

    let q = stoch(0.01, 0.01);
    let sinit = State::new(0.55, 0.6);
    let (h, t) = (0.02, 5.0);
    let fine_h = h / 128.0;
    let n = step_count(fine_h, t);
    let per_seed: Vec<Result<(f64, f64), String>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let fine = NoisePath::generate(seed, fine_h, n);
            let reference = simulate_path(&q, sinit, SdeScheme::LogEuler, &fine, t).map_err(|e| e.to_string())?.last();
            let dist = |factor: usize| -> Result<f64, String> {
                let coarse = fine.coarsen(factor).map_err(|e| e.to_string())?;
                let s = simulate_path(&q, sinit, SdeScheme::Milstein, &coarse, t).map_err(|e| e.to_string())?.last();
                Ok((s.x - reference.x).hypot(s.y - reference.y))
            };
            Ok((dist(128)?, dist(64)?))
        })
        .collect();
    let (mut e1, mut e2) = (0.0, 0.0);
    for r in per_seed {
        let (a, b) = r?;
        e1 += a;
        e2 += b;
    }
    let mil = e1 / e2;
    ensure((1.6..=2.4).contains(&mil), || format!("RK4 ratio {rk4:.2}, Milstein ratio {mil}"))?;
    Ok(format!("RK4 ratio {rk4:.2}, Milstein ratio {mil:.3} (200 seeds)"))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: "1", name: "three-equilibria regression", limit: secs(1), run: three_equilibria },
        Criterion { id: "2", name: "count vs brute-force grid", limit: secs(60), run: count_vs_grid },
        Criterion { id: "3a", name: "single-point cycle", limit: secs(30), run: single_point_cycle },
        Criterion { id: "3b", name: "cycle around three equilibria", limit: secs(30), run: three_point_cycle },
        Criterion { id: "4a", name: "Hopf, lambda < 0 with stable cycles", limit: secs(60), run: hopf_stable_side },
        Criterion { id: "4b", name: "Hopf, lambda > 0 with repelling orbits", limit: secs(60), run: hopf_repelling_side },
        Criterion { id: "5", name: "invariance and persistence", limit: secs(300), run: invariance_and_persistence },
        Criterion { id: "6", name: "Jacobian vs finite differences", limit: None, run: jacobian_vs_differences },
        Criterion { id: "7", name: "deterministic limit", limit: None, run: deterministic_limit },
        Criterion { id: "8", name: "pathwise comparison", limit: secs(120), run: pathwise_comparison },
        Criterion { id: "9", name: "extinction regime", limit: None, run: extinction },
        Criterion { id: "10", name: "stationary regime", limit: secs(300), run: stationary },
        Criterion { id: "11", name: "equilibrium of the stochastic example", limit: None, run: stochastic_equilibrium },
        Criterion { id: "12", name: "convergence orders", limit: None, run: convergence_orders },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{:>3}] {}: {detail} ({elapsed:.2?})", c.id, c.name);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
