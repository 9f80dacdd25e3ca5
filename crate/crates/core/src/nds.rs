//! Non-derivative sampling.
//!
//! Each iteration draws `d + 1` points uniformly from the `δ`-ball around
//! the iterate, forms a Gupal finite-difference estimate at each, and takes
//! the minimum-norm element `F` of their convex hull. A small `‖F‖` shrinks
//! `(δ, ε)`; otherwise a backtracking line search moves along `-F/‖F‖`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::musyn::io::format_f64;
use crate::objective::Objective;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NdsConfig {
    pub delta0: f64,
    pub eps0: f64,
    pub mu_delta: f64,
    pub mu_eps: f64,
    pub delta_opt: f64,
    pub eps_opt: f64,
    /// Mollifier scale; iteration `n` uses `alpha0 / (n + 1)`.
    pub alpha0: f64,
    pub beta: f64,
    pub t_lower: f64,
    pub kappa: f64,
    pub max_iters: usize,
    pub rng_seed: u64,
    /// Redraws allowed per sample point before the iteration gives up and shrinks `δ`.
    pub resample_cap: usize,
    /// Consecutive zero-step line searches after which the run stops.
    pub stall_limit: usize,
    /// Hard cap on cost-oracle calls; the run stops before an iteration
    /// that could exceed it.
    pub max_evals: Option<u64>,
}

impl Default for NdsConfig {
    fn default() -> Self {
        Self {
            delta0: 0.1,
            eps0: 0.1,
            mu_delta: 0.5,
            mu_eps: 0.5,
            delta_opt: 1e-4,
            eps_opt: 1e-4,
            alpha0: 0.01,
            beta: 1e-4,
            t_lower: 1e-6,
            kappa: 0.5,
            max_iters: 1000,
            rng_seed: 0,
            resample_cap: 10,
            stall_limit: 20,
            max_evals: None,
        }
    }
}

impl NdsConfig {
    /// Defaults with the radius scaled to the start: `δ⁰ = 0.1·max(1, ‖x0‖)`, `α₀ = δ⁰/10`.
    pub fn for_start(x0: &[f64]) -> Self {
        let delta0 = 0.1 * norm(x0).max(1.0);
        Self { delta0, alpha0: delta0 / 10.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let unit_open = |v: f64| v > 0.0 && v < 1.0;
        let ok = self.delta0 > 0.0
            && self.eps0 >= 0.0
            && self.mu_delta > 0.0
            && self.mu_delta <= 1.0
            && self.mu_eps > 0.0
            && self.mu_eps <= 1.0
            && self.delta_opt > 0.0
            && self.eps_opt > 0.0
            && self.alpha0 > 0.0
            && unit_open(self.beta)
            && unit_open(self.t_lower)
            && unit_open(self.kappa)
            && self.stall_limit >= 1;
        if !ok {
            return Err(Error::Config(format!("invalid NDS configuration: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NdsTermination {
    Tolerance,
    MaxIters,
    LineSearchStall,
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NdsRecord {
    pub iter: usize,
    /// Cost at the iterate after this iteration.
    pub cost: f64,
    /// `‖F‖`; NaN when no hull could be formed.
    pub f_norm: f64,
    pub delta: f64,
    pub eps: f64,
    pub t: f64,
    /// Cumulative cost-oracle calls.
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdsTrace {
    /// Row 0 is the starting point.
    pub records: Vec<NdsRecord>,
    pub final_x: Vec<f64>,
    pub termination: NdsTermination,
}

impl NdsTrace {
    pub fn final_cost(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn oracle_calls(&self) -> u64 {
        self.records.last().map_or(0, |r| r.oracle_calls)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "cost", "F_norm", "delta", "eps", "t", "oracle_calls"])?;
        for r in &self.records {
            out.write_record([
                r.iter.to_string(),
                format_f64(r.cost),
                format_f64(r.f_norm),
                format_f64(r.delta),
                format_f64(r.eps),
                format_f64(r.t),
                r.oracle_calls.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gupal's estimate: `χ_i = (f(x + α z[i↦+½]) − f(x + α z[i↦−½])) / α`, where
/// `z[i↦s]` is `z` with its `i`-th entry replaced by `s`. Costs `2d` calls.
pub fn gupal_estimate(f: &impl Objective, x: &[f64], alpha: f64, z: &[f64]) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("mollifier scale must be positive, got {alpha}")));
    }
    if z.len() != x.len() || z.iter().any(|v| v.abs() > 0.5) {
        return Err(Error::Domain("z must lie in [-1/2, 1/2]^d".into()));
    }
    let mut probe: Vec<f64> = x.iter().zip(z).map(|(xi, zi)| xi + alpha * zi).collect();
    let mut chi = vec![0.0; x.len()];
    for i in 0..x.len() {
        probe[i] = x[i] + 0.5 * alpha;
        let hi = f.value(&probe);
        probe[i] = x[i] - 0.5 * alpha;
        let lo = f.value(&probe);
        probe[i] = x[i] + alpha * z[i];
        if !f.is_feasible_value(hi) || !f.is_feasible_value(lo) {
            return Err(Error::EstimateInvalid);
        }
        chi[i] = (hi - lo) / alpha;
    }
    Ok(chi)
}

/// Minimum-norm point of the convex hull of `vectors` (Wolfe's algorithm).
/// The answer is deterministic for a fixed input order.
pub fn min_norm_in_hull(vectors: &[Vec<f64>], tol: f64) -> Vec<f64> {
    assert!(!vectors.is_empty(), "hull of an empty set");
    let d = vectors[0].len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let combine = |set: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; d];
        for (&k, &l) in set.iter().zip(lambda) {
            for (xi, pi) in x.iter_mut().zip(&vectors[k]) {
                *xi += l * pi;
            }
        }
        x
    };
    let scale = vectors.iter().map(|v| dot(v, v)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let start = (0..vectors.len()).min_by(|&i, &j| dot(&vectors[i], &vectors[i]).total_cmp(&dot(&vectors[j], &vectors[j])));
    let mut set = vec![start.expect("non-empty")];
    let mut lambda = vec![1.0];
    let mut x = vectors[set[0]].clone();

    for _ in 0..(50 * vectors.len() + 50) {
        let xx = dot(&x, &x);
        let (j, xp) = (0..vectors.len())
            .map(|k| (k, dot(&x, &vectors[k])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if xx - xp <= tol * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        lambda.push(0.0);

        loop {
            let w = affine_min_norm(vectors, &set);
            if w.iter().all(|&v| v > tol) {
                lambda = w;
                break;
            }
            // Move from λ toward w until a coefficient hits zero, then drop it.
            let mut theta = 1.0;
            for (&l, &wi) in lambda.iter().zip(&w) {
                if wi <= tol && l - wi > 0.0 {
                    theta = f64::min(theta, l / (l - wi));
                }
            }
            for (l, wi) in lambda.iter_mut().zip(&w) {
                *l += theta * (wi - *l);
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > tol).collect();
            if keep.iter().all(|k| *k) {
                // Numerical corner: force out the smallest coefficient.
                let i = (0..lambda.len()).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).expect("non-empty");
                lambda.remove(i);
                set.remove(i);
            } else {
                let mut k = 0;
                set.retain(|_| {
                    k += 1;
                    keep[k - 1]
                });
                lambda = lambda.iter().zip(&keep).filter(|(_, &k)| k).map(|(l, _)| *l).collect();
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if set.len() == 1 {
                lambda = vec![1.0];
                break;
            }
        }
        x = combine(&set, &lambda);
    }
    x
}

// Affine combination (weights summing to one) of the points in `set` with the smallest norm.
fn affine_min_norm(vectors: &[Vec<f64>], set: &[usize]) -> Vec<f64> {
    let k = set.len();
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            sys[(a, b)] = vectors[set[a]].iter().zip(&vectors[set[b]]).map(|(x, y)| x * y).sum();
        }
        sys[(a, k)] = 1.0;
        sys[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = sys
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| sys.svd(true, true).solve(&rhs, 1e-14).unwrap_or_else(|_| DVector::from_element(k + 1, 1.0 / k as f64)));
    sol.iter().take(k).copied().collect()
}

/// Outcome of one backtracking line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    /// Accepted step, or 0 on stall.
    pub t: f64,
    /// Cost at the accepted point (the starting cost on stall).
    pub value: f64,
    pub calls: u64,
}

/// Backtracks from `t = δ` by factors of `κ` until
/// `f(x − t F/‖F‖) ≤ f(x) − β t ‖F‖`, giving up once `κt` would fall below
/// `min(t̲, κδ/3)`. Infeasible probes count as rejections.
#[allow(clippy::too_many_arguments)]
pub fn line_search(
    f: &impl Objective,
    x: &[f64],
    fx: f64,
    dir: &[f64],
    delta: f64,
    beta: f64,
    t_lower: f64,
    kappa: f64,
) -> LineSearchResult {
    let fn_norm = norm(dir);
    let t_min = t_lower.min(kappa * delta / 3.0);
    let mut t = delta;
    let mut calls = 0;
    let mut trial = vec![0.0; x.len()];
    loop {
        for ((p, xi), di) in trial.iter_mut().zip(x).zip(dir) {
            *p = xi - t * di / fn_norm;
        }
        let v = f.value(&trial);
        calls += 1;
        if f.is_feasible_value(v) && v <= fx - beta * t * fn_norm {
            return LineSearchResult { t, value: v, calls };
        }
        if kappa * t < t_min {
            return LineSearchResult { t: 0.0, value: fx, calls };
        }
        t *= kappa;
    }
}

fn line_search_max_calls(delta: f64, t_lower: f64, kappa: f64) -> u64 {
    let t_min = t_lower.min(kappa * delta / 3.0);
    let mut t = delta;
    let mut calls = 1;
    while kappa * t >= t_min {
        t *= kappa;
        calls += 1;
    }
    calls
}

/// Uniform point in the Euclidean ball of `radius` around `center`.
pub fn sample_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let d = center.len();
    let dir = loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&g);
        if n > 0.0 {
            break g.into_iter().map(|v| v / n).collect::<Vec<_>>();
        }
    };
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    center.iter().zip(dir).map(|(c, u)| c + r * u).collect()
}

/// Uniform point in `[-1/2, 1/2]^d`.
pub fn sample_box(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Runs non-derivative sampling from a feasible `x0`.
pub fn run_nds(f: &impl Objective, x0: &[f64], cfg: &NdsConfig) -> Result<NdsTrace> {
    cfg.validate()?;
    let d = f.dim();
    if x0.len() != d || d == 0 {
        return Err(Error::Dimension(format!("start has length {} but the objective has dimension {d}", x0.len())));
    }
    let mut calls: u64 = 1;
    let mut fx = f.value(x0);
    if !f.is_feasible_value(fx) {
        return Err(Error::InfeasibleStart);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut x = x0.to_vec();
    let (mut delta, mut eps) = (cfg.delta0, cfg.eps0);
    let mut records = vec![NdsRecord { iter: 0, cost: fx, f_norm: f64::NAN, delta, eps, t: 0.0, oracle_calls: calls }];
    let per_estimate = 2 * d as u64;
    let mut stalls = 0;
    let mut termination = NdsTermination::MaxIters;

    for n in 0..cfg.max_iters {
        if let Some(cap) = cfg.max_evals {
            let worst = (d as u64 + 1) * per_estimate + line_search_max_calls(delta, cfg.t_lower, cfg.kappa);
            if calls + worst > cap {
                termination = NdsTermination::Budget;
                break;
            }
        }
        let alpha = cfg.alpha0 / (n as f64 + 1.0);

        // Draw all points sequentially, evaluate them concurrently, redraw failures.
        let mut estimates: Vec<Option<Vec<f64>>> = vec![None; d + 1];
        let mut hull_ok = true;
        for round in 0..=cfg.resample_cap {
            let pending: Vec<usize> = (0..=d).filter(|&i| estimates[i].is_none()).collect();
            if pending.is_empty() {
                break;
            }
            if round == cfg.resample_cap {
                hull_ok = false;
                break;
            }
            let draws: Vec<(usize, Vec<f64>, Vec<f64>)> =
                pending.iter().map(|&i| (i, sample_ball(&mut rng, &x, delta), sample_box(&mut rng, d))).collect();
            let results: Vec<(usize, Option<Vec<f64>>)> =
                draws.par_iter().map(|(i, p, z)| (*i, gupal_estimate(f, p, alpha, z).ok())).collect();
            calls += per_estimate * draws.len() as u64;
            for (i, est) in results {
                estimates[i] = est;
            }
        }

        if !hull_ok {
            // Too many infeasible samples: treat as a null step with a smaller ball.
            delta *= cfg.mu_delta;
            records.push(NdsRecord { iter: n + 1, cost: fx, f_norm: f64::NAN, delta, eps, t: 0.0, oracle_calls: calls });
            continue;
        }

        let hull: Vec<Vec<f64>> = estimates.into_iter().map(|e| e.expect("filled above")).collect();
        let fvec = min_norm_in_hull(&hull, 1e-10);
        let f_norm = norm(&fvec);

        if f_norm <= cfg.eps_opt && delta <= cfg.delta_opt {
            records.push(NdsRecord { iter: n + 1, cost: fx, f_norm, delta, eps, t: 0.0, oracle_calls: calls });
            termination = NdsTermination::Tolerance;
            break;
        }
        if f_norm <= eps {
            eps *= cfg.mu_eps;
            delta *= cfg.mu_delta;
            stalls = 0;
            records.push(NdsRecord { iter: n + 1, cost: fx, f_norm, delta, eps, t: 0.0, oracle_calls: calls });
            continue;
        }

        let ls = line_search(f, &x, fx, &fvec, delta, cfg.beta, cfg.t_lower, cfg.kappa);
        calls += ls.calls;
        if ls.t > 0.0 {
            for (xi, fi) in x.iter_mut().zip(&fvec) {
                *xi -= ls.t * fi / f_norm;
            }
            fx = ls.value;
            stalls = 0;
        } else {
            stalls += 1;
        }
        records.push(NdsRecord { iter: n + 1, cost: fx, f_norm, delta, eps, t: ls.t, oracle_calls: calls });
        if stalls >= cfg.stall_limit {
            termination = NdsTermination::LineSearchStall;
            break;
        }
    }
    Ok(NdsTrace { records, final_x: x, termination })
}
