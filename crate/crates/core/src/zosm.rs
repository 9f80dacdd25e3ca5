//! Zeroth-order descent on the uniformly smoothed cost.
//!
//! Each iteration draws a direction `W` uniformly from the unit sphere, forms
//! the two-point estimate `g = d/(2δ)·(f(x + δW) − f(x − δW))·W`, and steps
//! `x ← x − ηg`. Steps that would leave the feasible set are retried with a
//! halved stepsize; the nominal stepsize comes back after a run of clean steps.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::musyn::io::format_f64;
use crate::objective::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputRule {
    /// Index drawn uniformly from `{0, …, N−1}`.
    UniformRandomIterate,
    /// Lowest recorded cost.
    BestIterate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZoConfig {
    pub eta: f64,
    pub delta: f64,
    pub n_iters: usize,
    pub rng_seed: u64,
    pub output_rule: OutputRule,
    /// Direction redraws allowed when a probe is infeasible.
    pub resample_cap: usize,
    /// Halvings allowed when a step lands outside the feasible set.
    pub max_halvings: usize,
    /// Clean steps after which the nominal stepsize is restored.
    pub restore_after: usize,
    /// Hard cap on cost-oracle calls; the run stops before an iteration
    /// that could exceed it.
    pub max_evals: Option<u64>,
}

impl Default for ZoConfig {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            delta: 1e-3,
            n_iters: 1000,
            rng_seed: 0,
            output_rule: OutputRule::BestIterate,
            resample_cap: 10,
            max_halvings: 30,
            restore_after: 10,
            max_evals: None,
        }
    }
}

impl ZoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !(self.delta > 0.0) || self.n_iters == 0 || self.resample_cap == 0 {
            return Err(Error::Config(format!("invalid ZO configuration: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoRecord {
    pub iter: usize,
    /// Cost at the iterate after this iteration.
    pub cost: f64,
    /// `‖g‖`; zero when no feasible probe pair was found.
    pub g_norm: f64,
    /// Stepsize actually used.
    pub eta_effective: f64,
    /// Cumulative cost-oracle calls.
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoTrace {
    /// Row 0 is the starting point.
    pub records: Vec<ZoRecord>,
    /// `iterates[n]` is `x^n`, for `n = 0..=N`.
    pub iterates: Vec<Vec<f64>>,
    /// Calls spent on the two gradient probes, redraws included.
    pub probe_calls: u64,
    /// Index drawn uniformly from `{0, …, N−1}`.
    pub uniform_index: usize,
    /// Index of the lowest recorded cost.
    pub best_index: usize,
    pub output_rule: OutputRule,
}

impl ZoTrace {
    pub fn output_index(&self) -> usize {
        match self.output_rule {
            OutputRule::UniformRandomIterate => self.uniform_index,
            OutputRule::BestIterate => self.best_index,
        }
    }

    pub fn output(&self) -> &[f64] {
        &self.iterates[self.output_index()]
    }

    pub fn output_cost(&self) -> f64 {
        self.records[self.output_index()].cost
    }

    pub fn best_cost(&self) -> f64 {
        self.records[self.best_index].cost
    }

    pub fn oracle_calls(&self) -> u64 {
        self.records.last().map_or(0, |r| r.oracle_calls)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "cost", "g_norm", "eta_effective", "oracle_calls"])?;
        for r in &self.records {
            out.write_record([
                r.iter.to_string(),
                format_f64(r.cost),
                format_f64(r.g_norm),
                format_f64(r.eta_effective),
                r.oracle_calls.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Uniform direction on the unit sphere of `ℝ^d` (normalized Gaussian).
pub fn sample_unit_direction(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    assert!(d >= 1, "direction in a zero-dimensional space");
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 && n.is_finite() {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Two-point estimate `d/(2δ)·(f(x + δW) − f(x − δW))·W`; exactly two calls.
pub fn zo_gradient_estimate(f: &impl Objective, x: &[f64], delta: f64, w: &[f64]) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("smoothing radius must be positive, got {delta}")));
    }
    let shifted = |s: f64| -> Vec<f64> { x.iter().zip(w).map(|(xi, wi)| xi + s * delta * wi).collect() };
    let plus = f.value(&shifted(1.0));
    let minus = f.value(&shifted(-1.0));
    if !f.is_feasible_value(plus) || !f.is_feasible_value(minus) {
        return Err(Error::EstimateInvalid);
    }
    let scale = x.len() as f64 / (2.0 * delta) * (plus - minus);
    Ok(w.iter().map(|wi| scale * wi).collect())
}

/// Runs `N` iterations from a feasible `x0`.
pub fn run_zo(f: &impl Objective, x0: &[f64], cfg: &ZoConfig) -> Result<ZoTrace> {
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
    let mut records = vec![ZoRecord { iter: 0, cost: fx, g_norm: 0.0, eta_effective: cfg.eta, oracle_calls: calls }];
    let mut iterates = vec![x.clone()];
    let mut probe_calls = 0;
    let mut eta = cfg.eta;
    let mut clean = 0;
    let mut trial = vec![0.0; d];

    for n in 0..cfg.n_iters {
        // Two probes and one feasibility check per iteration at the least.
        if cfg.max_evals.is_some_and(|cap| calls + 3 > cap) {
            break;
        }
        let mut g = None;
        for _ in 0..cfg.resample_cap {
            let w = sample_unit_direction(d, &mut rng);
            let est = zo_gradient_estimate(f, &x, cfg.delta, &w);
            calls += 2;
            probe_calls += 2;
            if let Ok(v) = est {
                g = Some(v);
                break;
            }
            if cfg.max_evals.is_some_and(|cap| calls + 3 > cap) {
                break;
            }
        }
        let Some(g) = g else {
            records.push(ZoRecord { iter: n + 1, cost: fx, g_norm: 0.0, eta_effective: 0.0, oracle_calls: calls });
            iterates.push(x.clone());
            continue;
        };
        let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();

        let mut step = eta;
        let mut moved = false;
        for h in 0..=cfg.max_halvings {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *t = xi - step * gi;
            }
            let v = f.value(&trial);
            calls += 1;
            if f.is_feasible_value(v) {
                x.copy_from_slice(&trial);
                fx = v;
                moved = true;
                if h == 0 {
                    clean += 1;
                    if clean >= cfg.restore_after {
                        eta = cfg.eta;
                    }
                } else {
                    eta = step;
                    clean = 0;
                }
                break;
            }
            step *= 0.5;
            if cfg.max_evals.is_some_and(|cap| calls >= cap) {
                break;
            }
        }
        records.push(ZoRecord {
            iter: n + 1,
            cost: fx,
            g_norm,
            eta_effective: if moved { step } else { 0.0 },
            oracle_calls: calls,
        });
        iterates.push(x.clone());
    }

    let n_done = records.len() - 1;
    let uniform_index = if n_done == 0 { 0 } else { rng.random_range(0..n_done) };
    let best_index = (0..records.len()).min_by(|&i, &j| records[i].cost.total_cmp(&records[j].cost)).unwrap_or(0);
    Ok(ZoTrace { records, iterates, probe_calls, uniform_index, best_index, output_rule: cfg.output_rule })
}
