//! H∞ norm evaluation.
//!
//! Two routes are provided. [`hinf_norm`] is the model-based oracle: a dense
//! frequency sweep followed by golden-section refinement around the largest
//! grid candidates. [`l2gain_power_iteration`] only needs forward and adjoint
//! access to the finite-horizon input/output operator and estimates its top
//! singular value by power iteration on `TᵀT`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Hessenberg};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sigma_max_complex;
use crate::lti::{self, Signal, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Oracle,
    PowerIteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub omega_peak: f64,
    pub method: NormMethod,
    pub iterations_used: usize,
}

/// Knobs of the frequency-sweep oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Total grid size, split between a linear and a logarithmic half.
    pub grid_points: usize,
    /// Number of grid local maxima refined by golden section.
    pub refine_candidates: usize,
    /// Absolute bracket width at which golden section stops.
    pub bracket_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_points: 512, refine_candidates: 3, bracket_tol: 1e-11 }
    }
}

/// H∞ norm with the default oracle configuration.
pub fn hinf_norm(sys: &StateSpace) -> Result<NormEstimate> {
    hinf_norm_with(sys, &OracleConfig::default())
}

pub fn hinf_norm_with(sys: &StateSpace, cfg: &OracleConfig) -> Result<NormEstimate> {
    if sys.n_x() == 0 {
        return Ok(NormEstimate {
            value: crate::linalg::sigma_max(sys.d()),
            omega_peak: 0.0,
            method: NormMethod::Oracle,
            iterations_used: 0,
        });
    }
    let poles = lti::poles(sys)?;
    let rho = poles.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    let eval = ResolventEvaluator::new(sys);
    let gain = |w: f64| -> Result<f64> { Ok(sigma_max_complex(&eval.response(w)?)) };

    let mut grid = omega_grid(cfg.grid_points);
    // Lightly damped poles put narrow peaks near their angles.
    grid.extend(poles.iter().filter(|z| z.norm() > 0.0).map(|z| z.arg().abs()));
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let values = grid.iter().map(|&w| gain(w)).collect::<Result<Vec<_>>>()?;
    let mut best = (values[0], grid[0]);
    for (&v, &w) in values.iter().zip(&grid) {
        if v > best.0 {
            best = (v, w);
        }
    }

    let mut candidates: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
            let right = values.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            values[i] >= left && values[i] >= right
        })
        .collect();
    candidates.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    candidates.truncate(cfg.refine_candidates);

    for &i in &candidates {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        let (w, v) = golden_max(&gain, lo, hi, cfg.bracket_tol)?;
        if v > best.0 {
            best = (v, w);
        }
    }
    Ok(NormEstimate { value: best.0, omega_peak: best.1, method: NormMethod::Oracle, iterations_used: grid.len() })
}

/// Mixed linear/logarithmic grid on `[0, π]`, including both end points.
pub fn omega_grid(points: usize) -> Vec<f64> {
    let half = (points / 2).max(2);
    let mut grid: Vec<f64> = (0..half).map(|k| PI * k as f64 / (half - 1) as f64).collect();
    let (lo, hi) = ((1e-5 * PI).ln(), PI.ln());
    grid.extend((0..half).map(|k| (lo + (hi - lo) * k as f64 / (half - 1) as f64).exp().min(PI)));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Frequency response through an orthogonal Hessenberg reduction of `A`, so
/// each evaluation costs O(n² m) instead of a dense complex LU.
pub(crate) struct ResolventEvaluator {
    h: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl ResolventEvaluator {
    pub(crate) fn new(sys: &StateSpace) -> Self {
        let (q, h) = Hessenberg::new(sys.a().clone()).unpack();
        let b = q.transpose() * sys.b();
        let c = sys.c() * &q;
        Self { h, b, c, d: sys.d().clone() }
    }

    pub(crate) fn response(&self, omega: f64) -> Result<DMatrix<Complex64>> {
        let n = self.h.nrows();
        let m = self.b.ncols();
        let z = Complex64::from_polar(1.0, omega);
        // Working copies: M = zI - H (row-major rows for cheap swaps) and X = B.
        let mut mat: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = Complex64::new(-self.h[(i, j)], 0.0);
                        if i == j {
                            v + z
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let mut rhs: Vec<Vec<Complex64>> =
            (0..n).map(|i| (0..m).map(|j| Complex64::new(self.b[(i, j)], 0.0)).collect()).collect();

        for k in 0..n.saturating_sub(1) {
            if mat[k + 1][k].norm() > mat[k][k].norm() {
                mat.swap(k, k + 1);
                rhs.swap(k, k + 1);
            }
            let pivot = mat[k][k];
            if pivot.norm() == 0.0 {
                return Err(Error::SingularResolvent { omega });
            }
            let l = mat[k + 1][k] / pivot;
            if l.norm() != 0.0 {
                let (upper, lower) = mat.split_at_mut(k + 1);
                for j in k..n {
                    lower[0][j] -= l * upper[k][j];
                }
                let (upper, lower) = rhs.split_at_mut(k + 1);
                for j in 0..m {
                    lower[0][j] -= l * upper[k][j];
                }
            }
        }
        for k in (0..n).rev() {
            let pivot = mat[k][k];
            if pivot.norm() == 0.0 {
                return Err(Error::SingularResolvent { omega });
            }
            for j in 0..m {
                let mut acc = rhs[k][j];
                for i in k + 1..n {
                    acc -= mat[k][i] * rhs[i][j];
                }
                rhs[k][j] = acc / pivot;
            }
        }
        let p = self.c.nrows();
        let mut out = DMatrix::from_fn(p, m, |i, j| Complex64::new(self.d[(i, j)], 0.0));
        for i in 0..p {
            for j in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += rhs[k][j] * self.c[(i, k)];
                }
                out[(i, j)] += acc;
            }
        }
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::SingularResolvent { omega });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerIterConfig {
    pub horizon: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub rng_seed: u64,
}

impl Default for PowerIterConfig {
    fn default() -> Self {
        Self { horizon: 500, max_iters: 100, rel_tol: 1e-4, rng_seed: 0 }
    }
}

impl PowerIterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.max_iters == 0 {
            return Err(Error::Config("horizon and max_iters must be positive".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!("rel_tol {} outside (0, 1)", self.rel_tol)));
        }
        Ok(())
    }
}

/// Forward and adjoint access to a finite-horizon input/output map.
pub trait FiniteHorizonOperator {
    fn input_dim(&self) -> usize;
    fn apply(&self, input: &Signal) -> Result<Signal>;
    fn apply_adjoint(&self, output: &Signal) -> Result<Signal>;
}

/// Zero-initial-state simulation of a known system; the adjoint is the
/// time-reversed simulation of the transposed system.
pub struct SimulationOperator {
    sys: StateSpace,
    adjoint: StateSpace,
    guard: f64,
}

impl SimulationOperator {
    pub fn new(sys: StateSpace, guard: f64) -> Self {
        let adjoint = lti::transpose_system(&sys);
        Self { sys, adjoint, guard }
    }
}

impl FiniteHorizonOperator for SimulationOperator {
    fn input_dim(&self) -> usize {
        self.sys.n_in()
    }
    fn apply(&self, input: &Signal) -> Result<Signal> {
        lti::simulate_guarded(&self.sys, input, self.guard)
    }
    fn apply_adjoint(&self, output: &Signal) -> Result<Signal> {
        Ok(lti::simulate_guarded(&self.adjoint, &output.time_reversed(), self.guard)?.time_reversed())
    }
}

/// Signals whose norm passes this value are treated as divergent.
const OVERFLOW_GUARD: f64 = 1e150;

/// Top singular value of the finite-horizon operator by power iteration on
/// `TᵀT`, started from a seeded Gaussian unit vector.
pub fn l2gain_power_iteration(op: &impl FiniteHorizonOperator, cfg: &PowerIterConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    let dim = op.input_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let data: Vec<f64> = (0..dim * cfg.horizon).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok(power_iterate(op, cfg, Signal::from_flat(dim, data)?)?.0)
}

/// Power iteration started from `start`, zero-padded or truncated to
/// `cfg.horizon`. Also returns the final unit input, so a longer experiment
/// can resume where a shorter one stopped; the estimate then never drops
/// below the gain already reached by `start`.
pub fn l2gain_power_iteration_from(
    op: &impl FiniteHorizonOperator,
    cfg: &PowerIterConfig,
    start: &Signal,
) -> Result<(NormEstimate, Signal)> {
    cfg.validate()?;
    let dim = op.input_dim();
    if start.dim() != dim {
        return Err(Error::Dimension(format!("start signal has {} channels, operator takes {dim}", start.dim())));
    }
    let mut u = Signal::zeros(dim, cfg.horizon);
    let n = cfg.horizon.min(start.horizon());
    u.as_mut_slice()[..n * dim].copy_from_slice(&start.as_slice()[..n * dim]);
    if !(u.norm() > 0.0) {
        return Err(Error::Domain("start signal is zero on the horizon".into()));
    }
    power_iterate(op, cfg, u)
}

fn power_iterate(op: &impl FiniteHorizonOperator, cfg: &PowerIterConfig, mut u: Signal) -> Result<(NormEstimate, Signal)> {
    let n0 = u.norm();
    u.scale(1.0 / n0);

    let mut estimate = 0.0;
    let mut iterations = 0;
    for k in 0..cfg.max_iters {
        iterations = k + 1;
        let y = op.apply(&u)?;
        let gain = y.norm();
        if !gain.is_finite() || gain > OVERFLOW_GUARD {
            return Err(Error::Divergence { guard: OVERFLOW_GUARD });
        }
        if gain == 0.0 {
            let est = NormEstimate {
                value: 0.0,
                omega_peak: 0.0,
                method: NormMethod::PowerIteration,
                iterations_used: iterations,
            };
            return Ok((est, u));
        }
        let converged = k > 0 && (gain - estimate).abs() < cfg.rel_tol * gain;
        estimate = gain;
        if converged {
            break;
        }
        let mut v = op.apply_adjoint(&y)?;
        let vn = v.norm();
        if vn == 0.0 {
            break;
        }
        if !vn.is_finite() || vn > OVERFLOW_GUARD {
            return Err(Error::Divergence { guard: OVERFLOW_GUARD });
        }
        v.scale(1.0 / vn);
        if k + 1 == cfg.max_iters {
            break;
        }
        u = v;
    }
    let est = NormEstimate {
        value: estimate,
        omega_peak: dominant_frequency(&u),
        method: NormMethod::PowerIteration,
        iterations_used: iterations,
    };
    Ok((est, u))
}

/// Frequency of the DFT bin carrying the most energy, summed over channels.
pub fn dominant_frequency(signal: &Signal) -> f64 {
    let n = signal.horizon();
    if n < 2 {
        return 0.0;
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut power = vec![0.0; n / 2 + 1];
    for ch in 0..signal.dim() {
        let mut buf: Vec<Complex64> = (0..n).map(|t| Complex64::new(signal.at(t)[ch], 0.0)).collect();
        fft.process(&mut buf);
        for (p, z) in power.iter_mut().zip(&buf) {
            *p += z.norm_sqr();
        }
    }
    let mut best = 0;
    for (k, &p) in power.iter().enumerate() {
        if p > power[best] {
            best = k;
        }
    }
    2.0 * PI * best as f64 / n as f64
}
