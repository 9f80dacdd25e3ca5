use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{build_augmented_plant, AugmentedPlant, AugmentedPolicy, PartitionedPlant, PolicyLayout};
use crate::error::{Error, Result};
use crate::harness::BlackBoxPlant;
use crate::hinf::{hinf_norm, PowerIterConfig};
use crate::lti::StateSpace;
use crate::objective::Objective;

pub use crate::objective::SENTINEL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    /// Weight on `‖T_stab‖∞`.
    pub lambda1: f64,
    /// Weight on `‖K_c‖_F`; zero disables the term.
    pub lambda2: f64,
    pub sentinel: f64,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self { lambda1: 1e-3, lambda2: 0.0, sentinel: SENTINEL }
    }
}

impl RegularizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 > 0.0) || !(self.lambda2 >= 0.0) || !(self.sentinel > 0.0) {
            return Err(Error::Config("need lambda1 > 0, lambda2 >= 0, sentinel > 0".into()));
        }
        Ok(())
    }
}

/// How `J` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum CostMode {
    /// Frequency-sweep oracle on the known closed loop.
    Exact,
    /// Power iteration on black-box closed-loop simulations.
    ModelFree(PowerIterConfig),
}

/// The individual pieces of `J_c`, each already weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTerms {
    pub j: f64,
    /// `λ₁ ‖T_stab‖∞`, or `None` when a cheap bound proved it inactive.
    pub stab: Option<f64>,
    /// `λ₂ ‖K_c‖_F` (zero when disabled).
    pub norm: f64,
    pub total: f64,
}

enum Evaluator {
    Exact(AugmentedPlant),
    ModelFree { bb: BlackBoxPlant, cfg: PowerIterConfig },
}

/// A policy cost bound to one plant, usable directly as an [`Objective`]
/// over the flattened policy vector.
pub struct PolicyObjective {
    layout: PolicyLayout,
    evaluator: Evaluator,
    reg: Option<RegularizationConfig>,
    positive_scale: bool,
}

impl PolicyObjective {
    pub fn new(plant: &PartitionedPlant, layout: PolicyLayout, mode: CostMode) -> Result<Self> {
        let dims = plant.dims();
        if layout.n_u != dims.n_u || layout.n_y != dims.n_y || layout.n_v != dims.n_v {
            return Err(Error::Dimension("policy layout does not match plant channels".into()));
        }
        let evaluator = match mode {
            CostMode::Exact => Evaluator::Exact(build_augmented_plant(plant)?),
            CostMode::ModelFree(cfg) => {
                cfg.validate()?;
                Evaluator::ModelFree { bb: BlackBoxPlant::new(plant.clone())?, cfg }
            }
        };
        Ok(Self { layout, evaluator, reg: None, positive_scale: false })
    }

    /// Switches from `J` to the regularized `J_c`.
    pub fn regularized(mut self, reg: RegularizationConfig) -> Self {
        self.reg = Some(reg);
        self
    }

    /// Treats any non-positive diagonal entry of `D_D` as infeasible.
    pub fn with_positive_scale(mut self) -> Self {
        self.positive_scale = true;
        self
    }

    pub fn layout(&self) -> PolicyLayout {
        self.layout
    }

    fn sentinel_value(&self) -> f64 {
        self.reg.as_ref().map_or(SENTINEL, |r| r.sentinel)
    }

    pub fn cost(&self, policy: &AugmentedPolicy) -> f64 {
        self.terms(policy).total
    }

    pub fn terms(&self, policy: &AugmentedPolicy) -> CostTerms {
        let sentinel = self.sentinel_value();
        let infeasible = CostTerms { j: sentinel, stab: None, norm: 0.0, total: sentinel };
        if self.positive_scale && policy.dscale.d_d.diagonal().iter().any(|v| *v <= 0.0) {
            return infeasible;
        }
        let clamp = |v: f64| if v.is_finite() && v < sentinel { v } else { sentinel };
        let (j, stab) = match &self.evaluator {
            Evaluator::Exact(gc) => {
                let Ok(cl) = gc.closed_loop(policy) else { return infeasible };
                let j = match hinf_norm(&cl) {
                    Ok(est) => clamp(est.value),
                    Err(_) => return infeasible,
                };
                let stab = self.reg.as_ref().and_then(|reg| {
                    let bound = stab_upper_bound(cl.a());
                    if bound.is_some_and(|b| reg.lambda1 * b <= j) {
                        None
                    } else {
                        Some(clamp(reg.lambda1 * stab_norm_of(cl.a())))
                    }
                });
                (j, stab)
            }
            Evaluator::ModelFree { bb, cfg } => {
                let j = clamp(bb.model_free_cost(policy, cfg));
                if j >= sentinel {
                    return infeasible;
                }
                let stab = self.reg.as_ref().and_then(|reg| {
                    if bb.stability_gain_bound(policy).is_some_and(|b| reg.lambda1 * b <= j) {
                        None
                    } else {
                        Some(clamp(reg.lambda1 * bb.model_free_stability_gain(policy, cfg)))
                    }
                });
                (j, stab)
            }
        };
        if j >= sentinel || stab.is_some_and(|s| s >= sentinel) {
            return infeasible;
        }
        let norm = self.reg.as_ref().map_or(0.0, |reg| reg.lambda2 * policy.frobenius_norm());
        let total = clamp(j.max(stab.unwrap_or(0.0)).max(norm));
        CostTerms { j, stab, norm, total }
    }
}

impl Objective for PolicyObjective {
    fn dim(&self) -> usize {
        self.layout.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        match AugmentedPolicy::unflatten(&self.layout, x) {
            Ok(p) => self.cost(&p),
            Err(_) => self.sentinel_value(),
        }
    }
    fn sentinel(&self) -> f64 {
        self.sentinel_value()
    }
}

/// Closed-loop H∞ cost `J(K_c)`, or the sentinel when the loop is ill-posed or unstable.
pub fn cost_j(plant: &PartitionedPlant, policy: &AugmentedPolicy, mode: CostMode) -> f64 {
    match PolicyObjective::new(plant, policy.layout(), mode) {
        Ok(obj) => obj.cost(policy),
        Err(_) => SENTINEL,
    }
}

/// Regularized cost `max{J, λ₁‖T_stab‖∞, λ₂‖K_c‖_F}` in exact mode.
pub fn cost_jc(plant: &PartitionedPlant, policy: &AugmentedPolicy, reg: &RegularizationConfig) -> f64 {
    cost_terms(plant, policy, reg).total
}

pub fn cost_terms(plant: &PartitionedPlant, policy: &AugmentedPolicy, reg: &RegularizationConfig) -> CostTerms {
    match PolicyObjective::new(plant, policy.layout(), CostMode::Exact) {
        Ok(obj) => obj.regularized(reg.clone()).terms(policy),
        Err(_) => CostTerms { j: reg.sentinel, stab: None, norm: 0.0, total: reg.sentinel },
    }
}

/// `‖(zI - A_cl)⁻¹‖∞` for the closed loop `F_l(G_c, K_c)`.
pub fn t_stab_norm(plant: &PartitionedPlant, policy: &AugmentedPolicy) -> f64 {
    let cl = build_augmented_plant(plant).and_then(|gc| gc.closed_loop(policy));
    match cl {
        Ok(cl) => stab_norm_of(cl.a()),
        Err(_) => SENTINEL,
    }
}

pub(crate) fn stab_norm_of(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let sys = StateSpace::new(a.clone(), DMatrix::identity(n, n), DMatrix::identity(n, n), DMatrix::zeros(n, n));
    match sys.and_then(|s| hinf_norm(&s)) {
        Ok(est) if est.value.is_finite() => est.value.min(SENTINEL),
        _ => SENTINEL,
    }
}

/// Upper bound on `sup_{|z|=1} ‖(zI - A)⁻¹‖` from the Neumann series:
/// with `P = A^K` and `‖P‖_F < 1`, the sum of `‖A^k‖` is at most
/// `Σ_{r<K} ‖A^r‖_F / (1 - ‖P‖_F)`.
pub fn stab_upper_bound(a: &DMatrix<f64>) -> Option<f64> {
    let n = a.nrows();
    if n == 0 {
        return Some(0.0);
    }
    let mut power = DMatrix::identity(n, n);
    let mut partial = 0.0;
    for _ in 0..400 {
        partial += power.norm();
        power = &power * a;
        let pn = power.norm();
        if !pn.is_finite() {
            return None;
        }
        if pn < 0.5 {
            return Some(partial / (1.0 - pn));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::musyn::{doyle_plant, ChannelDims, ControllerParams, DScaleParams};
    use approx::assert_relative_eq;

    fn doyle_policy(q: f64, d: f64) -> AugmentedPolicy {
        AugmentedPolicy::new(
            ControllerParams::static_gain(DMatrix::from_element(1, 1, q)),
            DScaleParams::static_scale(DMatrix::from_element(1, 1, d)),
        )
        .unwrap()
    }

    #[test]
    fn doyle_costs() {
        let plant = doyle_plant();
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert_relative_eq!(cost_j(&plant, &doyle_policy(0.0, 1.0), CostMode::Exact), golden, max_relative = 1e-12);
        assert!((cost_j(&plant, &doyle_policy(0.0, 1e-3), CostMode::Exact) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn positive_scale_constraint() {
        let plant = doyle_plant();
        let obj = PolicyObjective::new(&plant, ChannelDims::siso().layout(0, 0), CostMode::Exact)
            .unwrap()
            .with_positive_scale();
        assert_eq!(obj.value(&[0.0, -0.5]), SENTINEL);
        assert_eq!(obj.value(&[0.0, 0.0]), SENTINEL);
        assert!(obj.value(&[0.0, 0.5]) < 2.0);
    }

    #[test]
    fn scalar_resolvent_norms() {
        assert_relative_eq!(stab_norm_of(&DMatrix::zeros(1, 1)), 1.0, max_relative = 1e-12);
        assert_relative_eq!(stab_norm_of(&DMatrix::from_element(1, 1, 0.9)), 10.0, max_relative = 1e-9);
        assert_relative_eq!(stab_norm_of(&DMatrix::from_element(1, 1, 0.99)), 100.0, max_relative = 1e-9);
        assert_eq!(stab_norm_of(&DMatrix::from_element(1, 1, 1.0)), SENTINEL);
    }

    #[test]
    fn neumann_bound_dominates_exact_value() {
        let a = DMatrix::from_row_slice(3, 3, &[0.5, 2.0, 0.0, 0.0, -0.4, 1.0, 0.1, 0.0, 0.3]);
        let exact = stab_norm_of(&a);
        let bound = stab_upper_bound(&a).unwrap();
        assert!(bound >= exact, "{bound} < {exact}");
    }

    #[test]
    fn norm_term_dominates_when_large() {
        let plant = doyle_plant();
        let reg = RegularizationConfig { lambda2: 1e-3, ..Default::default() };
        let p = doyle_policy(0.0, 1.0);
        let terms = cost_terms(&plant, &p, &reg);
        assert_relative_eq!(terms.norm, 1e-3 * 1.0, max_relative = 1e-12);
        assert_eq!(terms.total, terms.j);
    }
}
