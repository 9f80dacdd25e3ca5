mod common;

use approx::assert_relative_eq;
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

use musynth::baseline::{doyle_objective, DoylePoint};
use musynth::hinf::{hinf_norm, PowerIterConfig};
use musynth::lti::{self, StateSpace};
use musynth::musyn::*;

fn doyle_policy(q: f64, d: f64) -> AugmentedPolicy {
    AugmentedPolicy::new(
        ControllerParams::static_gain(DMatrix::from_element(1, 1, q)),
        DScaleParams::static_scale(DMatrix::from_element(1, 1, d)),
    )
    .unwrap()
}

#[test]
fn augmented_and_direct_scaled_norms_agree() {
    let mut checked = 0;
    let mut dynamic = 0;
    let mut seed = 0;
    while checked < 50 {
        let n_dscale = (seed % 2) as usize;
        let (plant, policy) = random_triple(seed, n_dscale);
        seed += 1;
        let direct = scaled_closedloop_direct(&plant, &policy.ctrl, &policy.dscale).unwrap();
        let Ok(reference) = hinf_norm(&direct) else { continue };
        let gc = build_augmented_plant(&plant).unwrap();
        let via_gc = hinf_norm(&gc.closed_loop(&policy).unwrap()).unwrap();
        assert!(
            (via_gc.value - reference.value).abs() <= 1e-6 * reference.value.max(1.0),
            "seed {}: {} vs {}",
            seed - 1,
            via_gc.value,
            reference.value
        );
        checked += 1;
        dynamic += n_dscale;
    }
    assert!(dynamic >= 20);
    assert!(seed < 80, "too many unstable triples: {seed}");
}

#[test]
fn identity_scale_leaves_loop_unchanged() {
    let (plant, mut policy) = random_triple(4, 0);
    policy.dscale = DScaleParams::identity(0, plant.dims().n_v);
    let f = lti::lft_lower(
        plant.sys(),
        &StateSpace::new(policy.ctrl.a_k.clone(), policy.ctrl.b_k.clone(), policy.ctrl.c_k.clone(), policy.ctrl.d_k.clone())
            .unwrap(),
    )
    .unwrap();
    let scaled = scaled_closedloop_direct(&plant, &policy.ctrl, &policy.dscale).unwrap();
    for w in [0.0, 0.4, 2.0] {
        let a = lti::freq_response(&f, w).unwrap();
        let b = lti::freq_response(&scaled, w).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn doyle_direct_values() {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let plant = doyle_plant();
    let p = doyle_policy(0.0, 1.0);
    let direct = scaled_closedloop_direct(&plant, &p.ctrl, &p.dscale).unwrap();
    assert_relative_eq!(hinf_norm(&direct).unwrap().value, golden, max_relative = 1e-12);
    let p = doyle_policy(72.0, 72f64.sqrt());
    let direct = scaled_closedloop_direct(&plant, &p.ctrl, &p.dscale).unwrap();
    assert_relative_eq!(hinf_norm(&direct).unwrap().value, 73f64.sqrt(), max_relative = 1e-12);
}

#[test]
fn doyle_cost_values() {
    let plant = doyle_plant();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert_relative_eq!(cost_j(&plant, &doyle_policy(0.0, 1.0), CostMode::Exact), golden, max_relative = 1e-12);
    assert!((cost_j(&plant, &doyle_policy(0.0, 1e-3), CostMode::Exact) - 1.0).abs() <= 1e-3);
}

#[test]
fn restricted_doyle_path_matches_closed_form_on_grid() {
    let plant = doyle_plant();
    let obj = PolicyObjective::new(&plant, plant.dims().layout(0, 0), CostMode::Exact).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            let q = -10.0 + 100.0 * i as f64 / 19.0;
            let d = 0.05 + 94.95 * j as f64 / 19.0;
            let closed = doyle_objective(DoylePoint::new(q, d).unwrap()).unwrap();
            let via_policy = obj.cost(&doyle_policy(q, d));
            assert!((via_policy - closed).abs() <= 1e-9 * closed.max(1.0), "({q}, {d}): {via_policy} vs {closed}");
        }
    }
}

#[test]
fn augmented_controller_structure() {
    let dims = ChannelDims::siso();
    let p0 = default_init(&random_plant(3, dims, 0.5, 0).unwrap(), 0, 0).unwrap();
    let kc = build_augmented_controller(&p0, &dims).unwrap();
    assert_eq!(kc.n_x(), 0);
    assert!(kc.d().iter().all(|v| *v == 0.0));

    let p = doyle_policy(5.0, 4.0);
    let kc = build_augmented_controller(&p, &dims).unwrap();
    let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![5.0, 3.0, 0.0, 3.0, 0.0]));
    assert_eq!(kc.d(), &expected);

    let n_v = 1;
    let policy = AugmentedPolicy::new(ControllerParams::zeros(3, 1, 1), DScaleParams::identity(1, n_v)).unwrap();
    assert_eq!(build_augmented_controller(&policy, &dims).unwrap().n_x(), 5);
}

#[test]
fn stab_norm_examples() {
    let m = |v: f64| DMatrix::from_element(1, 1, v);
    let sys = |a: f64| StateSpace::new(m(a), m(1.0), m(1.0), m(0.0)).unwrap();
    assert_relative_eq!(hinf_norm(&sys(0.0)).unwrap().value, 1.0, max_relative = 1e-12);
    assert_relative_eq!(hinf_norm(&sys(0.9)).unwrap().value, 10.0, max_relative = 1e-9);
    assert_relative_eq!(hinf_norm(&sys(0.99)).unwrap().value, 100.0, max_relative = 1e-9);
    let b = stab_upper_bound(&m(0.9)).unwrap();
    assert!(b >= 10.0 * (1.0 - 1e-12));
}

#[test]
fn destabilizing_gain_hits_sentinel() {
    let plant = random_plant(4, ChannelDims::siso(), 0.9, 3).unwrap();
    let reg = RegularizationConfig::default();
    let mut found = false;
    for g in (-400..=400).map(|i| i as f64 * 0.25) {
        let p = AugmentedPolicy::new(
            ControllerParams::static_gain(DMatrix::from_element(1, 1, g)),
            DScaleParams::identity(0, 1),
        )
        .unwrap();
        let gc = build_augmented_plant(&plant).unwrap();
        let rho = gc.closed_loop(&p).and_then(|cl| lti::spectral_radius(&cl)).unwrap_or(2.0);
        if rho >= 1.0 {
            found = true;
            assert_eq!(cost_j(&plant, &p, CostMode::Exact), SENTINEL);
            assert_eq!(cost_jc(&plant, &p, &reg), SENTINEL);
            assert_eq!(t_stab_norm(&plant, &p), SENTINEL);
            assert_eq!(cost_j(&plant, &p, CostMode::ModelFree(PowerIterConfig::default())), SENTINEL);
        }
    }
    assert!(found);
}

#[test]
fn sentinel_dominates_feasible_costs() {
    let reg = RegularizationConfig::default();
    for seed in 0..20 {
        let (plant, policy) = random_triple(seed, (seed % 2) as usize);
        let v = cost_jc(&plant, &policy, &reg);
        if v < SENTINEL {
            assert!(v < 1e9, "feasible cost {v} too close to the sentinel");
        }
    }
    let singular = doyle_policy(1.0, 0.0);
    assert_eq!(cost_j(&doyle_plant(), &singular, CostMode::Exact), SENTINEL);
}

#[test]
fn regularization_examples() {
    let plant = random_plant(5, ChannelDims::siso(), 0.6, 11).unwrap();
    let p = default_init(&plant, 1, 1).unwrap();
    let reg = RegularizationConfig::default();
    let t = cost_terms(&plant, &p, &reg);
    assert_eq!(t.total, t.j);
    let strong = RegularizationConfig { lambda2: 1e-3, ..reg.clone() };
    let mut big = p.clone();
    big.ctrl.d_k[(0, 0)] = 0.0;
    big.dscale.d_d[(0, 0)] = 1e7;
    let t = cost_terms(&plant, &big, &strong);
    assert!((t.norm - 1e4).abs() < 1e-6);
    assert!(t.total >= t.norm);
}

#[test]
fn t_stab_tracks_closed_loop_resolvent() {
    let plant = random_plant(3, ChannelDims::siso(), 0.5, 2).unwrap();
    let p = default_init(&plant, 0, 0).unwrap();
    let gc = build_augmented_plant(&plant).unwrap();
    let a = gc.closed_loop(&p).unwrap().a().clone();
    let n = a.nrows();
    let resolvent = StateSpace::new(a.clone(), DMatrix::identity(n, n), DMatrix::identity(n, n), DMatrix::zeros(n, n)).unwrap();
    assert_relative_eq!(t_stab_norm(&plant, &p), hinf_norm(&resolvent).unwrap().value, max_relative = 1e-12);
    assert!(stab_upper_bound(&a).unwrap() >= t_stab_norm(&plant, &p) * (1.0 - 1e-9));
}

#[test]
fn model_free_matches_exact_on_random_plants() {
    for seed in 0..5 {
        let plant = random_plant(6, ChannelDims::siso(), 0.9, seed).unwrap();
        let p = default_init(&plant, 0, 1).unwrap();
        let exact = cost_j(&plant, &p, CostMode::Exact);
        let mf = cost_j(&plant, &p, CostMode::ModelFree(PowerIterConfig { rng_seed: seed, ..Default::default() }));
        assert!((mf - exact).abs() <= 0.02 * exact, "seed {seed}: {mf} vs {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flatten_round_trip(n_k in 0usize..4, n_d in 0usize..3, n_u in 1usize..3, n_y in 1usize..3, n_v in 1usize..3, seed in 0u64..1000) {
        let layout = PolicyLayout { n_k, n_dscale: n_d, n_u, n_y, n_v };
        let expected = n_k * n_k + n_k * n_y + n_u * n_k + n_u * n_y + n_d * n_d + n_d * n_v + n_v * n_d + n_v * n_v;
        prop_assert_eq!(layout.dim(), expected);
        let mut r = rng(seed);
        let x: Vec<f64> = normal(&mut r, expected, 1).iter().copied().collect();
        let p = AugmentedPolicy::unflatten(&layout, &x).unwrap();
        prop_assert_eq!(p.flatten(), x.clone());
        prop_assert_eq!(AugmentedPolicy::unflatten(&layout, &p.flatten()).unwrap(), p);
    }

    #[test]
    fn lambda2_term_scales_linearly(seed in 0u64..200, scale in 1.0f64..1e3) {
        let (plant, policy) = random_triple(seed, 1);
        let reg = RegularizationConfig { lambda2: 1e-3, ..Default::default() };
        let x: Vec<f64> = policy.flatten().iter().map(|v| v * scale).collect();
        let scaled = AugmentedPolicy::unflatten(&policy.layout(), &x).unwrap();
        let t = cost_terms(&plant, &scaled, &reg);
        prop_assert!((scaled.frobenius_norm() - scale * policy.frobenius_norm()).abs() <= 1e-12 * scaled.frobenius_norm());
        if t.total < SENTINEL {
            prop_assert_eq!(t.norm, 1e-3 * scaled.frobenius_norm());
            prop_assert!(t.total >= t.norm);
        }
    }
}
