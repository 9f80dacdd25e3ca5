mod common;

use approx::assert_relative_eq;
use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;

use musynth::lti::{self, Signal, StateSpace};

fn scalar(a: f64, b: f64, c: f64, d: f64) -> StateSpace {
    let m = |v| DMatrix::from_element(1, 1, v);
    StateSpace::new(m(a), m(b), m(c), m(d)).unwrap()
}

#[test]
fn spectral_radius_examples() {
    assert_eq!(spectral_radius(&scalar(0.5, 1.0, 1.0, 0.0)), 0.5);
    let s = StateSpace::static_gain(DMatrix::from_element(1, 1, 2.0)).unwrap();
    assert_eq!(spectral_radius(&s), 0.0);
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -0.25, 0.0]);
    let s = StateSpace::new(a, DMatrix::zeros(2, 1), DMatrix::zeros(1, 2), DMatrix::zeros(1, 1)).unwrap();
    assert_relative_eq!(spectral_radius(&s), 0.5, max_relative = 1e-12);
}

#[test]
fn stability_boundary() {
    assert!(lti::is_stable(&scalar(0.99, 1.0, 1.0, 0.0), 0.0).unwrap());
    assert!(!lti::is_stable(&scalar(1.0, 1.0, 1.0, 0.0), 0.0).unwrap());
    assert!(!lti::is_stable(&scalar(0.95, 1.0, 1.0, 0.0), 0.1).unwrap());
}

#[test]
fn frequency_response_examples() {
    let s = scalar(0.5, 1.0, 1.0, 0.0);
    assert_relative_eq!(lti::freq_response(&s, 0.0).unwrap()[(0, 0)].re, 2.0, max_relative = 1e-14);
    assert_relative_eq!(lti::freq_response(&s, std::f64::consts::PI).unwrap()[(0, 0)].norm(), 1.0 / 1.5, max_relative = 1e-14);
    let k = StateSpace::static_gain(DMatrix::from_element(1, 1, 3.0)).unwrap();
    assert_eq!(lti::freq_response(&k, 0.7).unwrap()[(0, 0)], Complex64::new(3.0, 0.0));
}

#[test]
fn simulation_examples() {
    let s = scalar(0.5, 1.0, 1.0, 0.0);
    let y = lti::simulate(&s, &Signal::impulse(1, 5, 0), &[0.0]).unwrap();
    assert_eq!(y.as_slice(), &[0.0, 1.0, 0.5, 0.25, 0.125]);
    let z = lti::simulate(&s, &Signal::zeros(1, 7), &[0.0]).unwrap();
    assert!(z.as_slice().iter().all(|v| *v == 0.0));
    let id = StateSpace::static_gain(DMatrix::identity(2, 2)).unwrap();
    let u = Signal::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap();
    assert_eq!(lti::simulate(&id, &u, &[]).unwrap(), u);
}

#[test]
fn impulse_response_dft_matches_frequency_response() {
    let mut r = rng(11);
    for trial in 0..5 {
        let sys = stable_system(&mut r, 4 + trial, 2, 3, 0.9);
        let n = 2000;
        let mut h: Vec<Signal> = Vec::new();
        for ch in 0..sys.n_in() {
            h.push(lti::simulate(&sys, &Signal::impulse(sys.n_in(), n, ch), &vec![0.0; sys.n_x()]).unwrap());
        }
        for bin in [0usize, 1, 37, 500, 999] {
            let omega = 2.0 * std::f64::consts::PI * bin as f64 / n as f64;
            let g = lti::freq_response(&sys, omega).unwrap();
            for (ch, resp) in h.iter().enumerate() {
                for out in 0..sys.n_out() {
                    let dft: Complex64 =
                        (0..n).map(|k| resp.at(k)[out] * Complex64::from_polar(1.0, -omega * k as f64)).sum();
                    assert!((dft - g[(out, ch)]).norm() <= 1e-6 * (1.0 + g[(out, ch)].norm()), "bin {bin}");
                }
            }
        }
    }
}

#[test]
fn lft_matches_pointwise_formula() {
    let mut r = rng(7);
    let mut checked = 0;
    let mut attempt = 0;
    while checked < 100 {
        attempt += 1;
        let (m1, p1, m2, p2) = (1 + attempt % 3, 1 + attempt % 2, 1 + attempt % 2, 1 + (attempt / 2) % 2);
        let plant = stable_system(&mut r, 1 + attempt % 4, m1 + m2, p1 + p2, 0.8);
        let ctrl = stable_system(&mut r, attempt % 3, p2, m2, 0.5);
        let Ok(cl) = lti::lft_lower(&plant, &ctrl) else { continue };
        assert_eq!(cl.n_x(), plant.n_x() + ctrl.n_x());
        for k in 0..3 {
            let omega = 0.3 + 0.9 * k as f64;
            let Ok(g) = lti::freq_response(&plant, omega) else { continue };
            let kk = lti::freq_response(&ctrl, omega).unwrap();
            let g11 = g.view((0, 0), (p1, m1));
            let g12 = g.view((0, m1), (p1, m2));
            let g21 = g.view((p1, 0), (p2, m1));
            let g22 = g.view((p1, m1), (p2, m2));
            let loop_ = DMatrix::<Complex64>::identity(p2, p2) - &g22 * &kk;
            let Some(inv) = loop_.try_inverse() else { continue };
            let expected = &g11 + &g12 * &kk * inv * &g21;
            let Ok(got) = lti::freq_response(&cl, omega) else { continue };
            let scale = 1.0 + expected.norm();
            assert!((got - &expected).norm() <= 1e-10 * scale, "attempt {attempt}");
        }
        checked += 1;
    }
}

#[test]
fn lft_with_static_doyle_data() {
    let g = DMatrix::from_row_slice(3, 3, &[-1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    let plant = StateSpace::static_gain(g).unwrap();
    let q = StateSpace::static_gain(DMatrix::from_element(1, 1, 5.0)).unwrap();
    let cl = lti::lft_lower(&plant, &q).unwrap();
    assert_eq!(cl.d(), &DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 5.0, 1.0]));
    let zero = StateSpace::static_gain(DMatrix::zeros(1, 1)).unwrap();
    assert_eq!(lti::lft_lower(&plant, &zero).unwrap().d(), &DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, 1.0]));
}

#[test]
fn ill_posed_loop_rejected() {
    // D22 = 1 and K = 1 make I - D22 K singular.
    let plant = StateSpace::static_gain(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 1.0])).unwrap();
    let k = StateSpace::static_gain(DMatrix::from_element(1, 1, 1.0)).unwrap();
    assert!(matches!(lti::lft_lower(&plant, &k), Err(musynth::Error::IllPosed { .. })));
}

#[test]
fn transpose_properties() {
    let mut r = rng(3);
    let sys = stable_system(&mut r, 3, 2, 4, 0.7);
    let t = lti::transpose_system(&sys);
    assert_eq!(lti::transpose_system(&t), sys);
    let s = scalar(0.5, 1.0, 1.0, 0.0);
    assert_eq!(lti::transpose_system(&s), s);
    for omega in [0.0, 0.3, 1.7, 3.0] {
        let g = lti::freq_response(&sys, omega).unwrap();
        let gt = lti::freq_response(&t, omega).unwrap();
        assert!((gt.clone() - g.transpose()).norm() < 1e-12 * (1.0 + g.norm()));
        let sv = g.svd(false, false).singular_values;
        let svt = gt.svd(false, false).singular_values;
        for (a, b) in sv.iter().zip(svt.iter()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-10);
        }
    }
}

#[test]
fn composition_ops() {
    let s = scalar(0.5, 1.0, 1.0, 0.0);
    assert_eq!(lti::left_multiply_const(&DMatrix::identity(1, 1), &s).unwrap(), s);
    let ss = lti::series(&s, &s).unwrap();
    assert_eq!(ss.n_x(), 2);
    assert_relative_eq!(lti::freq_response(&ss, 0.0).unwrap()[(0, 0)].re, 4.0, max_relative = 1e-12);
    let par = lti::parallel_sum(&s, &s).unwrap();
    assert_eq!(par.n_x(), 2);
    assert_relative_eq!(lti::freq_response(&par, 0.0).unwrap()[(0, 0)].re, 4.0, max_relative = 1e-12);

    let mut r = rng(5);
    let sys = stable_system(&mut r, 3, 2, 2, 0.8);
    let m = normal(&mut r, 2, 2);
    let plus = lti::add_const_feedthrough(&sys, &m).unwrap();
    let lhs = lti::freq_response(&plus, 1.1).unwrap();
    let rhs = lti::freq_response(&sys, 1.1).unwrap() + to_complex(&m);
    assert!((lhs - rhs).norm() < 1e-12);
    let l = normal(&mut r, 3, 2);
    let rm = normal(&mut r, 2, 1);
    let lsys = lti::left_multiply_const(&l, &sys).unwrap();
    let rsys = lti::right_multiply_const(&sys, &rm).unwrap();
    let g = lti::freq_response(&sys, 0.4).unwrap();
    assert!((lti::freq_response(&lsys, 0.4).unwrap() - to_complex(&l) * &g).norm() < 1e-12);
    assert!((lti::freq_response(&rsys, 0.4).unwrap() - &g * to_complex(&rm)).norm() < 1e-12);
    assert_eq!(lsys.n_x(), 3);
}
