#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use musynth::lti::{self, StateSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Random system with spectral radius exactly `rho` (when `n > 0`).
pub fn stable_system(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize, rho: f64) -> StateSpace {
    let mut a = normal(rng, n, n);
    if n > 0 {
        let r = a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        a *= rho / r;
    }
    StateSpace::new(a, normal(rng, n, m), normal(rng, p, n), normal(rng, p, m)).unwrap()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Largest singular value of a complex matrix from the eigenvalues of its Gram matrix.
pub fn sigma_max_c(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Transfer matrix by the direct sum `D + Σ_k C A^k B z^{-k-1}` truncated at `terms`.
pub fn markov_sum(sys: &StateSpace, omega: f64, terms: usize) -> DMatrix<Complex64> {
    let mut acc = to_complex(sys.d());
    let mut ak_b = sys.b().clone();
    let zinv = Complex64::from_polar(1.0, -omega);
    let mut phase = zinv;
    for _ in 0..terms {
        acc += to_complex(&(sys.c() * &ak_b)) * phase;
        ak_b = sys.a() * ak_b;
        phase *= zinv;
    }
    acc
}

pub fn spectral_radius(sys: &StateSpace) -> f64 {
    lti::spectral_radius(sys).unwrap()
}

use musynth::musyn::{
    random_plant, AugmentedPolicy, ChannelDims, ControllerParams, DScaleParams, PartitionedPlant,
};

/// Random plant with the uncertainty channel sized `n_v = n_w`, plus a small
/// random controller and a D-scale whose inverse realization is stable.
/// `n_dscale` is 0 (static) or 1 (one-state dynamic).
pub fn random_triple(seed: u64, n_dscale: usize) -> (PartitionedPlant, AugmentedPolicy) {
    let mut r = rng(seed);
    let n_v = 1 + (seed % 2) as usize;
    let dims = ChannelDims { n_w: n_v, n_d: 1 + (seed % 3 == 0) as usize, n_u: 1, n_v, n_e: 1, n_y: 1 + (seed % 3 == 1) as usize };
    let n_x = 2 + (seed % 4) as usize;
    let plant = random_plant(n_x, dims, 0.7, seed).unwrap();
    let n_k = (seed % 3) as usize;
    let ctrl = ControllerParams {
        a_k: normal(&mut r, n_k, n_k) * 0.2,
        b_k: normal(&mut r, n_k, dims.n_y) * 0.05,
        c_k: normal(&mut r, dims.n_u, n_k) * 0.05,
        d_k: normal(&mut r, dims.n_u, dims.n_y) * 0.02,
    };
    let d_d = DMatrix::identity(n_v, n_v) * 1.5 + normal(&mut r, n_v, n_v) * 0.2;
    let dscale = DScaleParams {
        a_d: DMatrix::from_element(n_dscale, n_dscale, 0.3),
        b_d: normal(&mut r, n_dscale, n_v) * 0.2,
        c_d: normal(&mut r, n_v, n_dscale) * 0.2,
        d_d,
    };
    (plant, AugmentedPolicy::new(ctrl, dscale).unwrap())
}

/// Minimum of `‖Σ λ_i v_i‖` over the simplex by coarse-to-fine enumeration of
/// the first `m − 1` weights, the last weight taking up the slack.
pub fn grid_min_norm(vectors: &[Vec<f64>]) -> f64 {
    let m = vectors.len();
    let d = vectors[0].len();
    let norm = |a: &[f64]| a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let value = |lam: &[f64]| -> Option<f64> {
        let last = 1.0 - lam.iter().sum::<f64>();
        if lam.iter().any(|l| *l < 0.0) || last < -1e-15 {
            return None;
        }
        let mut x = vec![0.0; d];
        for (k, v) in vectors.iter().enumerate() {
            let l = if k + 1 == m { last.max(0.0) } else { lam[k] };
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += l * vi);
        }
        Some(norm(&x))
    };
    if m == 1 {
        return norm(&vectors[0]);
    }
    let free = m - 1;
    // Coarse pass over the whole simplex.
    let coarse = 20usize;
    let mut best = (f64::INFINITY, vec![0.0; free]);
    let mut idx = vec![0usize; free];
    loop {
        let lam: Vec<f64> = idx.iter().map(|&i| i as f64 / coarse as f64).collect();
        if let Some(v) = value(&lam) {
            if v < best.0 {
                best = (v, lam);
            }
        }
        let mut k = 0;
        while k < free {
            idx[k] += 1;
            if idx[k] <= coarse {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == free {
            break;
        }
    }
    // Local refinement on a shrinking lattice.
    let mut step = 1.0 / coarse as f64;
    let offsets: Vec<Vec<i32>> = (0..5usize.pow(free as u32))
        .map(|mut c| {
            (0..free)
                .map(|_| {
                    let o = (c % 5) as i32 - 2;
                    c /= 5;
                    o
                })
                .collect()
        })
        .collect();
    while step > 1e-9 {
        loop {
            let mut improved = false;
            for off in &offsets {
                let lam: Vec<f64> = best.1.iter().zip(off).map(|(l, o)| l + *o as f64 * step).collect();
                if let Some(v) = value(&lam) {
                    if v < best.0 - 1e-16 {
                        best = (v, lam);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.5;
    }
    best.0
}
