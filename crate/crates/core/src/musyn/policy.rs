use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{from_row_major, rcond, row_major};

/// Minimum reciprocal condition number of the D-scale feedthrough.
pub const SCALE_RCOND: f64 = 1e-10;

/// Controller realization `(A_K, B_K, C_K, D_K)` of order `n_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerParams {
    pub a_k: DMatrix<f64>,
    pub b_k: DMatrix<f64>,
    pub c_k: DMatrix<f64>,
    pub d_k: DMatrix<f64>,
}

impl ControllerParams {
    pub fn zeros(n_k: usize, n_u: usize, n_y: usize) -> Self {
        Self {
            a_k: DMatrix::zeros(n_k, n_k),
            b_k: DMatrix::zeros(n_k, n_y),
            c_k: DMatrix::zeros(n_u, n_k),
            d_k: DMatrix::zeros(n_u, n_y),
        }
    }

    /// Static output feedback `u = d_k y`.
    pub fn static_gain(d_k: DMatrix<f64>) -> Self {
        let (n_u, n_y) = d_k.shape();
        Self { d_k, ..Self::zeros(0, n_u, n_y) }
    }

    pub fn order(&self) -> usize {
        self.a_k.nrows()
    }
}

/// D-scale realization `(A_D, B_D, C_D, D_D)` acting on the uncertainty
/// channel. The two copies inside the augmented controller are generated
/// from this single set of parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DScaleParams {
    pub a_d: DMatrix<f64>,
    pub b_d: DMatrix<f64>,
    pub c_d: DMatrix<f64>,
    pub d_d: DMatrix<f64>,
}

impl DScaleParams {
    /// Zero dynamics with identity feedthrough.
    pub fn identity(n_dscale: usize, n_v: usize) -> Self {
        Self {
            a_d: DMatrix::zeros(n_dscale, n_dscale),
            b_d: DMatrix::zeros(n_dscale, n_v),
            c_d: DMatrix::zeros(n_v, n_dscale),
            d_d: DMatrix::identity(n_v, n_v),
        }
    }

    pub fn static_scale(d_d: DMatrix<f64>) -> Self {
        let n_v = d_d.nrows();
        Self { d_d, ..Self::identity(0, n_v) }
    }

    pub fn order(&self) -> usize {
        self.a_d.nrows()
    }

    /// Fails unless `d_d` is comfortably invertible.
    pub fn check_invertible(&self) -> Result<()> {
        let rc = rcond(&self.d_d);
        if rc > SCALE_RCOND {
            Ok(())
        } else {
            Err(Error::SingularScale { rcond: rc })
        }
    }
}

/// Shape of the policy vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyLayout {
    pub n_k: usize,
    pub n_dscale: usize,
    pub n_u: usize,
    pub n_y: usize,
    pub n_v: usize,
}

impl PolicyLayout {
    /// Number of free scalars; the D-scale is counted once.
    pub fn dim(&self) -> usize {
        let Self { n_k, n_dscale: n_d, n_u, n_y, n_v } = *self;
        n_k * n_k + n_k * n_y + n_u * n_k + n_u * n_y + n_d * n_d + n_d * n_v + n_v * n_d + n_v * n_v
    }

    fn shapes(&self) -> [(usize, usize); 8] {
        let Self { n_k, n_dscale: n_d, n_u, n_y, n_v } = *self;
        [(n_k, n_k), (n_k, n_y), (n_u, n_k), (n_u, n_y), (n_d, n_d), (n_d, n_v), (n_v, n_d), (n_v, n_v)]
    }
}

/// The decision variable: controller plus tied D-scale.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPolicy {
    pub ctrl: ControllerParams,
    pub dscale: DScaleParams,
}

impl AugmentedPolicy {
    pub fn new(ctrl: ControllerParams, dscale: DScaleParams) -> Result<Self> {
        let p = Self { ctrl, dscale };
        p.validate()?;
        Ok(p)
    }

    pub fn layout(&self) -> PolicyLayout {
        PolicyLayout {
            n_k: self.ctrl.a_k.nrows(),
            n_dscale: self.dscale.a_d.nrows(),
            n_u: self.ctrl.d_k.nrows(),
            n_y: self.ctrl.d_k.ncols(),
            n_v: self.dscale.d_d.nrows(),
        }
    }

    fn matrices(&self) -> [&DMatrix<f64>; 8] {
        [
            &self.ctrl.a_k,
            &self.ctrl.b_k,
            &self.ctrl.c_k,
            &self.ctrl.d_k,
            &self.dscale.a_d,
            &self.dscale.b_d,
            &self.dscale.c_d,
            &self.dscale.d_d,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let layout = self.layout();
        for (m, shape) in self.matrices().iter().zip(layout.shapes()) {
            if m.shape() != shape {
                return Err(Error::Dimension(format!("policy block is {:?}, expected {:?}", m.shape(), shape)));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("policy"));
            }
        }
        Ok(())
    }

    /// Row-major concatenation of `(A_K, B_K, C_K, D_K, A_D, B_D, C_D, D_D)`.
    pub fn flatten(&self) -> Vec<f64> {
        self.matrices().iter().flat_map(|m| row_major(m)).collect()
    }

    pub fn unflatten(layout: &PolicyLayout, x: &[f64]) -> Result<Self> {
        if x.len() != layout.dim() {
            return Err(Error::Dimension(format!("policy vector has {} entries, layout needs {}", x.len(), layout.dim())));
        }
        let mut offset = 0;
        let mut take = |(r, c): (usize, usize)| {
            let m = from_row_major(r, c, &x[offset..offset + r * c]);
            offset += r * c;
            m
        };
        let s = layout.shapes();
        let ctrl = ControllerParams { a_k: take(s[0]), b_k: take(s[1]), c_k: take(s[2]), d_k: take(s[3]) };
        let dscale = DScaleParams { a_d: take(s[4]), b_d: take(s[5]), c_d: take(s[6]), d_d: take(s[7]) };
        Self::new(ctrl, dscale)
    }

    /// Frobenius norm of the flattened parameters.
    pub fn frobenius_norm(&self) -> f64 {
        self.matrices().iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }
}
