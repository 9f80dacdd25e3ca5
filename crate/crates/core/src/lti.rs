//! Discrete-time LTI state-space algebra.
//!
//! Every system is `x_{t+1} = A x_t + B u_t`, `y_t = C x_t + D u_t`. A system
//! with zero states is a constant map and is handled everywhere.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, gemv_into, hstack, rcond, vstack};

/// Minimum reciprocal condition number of `I - D22 Dk` for a lower LFT.
pub const WELL_POSED_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!("A is {}x{}, must be square", n, a.ncols())));
        }
        if b.nrows() != n || c.ncols() != n {
            return Err(Error::Dimension(format!(
                "B has {} rows and C has {} columns, expected {n}",
                b.nrows(),
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::Dimension(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                b.ncols()
            )));
        }
        if d.nrows() == 0 || d.ncols() == 0 {
            return Err(Error::Dimension("systems need at least one input and one output".into()));
        }
        for (m, name) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D")] {
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Constant map `y = d u`.
    pub fn static_gain(d: DMatrix<f64>) -> Result<Self> {
        let (p, m) = d.shape();
        Self::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, m), DMatrix::zeros(p, 0), d)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn n_x(&self) -> usize {
        self.a.nrows()
    }
    pub fn n_in(&self) -> usize {
        self.b.ncols()
    }
    pub fn n_out(&self) -> usize {
        self.c.nrows()
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        (self.a, self.b, self.c, self.d)
    }
}

/// A uniformly-dimensioned vector trajectory, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    dim: usize,
    data: Vec<f64>,
}

impl Signal {
    pub fn zeros(dim: usize, horizon: usize) -> Self {
        Self { dim, data: vec![0.0; dim * horizon] }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::Dimension(format!("{} samples do not split into dimension {dim}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("ragged signal".into()));
        }
        Self::from_flat(dim, rows.concat())
    }

    /// Unit impulse on `channel` at t = 0.
    pub fn impulse(dim: usize, horizon: usize, channel: usize) -> Self {
        let mut s = Self::zeros(dim, horizon);
        if horizon > 0 {
            s.data[channel] = 1.0;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn horizon(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }
    pub fn at(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }
    pub fn at_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.data[t * self.dim..(t + 1) * self.dim]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn time_reversed(&self) -> Self {
        let h = self.horizon();
        let mut out = Self::zeros(self.dim, h);
        for t in 0..h {
            out.at_mut(h - 1 - t).copy_from_slice(self.at(t));
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Signal) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|v| *v *= k);
    }
}

pub fn spectral_radius(sys: &StateSpace) -> Result<f64> {
    matrix_spectral_radius(sys.a())
}

pub(crate) fn matrix_spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    if n == 1 {
        return Ok(a[(0, 0)].abs());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigenvalues of the state matrix (empty for static systems).
pub fn poles(sys: &StateSpace) -> Result<Vec<Complex64>> {
    let n = sys.n_x();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(sys.a().clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn is_stable(sys: &StateSpace, margin: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::Domain(format!("stability margin {margin} outside [0, 1)")));
    }
    Ok(spectral_radius(sys)? < 1.0 - margin)
}

/// Transfer matrix `C (e^{jω} I - A)^{-1} B + D`.
pub fn freq_response(sys: &StateSpace, omega: f64) -> Result<DMatrix<Complex64>> {
    let d = sys.d().map(|v| Complex64::new(v, 0.0));
    let n = sys.n_x();
    if n == 0 {
        return Ok(d);
    }
    let z = Complex64::from_polar(1.0, omega);
    let mut m = sys.a().map(|v| Complex64::new(-v, 0.0));
    for i in 0..n {
        m[(i, i)] += z;
    }
    let b = sys.b().map(|v| Complex64::new(v, 0.0));
    let x = m
        .lu()
        .solve(&b)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::SingularResolvent { omega })?;
    let c = sys.c().map(|v| Complex64::new(v, 0.0));
    Ok(c * x + d)
}

/// Exact recursion from `x0`.
pub fn simulate(sys: &StateSpace, input: &Signal, x0: &[f64]) -> Result<Signal> {
    simulate_inner(sys, input, x0, None)
}

/// Zero-initial-state simulation that fails as soon as any output sample or
/// state entry exceeds `guard` in magnitude.
pub fn simulate_guarded(sys: &StateSpace, input: &Signal, guard: f64) -> Result<Signal> {
    let x0 = vec![0.0; sys.n_x()];
    simulate_inner(sys, input, &x0, Some(guard))
}

fn simulate_inner(sys: &StateSpace, input: &Signal, x0: &[f64], guard: Option<f64>) -> Result<Signal> {
    if input.dim() != sys.n_in() {
        return Err(Error::Dimension(format!("input dimension {} but system has {} inputs", input.dim(), sys.n_in())));
    }
    if x0.len() != sys.n_x() {
        return Err(Error::Dimension(format!("x0 has length {} but system has {} states", x0.len(), sys.n_x())));
    }
    let horizon = input.horizon();
    let mut out = Signal::zeros(sys.n_out(), horizon);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; sys.n_x()];
    for t in 0..horizon {
        let u = input.at(t);
        let y = out.at_mut(t);
        gemv_into(sys.c(), &x, y, false);
        gemv_into(sys.d(), u, y, true);
        gemv_into(sys.a(), &x, &mut next, false);
        gemv_into(sys.b(), u, &mut next, true);
        std::mem::swap(&mut x, &mut next);
        if let Some(guard) = guard {
            let bad = |v: &f64| !v.is_finite() || v.abs() > guard;
            if y.iter().any(bad) || x.iter().any(bad) {
                return Err(Error::Divergence { guard });
            }
        }
    }
    Ok(out)
}

/// `(Aᵀ, Cᵀ, Bᵀ, Dᵀ)`.
pub fn transpose_system(sys: &StateSpace) -> StateSpace {
    StateSpace {
        a: sys.a.transpose(),
        b: sys.c.transpose(),
        c: sys.b.transpose(),
        d: sys.d.transpose(),
    }
}

/// Lower linear fractional transformation. The plant's last `ctrl.n_out()`
/// inputs and last `ctrl.n_in()` outputs form the controller channel; the
/// closed-loop state is `(x_plant, x_ctrl)`.
pub fn lft_lower(plant: &StateSpace, ctrl: &StateSpace) -> Result<StateSpace> {
    let (np, nk) = (plant.n_x(), ctrl.n_x());
    let m2 = ctrl.n_out();
    let p2 = ctrl.n_in();
    if m2 >= plant.n_in() || p2 >= plant.n_out() {
        return Err(Error::Dimension(format!(
            "controller is {}x{} but plant is only {}x{}",
            p2,
            m2,
            plant.n_out(),
            plant.n_in()
        )));
    }
    let m1 = plant.n_in() - m2;
    let p1 = plant.n_out() - p2;

    let b1 = plant.b.columns(0, m1);
    let b2 = plant.b.columns(m1, m2);
    let c1 = plant.c.rows(0, p1);
    let c2 = plant.c.rows(p1, p2);
    let d11 = plant.d.view((0, 0), (p1, m1));
    let d12 = plant.d.view((0, m1), (p1, m2));
    let d21 = plant.d.view((p1, 0), (p2, m1));
    let d22 = plant.d.view((p1, m1), (p2, m2));

    let loop_mat = DMatrix::identity(p2, p2) - d22 * &ctrl.d;
    let rc = rcond(&loop_mat);
    if rc <= WELL_POSED_RCOND {
        return Err(Error::IllPosed { rcond: rc });
    }
    let e = loop_mat
        .try_inverse()
        .ok_or(Error::IllPosed { rcond: 0.0 })?;

    // y = Yx [xp; xk] + Yw w,  u = Ux [xp; xk] + Uw w
    let yx = hstack(&(&e * c2), &(&e * d22 * &ctrl.c));
    let yw = &e * d21;
    let ux = hstack(&DMatrix::zeros(m2, np), &ctrl.c) + &ctrl.d * &yx;
    let uw = &ctrl.d * &yw;

    let mut a = block_diag(&[&plant.a, &ctrl.a]);
    a += vstack(&(b2 * &ux), &(&ctrl.b * &yx));
    let b = vstack(&(b1 + b2 * &uw), &(&ctrl.b * &yw));
    let c = hstack(&c1.into_owned(), &DMatrix::zeros(p1, nk)) + d12 * &ux;
    let d = d11 + d12 * &uw;
    StateSpace::new(a, b, c, d)
}

/// `second ∘ first`: the output of `first` drives `second`.
pub fn series(first: &StateSpace, second: &StateSpace) -> Result<StateSpace> {
    if first.n_out() != second.n_in() {
        return Err(Error::Dimension(format!(
            "series: {} outputs feed {} inputs",
            first.n_out(),
            second.n_in()
        )));
    }
    let (n1, n2) = (first.n_x(), second.n_x());
    let a = vstack(
        &hstack(&first.a, &DMatrix::zeros(n1, n2)),
        &hstack(&(&second.b * &first.c), &second.a),
    );
    let b = vstack(&first.b, &(&second.b * &first.d));
    let c = hstack(&(&second.d * &first.c), &second.c);
    let d = &second.d * &first.d;
    StateSpace::new(a, b, c, d)
}

pub fn parallel_sum(lhs: &StateSpace, rhs: &StateSpace) -> Result<StateSpace> {
    if lhs.n_in() != rhs.n_in() || lhs.n_out() != rhs.n_out() {
        return Err(Error::Dimension("parallel_sum: operand I/O dimensions differ".into()));
    }
    StateSpace::new(
        block_diag(&[&lhs.a, &rhs.a]),
        vstack(&lhs.b, &rhs.b),
        hstack(&lhs.c, &rhs.c),
        &lhs.d + &rhs.d,
    )
}

/// `M · sys`.
pub fn left_multiply_const(m: &DMatrix<f64>, sys: &StateSpace) -> Result<StateSpace> {
    if m.ncols() != sys.n_out() {
        return Err(Error::Dimension("left_multiply_const: inner dimensions differ".into()));
    }
    StateSpace::new(sys.a.clone(), sys.b.clone(), m * &sys.c, m * &sys.d)
}

/// `sys · M`.
pub fn right_multiply_const(sys: &StateSpace, m: &DMatrix<f64>) -> Result<StateSpace> {
    if m.nrows() != sys.n_in() {
        return Err(Error::Dimension("right_multiply_const: inner dimensions differ".into()));
    }
    StateSpace::new(sys.a.clone(), &sys.b * m, sys.c.clone(), &sys.d * m)
}

/// `sys + M` (feedthrough only).
pub fn add_const_feedthrough(sys: &StateSpace, m: &DMatrix<f64>) -> Result<StateSpace> {
    if m.shape() != sys.d.shape() {
        return Err(Error::Dimension("add_const_feedthrough: shape differs from D".into()));
    }
    StateSpace::new(sys.a.clone(), sys.b.clone(), sys.c.clone(), &sys.d + m)
}

/// Scales the output map by `alpha`.
pub fn scale_output(sys: &StateSpace, alpha: f64) -> StateSpace {
    StateSpace { a: sys.a.clone(), b: sys.b.clone(), c: &sys.c * alpha, d: &sys.d * alpha }
}
