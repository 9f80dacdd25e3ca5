//! Doyle's static example and its closed-form DK iteration.
//!
//! With the static plant of [`crate::musyn::doyle_plant`], a static gain `Q`
//! and a positive scale `d`, the scaled closed loop is the constant matrix
//! `[[-1, d], [Q/d, 1]]`. The global infimum of its largest singular value is
//! 1 (at `Q = 0`, `d → 0⁺`), while the coordinate-wise DK steps stall anywhere
//! on the curve `Q = d²`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{Objective, SENTINEL};

/// Starting point used throughout: `(Q, d) = (72, 85)`.
pub const DOYLE_START: DoylePoint = DoylePoint { q: 72.0, d: 85.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoylePoint {
    pub q: f64,
    pub d: f64,
}

impl DoylePoint {
    pub fn new(q: f64, d: f64) -> Result<Self> {
        if !(d > 0.0) || !q.is_finite() || !d.is_finite() {
            return Err(Error::Domain(format!("Doyle point needs finite Q and d > 0, got ({q}, {d})")));
        }
        Ok(Self { q, d })
    }

    pub fn to_vec(self) -> [f64; 2] {
        [self.q, self.d]
    }
}

/// Largest singular value of `[[-1, d], [Q/d, 1]]`.
pub fn doyle_objective(p: DoylePoint) -> Result<f64> {
    let p = DoylePoint::new(p.q, p.d)?;
    Ok(sigma_max_2x2(-1.0, p.d, p.q / p.d, 1.0))
}

// σ_max of [[a, b], [c, e]] from the trace and determinant of the Gram matrix.
fn sigma_max_2x2(a: f64, b: f64, c: f64, e: f64) -> f64 {
    let fro2 = a * a + b * b + c * c + e * e;
    let det = a * e - b * c;
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    ((fro2 + disc) / 2.0).sqrt()
}

/// Optimal `d` for fixed `Q`: `√Q`.
pub fn dk_step_d(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("D-step needs Q >= 0, got {q}")));
    }
    Ok(q.sqrt())
}

/// Optimal `Q` for fixed `d`: `d²`.
pub fn dk_step_q(d: f64) -> f64 {
    d * d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkRecord {
    pub iter: usize,
    /// `"init"`, `"d"` or `"q"`.
    pub step: &'static str,
    pub q: f64,
    pub d: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DkTrace {
    pub records: Vec<DkRecord>,
}

impl DkTrace {
    pub fn final_point(&self) -> DoylePoint {
        let r = self.records.last().expect("trace holds the initial point");
        DoylePoint { q: r.q, d: r.d }
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().expect("trace holds the initial point").objective
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "step", "q", "d", "objective"])?;
        for r in &self.records {
            out.write_record([
                r.iter.to_string(),
                r.step.to_string(),
                crate::musyn::io::format_f64(r.q),
                crate::musyn::io::format_f64(r.d),
                crate::musyn::io::format_f64(r.objective),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Alternates D-steps and Q-steps from `p0`, starting with the D-step.
/// `rounds` counts full (D, Q) pairs.
pub fn run_dk_doyle(p0: DoylePoint, rounds: usize) -> Result<DkTrace> {
    let mut p = DoylePoint::new(p0.q, p0.d)?;
    let mut records = vec![DkRecord { iter: 0, step: "init", q: p.q, d: p.d, objective: doyle_objective(p)? }];
    for k in 1..=rounds {
        // A negative Q has no D-step optimum on d > 0; move Q first.
        if p.q >= 0.0 {
            let d = dk_step_d(p.q)?;
            if d > 0.0 {
                p.d = d;
                records.push(DkRecord { iter: k, step: "d", q: p.q, d: p.d, objective: doyle_objective(p)? });
            }
        }
        p.q = dk_step_q(p.d);
        records.push(DkRecord { iter: k, step: "q", q: p.q, d: p.d, objective: doyle_objective(p)? });
    }
    Ok(DkTrace { records })
}

/// [`doyle_objective`] over the vector `[Q, d]`; `d ≤ 0` maps to the sentinel.
#[derive(Debug, Clone, Copy, Default)]
pub struct DoyleObjective;

impl Objective for DoyleObjective {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &[f64]) -> f64 {
        match doyle_objective(DoylePoint { q: x[0], d: x[1] }) {
            Ok(v) if v.is_finite() => v.min(SENTINEL),
            _ => SENTINEL,
        }
    }
}

/// Objective values on an `n × n` grid over `Q ∈ [q_lo, q_hi]`, `d ∈ [d_lo, d_hi]`,
/// as rows `(q, d, objective)` with `Q` varying slowest.
pub fn contour_grid(n: usize, q_range: (f64, f64), d_range: (f64, f64)) -> Result<Vec<[f64; 3]>> {
    if n < 2 || !(d_range.0 > 0.0) {
        return Err(Error::Domain("contour grid needs n >= 2 and a positive d range".into()));
    }
    let lin = |(lo, hi): (f64, f64), i: usize| {
        let s = i as f64 / (n - 1) as f64;
        (1.0 - s) * lo + s * hi
    };
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = DoylePoint { q: lin(q_range, i), d: lin(d_range, j) };
            rows.push([p.q, p.d, doyle_objective(p)?]);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn objective_values() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(doyle_objective(DoylePoint { q: 0.0, d: 1.0 }).unwrap(), golden, max_relative = 1e-14);
        let v = doyle_objective(DoylePoint { q: 72.0, d: 72f64.sqrt() }).unwrap();
        assert_relative_eq!(v, 73f64.sqrt(), max_relative = 1e-14);
        assert!((doyle_objective(DoylePoint { q: 0.0, d: 1e-6 }).unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(doyle_objective(DoylePoint { q: 1.0, d: 0.0 }).is_err());
        assert!(doyle_objective(DoylePoint { q: 1.0, d: -1.0 }).is_err());
        assert!(dk_step_d(-1.0).is_err());
        assert_eq!(DoyleObjective.value(&[1.0, -1.0]), SENTINEL);
    }

    #[test]
    fn dk_steps() {
        assert_relative_eq!(dk_step_d(72.0).unwrap(), 8.48528137423857, max_relative = 1e-12);
        assert!((dk_step_q(8.48528) - 72.0).abs() < 1e-3);
        assert_eq!(dk_step_d(0.0).unwrap(), 0.0);
    }

    #[test]
    fn dk_from_standard_start_stalls_at_sqrt73() {
        let t = run_dk_doyle(DOYLE_START, 5).unwrap();
        assert_eq!(t.records[1].d, 72f64.sqrt());
        let end = t.final_point();
        assert!((end.q - 72.0).abs() < 1e-12 && (end.d - 72f64.sqrt()).abs() < 1e-12);
        assert!((t.final_objective() - 73f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn fixed_points_are_invariant() {
        for d in [0.1, 1.0, 3.0, 20.0] {
            let t = run_dk_doyle(DoylePoint { q: d * d, d }, 1).unwrap();
            let end = t.final_point();
            assert!((end.q - d * d).abs() <= 1e-12 * (d * d) && (end.d - d).abs() <= 1e-12 * d);
        }
    }

    #[test]
    fn objective_at_zero_gain_increases_with_scale() {
        let mut last = 1.0;
        for i in 1..=400 {
            let v = doyle_objective(DoylePoint { q: 0.0, d: i as f64 * 0.05 }).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn grid_shape() {
        let g = contour_grid(100, (-10.0, 90.0), (0.05, 95.0)).unwrap();
        assert_eq!(g.len(), 10_000);
        assert_eq!(g[0][..2], [-10.0, 0.05]);
        assert_eq!(g[9999][..2], [90.0, 95.0]);
    }
}
