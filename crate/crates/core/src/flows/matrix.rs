//! Double-bracket flow `Ḣ = [H, [H, N]]` on the orbit `H = QᵀAQ`.
//!
//! The state is the orthogonal factor `Q`, driven by `Q̇ = Q [H, N]` (the
//! bracket is skew, so `Q` moves along the group) and re-orthonormalized
//! after every accepted step. `H` is then isospectral with `A` up to
//! rounding.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::ode::{integrate, Control, IntegratorConfig, StopCause};
use super::FlowStop;
use crate::error::{Error, Result};

pub const SYMMETRY_TOL: f64 = 1e-12;
/// Largest tolerated asymmetry of `QᵀAQ` before re-symmetrizing.
pub const SYMMETRY_DRIFT_TOL: f64 = 1e-8;
/// The flow stops once `‖[H, N]‖∞` drops below this.
pub const BRACKET_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct MatrixFlowProblem {
    a: DMatrix<f64>,
    n: Vec<f64>,
    pub integrator: IntegratorConfig,
}

impl MatrixFlowProblem {
    /// `n` holds the diagonal of `N`; entries must be distinct.
    pub fn new(a: DMatrix<f64>, n: Vec<f64>, integrator: IntegratorConfig) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::validation("matrix.a", "must be a nonempty square matrix"));
        }
        if (&a - a.transpose()).amax() > SYMMETRY_TOL || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("matrix.a", "must be finite and symmetric"));
        }
        if n.len() != a.nrows() {
            return Err(Error::validation("matrix.n", format!("expected {} diagonal entries", a.nrows())));
        }
        for i in 0..n.len() {
            if n[i + 1..].contains(&n[i]) || !n[i].is_finite() {
                return Err(Error::validation("matrix.n", "diagonal entries must be finite and distinct"));
            }
        }
        Ok(MatrixFlowProblem { a, n, integrator })
    }

    /// `N = diag(1, 2, …, k)`.
    pub fn ascending(a: DMatrix<f64>, integrator: IntegratorConfig) -> Result<Self> {
        let k = a.nrows();
        Self::new(a, (1..=k).map(|i| i as f64).collect(), integrator)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    fn bracket_with_n(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        // [H, N]_{ij} = h_ij (n_j − n_i)
        DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * (self.n[j] - self.n[i]))
    }
}

fn sorted_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn off_diagonal(h: &DMatrix<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            if i != j {
                m = m.max(h[(i, j)].abs());
            }
        }
    }
    m
}

/// Orthonormalizes the columns of `q` (Gram–Schmidt via QR with the signs
/// chosen so `R` has a positive diagonal, which keeps `Q` continuous).
fn reorthonormalize(q: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = q.clone().qr();
    let r = qr.r();
    let mut out = qr.q();
    for j in 0..out.ncols() {
        if r[(j, j)] < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixFlowSample {
    pub t: f64,
    #[serde(skip)]
    pub h: DMatrix<f64>,
    pub off_diagonal: f64,
    /// Largest deviation of the sorted spectrum of `H` from that of `A`.
    pub spectrum_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixFlowResult {
    #[serde(skip)]
    pub samples: Vec<MatrixFlowSample>,
    pub terminal: Vec<Vec<f64>>,
    pub terminal_diagonal: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub max_spectrum_drift: f64,
    pub off_diagonal: f64,
    pub final_time: f64,
    pub stop: FlowStop,
}

impl MatrixFlowResult {
    /// `t`, the entries `h_i_j` row-major, then `off_diagonal` and
    /// `spectrum_drift`.
    pub fn to_csv(&self) -> String {
        let k = self.terminal.len();
        let mut out = String::from("t");
        for i in 0..k {
            for j in 0..k {
                out.push_str(&format!(",h_{i}_{j}"));
            }
        }
        out.push_str(",off_diagonal,spectrum_drift\n");
        for s in &self.samples {
            out.push_str(&s.t.to_string());
            for i in 0..k {
                for j in 0..k {
                    out.push_str(&format!(",{}", s.h[(i, j)]));
                }
            }
            out.push_str(&format!(",{},{}\n", s.off_diagonal, s.spectrum_drift));
        }
        out
    }
}

pub fn double_bracket_flow(problem: &MatrixFlowProblem) -> Result<MatrixFlowResult> {
    let k = problem.a.nrows();
    let a = &problem.a;
    let target = sorted_symmetric_eigenvalues(a);
    let h_of = |q: &DMatrix<f64>| q.transpose() * a * q;
    let rhs = |flat: &[f64]| -> Vec<f64> {
        let q = DMatrix::from_column_slice(k, k, flat);
        let h = h_of(&q);
        (q * problem.bracket_with_n(&h)).as_slice().to_vec()
    };
    let mut samples = Vec::new();
    let mut on_step = |t: f64, flat: &mut Vec<f64>| -> Result<Control> {
        let q = reorthonormalize(&DMatrix::from_column_slice(k, k, flat));
        flat.copy_from_slice(q.as_slice());
        let raw = h_of(&q);
        let asym = (&raw - raw.transpose()).amax();
        if asym > SYMMETRY_DRIFT_TOL {
            return Err(Error::Numeric(format!("symmetry drift {asym:.3e} at t = {t}")));
        }
        let h = (&raw + raw.transpose()) * 0.5;
        let spectrum = sorted_symmetric_eigenvalues(&h);
        let spectrum_drift = spectrum.iter().zip(&target).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let done = problem.bracket_with_n(&h).amax() < BRACKET_TOL;
        samples.push(MatrixFlowSample {
            t,
            off_diagonal: off_diagonal(&h),
            spectrum_drift,
            h,
        });
        Ok(if done { Control::Stop } else { Control::Continue })
    };
    let q0 = DMatrix::<f64>::identity(k, k);
    let (t, _, cause) = integrate(&rhs, q0.as_slice(), &problem.integrator, &mut on_step)?;
    let last = samples.last().expect("initial sample recorded");
    let terminal: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| last.h[(i, j)]).collect()).collect();
    Ok(MatrixFlowResult {
        terminal_diagonal: DVector::from_fn(k, |i, _| last.h[(i, i)]).iter().copied().collect(),
        terminal,
        eigenvalues: target,
        max_spectrum_drift: samples.iter().map(|s| s.spectrum_drift).fold(0.0, f64::max),
        off_diagonal: last.off_diagonal,
        final_time: t,
        stop: match cause {
            StopCause::Event => FlowStop::Stationary,
            StopCause::MaxTime => FlowStop::MaxTime,
            StopCause::MaxSteps => FlowStop::MaxSteps,
        },
        samples,
    })
}
