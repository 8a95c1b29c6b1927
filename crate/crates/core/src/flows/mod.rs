//! Continuous flows: gradient, quotient gradient and projected gradient
//! systems, exit points along search rays, and the double-bracket flow.

pub mod matrix;
pub mod ode;
pub mod problem;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
pub use matrix::{double_bracket_flow, MatrixFlowProblem, MatrixFlowResult};
pub use ode::{integrate, Control, IntegratorConfig, Method, StopCause};
pub use problem::{ConstraintMap, Polynomial, PolynomialMap, SmoothObjective, Term};

/// Flows stop once their vector field drops below this (sup norm).
pub const STATIONARY_TOL: f64 = 1e-8;
/// A state with larger Euclidean norm counts as divergence.
pub const DIVERGENCE_NORM: f64 = 1e9;
/// Rank cut-off for singular values of constraint Jacobians.
pub const RANK_TOL: f64 = 1e-10;
/// Projected flow re-projects once `‖H‖∞` exceeds this.
pub const REPROJECT_TOL: f64 = 1e-9;
/// Required `‖H(x0)‖∞` for a projected flow start.
pub const FEASIBLE_START_TOL: f64 = 1e-8;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub x: Vec<f64>,
    /// Objective value, when the flow has one.
    pub f: Option<f64>,
    /// `‖H(x)‖₂`, when the flow has constraints.
    pub h_norm: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStop {
    Stationary,
    MaxTime,
    MaxSteps,
}

/// Type of a critical point from the signs of the Hessian eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

pub const HESSIAN_TOL: f64 = 1e-6;

pub fn classify_critical_point<O: SmoothObjective + ?Sized>(obj: &O, x: &[f64]) -> CriticalKind {
    let eig = problem::fd_hessian(obj, x).symmetric_eigenvalues();
    if eig.iter().any(|l| l.abs() <= HESSIAN_TOL) {
        CriticalKind::Degenerate
    } else if eig.iter().all(|&l| l > 0.0) {
        CriticalKind::Minimum
    } else if eig.iter().all(|&l| l < 0.0) {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    #[serde(skip)]
    pub samples: Vec<FlowSample>,
    pub terminal: Vec<f64>,
    pub final_time: f64,
    pub stop: FlowStop,
    /// Sup norm of the vector field at the terminal point.
    pub residual: f64,
    pub classification: Option<CriticalKind>,
}

impl FlowResult {
    /// `t, x1..xn`, then `f` and `h_norm` when recorded.
    pub fn to_csv(&self) -> String {
        let n = self.terminal.len();
        let has_f = self.samples.iter().any(|s| s.f.is_some());
        let has_h = self.samples.iter().any(|s| s.h_norm.is_some());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        if has_f {
            out.push_str(",f");
        }
        if has_h {
            out.push_str(",h_norm");
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&s.t.to_string());
            for v in &s.x {
                out.push_str(&format!(",{v}"));
            }
            if let (true, Some(f)) = (has_f, s.f) {
                out.push_str(&format!(",{f}"));
            }
            if let (true, Some(h)) = (has_h, s.h_norm) {
                out.push_str(&format!(",{h}"));
            }
            out.push('\n');
        }
        out
    }

    /// Largest increase of `value(sample)` between consecutive samples.
    pub fn max_increase(&self, value: impl Fn(&FlowSample) -> f64) -> f64 {
        self.samples
            .windows(2)
            .map(|w| value(&w[1]) - value(&w[0]))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

struct Recorder<'a> {
    residual: &'a dyn Fn(&[f64]) -> f64,
    observe: &'a dyn Fn(&[f64]) -> (Option<f64>, Option<f64>),
    adjust: Option<&'a dyn Fn(&mut Vec<f64>) -> Result<()>>,
}

fn run_flow(
    rhs: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    cfg: &IntegratorConfig,
    rec: Recorder<'_>,
) -> Result<FlowResult> {
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("x0", "start must be finite"));
    }
    let mut samples = Vec::new();
    let mut on_step = |t: f64, x: &mut Vec<f64>| -> Result<Control> {
        if t > 0.0 {
            if let Some(adjust) = rec.adjust {
                adjust(x)?;
            }
        }
        let norm = norm2(x);
        if !(norm <= DIVERGENCE_NORM) {
            return Err(Error::Numeric(format!("divergence: ‖x‖ = {norm:.3e} at t = {t}")));
        }
        let (f, h_norm) = (rec.observe)(x);
        samples.push(FlowSample { t, x: x.clone(), f, h_norm });
        Ok(if (rec.residual)(x) < STATIONARY_TOL {
            Control::Stop
        } else {
            Control::Continue
        })
    };
    let (t, x, cause) = integrate(rhs, x0, cfg, &mut on_step)?;
    let stop = match cause {
        StopCause::Event => FlowStop::Stationary,
        StopCause::MaxTime => FlowStop::MaxTime,
        StopCause::MaxSteps => FlowStop::MaxSteps,
    };
    Ok(FlowResult {
        residual: (rec.residual)(&x),
        samples,
        terminal: x,
        final_time: t,
        stop,
        classification: None,
    })
}

fn check_dim(field: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::validation(field, format!("expected dimension {expected}, got {got}")));
    }
    Ok(())
}

/// `ẋ = −∇f(x)` until `‖∇f‖∞ < 1e-8` or the time budget runs out. The
/// terminal point is classified by its finite-difference Hessian.
pub fn gradient_flow<O: SmoothObjective + ?Sized>(obj: &O, x0: &[f64], cfg: &IntegratorConfig) -> Result<FlowResult> {
    check_dim("x0", obj.dim(), x0.len())?;
    let rhs = |x: &[f64]| obj.gradient(x).into_iter().map(|g| -g).collect();
    let residual = |x: &[f64]| sup(&obj.gradient(x));
    let observe = |x: &[f64]| (Some(obj.value(x)), None);
    let mut result = run_flow(&rhs, x0, cfg, Recorder { residual: &residual, observe: &observe, adjust: None })?;
    result.classification = Some(classify_critical_point(obj, &result.terminal));
    Ok(result)
}

fn jt_h<C: ConstraintMap + ?Sized>(con: &C, x: &[f64]) -> Vec<f64> {
    let h = DVector::from_vec(con.value(x));
    (con.jacobian(x).transpose() * h).iter().copied().collect()
}

/// `ẋ = −JH(x)ᵀ H(x)`: the gradient flow of `½‖H‖²`.
pub fn quotient_gradient_flow<C: ConstraintMap + ?Sized>(con: &C, x0: &[f64], cfg: &IntegratorConfig) -> Result<FlowResult> {
    check_dim("x0", con.dim(), x0.len())?;
    let rhs = |x: &[f64]| jt_h(con, x).into_iter().map(|g| -g).collect();
    let residual = |x: &[f64]| sup(&jt_h(con, x));
    let observe = |x: &[f64]| (None, Some(norm2(&con.value(x))));
    run_flow(&rhs, x0, cfg, Recorder { residual: &residual, observe: &observe, adjust: None })
}

/// Orthogonal projector onto the null space of `JH(x)`:
/// `P = I − JHᵀ (JH JHᵀ)⁻¹ JH`, computed from the SVD so that a
/// rank-deficient Jacobian falls back to its pseudo-inverse.
pub fn tangent_projector<C: ConstraintMap + ?Sized>(con: &C, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    if con.count() == 0 {
        return DMatrix::identity(n, n);
    }
    let jac = con.jacobian(x);
    projector_from_jacobian(&jac)
}

fn projector_from_jacobian(jac: &DMatrix<f64>) -> DMatrix<f64> {
    let n = jac.ncols();
    let svd = jac.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s)).max(1.0);
    let mut p = DMatrix::identity(n, n);
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_TOL * scale {
            rank += 1;
            let v = v_t.row(k).transpose();
            p -= &v * v.transpose();
        }
    }
    if rank < jac.nrows() {
        log::warn!("constraint Jacobian has rank {rank} < {}; using pseudo-inverse", jac.nrows());
    }
    p
}

/// One Gauss–Newton step toward `H = 0`: `x ← x − JH⁺ H(x)`.
pub fn newton_reproject<C: ConstraintMap + ?Sized>(con: &C, x: &mut [f64]) -> Result<()> {
    let h = DVector::from_vec(con.value(x));
    let jac = con.jacobian(x);
    let scale = jac.amax().max(1.0);
    let step = jac
        .svd(true, true)
        .solve(&h, RANK_TOL * scale)
        .map_err(|e| Error::Numeric(format!("re-projection failed: {e}")))?;
    for (xi, s) in x.iter_mut().zip(step.iter()) {
        *xi -= s;
    }
    Ok(())
}

fn projected_gradient<O, C>(obj: &O, con: &C, x: &[f64]) -> Vec<f64>
where
    O: SmoothObjective + ?Sized,
    C: ConstraintMap + ?Sized,
{
    let g = DVector::from_vec(obj.gradient(x));
    (tangent_projector(con, x) * g).iter().copied().collect()
}

/// `ẋ = −P_H(x) ∇f(x)` from a feasible start, with one Newton
/// re-projection after any accepted step that leaves `‖H‖∞ > 1e-9`.
pub fn projected_gradient_flow<O, C>(obj: &O, con: &C, x0: &[f64], cfg: &IntegratorConfig) -> Result<FlowResult>
where
    O: SmoothObjective + ?Sized,
    C: ConstraintMap + ?Sized,
{
    check_dim("x0", obj.dim(), x0.len())?;
    check_dim("constraint", obj.dim(), con.dim())?;
    let start = sup(&con.value(x0));
    if !(start < FEASIBLE_START_TOL) {
        return Err(Error::validation(
            "x0",
            format!("start is not on the constraint set: ‖H(x0)‖∞ = {start:.3e}"),
        ));
    }
    let rhs = |x: &[f64]| projected_gradient(obj, con, x).into_iter().map(|g| -g).collect();
    let residual = |x: &[f64]| sup(&projected_gradient(obj, con, x));
    let observe = |x: &[f64]| (Some(obj.value(x)), Some(norm2(&con.value(x))));
    let adjust = |x: &mut Vec<f64>| {
        if sup(&con.value(x)) > REPROJECT_TOL {
            newton_reproject(con, x)?;
        }
        Ok(())
    };
    run_flow(&rhs, x0, cfg, Recorder { residual: &residual, observe: &observe, adjust: Some(&adjust) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExitConfig {
    /// March step along the ray.
    pub step: f64,
    /// Largest distance marched.
    pub horizon: f64,
    /// Final bracket width.
    pub tol: f64,
}

impl Default for ExitConfig {
    fn default() -> Self {
        ExitConfig {
            step: 1e-2,
            horizon: 10.0,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitReport {
    /// `None` when `f` never turns from increasing to decreasing within the
    /// horizon.
    pub exit: Option<Vec<f64>>,
    pub value: Option<f64>,
    /// Distance marched from the start to the exit.
    pub distance: Option<f64>,
    pub samples: usize,
}

const MAX_REPROJECT_ITERS: usize = 50;

/// Brings `x` back to `H = 0` within `1e-12`, or fails.
fn project_to_manifold<C: ConstraintMap + ?Sized>(con: &C, x: &mut [f64]) -> Result<()> {
    for _ in 0..MAX_REPROJECT_ITERS {
        if sup(&con.value(x)) < 1e-12 {
            return Ok(());
        }
        newton_reproject(con, x)?;
    }
    let r = sup(&con.value(x));
    if r < 1e-10 {
        return Ok(());
    }
    Err(Error::SearchFailure(format!("cannot re-project onto the constraint set (‖H‖∞ = {r:.3e})")))
}

struct Walker<'a, O: ?Sized, C: ?Sized> {
    obj: &'a O,
    con: Option<&'a C>,
}

impl<O: SmoothObjective + ?Sized, C: ConstraintMap + ?Sized> Walker<'_, O, C> {
    /// Unit tangent direction at `x` closest to `dir`.
    fn tangent(&self, x: &[f64], dir: &[f64]) -> Result<Vec<f64>> {
        let d = match self.con {
            Some(con) => (tangent_projector(con, x) * DVector::from_column_slice(dir)).iter().copied().collect(),
            None => dir.to_vec(),
        };
        let norm = norm2(&d);
        if norm < 1e-12 {
            return Err(Error::SearchFailure("search direction has no tangential component".into()));
        }
        Ok(d.iter().map(|v| v / norm).collect())
    }

    fn advance(&self, x: &[f64], dir: &[f64], t: f64) -> Result<Vec<f64>> {
        let mut y: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + t * b).collect();
        if let Some(con) = self.con {
            project_to_manifold(con, &mut y)?;
        }
        Ok(y)
    }

    /// Rate of change of `f` along the march direction at `y`.
    fn slope(&self, y: &[f64], dir: &[f64]) -> Result<f64> {
        let d = self.tangent(y, dir)?;
        Ok(self.obj.gradient(y).iter().zip(&d).map(|(g, v)| g * v).sum())
    }
}

/// Marches from `x_s` along `direction` (kept tangent to the constraint
/// set when one is given) and returns the first point where `f` switches
/// from increasing to decreasing, refined to within `cfg.tol`.
pub fn exit_point_search<O, C>(
    obj: &O,
    con: Option<&C>,
    x_s: &[f64],
    direction: &[f64],
    cfg: &ExitConfig,
) -> Result<ExitReport>
where
    O: SmoothObjective + ?Sized,
    C: ConstraintMap + ?Sized,
{
    check_dim("x_s", obj.dim(), x_s.len())?;
    check_dim("direction", obj.dim(), direction.len())?;
    if !(cfg.step > 0.0 && cfg.horizon > 0.0 && cfg.tol > 0.0) {
        return Err(Error::validation("exit", "step, horizon and tol must be positive"));
    }
    let walker = Walker { obj, con };
    let mut xs = vec![x_s.to_vec()];
    let mut dirs = vec![walker.tangent(x_s, direction)?];
    let mut fs = vec![obj.value(x_s)];
    let mut increasing = false;
    let steps = (cfg.horizon / cfg.step).ceil() as usize;
    for k in 0..steps {
        let next = walker.advance(&xs[k], &dirs[k], cfg.step)?;
        let f_next = obj.value(&next);
        let d_next = walker.tangent(&next, &dirs[k])?;
        if increasing && f_next < fs[k] {
            // the peak lies on the two steps from xs[k - 1]
            let base = &xs[k - 1];
            let dir = &dirs[k - 1];
            let t = refine_peak(&walker, base, dir, 2.0 * cfg.step, cfg.tol)?;
            let exit = walker.advance(base, dir, t)?;
            return Ok(ExitReport {
                value: Some(obj.value(&exit)),
                distance: Some((k - 1) as f64 * cfg.step + t),
                exit: Some(exit),
                samples: k + 2,
            });
        }
        if f_next > fs[k] {
            increasing = true;
        }
        xs.push(next);
        dirs.push(d_next);
        fs.push(f_next);
    }
    Ok(ExitReport {
        exit: None,
        value: None,
        distance: None,
        samples: xs.len(),
    })
}

/// Maximizer of `t ↦ f(advance(base, dir, t))` on `[0, width]`: bisection
/// on the sign of the slope when the endpoints bracket, golden section
/// otherwise.
fn refine_peak<O: SmoothObjective + ?Sized, C: ConstraintMap + ?Sized>(
    walker: &Walker<'_, O, C>,
    base: &[f64],
    dir: &[f64],
    width: f64,
    tol: f64,
) -> Result<f64> {
    let slope_at = |t: f64| -> Result<f64> { walker.slope(&walker.advance(base, dir, t)?, dir) };
    let (mut lo, mut hi) = (0.0, width);
    if slope_at(lo)? > 0.0 && slope_at(hi)? < 0.0 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if slope_at(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    let value_at = |t: f64| -> Result<f64> { Ok(walker.obj.value(&walker.advance(base, dir, t)?)) };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > tol {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if value_at(a)? >= value_at(b)? {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::problem::*;
    use super::*;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn double_well_descends_to_nearest_minimum() {
        let f = double_well(1).unwrap();
        let up = gradient_flow(&f, &[0.3], &cfg()).unwrap();
        assert_eq!(up.stop, FlowStop::Stationary);
        assert!((up.terminal[0] - 1.0).abs() < 1e-6);
        assert_eq!(up.classification, Some(CriticalKind::Minimum));
        assert!(up.max_increase(|s| s.f.unwrap()) <= cfg().monotonicity_slack());
        let down = gradient_flow(&f, &[-0.3], &cfg()).unwrap();
        assert!((down.terminal[0] + 1.0).abs() < 1e-6);
        let still = gradient_flow(&f, &[0.0], &cfg()).unwrap();
        assert_eq!(still.terminal, vec![0.0]);
        assert_eq!(still.samples.len(), 1);
        assert_eq!(still.classification, Some(CriticalKind::Maximum));
    }

    #[test]
    fn fixed_step_flow_is_reproducible() {
        let f = double_well(2).unwrap();
        let a = gradient_flow(&f, &[0.4, 0.7], &IntegratorConfig::rk4(1e-2)).unwrap();
        let b = gradient_flow(&f, &[0.4, 0.7], &IntegratorConfig::rk4(1e-2)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("t,x1,x2,f\n0,0.4,0.7,"));
    }

    #[test]
    fn divergence_is_reported() {
        let f = linear(&[-1.0]).unwrap();
        let err = gradient_flow(&f, &[0.0], &cfg().with_max_time(1e12)).unwrap_err();
        assert!(err.to_string().contains("divergence"));
    }

    #[test]
    fn quotient_flow_on_circle_and_affine() {
        let circle = sphere(2, 1.0).unwrap();
        let r = quotient_gradient_flow(&circle, &[2.0, 0.0], &cfg()).unwrap();
        assert!((norm2(&r.terminal) - 1.0).abs() < 1e-8);
        let slack = cfg().monotonicity_slack();
        assert!(r.max_increase(|s| 0.5 * s.h_norm.unwrap().powi(2)) <= slack);
        let on = quotient_gradient_flow(&circle, &[0.6, 0.8], &cfg()).unwrap();
        assert_eq!(on.samples.len(), 1);
        let aff = affine(&[vec![1.0, 2.0, 3.0], vec![0.0, 1.0, -1.0]], &[1.0, 2.0]).unwrap();
        let r = quotient_gradient_flow(&aff, &[3.0, -1.0, 2.0], &cfg()).unwrap();
        assert!(sup(&aff.value(&r.terminal)) < 1e-8);
    }

    #[test]
    fn projector_identities() {
        let s = sphere(3, 1.0).unwrap();
        let x = [0.3, -1.2, 0.5];
        let p = tangent_projector(&s, &x);
        let xv = DVector::from_column_slice(&x);
        let expected = DMatrix::identity(3, 3) - &xv * xv.transpose() / xv.norm_squared();
        assert!((&p - expected).amax() < 1e-12);
        assert!((&p * &p - &p).amax() < 1e-10);
        assert!((&p * s.jacobian(&x).transpose()).amax() < 1e-10);
        assert_eq!(tangent_projector(&PolynomialMap::empty(2), &[1.0, 2.0]), DMatrix::identity(2, 2));
        // duplicated rows: rank 1, projector still has one zero eigenvalue
        let dup = affine(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]], &[0.0, 0.0]).unwrap();
        let mut eig: Vec<f64> = tangent_projector(&dup, &x).symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert!(eig[0].abs() < 1e-10 && (eig[1] - 1.0).abs() < 1e-10 && (eig[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projected_flow_examples() {
        let s = sphere(3, 1.0).unwrap();
        let f = diagonal_quadratic(&[1.0, 2.0, 3.0]).unwrap();
        let x0 = [0.48, 0.6, 0.64];
        let r = projected_gradient_flow(&f, &s, &x0, &cfg()).unwrap();
        assert!((r.terminal[0].abs() - 1.0).abs() < 1e-6);
        assert!(r.terminal[1].abs() < 1e-6 && r.terminal[2].abs() < 1e-6);
        assert!(r.samples.iter().all(|s| s.h_norm.unwrap() < 1e-6));

        let circle = sphere(2, 1.0).unwrap();
        let height = linear(&[0.0, 1.0]).unwrap();
        let r = projected_gradient_flow(&height, &circle, &[0.6, 0.8], &cfg()).unwrap();
        assert!(r.terminal[0].abs() < 1e-6 && (r.terminal[1] + 1.0).abs() < 1e-6);

        let flat = Polynomial::constant(2, 3.0);
        let r = projected_gradient_flow(&flat, &circle, &[0.6, 0.8], &cfg()).unwrap();
        assert_eq!(r.terminal, vec![0.6, 0.8]);

        let err = projected_gradient_flow(&flat, &circle, &[1.0, 1.0], &cfg()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn exit_points() {
        let none: Option<&PolynomialMap> = None;
        let f = double_well(1).unwrap();
        let r = exit_point_search(&f, none, &[1.0], &[-1.0], &ExitConfig::default()).unwrap();
        let exit = r.exit.unwrap();
        assert!(exit[0].abs() < 1e-3);
        assert!((r.value.unwrap() - 1.0).abs() < 1e-3);

        let f2 = double_well(2).unwrap();
        let r = exit_point_search(&f2, none, &[1.0, 0.0], &[-1.0, 0.0], &ExitConfig::default()).unwrap();
        let exit = r.exit.unwrap();
        assert!(exit[0].abs() < 1e-3 && exit[1].abs() < 1e-12);

        let mono = linear(&[1.0]).unwrap();
        let r = exit_point_search(&mono, none, &[0.0], &[1.0], &ExitConfig::default()).unwrap();
        assert_eq!(r.exit, None);
    }

    #[test]
    fn constrained_exit_on_circle() {
        // height on the unit circle: from the bottom, walking either way
        // peaks at the top
        let circle = sphere(2, 1.0).unwrap();
        let height = linear(&[0.0, 1.0]).unwrap();
        let r = exit_point_search(&height, Some(&circle), &[0.0, -1.0], &[1.0, 0.0], &ExitConfig::default()).unwrap();
        let exit = r.exit.unwrap();
        assert!(exit[0].abs() < 1e-3 && (exit[1] - 1.0).abs() < 1e-6);
        let err = exit_point_search(&height, Some(&circle), &[0.0, -1.0], &[0.0, 1.0], &ExitConfig::default());
        assert!(matches!(err, Err(Error::SearchFailure(_))));
    }
}
