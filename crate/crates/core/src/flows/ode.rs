//! Explicit Runge–Kutta integrators for autonomous systems `ẋ = g(x)`.
//!
//! The caller sees every accepted step and may modify the state in place
//! (used for re-projection onto a constraint set), so the adaptive scheme
//! does not reuse the last stage across steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical fourth-order scheme with fixed step `h`.
    Rk4,
    /// Dormand–Prince 5(4) with error control; `h` is the first trial step.
    #[default]
    Rk45,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub h: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk45,
            h: 1e-3,
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_time: 1e4,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(h: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            h,
            ..Default::default()
        }
    }

    pub fn with_max_time(mut self, t: f64) -> Self {
        self.max_time = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("integrator.h", self.h)?;
        positive("integrator.abs_tol", self.abs_tol)?;
        positive("integrator.rel_tol", self.rel_tol)?;
        positive("integrator.max_time", self.max_time)?;
        if self.max_steps == 0 {
            return Err(Error::validation("integrator.max_steps", "must be at least 1"));
        }
        Ok(())
    }

    /// Tolerance used when checking monotone quantities along a trajectory.
    pub fn monotonicity_slack(&self) -> f64 {
        10.0 * self.abs_tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCause {
    /// The step callback asked to stop.
    Event,
    MaxTime,
    MaxSteps,
}

const MIN_STEP: f64 = 1e-14;

fn axpy(x: &[f64], h: f64, terms: &[(&[f64], f64)]) -> Vec<f64> {
    let mut out = x.to_vec();
    for (k, c) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

fn rk4_step(rhs: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let k1 = rhs(x);
    let k2 = rhs(&axpy(x, h, &[(&k1, 0.5)]));
    let k3 = rhs(&axpy(x, h, &[(&k2, 0.5)]));
    let k4 = rhs(&axpy(x, h, &[(&k3, 1.0)]));
    axpy(x, h, &[(&k1, 1.0 / 6.0), (&k2, 1.0 / 3.0), (&k3, 1.0 / 3.0), (&k4, 1.0 / 6.0)])
}

/// One Dormand–Prince step: fifth-order solution, the embedded error and
/// a local stiffness estimate `‖k7 − k6‖ / ‖x5 − y6‖` (both stages sit at
/// the end of the step, so the ratio approximates `‖∂g/∂x‖`).
fn dopri_step(rhs: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> (Vec<f64>, Vec<f64>, Option<f64>) {
    let k1 = rhs(x);
    let k2 = rhs(&axpy(x, h, &[(&k1, 1.0 / 5.0)]));
    let k3 = rhs(&axpy(x, h, &[(&k1, 3.0 / 40.0), (&k2, 9.0 / 40.0)]));
    let k4 = rhs(&axpy(x, h, &[(&k1, 44.0 / 45.0), (&k2, -56.0 / 15.0), (&k3, 32.0 / 9.0)]));
    let k5 = rhs(&axpy(
        x,
        h,
        &[
            (&k1, 19372.0 / 6561.0),
            (&k2, -25360.0 / 2187.0),
            (&k3, 64448.0 / 6561.0),
            (&k4, -212.0 / 729.0),
        ],
    ));
    let y6 = axpy(
        x,
        h,
        &[
            (&k1, 9017.0 / 3168.0),
            (&k2, -355.0 / 33.0),
            (&k3, 46732.0 / 5247.0),
            (&k4, 49.0 / 176.0),
            (&k5, -5103.0 / 18656.0),
        ],
    );
    let k6 = rhs(&y6);
    let b = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
    let x5 = axpy(x, h, &[(&k1, b[0]), (&k3, b[2]), (&k4, b[3]), (&k5, b[4]), (&k6, b[5])]);
    let k7 = rhs(&x5);
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let err = axpy(
        &vec![0.0; x.len()],
        h,
        &[(&k1, e[0]), (&k3, e[2]), (&k4, e[3]), (&k5, e[4]), (&k6, e[5]), (&k7, e[6])],
    );
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let scale = x5.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let den = dist(&x5, &y6);
    let stiffness = (den > STIFFNESS_FLOOR * scale).then(|| dist(&k7, &k6) / den);
    (x5, err, stiffness)
}

/// Steps are capped at `STABILITY_BOUND / ‖∂g/∂x‖`, inside the scheme's
/// real-axis stability interval (about 3.3). Without the cap the step
/// size oscillates at the stability limit near equilibria and the state
/// jitters at the tolerance level instead of settling.
const STABILITY_BOUND: f64 = 3.0;
const STIFFNESS_FLOOR: f64 = 1e-12;

/// Integrates from `x0` at `t = 0`. `on_step(t, x)` runs once at the start
/// and after each accepted step; it may adjust `x` and may stop the run.
/// Returns the final time, state and why integration ended.
pub fn integrate(
    rhs: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    cfg: &IntegratorConfig,
    on_step: &mut dyn FnMut(f64, &mut Vec<f64>) -> Result<Control>,
) -> Result<(f64, Vec<f64>, StopCause)> {
    cfg.validate()?;
    let mut x = x0.to_vec();
    let mut t = 0.0;
    if on_step(t, &mut x)? == Control::Stop {
        return Ok((t, x, StopCause::Event));
    }
    let mut h = cfg.h;
    let (abs_tol, rel_tol) = (cfg.abs_tol, cfg.rel_tol);
    for _ in 0..cfg.max_steps {
        if t >= cfg.max_time {
            return Ok((t, x, StopCause::MaxTime));
        }
        let step = h.min(cfg.max_time - t);
        let next = match cfg.method {
            Method::Rk4 => rk4_step(rhs, &x, step),
            Method::Rk45 => {
                let (x5, err, stiffness) = dopri_step(rhs, &x, step);
                let norm = err
                    .iter()
                    .zip(x.iter().zip(&x5))
                    .map(|(e, (a, b))| e.abs() / (abs_tol + rel_tol * a.abs().max(b.abs())))
                    .fold(0.0, f64::max);
                if !norm.is_finite() {
                    h = step * 0.1;
                    if h < MIN_STEP {
                        return Err(Error::Numeric(format!("non-finite state near t = {t}")));
                    }
                    continue;
                }
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if norm > 1.0 {
                    h = step * factor;
                    if h < MIN_STEP {
                        return Err(Error::Numeric(format!("step size underflow at t = {t}")));
                    }
                    continue;
                }
                h = step * factor;
                if let Some(rho) = stiffness.filter(|r| *r > 0.0) {
                    h = h.min(STABILITY_BOUND / rho);
                }
                x5
            }
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite state at t = {}", t + step)));
        }
        t += step;
        x = next;
        if on_step(t, &mut x)? == Control::Stop {
            return Ok((t, x, StopCause::Event));
        }
    }
    Ok((t, x, StopCause::MaxSteps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(x: &[f64]) -> Vec<f64> {
        vec![-x[0]]
    }

    #[test]
    fn rk4_exponential_decay() {
        let cfg = IntegratorConfig::rk4(0.01).with_max_time(1.0);
        let (t, x, cause) = integrate(&decay, &[1.0], &cfg, &mut |_, _| Ok(Control::Continue)).unwrap();
        assert_eq!(cause, StopCause::MaxTime);
        assert!((t - 1.0).abs() < 1e-12);
        assert!((x[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk45_oscillator_within_tolerance() {
        let rot = |x: &[f64]| vec![x[1], -x[0]];
        let cfg = IntegratorConfig::default().with_max_time(10.0);
        let mut steps = 0;
        let (_, x, _) = integrate(&rot, &[1.0, 0.0], &cfg, &mut |_, _| {
            steps += 1;
            Ok(Control::Continue)
        })
        .unwrap();
        assert!((x[0] - 10f64.cos()).abs() < 1e-6);
        assert!((x[1] + 10f64.sin()).abs() < 1e-6);
        assert!(steps < 2000);
    }

    #[test]
    fn callback_stops_and_edits() {
        let cfg = IntegratorConfig::rk4(0.1);
        let (_, x, cause) = integrate(&decay, &[1.0], &cfg, &mut |t, x| {
            x[0] = x[0].max(0.5);
            Ok(if t > 1.0 { Control::Stop } else { Control::Continue })
        })
        .unwrap();
        assert_eq!(cause, StopCause::Event);
        assert_eq!(x[0], 0.5);
    }

    #[test]
    fn tracks_finite_time_blow_up() {
        let cfg = IntegratorConfig::default().with_max_time(0.9);
        let (_, x, _) = integrate(&|x: &[f64]| vec![x[0] * x[0]], &[1.0], &cfg, &mut |_, _| Ok(Control::Continue)).unwrap();
        assert!((x[0] - 10.0).abs() < 1e-5);
    }

    #[test]
    fn non_finite_state_is_numeric_error() {
        let cfg = IntegratorConfig::rk4(1.0).with_max_time(10.0);
        let r = integrate(&|x: &[f64]| vec![x[0].powi(8)], &[10.0], &cfg, &mut |_, _| Ok(Control::Continue));
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn config_validation_names_field() {
        let err = IntegratorConfig::rk4(-1.0).validate().unwrap_err();
        assert!(err.to_string().contains("integrator.h"));
        let cfg: IntegratorConfig = serde_json::from_str(r#"{"method":"rk4","h":0.5,"max_time":2}"#).unwrap();
        assert_eq!((cfg.method, cfg.h, cfg.max_time), (Method::Rk4, 0.5, 2.0));
        let dflt: IntegratorConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(dflt, IntegratorConfig::default());
        assert!(serde_json::from_str::<IntegratorConfig>(r#"{"step":1}"#).is_err());
    }
}
