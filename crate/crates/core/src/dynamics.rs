//! The generation map as a discrete dynamical system on the simplex:
//! trajectories, fixed points, Jacobians, stability and basins.
//!
//! Tangent coordinates drop the last frequency: `x = (p_0, …, p_{n-2})` and
//! `p_{n-1} = 1 - Σ x`. Jacobians and their eigenvalues are reported in
//! these coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mixing::{linf, Heuristic, PopulationVector};
use crate::random::RandomSource;
use crate::spectral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxSteps,
    Converged,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub states: Vec<PopulationVector>,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationVector {
        self.states.last().expect("trajectory holds at least the start")
    }

    /// Step index, then one column per genome.
    pub fn to_csv(&self) -> String {
        let n = self.states[0].len();
        let mut out = String::from("step");
        for g in 0..n {
            out.push_str(&format!(",{g}"));
        }
        out.push('\n');
        for (t, p) in self.states.iter().enumerate() {
            out.push_str(&t.to_string());
            for x in p.as_slice() {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `p_{t+1} = G(p_t)` until `max_steps` or `‖p_{t+1} - p_t‖∞ < tol`.
pub fn iterate(h: &Heuristic, p0: &PopulationVector, max_steps: usize, tol: f64) -> Result<Trajectory> {
    let mut states = vec![p0.clone()];
    for step in 1..=max_steps {
        let prev = states.last().expect("nonempty");
        let next = h
            .generation(prev)
            .map_err(|e| Error::Numeric(format!("step {step}: {e}")))?;
        let delta = next.linf_distance(prev.as_slice());
        states.push(next);
        if delta < tol {
            return Ok(Trajectory {
                states,
                stop: StopReason::Converged,
            });
        }
    }
    Ok(Trajectory {
        states,
        stop: StopReason::MaxSteps,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JacobianMethod {
    /// Central differences with step `1e-6` in tangent coordinates.
    FiniteDifference,
    /// `dG = dM ∘ dF`, restricted to the tangent space.
    #[default]
    Analytic,
}

pub const FD_STEP: f64 = 1e-6;

/// `(n-1) × (n-1)` Jacobian of `G` at `p` in tangent coordinates.
pub fn jacobian_at(h: &Heuristic, p: &PopulationVector, method: JacobianMethod) -> DMatrix<f64> {
    let n = p.len();
    let m = n - 1;
    match method {
        JacobianMethod::Analytic => {
            let full = h.jacobian_full(p.as_slice());
            DMatrix::from_fn(m, m, |i, j| full[(i, j)] - full[(i, m)])
        }
        JacobianMethod::FiniteDifference => {
            let mut jac = DMatrix::zeros(m, m);
            for j in 0..m {
                let mut hi = p.as_slice().to_vec();
                let mut lo = hi.clone();
                hi[j] += FD_STEP;
                hi[m] -= FD_STEP;
                lo[j] -= FD_STEP;
                lo[m] += FD_STEP;
                let (gh, gl) = (h.generation_raw(&hi), h.generation_raw(&lo));
                for i in 0..m {
                    jac[(i, j)] = (gh[i] - gl[i]) / (2.0 * FD_STEP);
                }
            }
            jac
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    NonHyperbolic,
}

pub const HYPERBOLICITY_TOL: f64 = 1e-6;

/// Spectrum against the unit circle: any modulus within `tol` of 1 is
/// non-hyperbolic; otherwise all inside is stable, all outside unstable,
/// mixed is a saddle.
pub fn classify_stability(eigenvalues: &[Complex64], tol: f64) -> Stability {
    let moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
    if moduli.iter().any(|r| (r - 1.0).abs() <= tol) {
        Stability::NonHyperbolic
    } else if moduli.iter().all(|&r| r < 1.0) {
        Stability::Stable
    } else if moduli.iter().all(|&r| r > 1.0) {
        Stability::Unstable
    } else {
        Stability::Saddle
    }
}

fn serialize_complex<S: Serializer>(values: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub point: PopulationVector,
    pub residual: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub eigenvalues: Vec<Complex64>,
    pub classification: Stability,
    pub iterations: usize,
    pub newton_steps: usize,
}

impl FixedPointReport {
    pub fn at(h: &Heuristic, point: PopulationVector) -> Result<Self> {
        let residual = residual(h, &point)?;
        let jac = jacobian_at(h, &point, JacobianMethod::Analytic);
        let eigenvalues = spectral::spectrum(&jac)?.eigenvalues;
        Ok(FixedPointReport {
            classification: classify_stability(&eigenvalues, HYPERBOLICITY_TOL),
            point,
            residual,
            eigenvalues,
            iterations: 0,
            newton_steps: 0,
        })
    }
}

pub fn residual(h: &Heuristic, p: &PopulationVector) -> Result<f64> {
    Ok(h.generation(p)?.linf_distance(p.as_slice()))
}

#[derive(Clone, Copy, Debug)]
pub struct FixedPointOptions {
    pub max_iterations: usize,
    /// Switch from iteration to Newton once steps fall below this.
    pub iteration_tol: f64,
    pub max_newton_steps: usize,
    pub residual_tol: f64,
    pub tikhonov: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            max_iterations: 20_000,
            iteration_tol: 1e-9,
            max_newton_steps: 50,
            residual_tol: 1e-10,
            tikhonov: 1e-10,
        }
    }
}

/// Solves `(J - I) δ = -r`, falling back to Tikhonov-damped normal
/// equations when the system is (near) singular.
fn newton_direction(a: DMatrix<f64>, r: &DVector<f64>, damping: f64) -> Option<DVector<f64>> {
    let rhs = -r;
    if let Some(sol) = a.clone().lu().solve(&rhs) {
        if sol.iter().all(|x| x.is_finite()) && sol.norm() < 1e3 {
            return Some(sol);
        }
    }
    let at = a.transpose();
    let m = a.ncols();
    let normal = &at * &a + DMatrix::identity(m, m) * damping;
    normal.lu().solve(&(at * rhs)).filter(|s| s.iter().all(|x| x.is_finite()))
}

/// Iterates toward a fixed point, then polishes with Newton on `G(p) - p`
/// in tangent coordinates until `‖G(p*) - p*‖∞ < residual_tol`.
pub fn find_fixed_point(h: &Heuristic, p0: &PopulationVector, opts: FixedPointOptions) -> Result<FixedPointReport> {
    let traj = iterate(h, p0, opts.max_iterations, opts.iteration_tol)?;
    let iterations = traj.states.len() - 1;
    let mut p = traj.last().clone();
    let mut best = (residual(h, &p)?, p.clone());
    let n = p.len();
    let m = n - 1;
    let mut newton_steps = 0;
    while best.0 >= opts.residual_tol && newton_steps < opts.max_newton_steps {
        newton_steps += 1;
        let g = h.generation_raw(p.as_slice());
        let r = DVector::from_fn(m, |i, _| g[i] - p.as_slice()[i]);
        let a = jacobian_at(h, &p, JacobianMethod::FiniteDifference) - DMatrix::identity(m, m);
        let Some(delta) = newton_direction(a, &r, opts.tikhonov) else {
            break;
        };
        let mut next: Vec<f64> = p.as_slice().to_vec();
        for i in 0..m {
            next[i] += delta[i];
        }
        next[m] = 1.0 - next[..m].iter().sum::<f64>();
        for x in next.iter_mut() {
            *x = x.max(0.0);
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        p = PopulationVector::settle(next)?;
        // one plain step keeps the candidate consistent with G
        let stepped = h.generation(&p)?;
        for candidate in [p.clone(), stepped] {
            let res = residual(h, &candidate)?;
            if res < best.0 {
                best = (res, candidate);
            }
        }
        p = best.1.clone();
    }
    if best.0 >= opts.residual_tol {
        return Err(Error::SearchFailure(format!(
            "no fixed point within budget; best residual {:.3e} at {:?}",
            best.0,
            best.1.as_slice()
        )));
    }
    let mut report = FixedPointReport::at(h, best.1)?;
    report.iterations = iterations;
    report.newton_steps = newton_steps;
    Ok(report)
}

pub const ATTACH_TOL: f64 = 1e-6;
pub const ATTACH_STEPS: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct BasinReport {
    /// Index into `fixed_points` per start, or `None` when the trajectory
    /// did not settle.
    pub labels: Vec<Option<usize>>,
    pub fixed_points: Vec<PopulationVector>,
}

/// Runs each start for up to `max_steps` and attaches it to the fixed
/// point it settles at: the final state must stay within `1e-6` for 10
/// further consecutive steps. Fixed points are numbered in order of first
/// discovery.
pub fn basin_sample(h: &Heuristic, starts: &[PopulationVector], max_steps: usize) -> Result<BasinReport> {
    let finals: Vec<Option<PopulationVector>> = starts
        .par_iter()
        .map(|p0| -> Result<Option<PopulationVector>> {
            let traj = iterate(h, p0, max_steps, 1e-13)?;
            let end = traj.last().clone();
            let mut p = end.clone();
            for _ in 0..ATTACH_STEPS {
                p = h.generation(&p)?;
                if p.linf_distance(end.as_slice()) >= ATTACH_TOL {
                    return Ok(None);
                }
            }
            Ok(Some(end))
        })
        .collect::<Result<_>>()?;
    let mut fixed_points: Vec<PopulationVector> = Vec::new();
    let labels = finals
        .into_iter()
        .map(|end| {
            end.map(|end| {
                fixed_points
                    .iter()
                    .position(|fp| fp.linf_distance(end.as_slice()) < ATTACH_TOL)
                    .unwrap_or_else(|| {
                        fixed_points.push(end);
                        fixed_points.len() - 1
                    })
            })
        })
        .collect();
    Ok(BasinReport { labels, fixed_points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepDistance {
    pub step: usize,
    pub median: f64,
    pub max: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Evolves a finite population of size `mu` (one seed per run) next to the
/// exact trajectory from `p0`, reporting the L∞ gap per generation.
pub fn model_vs_sample(
    h: &Heuristic,
    p0: &PopulationVector,
    mu: usize,
    steps: usize,
    seeds: &[u64],
) -> Result<Vec<StepDistance>> {
    let exact = iterate(h, p0, steps, 0.0)?;
    let per_seed: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<f64>> {
            let mut rng = RandomSource::new(seed);
            let mut current = p0.clone();
            (1..=steps)
                .map(|t| {
                    let (_, empirical) = h.sample_generation(&current, mu, &mut rng)?;
                    let gap = linf(empirical.as_slice(), exact.states[t].as_slice());
                    current = empirical;
                    Ok(gap)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((1..=steps)
        .map(|t| {
            let mut gaps: Vec<f64> = per_seed.iter().map(|g| g[t - 1]).collect();
            let max = gaps.iter().copied().fold(0.0, f64::max);
            StepDistance {
                step: t,
                median: median(&mut gaps),
                max,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::{CrossoverKind, CrossoverSpec, FitnessPipeline, Kernel, MutationSpec};
    use crate::ring::GenomeSpace;

    fn heuristic(l: u32, pipeline: FitnessPipeline, kind: CrossoverKind, q: f64) -> Heuristic {
        let s = GenomeSpace::new(2, l).unwrap();
        let k = Kernel::new(s, CrossoverSpec::preset(&s, kind), MutationSpec::new(q).unwrap());
        Heuristic::new(&pipeline, k).unwrap()
    }

    #[test]
    fn selection_only_converges_to_argmax() {
        let h = heuristic(3, FitnessPipeline::onemax(), CrossoverKind::None, 0.0);
        let t = iterate(&h, &PopulationVector::uniform(8), 5000, 1e-15).unwrap();
        assert!(t.last().as_slice()[7] > 1.0 - 1e-8);
    }

    #[test]
    fn identity_map_is_constant() {
        let h = heuristic(2, FitnessPipeline::constant(1.0), CrossoverKind::None, 0.0);
        let p = PopulationVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let t = iterate(&h, &p, 10, 1e-15).unwrap();
        assert_eq!(t.stop, StopReason::Converged);
        assert!(t.states.iter().all(|s| s.linf_distance(p.as_slice()) < 1e-16));
        let j = jacobian_at(&h, &p, JacobianMethod::Analytic);
        assert!((j - DMatrix::identity(3, 3)).amax() < 1e-14);
        let report = FixedPointReport::at(&h, p).unwrap();
        assert_eq!(report.classification, Stability::NonHyperbolic);
    }

    #[test]
    fn mutation_only_goes_uniform() {
        let h = heuristic(3, FitnessPipeline::constant(1.0), CrossoverKind::None, 0.05);
        let t = iterate(&h, &PopulationVector::vertex(8, 3), 2000, 1e-14).unwrap();
        assert!(t.last().linf_distance(&[0.125; 8]) < 1e-10);
        let fp = find_fixed_point(&h, &PopulationVector::vertex(8, 0), FixedPointOptions::default()).unwrap();
        assert!(fp.residual < 1e-10);
        assert!(fp.point.linf_distance(&[0.125; 8]) < 1e-9);
        assert_eq!(fp.classification, Stability::Stable);
    }

    #[test]
    fn vertex_jacobian_of_selection() {
        let s = GenomeSpace::new(2, 2).unwrap();
        let k = Kernel::new(s, CrossoverSpec::preset(&s, CrossoverKind::None), MutationSpec::new(0.0).unwrap());
        let h = Heuristic::with_fitness(vec![1.0, 2.0, 3.0, 4.0], k).unwrap();
        for b in 0..4 {
            let p = PopulationVector::vertex(4, b);
            let fd = jacobian_at(&h, &p, JacobianMethod::FiniteDifference);
            let an = jacobian_at(&h, &p, JacobianMethod::Analytic);
            assert!((&fd - &an).norm() <= 1e-5 * an.norm().max(1.0));
            let mut moduli: Vec<f64> = spectral::eigenvalues(&fd).unwrap().iter().map(|z| z.norm()).collect();
            moduli.sort_by(f64::total_cmp);
            let mut expected: Vec<f64> = (0..4).filter(|&i| i != b).map(|i| (i + 1) as f64 / (b + 1) as f64).collect();
            expected.sort_by(f64::total_cmp);
            for (a, e) in moduli.iter().zip(&expected) {
                assert!((a - e).abs() < 1e-6, "vertex {b}: {moduli:?} vs {expected:?}");
            }
            let label = FixedPointReport::at(&h, p).unwrap().classification;
            assert_eq!(label, if b == 3 { Stability::Stable } else if b == 0 { Stability::Unstable } else { Stability::Saddle });
        }
    }

    #[test]
    fn onemax_interior_fixed_point() {
        let h = heuristic(3, FitnessPipeline::onemax(), CrossoverKind::Uniform, 0.01);
        let fp = find_fixed_point(&h, &PopulationVector::uniform(8), FixedPointOptions::default()).unwrap();
        assert!(fp.residual < 1e-10);
        assert_eq!(fp.eigenvalues.len(), 7);
        let argmax = fp.point.as_slice().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(argmax, 7);
        assert_eq!(fp.classification, Stability::Stable);
    }

    #[test]
    fn classification_labels() {
        let c = |r: &[f64]| classify_stability(&r.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), 1e-6);
        assert_eq!(c(&[0.5, -0.9]), Stability::Stable);
        assert_eq!(c(&[1.5, -2.0]), Stability::Unstable);
        assert_eq!(c(&[0.5, 2.0]), Stability::Saddle);
        assert_eq!(c(&[0.5, 1.0 + 1e-7]), Stability::NonHyperbolic);
    }

    #[test]
    fn two_peaks_two_basins() {
        let s = GenomeSpace::new(2, 3).unwrap();
        let k = Kernel::new(s, CrossoverSpec::preset(&s, CrossoverKind::None), MutationSpec::new(1e-3).unwrap());
        let h = Heuristic::with_fitness(vec![5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0], k).unwrap();
        let near = |i: usize| {
            let mut p = vec![0.02; 8];
            p[i] = 0.86;
            PopulationVector::new(p).unwrap()
        };
        let report = basin_sample(&h, &[near(0), near(7), near(0)], 20_000).unwrap();
        assert_eq!(report.labels, vec![Some(0), Some(1), Some(0)]);
        assert!(report.fixed_points[0].as_slice()[0] > 0.9);
        assert!(report.fixed_points[1].as_slice()[7] > 0.9);
    }

    #[test]
    fn saddle_vertex_stays_put() {
        let h = heuristic(2, FitnessPipeline::onemax(), CrossoverKind::None, 0.0);
        let r = basin_sample(&h, &[PopulationVector::vertex(4, 1), PopulationVector::uniform(4)], 5000).unwrap();
        assert_eq!(r.labels, vec![Some(0), Some(1)]);
        assert_eq!(r.fixed_points[0], PopulationVector::vertex(4, 1));
        assert!(r.fixed_points[1].as_slice()[3] > 1.0 - 1e-6);
    }

    #[test]
    fn zero_mutation_vertex_has_no_sampling_gap() {
        let h = heuristic(3, FitnessPipeline::onemax(), CrossoverKind::None, 0.0);
        let stats = model_vs_sample(&h, &PopulationVector::vertex(8, 2), 100, 5, &[1, 2, 3]).unwrap();
        assert!(stats.iter().all(|s| s.max == 0.0));
    }

    #[test]
    fn csv_layout() {
        let h = heuristic(1, FitnessPipeline::onemax(), CrossoverKind::None, 0.0);
        let t = iterate(&h, &PopulationVector::uniform(2), 1, 0.0).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,0,1");
        assert!(lines[2].starts_with("1,0.333"));
    }
}
