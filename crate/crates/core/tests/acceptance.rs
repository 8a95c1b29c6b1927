//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use evodyn::dynamics::{self, JacobianMethod};
use evodyn::experiment::ExperimentConfig;
use evodyn::flows::{self, problem, ExitConfig, IntegratorConfig, MatrixFlowProblem, SmoothObjective};
use evodyn::group::{Permutation, PermutationGroup};
use evodyn::mixing::exact::{commutes_exact, ExactKernel};
use evodyn::mixing::{
    commutes_with_action, CrossoverKind, CrossoverSpec, FitnessPipeline, Heuristic, Kernel, MixingMatrix,
    MutationSpec, PopulationVector,
};
use evodyn::random::RandomSource;
use evodyn::ring::GenomeSpace;
use evodyn::schema::{self, EquivalenceRelation};
use evodyn::spectral;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

// ---------------------------------------------------------------- oracles

/// Digit-wise `b(u, v, ω)` for `d = 2` from first principles: child takes
/// `u` where the mask is 1 and `v` elsewhere, then each bit flips
/// independently with probability `q`.
fn oracle_a(l: u32, masks: &[(usize, f64)], q: f64) -> impl Fn(usize, usize, usize) -> f64 {
    let masks = masks.to_vec();
    let full = (1usize << l) - 1;
    move |u, v, w| {
        let b = |x: usize, y: usize| -> f64 {
            masks
                .iter()
                .map(|&(s, chi)| {
                    let child = (x & s) | (y & !s & full);
                    let h = (child ^ w).count_ones() as i32;
                    chi * q.powi(h) * (1.0 - q).powi(l as i32 - h)
                })
                .sum()
        };
        0.5 * (b(u, v) + b(v, u))
    }
}

fn oracle_generation(a: &dyn Fn(usize, usize, usize) -> f64, phi: &[f64], p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let total: f64 = p.iter().zip(phi).map(|(x, f)| x * f).sum();
    let s: Vec<f64> = p.iter().zip(phi).map(|(x, f)| x * f / total).collect();
    (0..n)
        .map(|w| {
            let mut acc = 0.0;
            for u in 0..n {
                for v in 0..n {
                    acc += s[u] * s[v] * a(u, v, w);
                }
            }
            acc
        })
        .collect()
}

/// Cyclic Jacobi eigenvalue iteration for symmetric matrices.
fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut a = m.clone();
    let k = a.nrows();
    for _ in 0..100 {
        let off: f64 = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut r = DMatrix::identity(k, k);
                r[(p, p)] = c;
                r[(q, q)] = c;
                r[(p, q)] = s;
                r[(q, p)] = -s;
                a = r.transpose() * &a * &r;
            }
        }
    }
    let mut e: Vec<f64> = (0..k).map(|i| a[(i, i)]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Tangent-coordinate Jacobian of `x ↦ G(x, 1 − Σx)` by central differences.
fn oracle_fd_jacobian(g: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64]) -> DMatrix<f64> {
    let m = p.len() - 1;
    let h = 1e-7;
    DMatrix::from_fn(m, m, |i, j| {
        let mut hi = p.to_vec();
        let mut lo = p.to_vec();
        hi[j] += h;
        hi[m] -= h;
        lo[j] -= h;
        lo[m] += h;
        (g(&hi)[i] - g(&lo)[i]) / (2.0 * h)
    })
}

fn random_simplex(n: usize, rng: &mut RandomSource) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.rng().random::<f64>()).ln()).collect();
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

fn onemax_phi(space: &GenomeSpace) -> Vec<f64> {
    (0..space.n()).map(|g| 1.0 + space.nonzero_count_raw(g) as f64).collect()
}

fn kernel(space: GenomeSpace, kind: CrossoverKind, q: f64) -> Kernel {
    Kernel::new(space, CrossoverSpec::preset(&space, kind), MutationSpec::new(q).unwrap())
}

// ---------------------------------------------------------------- criteria

fn ring_axioms() -> Outcome {
    let mut violations = 0usize;
    let mut triples = 0usize;
    for (d, l) in [(2, 3), (3, 2), (5, 2)] {
        let s = GenomeSpace::new(d, l).map_err(|e| e.to_string())?;
        let n = s.n();
        for u in 0..n {
            violations += usize::from(s.add_raw(u, 0) != u);
            violations += usize::from(s.add_raw(u, s.neg_raw(u)) != 0);
            for v in 0..n {
                violations += usize::from(s.add_raw(u, v) != s.add_raw(v, u));
                for w in 0..n {
                    triples += 1;
                    violations += usize::from(s.add_raw(s.add_raw(u, v), w) != s.add_raw(u, s.add_raw(v, w)));
                    violations += usize::from(s.mul_raw(u, s.add_raw(v, w)) != s.add_raw(s.mul_raw(u, v), s.mul_raw(u, w)));
                    violations += usize::from(s.mul_raw(s.add_raw(v, w), u) != s.add_raw(s.mul_raw(v, u), s.mul_raw(w, u)));
                }
            }
        }
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    Ok(format!("{triples} triples, 0 violations"))
}

fn decomposition_bijection() -> Outcome {
    let mut checked = 0;
    for l in 1..=4 {
        let s = GenomeSpace::new(2, l).unwrap();
        for mask in (0..s.n()).filter(|&m| s.is_binary_raw(m)) {
            let m = s.genome(mask).unwrap();
            let mut seen = std::collections::HashSet::new();
            for i in s.genomes() {
                let (u, v) = m.binary_decompose(&i).map_err(|e| e.to_string())?;
                ensure(u.add(&v).unwrap() == i, format!("l={l} s={mask} i={}: recomposition", i.value()))?;
                ensure(seen.insert((u.value(), v.value())), format!("l={l} s={mask}: not injective"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (mask, genome) pairs"))
}

fn orbit_stabilizer() -> Outcome {
    let s = GenomeSpace::new(2, 4).unwrap();
    let g = PermutationGroup::close(s.n(), vec![Permutation::rotation(&s)]).unwrap();
    ensure(g.order() == 4, format!("|L| = {}", g.order()))?;
    for z in 0..s.n() {
        let prod = g.orbit_of(z).len() * g.stabilizer_of(z).order();
        ensure(prod == 4, format!("ζ={z}: |orbit|·|stab| = {prod}"))?;
    }
    let classes = g.orbit_partition();
    let mut count = vec![0; s.n()];
    for c in classes.classes() {
        for &x in c {
            count[x] += 1;
        }
    }
    ensure(count.iter().all(|&c| c == 1), "orbit classes do not partition H")?;
    Ok(format!("{} classes", classes.len()))
}

fn schema_cross_construction() -> Outcome {
    let s = GenomeSpace::new(2, 3).unwrap();
    for mask in (0..s.n()).filter(|&m| s.is_binary_raw(m)) {
        let a = EquivalenceRelation::from_mask(&s, mask).unwrap();
        let b = schema::schema_via_translations(&s, mask).unwrap();
        ensure(a == b, format!("mask {mask}: partitions differ"))?;
    }
    Ok("8 masks, exact equality".into())
}

fn coverage() -> Outcome {
    for d in [2, 3] {
        for l in 1..=4 {
            let s = GenomeSpace::new(d, l).unwrap();
            let rel = schema::digit_relations(&s);
            ensure(schema::covers(&rel).unwrap().covers, format!("d={d} l={l}: no cover"))?;
            let img = schema::chromosome_image(&rel).unwrap();
            ensure(img.size() == s.n(), format!("d={d} l={l}: |C| = {}", img.size()))?;
            for drop in 0..rel.len() {
                let rest: Vec<EquivalenceRelation> =
                    rel.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, r)| r.clone()).collect();
                if rest.is_empty() {
                    // l = 1: no relation left, any two genomes are unseparated
                    continue;
                }
                let c = schema::covers(&rest).unwrap();
                let (x, y) = c.witness.ok_or(format!("d={d} l={l} drop {drop}: no witness"))?;
                ensure(!c.covers && x != y, "witness must be a distinct pair")?;
                ensure(rest.iter().all(|r| r.related(x, y)), "witness is separated")?;
                ensure(s.digits_raw(x)[drop] != s.digits_raw(y)[drop], "witness differs off the dropped digit")?;
            }
        }
    }
    Ok("d ∈ {2,3}, l ≤ 4".into())
}

fn commutation() -> Outcome {
    let mut worst: f64 = 0.0;
    for l in 1..=3 {
        let s = GenomeSpace::new(2, l).unwrap();
        let k = kernel(s, CrossoverKind::Uniform, 0.03);
        let g = PermutationGroup::full_translations(&s).unwrap();
        let c = commutes_with_action(&g, |u, v, w| k.a(u, v, w), 1e-12);
        ensure(c.commutes, format!("l={l}: deviation {:e}", c.max_deviation))?;
        worst = worst.max(c.max_deviation);
        let exact = ExactKernel::from_kernel(&kernel(s, CrossoverKind::Uniform, 0.125)).unwrap();
        ensure(commutes_exact(&g, &exact).is_none(), format!("l={l}: rational violation"))?;
    }
    Ok(format!("max deviation {worst:.1e}, rational 0"))
}

fn mixing_oracle() -> Outcome {
    let s = GenomeSpace::new(2, 3).unwrap();
    let q = 0.02;
    let k = kernel(s, CrossoverKind::Uniform, q);
    let mm = MixingMatrix::from_kernel(&k).unwrap();
    let a = oracle_a(3, k.crossover().masks(), q);
    let mut rng = RandomSource::new(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_simplex(8, &mut rng);
        let got = mm.mix_raw(&p);
        for w in 0..8 {
            let mut direct = 0.0;
            for u in 0..8 {
                for v in 0..8 {
                    direct += p[u] * p[v] * a(u, v, w);
                }
            }
            worst = worst.max((got[w] - direct).abs());
        }
    }
    ensure(worst < 1e-12, format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn simplex_preservation() -> Outcome {
    let names = [
        "evolve_mutation_only.json",
        "evolve_onemax.json",
        "evolve_selection_only.json",
        "evolve_two_peaks.json",
        "evolve_ternary.json",
    ];
    let mut worst_sum: f64 = 0.0;
    let mut worst_neg: f64 = 0.0;
    for name in names {
        let c = ExperimentConfig::from_file(&repo_root().join("configs").join(name)).map_err(|e| e.to_string())?;
        let h = c.heuristic().unwrap();
        let p0 = c.start(&c.evolve.clone().unwrap().start, "evolve.start").unwrap();
        let t = dynamics::iterate(&h, &p0, 10_000, 0.0).map_err(|e| e.to_string())?;
        ensure(t.states.len() == 10_001, format!("{name}: {} states", t.states.len()))?;
        for p in &t.states {
            worst_sum = worst_sum.max((p.as_slice().iter().sum::<f64>() - 1.0).abs());
            worst_neg = worst_neg.min(p.as_slice().iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    ensure(worst_sum <= 1e-12, format!("‖p‖₁ off by {worst_sum:e}"))?;
    ensure(worst_neg >= -1e-15, format!("min entry {worst_neg:e}"))?;
    Ok(format!("5 configs × 10⁴ steps, |‖p‖₁−1| ≤ {worst_sum:.1e}"))
}

fn infinite_vs_finite() -> Outcome {
    let s = GenomeSpace::new(2, 3).unwrap();
    let q = 0.01;
    let k = kernel(s, CrossoverKind::Uniform, q);
    let a = oracle_a(3, k.crossover().masks(), q);
    let h = Heuristic::new(&FitnessPipeline::onemax(), k.clone()).unwrap();
    let phi = onemax_phi(&s);
    let p0 = PopulationVector::uniform(8);
    let expected = oracle_generation(&a, &phi, p0.as_slice());
    let mut medians = Vec::new();
    for mu in [100, 1_000, 10_000, 100_000] {
        let mut errs: Vec<f64> = (0..20u64)
            .map(|seed| {
                let mut rng = RandomSource::new(seed);
                let (_, emp) = h.sample_generation(&p0, mu, &mut rng).unwrap();
                emp.linf_distance(&expected)
            })
            .collect();
        medians.push(dynamics::median(&mut errs));
    }
    ensure(medians[3] < 0.01, format!("median at μ=1e5: {}", medians[3]))?;
    ensure(medians.windows(2).all(|w| w[1] < w[0]), format!("medians not decreasing: {medians:?}"))?;
    Ok(format!("medians {:?}", medians.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>()))
}

fn mutation_only() -> Outcome {
    let q = 0.05;
    let s = GenomeSpace::new(2, 3).unwrap();
    let k = kernel(s, CrossoverKind::None, q);
    let u = k.mutation_matrix().unwrap();
    let h = Heuristic::new(&FitnessPipeline::constant(1.0), k).unwrap();
    let mut rng = RandomSource::new(10);
    for i in 0..10 {
        let p0 = PopulationVector::new(random_simplex(8, &mut rng)).unwrap();
        let t = dynamics::iterate(&h, &p0, 500, 0.0).unwrap();
        let dist = t.last().linf_distance(&[0.125; 8]);
        ensure(dist < 1e-8, format!("start {i}: L∞ {dist:e} after 500 steps"))?;
    }
    let uniform = PopulationVector::uniform(8);
    let ea = spectral::ea_map_spectrum(&h, &uniform).map_err(|e| e.to_string())?;
    // second eigenvalue of the mutation kernel, by symmetric eigen-solve
    let kernel_second = jacobi_eigenvalues(&u)[u.nrows() - 2];
    ensure(ea.rate < 1.0, "rate ≥ 1")?;
    ensure((ea.rate - kernel_second).abs() < 1e-8, format!("rate {} vs kernel {}", ea.rate, kernel_second))?;
    ensure((kernel_second - (1.0 - 2.0 * q)).abs() < 1e-12, "kernel second eigenvalue")?;

    let s1 = GenomeSpace::new(2, 1).unwrap();
    let h1 = Heuristic::new(&FitnessPipeline::constant(1.0), kernel(s1, CrossoverKind::None, q)).unwrap();
    let ea1 = spectral::ea_map_spectrum(&h1, &PopulationVector::uniform(2)).unwrap();
    ensure((ea1.rate - (1.0 - 2.0 * q)).abs() < 1e-8, format!("l=1 rate {}", ea1.rate))?;
    Ok(format!("rate {:.10} = 1 − 2q", ea.rate))
}

fn selection_only() -> Outcome {
    for l in [2, 3] {
        let s = GenomeSpace::new(2, l).unwrap();
        let n = s.n();
        let h = Heuristic::new(&FitnessPipeline::onemax(), kernel(s, CrossoverKind::None, 0.0)).unwrap();
        let phi = onemax_phi(&s);
        let mut rng = RandomSource::new(u64::from(l));
        let mut starts = vec![PopulationVector::uniform(n)];
        for _ in 0..10 {
            starts.push(PopulationVector::new(random_simplex(n, &mut rng)).unwrap());
        }
        for p0 in &starts {
            let t = dynamics::iterate(&h, p0, 5_000, 0.0).unwrap();
            let d = t.last().linf_distance(PopulationVector::vertex(n, n - 1).as_slice());
            ensure(d < 1e-8, format!("l={l}: final distance {d:e}"))?;
        }
        // vertex at the argmax: library spectrum vs FD oracle vs Φ_i/Φ_max
        let b = n - 1;
        let vertex = PopulationVector::vertex(n, b);
        let select = |p: &[f64]| {
            let t: f64 = p.iter().zip(&phi).map(|(x, f)| x * f).sum();
            p.iter().zip(&phi).map(|(x, f)| x * f / t).collect::<Vec<f64>>()
        };
        let fd = oracle_fd_jacobian(&select, vertex.as_slice());
        let mut oracle: Vec<f64> = fd.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        let jac = dynamics::jacobian_at(&h, &vertex, JacobianMethod::Analytic);
        let mut lib: Vec<f64> = spectral::eigenvalues(&jac).unwrap().iter().map(|z| z.norm()).collect();
        let mut expected: Vec<f64> = (0..n - 1).map(|i| phi[i] / phi[b]).collect();
        for v in [&mut oracle, &mut lib, &mut expected] {
            v.sort_by(f64::total_cmp);
        }
        for ((a, o), e) in lib.iter().zip(&oracle).zip(&expected) {
            ensure((a - o).abs() < 1e-6, format!("l={l}: library {a} vs FD oracle {o}"))?;
            ensure((a - e).abs() < 1e-6, format!("l={l}: library {a} vs Φ ratio {e}"))?;
        }
    }
    Ok("argmax vertex reached; moduli = Φ_i/Φ_max".into())
}

fn gradient_flow() -> Outcome {
    let f = problem::double_well(1).unwrap();
    let cfg = IntegratorConfig::default();
    for (x0, target) in [(0.3, 1.0), (-0.3, -1.0)] {
        let r = flows::gradient_flow(&f, &[x0], &cfg).map_err(|e| e.to_string())?;
        ensure((r.terminal[0] - target).abs() < 1e-6, format!("x0={x0}: terminal {}", r.terminal[0]))?;
    }
    let none: Option<&flows::PolynomialMap> = None;
    let r = flows::exit_point_search(&f, none, &[1.0], &[-1.0], &ExitConfig::default()).unwrap();
    let exit = r.exit.ok_or("no exit point")?;
    ensure(exit[0].abs() < 1e-3, format!("exit {}", exit[0]))?;
    let fe = f.value(&exit);
    ensure((fe - 1.0).abs() < 1e-3, format!("f(exit) = {fe}"))?;
    Ok(format!("exit {:.1e}, f = {fe:.9}", exit[0]))
}

fn quotient_flow() -> Outcome {
    let circle = problem::sphere(2, 1.0).unwrap();
    let cfg = IntegratorConfig::default();
    let slack = cfg.monotonicity_slack();
    let mut rng = RandomSource::new(13);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let r = 0.1 + 2.9 * rng.rng().random::<f64>();
        let theta = std::f64::consts::TAU * rng.rng().random::<f64>();
        let x0 = [r * theta.cos(), r * theta.sin()];
        let res = flows::quotient_gradient_flow(&circle, &x0, &cfg).map_err(|e| e.to_string())?;
        let dev = ((res.terminal[0].powi(2) + res.terminal[1].powi(2)).sqrt() - 1.0).abs();
        ensure(dev < 1e-8, format!("start {i}: |‖x‖−1| = {dev:e}"))?;
        let inc = res.max_increase(|s| 0.5 * s.h_norm.unwrap().powi(2));
        ensure(inc <= slack, format!("start {i}: ½‖H‖² increased by {inc:e}"))?;
        worst = worst.max(dev);
    }
    Ok(format!("20 starts, max |‖x‖−1| {worst:.1e}"))
}

fn projected_flow() -> Outcome {
    let sphere = problem::sphere(3, 1.0).unwrap();
    let f = problem::diagonal_quadratic(&[1.0, 2.0, 3.0]).unwrap();
    let cfg = IntegratorConfig::default();
    let mut rng = RandomSource::new(14);
    for i in 0..10 {
        let v: Vec<f64> = (0..3).map(|_| rng.rng().random::<f64>() * 2.0 - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let x0: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let r = flows::projected_gradient_flow(&f, &sphere, &x0, &cfg).map_err(|e| e.to_string())?;
        let t = &r.terminal;
        let dist = (t[0].abs() - 1.0).abs().max(t[1].abs()).max(t[2].abs());
        ensure(dist < 1e-6, format!("start {i}: terminal {t:?}"))?;
        let feas = r.samples.iter().map(|s| s.h_norm.unwrap()).fold(0.0, f64::max);
        ensure(feas < 1e-6, format!("start {i}: ‖H‖ reached {feas:e}"))?;
    }
    Ok("10 starts reach ±e₁, ‖H‖ < 1e-6 throughout".into())
}

fn double_bracket() -> Outcome {
    for seed in 0..5u64 {
        let mut rng = RandomSource::new(100 + seed);
        let mut a = DMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in i..4 {
                let v = rng.rng().random::<f64>() * 2.0 - 1.0;
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let oracle = jacobi_eigenvalues(&a);
        let p = MatrixFlowProblem::ascending(a, IntegratorConfig::default()).unwrap();
        let r = flows::double_bracket_flow(&p).map_err(|e| e.to_string())?;
        for s in &r.samples {
            let mut e = jacobi_eigenvalues(&s.h);
            e.sort_by(f64::total_cmp);
            let drift = e.iter().zip(&oracle).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            ensure(drift < 1e-8, format!("seed {seed}: spectrum drift {drift:e} at t={}", s.t))?;
        }
        ensure(r.off_diagonal < 1e-6, format!("seed {seed}: off-diagonal {:e}", r.off_diagonal))?;
        let mut diag = r.terminal_diagonal.clone();
        diag.sort_by(f64::total_cmp);
        for (d, e) in diag.iter().zip(&oracle) {
            ensure((d - e).abs() < 1e-6, format!("seed {seed}: diagonal {d} vs eigenvalue {e}"))?;
        }
    }
    Ok("5 seeds".into())
}

fn spectral_checks() -> Outcome {
    let mut rng = RandomSource::new(16);
    for d in [2, 3] {
        for l in 1..=4 {
            let s = GenomeSpace::new(d, l).unwrap();
            let x: Vec<Complex64> = (0..s.n())
                .map(|_| Complex64::new(rng.rng().random::<f64>() - 0.5, rng.rng().random::<f64>() - 0.5))
                .collect();
            let xh = spectral::group_dft(&s, &x).unwrap();
            let back = spectral::inverse_group_dft(&s, &xh).unwrap();
            let round = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            ensure(round < 1e-12, format!("d={d} l={l}: round trip {round:e}"))?;
            let n2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let pars = (n2(&x) - n2(&xh)).abs();
            ensure(pars < 1e-12, format!("d={d} l={l}: Parseval {pars:e}"))?;
        }
    }
    let shear = [
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]),
    ];
    let k2 = spectral::jsr_bounds(&shear, 2).unwrap();
    ensure(k2.lower >= 1.618, format!("shear lower at k=2: {}", k2.lower))?;
    let k8 = spectral::jsr_bounds(&shear, 8).unwrap();
    ensure(k8.upper - k8.lower < 0.2, format!("shear gap at k=8: {}", k8.upper - k8.lower))?;

    let s = GenomeSpace::new(2, 2).unwrap();
    let u = kernel(s, CrossoverKind::None, 0.1).mutation_matrix().unwrap();
    // row-stochastic: Perron root 1
    let rho = 1.0;
    let b = spectral::jsr_bounds(&[u.clone()], 8).unwrap();
    ensure(b.lower <= rho + 1e-12 && rho <= b.upper + 1e-12, "singleton bounds do not bracket ρ")?;
    ensure(b.upper - b.lower < 0.05, format!("singleton gap {}", b.upper - b.lower))?;
    let nonnormal = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.4]);
    let b = spectral::jsr_bounds(&[nonnormal], 8).unwrap();
    ensure(b.lower <= 0.5 + 1e-12 && 0.5 <= b.upper, "non-normal singleton does not bracket ρ")?;
    Ok(format!("shear k=2 lower {:.6}, k=8 gap {:.2e}", k2.lower, k8.upper - k8.lower))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_evodyn");
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = repo_root().join("configs/sample_onemax.json");
    let run = || -> Result<PathBuf, String> {
        let o = Command::new(bin)
            .arg("run")
            .arg(&config)
            .env("OUT_DIR", out.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), format!("run failed: {}", String::from_utf8_lossy(&o.stderr)))?;
        Ok(PathBuf::from(String::from_utf8_lossy(&o.stdout).trim()))
    };
    let (a, b) = (run()?, run()?);
    ensure(a != b, "runs share a directory")?;
    let csv = |dir: &Path| std::fs::read(dir.join("sample.csv")).map_err(|e| e.to_string());
    ensure(csv(&a)? == csv(&b)?, "CSV outputs differ")?;
    let v = Command::new(bin).arg("verify").output().map_err(|e| e.to_string())?;
    ensure(v.status.code() == Some(0), format!("verify exited {:?}", v.status.code()))?;
    Ok("byte-identical CSV; verify exit 0".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 17] = [
        ("ring axioms", ring_axioms),
        ("decomposition bijection", decomposition_bijection),
        ("orbit-stabilizer", orbit_stabilizer),
        ("schema cross-construction", schema_cross_construction),
        ("coverage", coverage),
        ("commutation", commutation),
        ("mixing oracle", mixing_oracle),
        ("simplex preservation", simplex_preservation),
        ("infinite vs finite population", infinite_vs_finite),
        ("mutation-only convergence", mutation_only),
        ("selection-only", selection_only),
        ("gradient flow", gradient_flow),
        ("quotient gradient flow", quotient_flow),
        ("projected gradient flow", projected_flow),
        ("double bracket", double_bracket),
        ("spectral", spectral_checks),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

