//! Built-in oracle suite: each check recomputes a library result by an
//! independent route and compares.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::mixing::exact::{commutes_exact, ExactKernel};
use crate::mixing::{CrossoverKind, CrossoverSpec, Kernel, MixingMatrix, MutationSpec};
use crate::random::RandomSource;
use crate::ring::GenomeSpace;
use crate::spectral;

pub const CHECKS: [&str; 5] = ["mix_triple_sum", "digit_arithmetic", "eigen", "group_dft", "exact_commutation"];

/// Added to the library side of a check when its fault is injected.
const FAULT: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:<6} {:>12} {:>10}", "check", "result", "max_error", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<20} {:<6} {:>12.3e} {:>10.0e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.max_error,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

fn check(name: &'static str, max_error: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name,
        passed: max_error <= tolerance,
        max_error,
        tolerance,
    }
}

/// `M(p)_ω` from the mixing matrix against `Σ_u Σ_v p_u p_v a(u, v, ω)`
/// with `a` taken straight from the kernel, for 100 random populations.
fn mix_triple_sum(fault: f64) -> Result<CheckResult> {
    let space = GenomeSpace::new(2, 3)?;
    let kernel = Kernel::new(
        space,
        CrossoverSpec::preset(&space, CrossoverKind::Uniform),
        MutationSpec::new(0.01)?,
    );
    let mm = MixingMatrix::from_kernel(&kernel)?;
    let n = space.n();
    let a: Vec<f64> = (0..n * n * n).map(|i| kernel.a(i / (n * n), (i / n) % n, i % n)).collect();
    let mut rng = RandomSource::new(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w: Vec<f64> = (0..n).map(|_| rng.rng().random::<f64>()).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let mixed = mm.mix_raw(&p);
        for omega in 0..n {
            let mut direct = 0.0;
            for u in 0..n {
                for v in 0..n {
                    direct += p[u] * p[v] * a[(u * n + v) * n + omega];
                }
            }
            worst = worst.max((mixed[omega] + fault - direct).abs());
        }
    }
    Ok(check("mix_triple_sum", worst, 1e-12))
}

/// Ring operations against digit-by-digit arithmetic on base-`d`
/// expansions, for every pair in three spaces. The error is the number of
/// mismatches.
fn digit_arithmetic(fault: f64) -> Result<CheckResult> {
    let mut mismatches = 0usize;
    for (d, l) in [(2u32, 3u32), (3, 2), (5, 2)] {
        let space = GenomeSpace::new(d, l)?;
        let n = space.n();
        let digits = |mut x: usize| -> Vec<usize> {
            (0..l)
                .map(|_| {
                    let r = x % d as usize;
                    x /= d as usize;
                    r
                })
                .collect()
        };
        let value = |ds: &[usize]| ds.iter().rev().fold(0usize, |acc, &x| acc * d as usize + x);
        let dd = d as usize;
        for u in 0..n {
            for v in 0..n {
                let (du, dv) = (digits(u), digits(v));
                let sum: Vec<usize> = du.iter().zip(&dv).map(|(a, b)| (a + b) % dd).collect();
                let prod: Vec<usize> = du.iter().zip(&dv).map(|(a, b)| (a * b) % dd).collect();
                let diff: Vec<usize> = du.iter().zip(&dv).map(|(a, b)| (a + dd - b) % dd).collect();
                mismatches += usize::from(space.add_raw(u, v) != value(&sum));
                mismatches += usize::from(space.mul_raw(u, v) != value(&prod));
                mismatches += usize::from(space.sub_raw(u, v) != value(&diff));
            }
        }
    }
    Ok(check("digit_arithmetic", mismatches as f64 + fault, 0.0))
}

/// Mutation-matrix spectra against the closed form: per digit the kernel
/// has eigenvalues `1` and `1 − q·d/(d−1)`, so the full matrix has
/// `(1 − q·d/(d−1))^k` with multiplicity `C(l, k)·(d−1)^k`.
fn eigen(fault: f64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for (d, l, q) in [(2u32, 3u32, 0.05), (3, 2, 0.1), (2, 4, 0.2)] {
        let space = GenomeSpace::new(d, l)?;
        let kernel = Kernel::new(space, CrossoverSpec::preset(&space, CrossoverKind::None), MutationSpec::new(q)?);
        let mut got: Vec<f64> = spectral::eigenvalues(&kernel.mutation_matrix()?)?
            .iter()
            .map(|z| z.re + fault)
            .collect();
        let lambda = 1.0 - q * f64::from(d) / f64::from(d - 1);
        let mut expected: Vec<f64> = (0..space.n())
            .map(|g| lambda.powi(space.nonzero_count_raw(g) as i32))
            .collect();
        got.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(check("eigen", worst, 1e-10))
}

/// The fast transform against the character sum `Σ_v χ(u, v) x(v) / √n`.
fn group_dft(fault: f64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut rng = RandomSource::new(7);
    for (d, l) in [(2u32, 4u32), (3, 2), (5, 2)] {
        let space = GenomeSpace::new(d, l)?;
        let table = spectral::CharacterTable::new(space);
        let n = space.n();
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.rng().random::<f64>() - 0.5, rng.rng().random::<f64>() - 0.5))
            .collect();
        let fast = spectral::group_dft(&space, &x)?;
        let scale = 1.0 / (n as f64).sqrt();
        for u in 0..n {
            let mut direct = Complex64::zero();
            for (v, xv) in x.iter().enumerate() {
                direct += table.value(u, v) * xv;
            }
            worst = worst.max((fast[u] + fault - direct * scale).norm());
        }
    }
    Ok(check("group_dft", worst, 1e-12))
}

/// Translation invariance of uniform crossover with mutation in exact
/// rational arithmetic; any violation counts.
fn exact_commutation(fault: f64) -> Result<CheckResult> {
    let mut violations = 0usize;
    for l in 1..=3 {
        let space = GenomeSpace::new(2, l)?;
        let kernel = Kernel::new(
            space,
            CrossoverSpec::preset(&space, CrossoverKind::Uniform),
            MutationSpec::new(0.125)?,
        );
        let exact = ExactKernel::from_kernel(&kernel)?;
        let group = PermutationGroup::full_translations(&space)?;
        violations += usize::from(commutes_exact(&group, &exact).is_some());
    }
    Ok(check("exact_commutation", violations as f64 + fault, 0.0))
}

/// Runs every check; `inject_fault` names one to perturb.
pub fn verify(inject_fault: Option<&str>) -> Result<VerifyReport> {
    if let Some(name) = inject_fault {
        if !CHECKS.contains(&name) {
            return Err(Error::Usage(format!(
                "unknown check `{name}`; expected one of {}",
                CHECKS.join(", ")
            )));
        }
    }
    let fault = |name: &str| if inject_fault == Some(name) { FAULT } else { 0.0 };
    Ok(VerifyReport {
        checks: vec![
            mix_triple_sum(fault("mix_triple_sum"))?,
            digit_arithmetic(fault("digit_arithmetic"))?,
            eigen(fault("eigen"))?,
            group_dft(fault("group_dft"))?,
            exact_commutation(fault("exact_commutation"))?,
        ],
    })
}
