//! Characters of `Z_d^l`, the group Fourier transform, spectra and joint
//! spectral radius bounds.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dynamics::{self, JacobianMethod};
use crate::error::{Error, Result};
use crate::mixing::{Heuristic, PopulationVector};
use crate::ring::GenomeSpace;

/// Characters `χ(u, v) = ω_d^{⟨u,v⟩}` with `⟨u,v⟩ = Σ_i u_i v_i mod d`.
#[derive(Clone, Copy, Debug)]
pub struct CharacterTable {
    space: GenomeSpace,
}

impl CharacterTable {
    pub fn new(space: GenomeSpace) -> Self {
        CharacterTable { space }
    }

    pub fn space(&self) -> &GenomeSpace {
        &self.space
    }

    /// `⟨u, v⟩ mod d`.
    pub fn pairing(&self, u: usize, v: usize) -> u32 {
        let d = self.space.d();
        let du = self.space.digits_raw(u);
        let dv = self.space.digits_raw(v);
        du.iter().zip(&dv).map(|(a, b)| a * b % d).sum::<u32>() % d
    }

    pub fn value(&self, u: usize, v: usize) -> Complex64 {
        root_of_unity(self.space.d(), self.pairing(u, v))
    }
}

fn root_of_unity(d: u32, k: u32) -> Complex64 {
    match (d, k % d) {
        (_, 0) => Complex64::new(1.0, 0.0),
        (2, _) => Complex64::new(-1.0, 0.0),
        (4, 1) => Complex64::new(0.0, 1.0),
        (4, 3) => Complex64::new(0.0, -1.0),
        (d, k) => Complex64::from_polar(1.0, 2.0 * PI * f64::from(k) / f64::from(d)),
    }
}

fn check_len(space: &GenomeSpace, len: usize) -> Result<()> {
    if len != space.n() {
        return Err(Error::Usage(format!(
            "vector has length {len}, the space has {} points",
            space.n()
        )));
    }
    Ok(())
}

/// Unitary transform along every digit axis: `d`-point DFT per position.
fn digit_axis_transform(space: &GenomeSpace, x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let d = space.d() as usize;
    let n = space.n();
    let scale = 1.0 / (d as f64).sqrt();
    let roots: Vec<Complex64> = (0..d)
        .map(|k| {
            let r = root_of_unity(d as u32, k as u32);
            if sign < 0.0 { r.conj() } else { r }
        })
        .collect();
    let mut data = x.to_vec();
    let mut buf = vec![Complex64::new(0.0, 0.0); d];
    let mut stride = 1;
    for _ in 0..space.l() {
        for block in (0..n).step_by(stride * d) {
            for offset in 0..stride {
                let base = block + offset;
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..d)
                        .map(|j| roots[(j * k) % d] * data[base + j * stride])
                        .sum::<Complex64>()
                        * scale;
                }
                for (j, &value) in buf.iter().enumerate() {
                    data[base + j * stride] = value;
                }
            }
        }
        stride *= d;
    }
    data
}

/// `x̂(u) = Σ_v χ(u, v) x(v) / √n`.
pub fn group_dft(space: &GenomeSpace, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(space, x.len())?;
    Ok(digit_axis_transform(space, x, 1.0))
}

pub fn inverse_group_dft(space: &GenomeSpace, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(space, x.len())?;
    Ok(digit_axis_transform(space, x, -1.0))
}

/// Real fast Walsh–Hadamard transform with `1/√n` normalization (the
/// `d = 2` case of [`group_dft`]); it is its own inverse.
pub fn walsh_hadamard(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if !n.is_power_of_two() || n == 0 {
        return Err(Error::Usage(format!("Walsh transform needs a power-of-two length, got {n}")));
    }
    let mut data = x.to_vec();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(data)
}

/// Eigenvalues sorted by decreasing modulus, with the two leading moduli.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub radius: f64,
    pub second_modulus: f64,
}

impl Serialize for SpectrumReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pairs: Vec<[f64; 2]> = self.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("SpectrumReport", 3)?;
        st.serialize_field("eigenvalues", &pairs)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("second_modulus", &self.second_modulus)?;
        st.end()
    }
}

impl SpectrumReport {
    pub fn from_eigenvalues(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(b.re.total_cmp(&a.re))
                .then(b.im.total_cmp(&a.im))
        });
        let radius = eigenvalues.first().map_or(0.0, |z| z.norm());
        let second_modulus = eigenvalues.get(1).map_or(0.0, |z| z.norm());
        SpectrumReport {
            eigenvalues,
            radius,
            second_modulus,
        }
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Usage(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    check_square(m)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.nrows() == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    if *m == m.transpose() {
        let eig = m.clone().symmetric_eigenvalues();
        return Ok(eig.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    }
    Ok(m.clone().complex_eigenvalues().iter().copied().collect())
}

pub fn spectrum(m: &DMatrix<f64>) -> Result<SpectrumReport> {
    Ok(SpectrumReport::from_eigenvalues(eigenvalues(m)?))
}

/// Dimension above which [`spectral_radius`] switches to power iteration.
pub const DENSE_EIGEN_MAX: usize = 512;

/// `max |λ|`: full eigen-solve up to 512×512, power iteration above.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    check_square(m)?;
    if m.nrows() <= DENSE_EIGEN_MAX {
        return Ok(spectrum(m)?.radius);
    }
    Ok(power_radius(m, 2000))
}

/// Growth-rate estimate `‖A^k x‖^{1/k}` averaged over the second half of
/// the iteration, which also handles complex dominant pairs.
fn power_radius(m: &DMatrix<f64>, iterations: usize) -> f64 {
    let n = m.nrows();
    let mut x = nalgebra::DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_7).fract());
    x /= x.norm();
    let mut log_growth = 0.0;
    let tail = iterations / 2;
    for it in 0..iterations {
        let y = m * &x;
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        if it >= iterations - tail {
            log_growth += norm.ln();
        }
        x = y / norm;
    }
    (log_growth / tail as f64).exp()
}

fn two_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

/// Lower and upper joint-spectral-radius bounds from all products up to a
/// given length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JsrBounds {
    pub depth: usize,
    /// `max ρ(Π)^{1/j}` over products of length `j ≤ depth`.
    pub lower: f64,
    /// `max ‖Π‖₂^{1/depth}` over products of length exactly `depth`.
    pub upper: f64,
    /// Per-depth bounds `(lower_j, upper_j)` for `j = 1..=depth`; lower is
    /// cumulative, upper is the depth-`j` norm bound.
    pub by_depth: Vec<(f64, f64)>,
    /// Whether the per-depth upper bounds were nonincreasing.
    pub upper_monotone: bool,
}

pub const JSR_PRODUCT_CAP: f64 = 1e6;

pub fn jsr_bounds(set: &[DMatrix<f64>], depth: usize) -> Result<JsrBounds> {
    if !(1..=12).contains(&depth) {
        return Err(Error::validation("depth", format!("depth must be in 1..=12, got {depth}")));
    }
    let first = set.first().ok_or_else(|| Error::Usage("matrix set is empty".into()))?;
    for m in set {
        check_square(m)?;
        if m.shape() != first.shape() {
            return Err(Error::Usage("matrices in the set have different shapes".into()));
        }
    }
    let count = (set.len() as f64).powi(depth as i32);
    if count > JSR_PRODUCT_CAP {
        return Err(Error::Resource(format!(
            "{} matrices at depth {depth} give {count:e} products (cap {JSR_PRODUCT_CAP:e})",
            set.len()
        )));
    }
    // per prefix: max ρ^{1/j} and max ‖·‖^{1/j} at every length j
    let per_prefix: Vec<Vec<(f64, f64)>> = (0..set.len())
        .into_par_iter()
        .map(|i| {
            let mut best = vec![(0.0f64, 0.0f64); depth];
            let mut stack = vec![(set[i].clone(), 1usize)];
            while let Some((prod, len)) = stack.pop() {
                let inv = 1.0 / len as f64;
                let rho = spectrum(&prod).map(|s| s.radius).unwrap_or(f64::NAN);
                let entry = &mut best[len - 1];
                entry.0 = entry.0.max(rho.powf(inv));
                entry.1 = entry.1.max(two_norm(&prod).powf(inv));
                if len < depth {
                    for m in set {
                        stack.push((m * &prod, len + 1));
                    }
                }
            }
            best
        })
        .collect();
    let mut by_depth = Vec::with_capacity(depth);
    let mut lower: f64 = 0.0;
    for j in 0..depth {
        let (rho, norm) = per_prefix
            .iter()
            .map(|b| b[j])
            .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        lower = lower.max(rho);
        by_depth.push((lower, norm));
    }
    if by_depth.iter().any(|b| !b.0.is_finite() || !b.1.is_finite()) {
        return Err(Error::Numeric("non-finite product spectrum".into()));
    }
    let upper_monotone = by_depth.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    if !upper_monotone {
        log::warn!("JSR upper bounds are not monotone in depth");
    }
    Ok(JsrBounds {
        depth,
        lower,
        upper: by_depth[depth - 1].1,
        by_depth,
        upper_monotone,
    })
}

/// Spectrum of the generation map at a fixed point, in simplex tangent
/// coordinates. The all-ones direction (eigenvalue 1 of the full map) is
/// factored out, so `rate` is `|λ₂|` of `G`: the local convergence rate.
#[derive(Clone, Debug, Serialize)]
pub struct EaMapSpectrum {
    #[serde(flatten)]
    pub spectrum: SpectrumReport,
    pub rate: f64,
}

pub const FIXED_POINT_RESIDUAL_TOL: f64 = 1e-10;

pub fn ea_map_spectrum(h: &Heuristic, at: &PopulationVector) -> Result<EaMapSpectrum> {
    let residual = dynamics::residual(h, at)?;
    if residual >= FIXED_POINT_RESIDUAL_TOL {
        return Err(Error::Usage(format!(
            "not a fixed point: residual {residual:.3e}"
        )));
    }
    let jac = dynamics::jacobian_at(h, at, JacobianMethod::Analytic);
    let spectrum = spectrum(&jac)?;
    Ok(EaMapSpectrum {
        rate: spectrum.radius,
        spectrum,
    })
}
