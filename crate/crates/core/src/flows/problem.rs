//! Objectives `f: Rⁿ → R` and constraint maps `H: Rⁿ → Rᵐ` for the flows,
//! with polynomial implementations and named presets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FD_STEP: f64 = 1e-6;

fn fd_step(x: f64) -> f64 {
    FD_STEP * x.abs().max(1.0)
}

pub trait SmoothObjective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;

    /// Central differences unless overridden.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        fd_gradient(self, x)
    }
}

pub fn fd_gradient<O: SmoothObjective + ?Sized>(obj: &O, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let h = fd_step(x[i]);
            let mut hi = x.to_vec();
            let mut lo = x.to_vec();
            hi[i] += h;
            lo[i] -= h;
            (obj.value(&hi) - obj.value(&lo)) / (2.0 * h)
        })
        .collect()
}

/// Hessian by central differences of the gradient, symmetrized.
pub fn fd_hessian<O: SmoothObjective + ?Sized>(obj: &O, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = fd_step(x[j]);
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[j] += h;
        lo[j] -= h;
        let (gh, gl) = (obj.gradient(&hi), obj.gradient(&lo));
        for i in 0..n {
            hess[(i, j)] = (gh[i] - gl[i]) / (2.0 * h);
        }
    }
    (&hess + hess.transpose()) * 0.5
}

pub trait ConstraintMap: Sync {
    fn dim(&self) -> usize;
    fn count(&self) -> usize;
    fn value(&self, x: &[f64]) -> Vec<f64>;

    /// `m × n` Jacobian; central differences unless overridden.
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        fd_jacobian(self, x)
    }
}

pub fn fd_jacobian<C: ConstraintMap + ?Sized>(con: &C, x: &[f64]) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(con.count(), x.len());
    for j in 0..x.len() {
        let h = fd_step(x[j]);
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[j] += h;
        lo[j] -= h;
        let (vh, vl) = (con.value(&hi), con.value(&lo));
        for i in 0..con.count() {
            jac[(i, j)] = (vh[i] - vl[i]) / (2.0 * h);
        }
    }
    jac
}

/// One monomial `coef · Π x_i^{powers_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Term>,
}

/// Exponent vectors of total degree `≤ degree` in `dim` variables, ordered
/// by degree, then lexicographically with higher powers of earlier
/// variables first. This is the order of dense coefficient lists.
pub fn dense_monomials(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn fill(rest: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for p in (0..=rest).rev() {
            prefix.push(p);
            fill(rest - p, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        out.push(Vec::new());
        return out;
    }
    for total in 0..=degree {
        fill(total, dim, &mut Vec::new(), &mut out);
    }
    out
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("polynomial.dim", "must be at least 1"));
        }
        for (k, t) in terms.iter().enumerate() {
            if t.powers.len() != dim {
                return Err(Error::validation(
                    format!("polynomial.terms[{k}].powers"),
                    format!("expected {dim} exponents, got {}", t.powers.len()),
                ));
            }
            if !t.coef.is_finite() {
                return Err(Error::validation(format!("polynomial.terms[{k}].coef"), "must be finite"));
            }
        }
        Ok(Polynomial { dim, terms })
    }

    /// Coefficients listed in [`dense_monomials`] order.
    pub fn dense(dim: usize, degree: u32, coefficients: &[f64]) -> Result<Self> {
        let monomials = dense_monomials(dim, degree);
        if monomials.len() != coefficients.len() {
            return Err(Error::validation(
                "polynomial.coefficients",
                format!(
                    "degree {degree} in {dim} variables needs {} coefficients, got {}",
                    monomials.len(),
                    coefficients.len()
                ),
            ));
        }
        let terms = monomials
            .into_iter()
            .zip(coefficients)
            .filter(|(_, c)| **c != 0.0)
            .map(|(powers, &coef)| Term { coef, powers })
            .collect();
        Polynomial::new(dim, terms)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial {
            dim,
            terms: vec![Term {
                coef: c,
                powers: vec![0; dim],
            }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coef
                    * t.powers
                        .iter()
                        .zip(x)
                        .map(|(&p, &v)| v.powi(p as i32))
                        .product::<f64>()
            })
            .sum()
    }

    fn partial(&self, x: &[f64], i: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.powers[i] > 0)
            .map(|t| {
                let mut prod = t.coef * t.powers[i] as f64;
                for (j, (&p, &v)) in t.powers.iter().zip(x).enumerate() {
                    let e = if j == i { p - 1 } else { p };
                    prod *= v.powi(e as i32);
                }
                prod
            })
            .sum()
    }
}

impl SmoothObjective for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.partial(x, i)).collect()
    }
}

/// A constraint map with one polynomial per component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialMap {
    dim: usize,
    components: Vec<Polynomial>,
}

impl PolynomialMap {
    pub fn new(dim: usize, components: Vec<Polynomial>) -> Result<Self> {
        if components.iter().any(|c| c.dim != dim) {
            return Err(Error::validation("constraint", "component dimensions disagree"));
        }
        Ok(PolynomialMap { dim, components })
    }

    /// No constraints: `m = 0`.
    pub fn empty(dim: usize) -> Self {
        PolynomialMap {
            dim,
            components: Vec::new(),
        }
    }
}

impl ConstraintMap for PolynomialMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn count(&self) -> usize {
        self.components.len()
    }

    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.components.len(), self.dim, |i, j| self.components[i].partial(x, j))
    }
}

fn unit_powers(dim: usize, i: usize, p: u32) -> Vec<u32> {
    let mut v = vec![0; dim];
    v[i] = p;
    v
}

/// `(x_1² − 1)² + Σ_{i>1} x_i²`.
pub fn double_well(dim: usize) -> Result<Polynomial> {
    let mut terms = vec![
        Term { coef: 1.0, powers: unit_powers(dim.max(1), 0, 4) },
        Term { coef: -2.0, powers: unit_powers(dim.max(1), 0, 2) },
        Term { coef: 1.0, powers: vec![0; dim.max(1)] },
    ];
    for i in 1..dim {
        terms.push(Term { coef: 1.0, powers: unit_powers(dim, i, 2) });
    }
    Polynomial::new(dim, terms)
}

/// `½ Σ c_i x_i²`.
pub fn diagonal_quadratic(coefficients: &[f64]) -> Result<Polynomial> {
    let dim = coefficients.len();
    let terms = coefficients
        .iter()
        .enumerate()
        .map(|(i, &c)| Term { coef: 0.5 * c, powers: unit_powers(dim, i, 2) })
        .collect();
    Polynomial::new(dim, terms)
}

/// `Σ c_i x_i`.
pub fn linear(coefficients: &[f64]) -> Result<Polynomial> {
    let dim = coefficients.len();
    let terms = coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, &c)| Term { coef: c, powers: unit_powers(dim, i, 1) })
        .collect();
    Polynomial::new(dim, terms)
}

/// `‖x‖² − r²` in `dim` variables (the circle when `dim = 2`).
pub fn sphere(dim: usize, radius: f64) -> Result<PolynomialMap> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::validation("constraint.radius", "must be positive"));
    }
    let mut terms: Vec<Term> = (0..dim)
        .map(|i| Term { coef: 1.0, powers: unit_powers(dim, i, 2) })
        .collect();
    terms.push(Term { coef: -radius * radius, powers: vec![0; dim] });
    PolynomialMap::new(dim, vec![Polynomial::new(dim, terms)?])
}

/// `A x − b`, one component per row of `a`.
pub fn affine(a: &[Vec<f64>], b: &[f64]) -> Result<PolynomialMap> {
    let dim = a.first().map_or(0, Vec::len);
    if a.len() != b.len() || a.iter().any(|row| row.len() != dim) || dim == 0 {
        return Err(Error::validation("constraint.a", "rows of A must share one length and match b"));
    }
    let components = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut p = linear(row)?;
            p.terms.push(Term { coef: -bi, powers: vec![0; dim] });
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    PolynomialMap::new(dim, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_order() {
        assert_eq!(
            dense_monomials(2, 2),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        // (x² − 1)² = x⁴ − 2x² + 1
        let p = Polynomial::dense(1, 4, &[1.0, 0.0, -2.0, 0.0, 1.0]).unwrap();
        let w = double_well(1).unwrap();
        for x in [-1.5, -0.3, 0.0, 0.8, 2.0] {
            assert_eq!(p.value(&[x]), w.value(&[x]));
        }
        assert!(Polynomial::dense(2, 1, &[1.0]).is_err());
    }

    #[test]
    fn double_well_values() {
        let f = double_well(1).unwrap();
        assert_eq!(f.value(&[0.0]), 1.0);
        assert_eq!(f.value(&[1.0]), 0.0);
        let x = [0.3];
        assert!((f.gradient(&x)[0] - 4.0 * 0.3 * (0.09 - 1.0)).abs() < 1e-14);
        let f2 = double_well(2).unwrap();
        assert!((f2.value(&[0.0, 2.0]) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn analytic_matches_differences() {
        let f = Polynomial::new(
            3,
            vec![
                Term { coef: 1.5, powers: vec![2, 1, 0] },
                Term { coef: -0.5, powers: vec![0, 3, 1] },
                Term { coef: 2.0, powers: vec![1, 0, 0] },
            ],
        )
        .unwrap();
        let x = [0.7, -1.2, 0.4];
        let (g, fd) = (f.gradient(&x), fd_gradient(&f, &x));
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0));
        }
        let h = affine(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]], &[1.0, 0.0]).unwrap();
        let (j, fdj) = (h.jacobian(&x), fd_jacobian(&h, &x));
        assert!((&j - &fdj).norm() < 1e-8);
        assert_eq!(h.value(&x), vec![0.7 - 2.4 - 1.0, -1.2 - 0.4]);
    }

    #[test]
    fn sphere_and_hessian() {
        let h = sphere(2, 1.0).unwrap();
        assert_eq!(h.value(&[0.6, 0.8]), vec![0.0]);
        assert_eq!(h.jacobian(&[0.6, 0.8]), DMatrix::from_row_slice(1, 2, &[1.2, 1.6]));
        let f = diagonal_quadratic(&[1.0, 2.0, 3.0]).unwrap();
        let hess = fd_hessian(&f, &[0.1, 0.2, 0.3]);
        assert!((hess - DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]))).amax() < 1e-6);
        assert!(sphere(2, 0.0).is_err());
    }
}
