use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `‖p‖₁ = 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point of the simplex: genotype frequencies of an infinite population.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PopulationVector(Vec<f64>);

impl PopulationVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Usage("population vector is empty".into()));
        }
        if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::Usage(format!("entry {i} of population vector is {x}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Usage(format!("population vector sums to {total}, not 1")));
        }
        Ok(PopulationVector(p))
    }

    /// Scales a nonnegative weight vector onto the simplex.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Usage("weights must have a positive finite sum".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        PopulationVector(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        PopulationVector(p)
    }

    /// Projects a numerically perturbed vector back onto the simplex.
    /// Entries in `[-1e-12, 0)` are clamped to zero (logged when below
    /// `-1e-15`); anything more negative, or non-finite, is an error.
    pub fn settle(mut p: Vec<f64>) -> Result<Self> {
        for (i, x) in p.iter_mut().enumerate() {
            if !x.is_finite() || *x < -SIMPLEX_TOL {
                return Err(Error::Numeric(format!("entry {i} left the simplex: {x}")));
            }
            if *x < 0.0 {
                if *x < -1e-15 {
                    log::warn!("clamping entry {i} = {x} to zero");
                }
                *x = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Numeric(format!("population mass drifted to {total}")));
        }
        p.iter_mut().for_each(|x| *x /= total);
        Ok(PopulationVector(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn linf_distance(&self, other: &[f64]) -> f64 {
        linf(&self.0, other)
    }
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PopulationVector::new(vec![0.5, 0.5]).is_ok());
        assert!(PopulationVector::new(vec![0.5, 0.6]).is_err());
        assert!(PopulationVector::new(vec![1.5, -0.5]).is_err());
        assert!(PopulationVector::new(vec![]).is_err());
        assert_eq!(PopulationVector::normalized(vec![1.0, 3.0]).unwrap().as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn settle_clamps_tiny_negatives() {
        let p = PopulationVector::settle(vec![-1e-14, 0.5, 0.5 + 1e-14]).unwrap();
        assert_eq!(p.as_slice()[0], 0.0);
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(PopulationVector::settle(vec![-1e-9, 1.0]).is_err());
        assert!(PopulationVector::settle(vec![f64::NAN, 1.0]).is_err());
    }
}
