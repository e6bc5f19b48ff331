//! Probability mass functions and credal sets on a finite state space.
//!
//! States are `0..num_states`. A credal set is stored by its finitely many
//! extreme points; its lower expectation is the minimum of the linear
//! expectations over those points, and the upper expectation is obtained by
//! conjugacy, `upper(f) = -lower(-f)`.

use crate::error::Error;
use crate::Result;

/// Tolerance for validating probability vectors.
pub const PMF_TOL: f64 = 1e-12;

/// A probability mass function on `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    weights: Vec<f64>,
}

impl Pmf {
    /// Validates and wraps a probability vector.
    ///
    /// Entries must be finite and in `[-1e-12, 1 + 1e-12]`, and the sum must
    /// be within `1e-12` of one. The vector is stored as given.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidPmf(format!("entry {i} is {w}")));
            }
            if !(-PMF_TOL..=1.0 + PMF_TOL).contains(&w) {
                return Err(Error::InvalidPmf(format!("entry {i} is {w}")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > PMF_TOL {
            return Err(Error::InvalidPmf(format!("weights sum to {sum}")));
        }
        Ok(Pmf { weights })
    }

    /// The pmf putting all mass on `state`.
    pub fn degenerate(num_states: usize, state: usize) -> Result<Self> {
        if state >= num_states {
            return Err(Error::InvalidArgument(format!(
                "degenerate state {state} out of range for {num_states} states"
            )));
        }
        let mut weights = vec![0.0; num_states];
        weights[state] = 1.0;
        Ok(Pmf { weights })
    }

    /// The uniform pmf on `num_states` states.
    pub fn uniform(num_states: usize) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        Ok(Pmf {
            weights: vec![1.0 / num_states as f64; num_states],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Expectation of `f` under this pmf.
    pub fn expectation(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: f.len(),
            });
        }
        Ok(self.weights.iter().zip(f).map(|(w, v)| w * v).sum())
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// A credal set given by finitely many extreme points on a common state space.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalSet {
    num_states: usize,
    extremes: Vec<Pmf>,
}

impl CredalSet {
    /// Wraps a non-empty list of pmfs on the same state space.
    ///
    /// The points are stored as given; they are treated as spanning the set
    /// and need not be checked for redundancy.
    pub fn new(extremes: Vec<Pmf>) -> Result<Self> {
        let first = extremes
            .first()
            .ok_or_else(|| Error::InvalidArgument("credal set needs at least one pmf".into()))?;
        let num_states = first.len();
        for p in &extremes {
            if p.len() != num_states {
                return Err(Error::DimensionMismatch {
                    expected: num_states,
                    got: p.len(),
                });
            }
        }
        Ok(CredalSet {
            num_states,
            extremes,
        })
    }

    /// The vacuous credal set: every degenerate pmf, hence every distribution.
    pub fn vacuous(num_states: usize) -> Result<Self> {
        let extremes = (0..num_states)
            .map(|x| Pmf::degenerate(num_states, x))
            .collect::<Result<Vec<_>>>()?;
        CredalSet::new(extremes)
    }

    /// The singleton credal set `{p}`.
    pub fn precise(p: Pmf) -> Self {
        CredalSet {
            num_states: p.len(),
            extremes: vec![p],
        }
    }

    /// The linear-vacuous mixture around `p`: extremes
    /// `(1 - epsilon) p + epsilon delta_x` for every state `x`.
    pub fn linear_vacuous(p: &Pmf, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "contamination weight {epsilon} outside [0, 1]"
            )));
        }
        let n = p.len();
        let extremes = (0..n)
            .map(|x| {
                let mut w: Vec<f64> = p.weights().iter().map(|&v| (1.0 - epsilon) * v).collect();
                w[x] += epsilon;
                Pmf::new(w)
            })
            .collect::<Result<Vec<_>>>()?;
        CredalSet::new(extremes)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn extremes(&self) -> &[Pmf] {
        &self.extremes
    }

    /// Whether the set has a single extreme point.
    pub fn is_precise(&self) -> bool {
        self.extremes.len() == 1
    }

    /// Lower expectation: the minimum of `E_p[f]` over the extreme points.
    pub fn lower_expectation(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.num_states {
            return Err(Error::DimensionMismatch {
                expected: self.num_states,
                got: f.len(),
            });
        }
        let mut lo = f64::INFINITY;
        for p in &self.extremes {
            let e: f64 = p.weights().iter().zip(f).map(|(w, v)| w * v).sum();
            if e < lo {
                lo = e;
            }
        }
        Ok(lo)
    }

    /// Upper expectation, by conjugacy `-lower(-f)`.
    pub fn upper_expectation(&self, f: &[f64]) -> Result<f64> {
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        Ok(-self.lower_expectation(&neg)?)
    }

    /// An extreme point attaining the lower expectation of `f`.
    pub fn argmin_extreme(&self, f: &[f64]) -> Result<&Pmf> {
        if f.len() != self.num_states {
            return Err(Error::DimensionMismatch {
                expected: self.num_states,
                got: f.len(),
            });
        }
        let mut best = &self.extremes[0];
        let mut lo = f64::INFINITY;
        for p in &self.extremes {
            let e: f64 = p.weights().iter().zip(f).map(|(w, v)| w * v).sum();
            if e < lo {
                lo = e;
                best = p;
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> CredalSet {
        CredalSet::new(vec![
            Pmf::new(vec![0.3, 0.7]).unwrap(),
            Pmf::new(vec![0.6, 0.4]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_bad_weight_vectors() {
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn two_point_indicator_bounds() {
        let k = two_point();
        let f = [1.0, 0.0];
        assert_eq!(k.lower_expectation(&f).unwrap(), 0.3);
        assert_eq!(k.upper_expectation(&f).unwrap(), 0.6);
    }

    #[test]
    fn vacuous_is_min_max() {
        let k = CredalSet::vacuous(3).unwrap();
        let f = [2.0, -1.0, 0.5];
        assert_eq!(k.lower_expectation(&f).unwrap(), -1.0);
        assert_eq!(k.upper_expectation(&f).unwrap(), 2.0);
    }

    #[test]
    fn precise_is_linear() {
        let p = Pmf::new(vec![0.25, 0.75]).unwrap();
        let k = CredalSet::precise(p.clone());
        let f = [4.0, 0.0];
        let e = p.expectation(&f).unwrap();
        assert_eq!(k.lower_expectation(&f).unwrap(), e);
        assert_eq!(k.upper_expectation(&f).unwrap(), e);
        assert!(k.is_precise());
    }

    #[test]
    fn linear_vacuous_mixes_toward_extremes() {
        let p = Pmf::new(vec![0.5, 0.5]).unwrap();
        let k = CredalSet::linear_vacuous(&p, 0.2).unwrap();
        let f = [1.0, 0.0];
        assert!((k.lower_expectation(&f).unwrap() - 0.4).abs() < 1e-15);
        assert!((k.upper_expectation(&f).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn conjugacy_is_exact_in_floating_point() {
        let k = two_point();
        for f in [[1.0, 0.0], [0.125, -3.5], [1e9, 1e-9]] {
            let neg: Vec<f64> = f.iter().map(|v| -v).collect();
            assert_eq!(
                k.upper_expectation(&f).unwrap(),
                -k.lower_expectation(&neg).unwrap()
            );
        }
    }

    #[test]
    fn argmin_attains_lower() {
        let k = two_point();
        let f = [1.0, 0.0];
        let p = k.argmin_extreme(&f).unwrap();
        assert_eq!(p.expectation(&f).unwrap(), k.lower_expectation(&f).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let k = two_point();
        assert!(k.lower_expectation(&[1.0, 2.0, 3.0]).is_err());
    }
}
