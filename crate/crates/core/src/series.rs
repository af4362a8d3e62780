//! Uniformly sampled functions on `t_i = i·h`, starting at the origin.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values of one function on the grid `t_i = i·h`, `i = 0, 1, …`.
///
/// `values[0]` always belongs to `t = 0`; the lower terminal of every
/// operator is the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries<T> {
    h: T,
    values: Vec<T>,
}

impl<T: Real> SampleSeries<T> {
    pub fn new(h: T, values: Vec<T>) -> Result<Self> {
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::Grid(format!("grid step must be positive and finite, got {}", h)));
        }
        if values.is_empty() {
            return Err(Error::Grid("a sample series needs at least one node".into()));
        }
        Ok(Self { h, values })
    }

    /// Samples `f(t_i)` on `nodes` grid points.
    pub fn from_fn(h: T, nodes: usize, mut f: impl FnMut(T) -> T) -> Result<Self> {
        let values = (0..nodes).map(|i| f(T::idx(i) * h)).collect();
        Self::new(h, values)
    }

    pub fn zeros(h: T, nodes: usize) -> Result<Self> {
        Self::new(h, vec![T::zero(); nodes])
    }

    #[inline]
    pub fn h(&self) -> T {
        self.h
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        T::idx(i) * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Keeps the first `nodes` samples.
    pub fn truncated(&self, nodes: usize) -> Result<Self> {
        Self::new(self.h, self.values[..nodes.min(self.len())].to_vec())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { h: self.h, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(Self { h: self.h, values })
    }

    /// Largest absolute sample.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance between two series on the same grid, over the
    /// nodes both contain.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        self.check_same_step(other)?;
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// Sup-norm distance on the nodes the two grids share. One step must be
    /// an integer multiple of the other.
    pub fn sup_distance_common(&self, other: &Self) -> Result<T> {
        let (coarse, fine) = if self.h >= other.h { (self, other) } else { (other, self) };
        let stride = stride_between(coarse.h, fine.h)?;
        let mut sup = T::zero();
        for (i, &c) in coarse.values.iter().enumerate() {
            match fine.values.get(i * stride) {
                Some(&f) => sup = sup.max((c - f).abs()),
                None => break,
            }
        }
        Ok(sup)
    }

    pub fn check_same_step(&self, other: &Self) -> Result<()> {
        let tol = T::lit(1e-12) * self.h.max(other.h);
        if (self.h - other.h).abs() > tol {
            return Err(Error::Grid(format!("steps differ: {} vs {}", self.h, other.h)));
        }
        Ok(())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        self.check_same_step(other)?;
        if self.len() != other.len() {
            return Err(Error::Grid(format!("lengths differ: {} vs {}", self.len(), other.len())));
        }
        Ok(())
    }
}

/// Integer ratio `coarse / fine` between two grid steps.
pub fn stride_between<T: Real>(coarse: T, fine: T) -> Result<usize> {
    let ratio = coarse / fine;
    let k = ratio.round();
    if k < T::one() || (ratio - k).abs() > T::lit(1e-9) * k {
        return Err(Error::Grid(format!("step {} is not an integer multiple of {}", coarse, fine)));
    }
    Ok(k.to_usize().expect("positive stride"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(SampleSeries::new(0.0, vec![1.0]).is_err());
        assert!(SampleSeries::new(-0.1, vec![1.0]).is_err());
        assert!(SampleSeries::<f64>::new(0.1, vec![]).is_err());
    }

    #[test]
    fn common_node_distance() {
        let coarse = SampleSeries::from_fn(0.2_f64, 6, |t| t).unwrap();
        let fine = SampleSeries::from_fn(0.1, 11, |t| t + if t > 0.45 { 1.0 } else { 0.0 }).unwrap();
        // Only even fine nodes are compared; the jump shows up from t = 0.6.
        assert!((coarse.sup_distance_common(&fine).unwrap() - 1.0).abs() < 1e-12);
        assert!((fine.sup_distance_common(&coarse).unwrap() - 1.0).abs() < 1e-12);
        let odd = SampleSeries::from_fn(0.15, 4, |t| t).unwrap();
        assert!(coarse.sup_distance_common(&odd).is_err());
    }

    #[test]
    fn stride() {
        assert_eq!(stride_between(0.04, 0.001).unwrap(), 40);
        assert_eq!(stride_between(0.01, 0.01).unwrap(), 1);
        assert!(stride_between(0.01, 0.003).is_err());
    }
}
