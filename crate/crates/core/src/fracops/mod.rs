//! Discrete Riemann-Liouville integrals and derivatives on uniform grids.
//!
//! Orders are signed: `mu < 0` is an integral of order `|mu|`, `mu = 0` the
//! identity, `0 < mu < 1` a derivative by the difference formula, and
//! `mu ≥ 1` a derivative by Grünwald-Letnikov weights. The Grünwald route is
//! a valid Riemann-Liouville discretization only for series that start at
//! zero, which every temporary function of the decomposition does.
//!
//! Node `i` of every operator output depends on input nodes `0..=i` only.

mod weights;

pub use weights::{WeightKind, WeightTable};

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::scalar::Real;
use crate::series::SampleSeries;

/// Default bound on `|mu|`; anything larger is treated as misparsed input.
pub const ORDER_CAP: f64 = 10.0;

/// Signed operator order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OperatorOrder<T>(T);

impl<T: Real> OperatorOrder<T> {
    pub fn new(mu: T) -> Result<Self> {
        Self::with_cap(mu, T::lit(ORDER_CAP))
    }

    pub fn with_cap(mu: T, cap: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("operator order must be finite, got {}", mu)));
        }
        if mu.abs() >= cap {
            return Err(Error::Domain(format!("operator order {} exceeds the cap {}", mu, cap)));
        }
        Ok(Self(mu))
    }

    /// Integral of order `alpha > 0`.
    pub fn integral(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::Domain(format!("integral order must be > 0, got {}", alpha)));
        }
        Self::new(-alpha)
    }

    /// Derivative of order `alpha ≥ 0`.
    pub fn derivative(alpha: T) -> Result<Self> {
        if !(alpha >= T::zero()) {
            return Err(Error::Domain(format!("derivative order must be ≥ 0, got {}", alpha)));
        }
        Self::new(alpha)
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// A discrete operator of fixed order, bound to a grid step and a maximum
/// number of nodes. Built once, then evaluated node by node; immutable and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct DiscreteOperator<T> {
    order: T,
    h: T,
    scale: T,
    table: Option<WeightTable<T>>,
}

impl<T: Real> DiscreteOperator<T> {
    pub fn new(order: OperatorOrder<T>, h: T, nodes: usize) -> Result<Self> {
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::Grid(format!("grid step must be positive, got {}", h)));
        }
        let mu = order.value();
        let two = T::lit(2.0);
        let (scale, table) = if mu == T::zero() {
            (T::one(), None)
        } else if mu < T::zero() {
            let alpha = -mu;
            let scale = h.powf(alpha) / (two * gamma(T::one() + alpha)?);
            (scale, Some(WeightTable::integral(alpha, nodes)?))
        } else if mu < T::one() {
            let scale = h.powf(-mu) / gamma(two - mu)?;
            (scale, Some(WeightTable::derivative01(mu, nodes)?))
        } else {
            (h.powf(-mu), Some(WeightTable::grunwald(mu, nodes)?))
        };
        Ok(Self { order: mu, h, scale, table })
    }

    pub fn order(&self) -> T {
        self.order
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Prefactor in front of the bracketed sum. For integrals this is also
    /// the coefficient of `z_i` itself.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn kind(&self) -> Option<WeightKind> {
        self.table.as_ref().map(WeightTable::kind)
    }

    /// Largest number of nodes this operator can evaluate.
    pub fn capacity(&self) -> usize {
        self.table.as_ref().map_or(usize::MAX, WeightTable::len)
    }

    /// Operator output at node `i`, reading `z[0..=i]`.
    pub fn at(&self, z: &[T], i: usize) -> Result<T> {
        if i >= z.len() {
            return Err(Error::Precondition(format!("node {} outside series of length {}", i, z.len())));
        }
        let Some(table) = &self.table else {
            return Ok(z[i]);
        };
        if i >= table.len() {
            return Err(Error::Precondition(format!("node {} beyond operator capacity {}", i, table.len())));
        }
        let w = table.weights();
        match table.kind() {
            WeightKind::Integral => {
                if i == 0 {
                    return Ok(T::zero());
                }
                Ok(self.scale * (z[i] + self.integral_history_unchecked(table, z, i)))
            }
            WeightKind::Derivative01 => {
                if i == 0 {
                    return if z[0] == T::zero() {
                        Ok(T::zero())
                    } else {
                        Err(Error::SingularOrigin { alpha: self.order.as_f64() })
                    };
                }
                let diffs = pairwise_sum(0, i, &|j| (z[i - j] - z[i - j - 1]) * w[j]);
                Ok(self.scale * (table.boundary()[i] * z[0] + diffs))
            }
            WeightKind::Grunwald => {
                if z[0] != T::zero() {
                    return Err(Error::Precondition(format!(
                        "Grünwald-Letnikov derivative of order {} needs z0 = 0, got {}",
                        self.order, z[0]
                    )));
                }
                Ok(self.scale * pairwise_sum(0, i + 1, &|j| w[j] * z[i - j]))
            }
        }
    }

    /// For an integral operator: the bracketed sum at node `i ≥ 1` without
    /// the `z_i` term, reading only `z[0..i]`. The full value is
    /// `scale() · (z_i + history)`.
    pub fn integral_history(&self, z: &[T], i: usize) -> Result<T> {
        match &self.table {
            Some(table) if table.kind() == WeightKind::Integral => {
                if i == 0 || i > z.len() || i >= table.len() {
                    return Err(Error::Precondition(format!("integral history needs 1 ≤ i ≤ {}", z.len())));
                }
                Ok(self.integral_history_unchecked(table, z, i))
            }
            _ => Err(Error::Precondition("integral history requested from a non-integral operator".into())),
        }
    }

    fn integral_history_unchecked(&self, table: &WeightTable<T>, z: &[T], i: usize) -> T {
        let w = table.weights();
        let interior = pairwise_sum(1, i, &|j| w[j] * z[i - j]);
        z[0] * table.boundary()[i] + interior
    }

    /// Applies the operator at every node of `z`.
    pub fn apply(&self, z: &SampleSeries<T>) -> Result<SampleSeries<T>> {
        z.check_same_step(&SampleSeries::new(self.h, vec![T::zero()])?)?;
        let values = z.values();
        let out = (0..values.len()).map(|i| self.at(values, i)).collect::<Result<Vec<_>>>()?;
        SampleSeries::new(z.h(), out)
    }
}

/// Fractional integral of order `alpha > 0` at node `i`.
pub fn frac_integral<T: Real>(z: &SampleSeries<T>, alpha: T, i: usize) -> Result<T> {
    check_node(z, i)?;
    DiscreteOperator::new(OperatorOrder::integral(alpha)?, z.h(), i + 1)?.at(z.values(), i)
}

/// Fractional derivative of order `0 ≤ alpha < 1` at node `i`.
pub fn frac_derivative01<T: Real>(z: &SampleSeries<T>, alpha: T, i: usize) -> Result<T> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("derivative order must lie in [0, 1), got {}", alpha)));
    }
    check_node(z, i)?;
    DiscreteOperator::new(OperatorOrder::new(alpha)?, z.h(), i + 1)?.at(z.values(), i)
}

/// Fractional derivative of order `alpha ≥ 1` at node `i`, for series with
/// `z_0 = 0`.
pub fn frac_derivative_general<T: Real>(z: &SampleSeries<T>, alpha: T, i: usize) -> Result<T> {
    if !(alpha >= T::one()) {
        return Err(Error::Domain(format!("general derivative needs order ≥ 1, got {}", alpha)));
    }
    check_node(z, i)?;
    DiscreteOperator::new(OperatorOrder::new(alpha)?, z.h(), i + 1)?.at(z.values(), i)
}

/// Applies the operator of signed order `mu` at every node of `z`.
pub fn apply_operator<T: Real>(z: &SampleSeries<T>, mu: OperatorOrder<T>) -> Result<SampleSeries<T>> {
    DiscreteOperator::new(mu, z.h(), z.len())?.apply(z)
}

fn check_node<T: Real>(z: &SampleSeries<T>, i: usize) -> Result<()> {
    if i >= z.len() {
        return Err(Error::Precondition(format!("node {} outside series of length {}", i, z.len())));
    }
    Ok(())
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation of `term(k)` for `k` in `start..end`.
pub(crate) fn pairwise_sum<T: Real, F: Fn(usize) -> T>(start: usize, end: usize, term: &F) -> T {
    let n = end.saturating_sub(start);
    if n <= PAIRWISE_BLOCK {
        let mut acc = T::zero();
        for k in start..end {
            acc += term(k);
        }
        acc
    } else {
        let mid = start + n / 2;
        pairwise_sum(start, mid, term) + pairwise_sum(mid, end, term)
    }
}
