use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which discrete formula a [`WeightTable`] serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Fractional integral of order α > 0 (trapezoid-type product rule).
    Integral,
    /// Fractional derivative of order 0 ≤ α < 1 (difference form).
    Derivative01,
    /// Grünwald-Letnikov binomial weights, any order α > 0.
    Grunwald,
}

/// Precomputed convolution weights for one operator order and grid length.
///
/// * `Integral`: `weights[0] = 1` multiplies `z_i`; `weights[j] =
///   (j+1)^α − (j−1)^α` for `j ≥ 1`; `boundary[i] = i^α − (i−1)^α`
///   multiplies `z_0`.
/// * `Derivative01`: `weights[j] = (j+1)^{1−α} − j^{1−α}` multiplies the
///   backward difference `z_{i−j} − z_{i−j−1}`; `boundary[i] = (1−α)/i^α`.
/// * `Grunwald`: `w_0 = 1`, `w_j = w_{j−1}(1 − (α+1)/j)`; no boundary.
///
/// Index 0 of `boundary` is unused (node 0 is handled separately).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    order: T,
    kind: WeightKind,
    weights: Vec<T>,
    boundary: Vec<T>,
}

impl<T: Real> WeightTable<T> {
    pub fn integral(alpha: T, nodes: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(Error::Domain(format!("integral order must be > 0, got {}", alpha)));
        }
        let mut weights = Vec::with_capacity(nodes);
        let mut boundary = Vec::with_capacity(nodes);
        for j in 0..nodes {
            weights.push(match j {
                0 => T::one(),
                1 => T::lit(2.0).powf(alpha),
                _ => symmetric_power_gap(alpha, j),
            });
            boundary.push(match j {
                0 => T::zero(),
                1 => T::one(),
                _ => backward_power_gap(alpha, j),
            });
        }
        Ok(Self { order: alpha, kind: WeightKind::Integral, weights, boundary })
    }

    pub fn derivative01(alpha: T, nodes: usize) -> Result<Self> {
        if !(alpha >= T::zero() && alpha < T::one()) {
            return Err(Error::Domain(format!("derivative order must lie in [0, 1), got {}", alpha)));
        }
        let beta = T::one() - alpha;
        let mut weights = Vec::with_capacity(nodes);
        let mut boundary = Vec::with_capacity(nodes);
        for j in 0..nodes {
            weights.push(if j == 0 { T::one() } else { forward_power_gap(beta, j) });
            boundary.push(if j == 0 { T::zero() } else { beta * T::idx(j).powf(-alpha) });
        }
        Ok(Self { order: alpha, kind: WeightKind::Derivative01, weights, boundary })
    }

    pub fn grunwald(alpha: T, nodes: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= T::zero()) {
            return Err(Error::Domain(format!("Grünwald order must be ≥ 0, got {}", alpha)));
        }
        let mut weights = Vec::with_capacity(nodes);
        let mut w = T::one();
        for j in 0..nodes {
            if j > 0 {
                w *= T::one() - (alpha + T::one()) / T::idx(j);
            }
            weights.push(w);
        }
        Ok(Self { order: alpha, kind: WeightKind::Grunwald, weights, boundary: Vec::new() })
    }

    pub fn order(&self) -> T {
        self.order
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn boundary(&self) -> &[T] {
        &self.boundary
    }

    /// Number of grid nodes the table covers.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

// The gaps below are differences of nearly equal powers for large j; they
// are rewritten through expm1/ln1p so the cancellation happens analytically.
// Integer exponents take the direct route, which is exact for moderate j.

/// (j+1)^a − (j−1)^a, j ≥ 2.
fn symmetric_power_gap<T: Real>(a: T, j: usize) -> T {
    let jj = T::idx(j);
    if a.is_integer() {
        return (jj + T::one()).powf(a) - (jj - T::one()).powf(a);
    }
    let x = jj.recip();
    jj.powf(a) * ((a * x.ln_1p()).exp_m1() - (a * (-x).ln_1p()).exp_m1())
}

/// j^a − (j−1)^a, j ≥ 2.
fn backward_power_gap<T: Real>(a: T, j: usize) -> T {
    let jj = T::idx(j);
    if a.is_integer() {
        return jj.powf(a) - (jj - T::one()).powf(a);
    }
    -jj.powf(a) * (a * (-jj.recip()).ln_1p()).exp_m1()
}

/// (j+1)^a − j^a, j ≥ 1.
fn forward_power_gap<T: Real>(a: T, j: usize) -> T {
    let jj = T::idx(j);
    if a.is_integer() {
        return (jj + T::one()).powf(a) - jj.powf(a);
    }
    jj.powf(a) * (a * jj.recip().ln_1p()).exp_m1()
}
