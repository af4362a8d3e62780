//! Decomposition of a fractional ODE into one integer-order ODE for a
//! temporary function plus Abel-type relations that recover `y`.
//!
//! With `m₁` the integer order of the leading term and `ν = m₁ − α₁`, the
//! temporary function is `z₁ = I^ν y` and
//!
//! ```text
//! D^{m₁} z₁ = ( f − Σ aᵢ D^{μᵢ} z₁ − g(y) ) / a₁,    μᵢ = ν + αᵢ
//! y         = Σ b_k t^k / k! + D^ν z₁
//! ```
//!
//! Every trailing term is folded into a single fractional derivative of `z₁`
//! rather than kept as its own temporary function. When the leading `r ≥ 2`
//! terms share `m₁` (dependent subclass) they are absorbed into
//!
//! ```text
//! w = z₁ + Σ_{j=2..r} (a_j/a₁) I^{α₁−α_j} z₁
//! ```
//!
//! the ODE is integrated for `w`, and `z₁` is recovered from `w` at each node
//! either by a truncated binomial (Babenko) series or by solving the discrete
//! Volterra relation directly. All temporary functions start at zero.

use crate::error::{Error, Result};
use crate::fracops::{DiscreteOperator, OperatorOrder};
use crate::problem::ProblemSpec;
use crate::scalar::Real;
use crate::series::SampleSeries;

/// Shape of the equation as far as the decomposition is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subclass {
    /// A single derivative term.
    OneTerm,
    /// Several terms, the leading one alone at its integer order.
    Independent,
    /// The leading `r ≥ 2` terms share the integer order `m₁`.
    Dependent { r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub subclass: Subclass,
    /// `mᵢ` per term, in term order.
    pub integer_orders: Vec<usize>,
}

/// Classifies the problem. Fractional orders get `mᵢ = ⌈αᵢ⌉`, whole orders
/// `mᵢ = αᵢ`.
pub fn classify<T: Real>(p: &ProblemSpec<T>) -> Classification {
    let integer_orders: Vec<usize> = p.terms().iter().map(|t| t.integer_order()).collect();
    let subclass = if integer_orders.len() == 1 {
        Subclass::OneTerm
    } else {
        let r = integer_orders.iter().take_while(|&&m| m == integer_orders[0]).count();
        if r >= 2 {
            Subclass::Dependent { r }
        } else {
            Subclass::Independent
        }
    };
    Classification { subclass, integer_orders }
}

/// How `z₁` is recovered from `w` in the dependent subclass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Inversion {
    /// Truncated binomial series with `terms` correction terms. Only defined
    /// for two absorbed terms (`r = 2`). A last-term sup-norm above
    /// `tail_tolerance` is reported as a convergence warning.
    Babenko { terms: usize, tail_tolerance: f64 },
    /// Node-by-node solution of the discrete relation.
    #[default]
    DirectVolterra,
}

impl Inversion {
    pub const DEFAULT_BABENKO_TERMS: usize = 30;
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;

    pub fn babenko(terms: usize) -> Self {
        Inversion::Babenko { terms, tail_tolerance: Self::DEFAULT_TAIL_TOLERANCE }
    }
}

/// Trailing term folded into the `z₁` equation: `a · D^{order} z₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsLink<T> {
    pub coefficient: T,
    pub order: T,
}

/// Absorbed term of `w`: `ratio · I^{integral_order} z₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WLink<T> {
    pub ratio: T,
    pub integral_order: T,
}

/// Solver-ready form of a [`ProblemSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedSystem<T> {
    /// Order of the integer ODE (Euler state dimension).
    pub m1: usize,
    pub a1: T,
    pub alpha1: T,
    pub subclass: Subclass,
    pub integer_orders: Vec<usize>,
    pub rhs_links: Vec<RhsLink<T>>,
    /// Non-empty only for the dependent subclass.
    pub w_links: Vec<WLink<T>>,
    /// `ν = m₁ − α₁ ∈ [0, 1)`.
    pub reconstruction_order: T,
    /// `b₀ … b_{m₁−1}`.
    pub ic_poly: Vec<T>,
    pub inversion: Inversion,
}

/// Builds the decomposed system with the default inversion.
pub fn build<T: Real>(p: &ProblemSpec<T>) -> Result<DecomposedSystem<T>> {
    let Classification { subclass, integer_orders } = classify(p);
    let terms = p.terms();
    let lead = terms[0];
    if lead.order == T::zero() {
        return Err(Error::Unsupported("leading order 0 leaves no differential equation to integrate".into()));
    }
    let m1 = integer_orders[0];
    let nu = T::idx(m1) - lead.order;
    let absorbed = match subclass {
        Subclass::Dependent { r } => r,
        _ => 1,
    };
    let w_links = terms[1..absorbed]
        .iter()
        .map(|t| WLink { ratio: t.coefficient / lead.coefficient, integral_order: lead.order - t.order })
        .collect();
    let rhs_links: Vec<RhsLink<T>> =
        terms[absorbed..].iter().map(|t| RhsLink { coefficient: t.coefficient, order: nu + t.order }).collect();
    debug_assert!(nu >= T::zero() && nu < T::one());
    debug_assert!(rhs_links.iter().all(|l| l.order < T::idx(m1)));
    Ok(DecomposedSystem {
        m1,
        a1: lead.coefficient,
        alpha1: lead.order,
        subclass,
        integer_orders,
        rhs_links,
        w_links,
        reconstruction_order: nu,
        ic_poly: p.initial_conditions().to_vec(),
        inversion: Inversion::default(),
    })
}

impl<T: Real> DecomposedSystem<T> {
    pub fn with_inversion(mut self, inversion: Inversion) -> Result<Self> {
        if let Inversion::Babenko { terms, tail_tolerance } = inversion {
            if terms == 0 {
                return Err(Error::InvalidConfig("Babenko inversion needs at least one term".into()));
            }
            if !(tail_tolerance > 0.0) {
                return Err(Error::InvalidConfig("Babenko tail tolerance must be positive".into()));
            }
            if self.w_links.len() > 1 {
                return Err(Error::Unsupported(format!(
                    "Babenko inversion covers two absorbed orders; this problem absorbs {} (use direct inversion)",
                    self.w_links.len() + 1
                )));
            }
        }
        self.inversion = inversion;
        Ok(self)
    }

    pub fn is_dependent(&self) -> bool {
        matches!(self.subclass, Subclass::Dependent { .. })
    }

    /// `Σ_{j≥k} b_j t^{j−k}/(j−k)!`, the k-th derivative of the
    /// initial-condition polynomial.
    pub fn ic_derivative(&self, k: usize, t: T) -> T {
        ic_poly_derivative(&self.ic_poly, k, t)
    }
}

pub(crate) fn ic_poly_derivative<T: Real>(ics: &[T], k: usize, t: T) -> T {
    // Horner on c_n = b_{k+n}/n!, from the top.
    let mut acc = T::zero();
    for n in (0..ics.len().saturating_sub(k)).rev() {
        acc = acc * t + ics[k + n] / factorial::<T>(n);
    }
    acc
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::idx(k))
}

/// Result of [`babenko_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct BabenkoInversion<T> {
    pub z1: SampleSeries<T>,
    /// Sup-norm of the last retained series term.
    pub tail: T,
}

impl<T: Real> BabenkoInversion<T> {
    pub fn converged(&self, tolerance: T) -> bool {
        self.tail <= tolerance
    }
}

/// Inverts `w = z₁ + ratio · I^δ z₁` by the truncated series
/// `z₁ = Σ_{j=0..K} (−ratio)^j I^{δj} w`, each `I^{δj}` one discrete
/// integral of order `δj`.
pub fn babenko_invert<T: Real>(w: &SampleSeries<T>, ratio: T, delta: T, terms: usize) -> Result<BabenkoInversion<T>> {
    let inverter = BabenkoInverter::new(ratio, delta, terms, w.h(), w.len())?;
    let mut z = Vec::with_capacity(w.len());
    let mut tail = T::zero();
    for i in 0..w.len() {
        let (zi, last) = inverter.invert_at(w.values(), i)?;
        z.push(zi);
        tail = tail.max(last.abs());
    }
    Ok(BabenkoInversion { z1: SampleSeries::new(w.h(), z)?, tail })
}

/// Solves the discrete relation `w_i = z₁ᵢ + Σ_j ratio_j (I^{δ_j} z₁)ᵢ` for
/// `z₁ᵢ`, given `z₁` at nodes `0..i` in `z1_history`.
pub fn volterra_direct_invert<T: Real>(
    w: &SampleSeries<T>,
    w_links: &[WLink<T>],
    i: usize,
    z1_history: &[T],
) -> Result<T> {
    if i >= w.len() {
        return Err(Error::Precondition(format!("node {} outside w series of length {}", i, w.len())));
    }
    if z1_history.len() < i {
        return Err(Error::Precondition(format!(
            "z1 history holds {} nodes, node {} needs {}",
            z1_history.len(),
            i,
            i
        )));
    }
    VolterraInverter::new(w_links, w.h(), i + 1)?.invert_at(w.values()[i], &z1_history[..i], i)
}

/// Node-wise Babenko inversion with prebuilt integral operators.
#[derive(Debug, Clone)]
pub(crate) struct BabenkoInverter<T> {
    ratio: T,
    ops: Vec<DiscreteOperator<T>>,
}

impl<T: Real> BabenkoInverter<T> {
    pub(crate) fn new(ratio: T, delta: T, terms: usize, h: T, nodes: usize) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::Domain(format!("Babenko order gap must be > 0, got {}", delta)));
        }
        if terms == 0 {
            return Err(Error::Domain("Babenko series needs K ≥ 1".into()));
        }
        // Composite orders δ·j legitimately exceed the user-facing order cap.
        let ops = (1..=terms)
            .map(|j| {
                let order = OperatorOrder::with_cap(-(delta * T::idx(j)), T::infinity())?;
                DiscreteOperator::new(order, h, nodes)
            })
            .collect::<Result<_>>()?;
        Ok(Self { ratio, ops })
    }

    /// `(z₁ᵢ, last term)`, reading `w[0..=i]`.
    pub(crate) fn invert_at(&self, w: &[T], i: usize) -> Result<(T, T)> {
        let mut z = w[i];
        let mut coef = T::one();
        let mut last = w[i];
        if self.ratio == T::zero() {
            return Ok((z, T::zero()));
        }
        for op in &self.ops {
            coef *= -self.ratio;
            last = coef * op.at(w, i)?;
            z += last;
        }
        Ok((z, last))
    }
}

/// Node-wise direct inversion; the unknown `z₁ᵢ` enters each discrete
/// integral only through the operator's diagonal coefficient.
#[derive(Debug, Clone)]
pub(crate) struct VolterraInverter<T> {
    links: Vec<(T, DiscreteOperator<T>)>,
    pivot: T,
}

impl<T: Real> VolterraInverter<T> {
    pub(crate) fn new(w_links: &[WLink<T>], h: T, nodes: usize) -> Result<Self> {
        let links = w_links
            .iter()
            .map(|l| {
                let op = DiscreteOperator::new(OperatorOrder::integral(l.integral_order)?, h, nodes)?;
                Ok((l.ratio, op))
            })
            .collect::<Result<Vec<_>>>()?;
        let pivot = links.iter().fold(T::one(), |acc, (r, op)| acc + *r * op.scale());
        if !pivot.is_finite() || pivot.abs() <= T::epsilon() {
            return Err(Error::Singular(format!("direct inversion pivot is {}", pivot)));
        }
        Ok(Self { links, pivot })
    }

    /// `z₁ᵢ` from `w_i` and the history `z1[0..i]`.
    pub(crate) fn invert_at(&self, w_i: T, z1_history: &[T], i: usize) -> Result<T> {
        if i == 0 {
            if w_i != T::zero() {
                return Err(Error::Precondition(format!("temporary functions start at zero, got w(0) = {}", w_i)));
            }
            return Ok(T::zero());
        }
        let mut history = T::zero();
        for (ratio, op) in &self.links {
            history += *ratio * op.scale() * op.integral_history(z1_history, i)?;
        }
        Ok((w_i - history) / self.pivot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Forcing, FracTerm, PiecewiseForcing, Polynomial};

    fn problem(terms: &[(f64, f64)], g: Polynomial<f64>) -> ProblemSpec<f64> {
        let terms: Vec<_> = terms.iter().map(|&(a, al)| FracTerm::new(a, al)).collect();
        let m1 = terms[0].integer_order();
        ProblemSpec::new(terms, g, Forcing::Piecewise(PiecewiseForcing::constant(1.0)), vec![0.0; m1]).unwrap()
    }

    #[test]
    fn classification_examples() {
        let one = classify(&problem(&[(1.0, 0.5)], Polynomial::monomial(1, 0.5)));
        assert_eq!(one.subclass, Subclass::OneTerm);
        assert_eq!(one.integer_orders, vec![1]);

        let bt = classify(&problem(&[(1.0, 2.0), (0.5, 1.5)], Polynomial::monomial(1, 0.5)));
        assert_eq!(bt.subclass, Subclass::Dependent { r: 2 });
        assert_eq!(bt.integer_orders, vec![2, 2]);

        let ind = classify(&problem(&[(1.0, 1.7), (1.0, 0.3)], Polynomial::zero()));
        assert_eq!(ind.subclass, Subclass::Independent);
        assert_eq!(ind.integer_orders, vec![2, 1]);

        let three = classify(&problem(&[(1.0, 2.9), (1.0, 2.5), (1.0, 2.1), (1.0, 0.4)], Polynomial::zero()));
        assert_eq!(three.subclass, Subclass::Dependent { r: 3 });
    }

    #[test]
    fn bagley_torvik_system() {
        let sys = build(&problem(&[(1.0, 2.0), (0.5, 1.5)], Polynomial::monomial(1, 0.5))).unwrap();
        assert_eq!(sys.m1, 2);
        assert_eq!(sys.reconstruction_order, 0.0);
        assert_eq!(sys.w_links, vec![WLink { ratio: 0.5, integral_order: 0.5 }]);
        assert!(sys.rhs_links.is_empty());
        assert_eq!(sys.inversion, Inversion::DirectVolterra);
    }

    #[test]
    fn one_term_system() {
        let sys = build(&problem(&[(1.0, 0.5)], Polynomial::monomial(1, 0.5))).unwrap();
        assert_eq!(sys.m1, 1);
        assert_eq!(sys.reconstruction_order, 0.5);
        assert!(sys.rhs_links.is_empty() && sys.w_links.is_empty());
    }

    #[test]
    fn independent_link_order() {
        let sys = build(&problem(&[(1.0, 1.7), (1.0, 0.3)], Polynomial::zero())).unwrap();
        assert_eq!(sys.rhs_links.len(), 1);
        assert!((sys.rhs_links[0].order - 0.6).abs() < 1e-15);
        assert!((sys.reconstruction_order - 0.3).abs() < 1e-15);
    }

    #[test]
    fn mixed_dependent_routes_remaining_terms_to_rhs() {
        let sys = build(&problem(&[(2.0, 1.8), (1.0, 1.2), (3.0, 0.5)], Polynomial::zero())).unwrap();
        assert_eq!(sys.subclass, Subclass::Dependent { r: 2 });
        assert_eq!(sys.w_links.len(), 1);
        assert!((sys.w_links[0].ratio - 0.5).abs() < 1e-15);
        assert!((sys.w_links[0].integral_order - 0.6).abs() < 1e-15);
        assert_eq!(sys.rhs_links.len(), 1);
        assert!((sys.rhs_links[0].order - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_leading_order_unsupported() {
        let p = problem(&[(1.0, 0.0)], Polynomial::zero());
        assert!(matches!(build(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn babenko_restricted_to_two_orders() {
        let p = problem(&[(1.0, 2.9), (1.0, 2.5), (1.0, 2.1)], Polynomial::zero());
        let sys = build(&p).unwrap();
        assert!(matches!(sys.clone().with_inversion(Inversion::babenko(30)), Err(Error::Unsupported(_))));
        assert!(sys.with_inversion(Inversion::DirectVolterra).is_ok());
    }

    #[test]
    fn ic_polynomial_derivatives() {
        let ics = [1.0, 2.0, 6.0];
        // P = 1 + 2t + 3t², P' = 2 + 6t, P'' = 6
        assert_eq!(ic_poly_derivative(&ics, 0, 2.0), 1.0 + 4.0 + 12.0);
        assert_eq!(ic_poly_derivative(&ics, 1, 2.0), 2.0 + 12.0);
        assert_eq!(ic_poly_derivative(&ics, 2, 2.0), 6.0);
        assert_eq!(ic_poly_derivative(&ics, 3, 2.0), 0.0);
        assert_eq!(ic_poly_derivative(&ics, 0, 0.0), 1.0);
    }

    #[test]
    fn babenko_trivial_cases() {
        let w = SampleSeries::from_fn(0.01_f64, 200, |t| (2.0 * t).sin()).unwrap();
        let out = babenko_invert(&w, 0.0, 0.5, 30).unwrap();
        assert_eq!(out.z1, w);
        let zero = SampleSeries::zeros(0.01, 200).unwrap();
        let out = babenko_invert(&zero, 0.5, 0.5, 30).unwrap();
        assert!(out.z1.values().iter().all(|&v| v == 0.0));
        assert!(babenko_invert(&w, 0.5, 0.0, 30).is_err());
        assert!(babenko_invert(&w, 0.5, 0.5, 0).is_err());
    }

    #[test]
    fn direct_inversion_trivial_cases() {
        let w = SampleSeries::from_fn(0.01, 50, |t| t * t).unwrap();
        let links = [WLink { ratio: 0.0, integral_order: 0.5 }];
        for i in 0..50 {
            assert_eq!(volterra_direct_invert(&w, &links, i, w.values()).unwrap(), w.values()[i]);
        }
        let links = [WLink { ratio: 0.5, integral_order: 0.5 }];
        assert_eq!(volterra_direct_invert(&w, &links, 0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn direct_inversion_round_trips_forward_relation() {
        // Build w from a known z₁ with the same discrete operator, then invert.
        let h = 0.01;
        let z = SampleSeries::from_fn(h, 300, |t: f64| t.powf(1.5) * (1.0 + t).ln()).unwrap();
        let links = [WLink { ratio: 0.7, integral_order: 0.4 }, WLink { ratio: -0.2, integral_order: 0.9 }];
        let mut w = z.clone();
        for l in &links {
            let iz = crate::fracops::apply_operator(&z, OperatorOrder::integral(l.integral_order).unwrap()).unwrap();
            w = w.combine(1.0, &iz, l.ratio).unwrap();
        }
        let mut hist = Vec::new();
        for i in 0..z.len() {
            let zi = volterra_direct_invert(&w, &links, i, &hist).unwrap();
            assert!((zi - z.values()[i]).abs() < 1e-13, "node {i}");
            hist.push(zi);
        }
    }

    #[test]
    fn direct_inversion_singular_pivot() {
        let h = 0.01_f64;
        let c = h.sqrt() / (2.0 * crate::gamma::gamma(1.5).unwrap());
        let links = [WLink { ratio: -1.0 / c, integral_order: 0.5 }];
        let w = SampleSeries::zeros(h, 5).unwrap();
        assert!(matches!(volterra_direct_invert(&w, &links, 2, &[0.0, 0.0]), Err(Error::Singular(_))));
    }
}
