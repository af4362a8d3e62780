//! Fractional initial-value problems
//!
//! ```text
//! a₁ D^{α₁} y + a₂ D^{α₂} y + … + aₙ D^{αₙ} y + g(y) = f(t),   y^{(k)}(0) = b_k
//! ```
//!
//! with Riemann-Liouville derivatives at lower terminal 0, `α₁ > α₂ > … ≥ 0`
//! and `g` a polynomial.

use crate::error::{Error, Result};
use crate::fracops::ORDER_CAP;
use crate::scalar::Real;
use crate::series::SampleSeries;

/// One `a·D^α y` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracTerm<T> {
    pub coefficient: T,
    pub order: T,
}

impl<T: Real> FracTerm<T> {
    pub fn new(coefficient: T, order: T) -> Self {
        Self { coefficient, order }
    }

    /// Integer order `m` of the Abel relation attached to this term: `⌈α⌉`
    /// for fractional α and `α` itself for whole orders (classical
    /// derivatives).
    pub fn integer_order(&self) -> usize {
        integer_order(self.order)
    }
}

pub(crate) fn integer_order<T: Real>(alpha: T) -> usize {
    alpha.ceil().to_usize().expect("validated non-negative order")
}

/// Dense polynomial `Σ c_p x^p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial<T> {
    coefficients: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn zero() -> Self {
        Self { coefficients: Vec::new() }
    }

    /// Builds from dense coefficients `c_0, c_1, …`; trailing zeros are dropped.
    pub fn new(coefficients: Vec<T>) -> Self {
        let mut p = Self { coefficients };
        p.trim();
        p
    }

    /// `c·x^power`.
    pub fn monomial(power: usize, c: T) -> Self {
        let mut p = Self::zero();
        p.add_monomial(power, c);
        p
    }

    /// Adds `c·x^power` to the polynomial.
    pub fn add_monomial(&mut self, power: usize, c: T) {
        if self.coefficients.len() <= power {
            self.coefficients.resize(power + 1, T::zero());
        }
        self.coefficients[power] += c;
        self.trim();
    }

    fn trim(&mut self) {
        while self.coefficients.last() == Some(&T::zero()) {
            self.coefficients.pop();
        }
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Coefficient of `x^power` (zero beyond the degree).
    pub fn coefficient(&self, power: usize) -> T {
        self.coefficients.get(power).copied().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, x: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }
}

/// `f(t) = Σ c_k t^k` on the half-open interval `[start, end)`; `end = None`
/// means unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSegment<T> {
    pub start: T,
    pub end: Option<T>,
    pub poly: Polynomial<T>,
}

/// Piecewise-polynomial forcing on consecutive half-open segments starting at
/// the origin. At a boundary the right-hand segment applies.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseForcing<T> {
    segments: Vec<ForcingSegment<T>>,
}

impl<T: Real> PiecewiseForcing<T> {
    pub fn new(segments: Vec<ForcingSegment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProblem("forcing needs at least one segment".into()));
        }
        if segments[0].start != T::zero() {
            return Err(Error::InvalidProblem(format!(
                "first forcing segment must start at 0, not {}",
                segments[0].start
            )));
        }
        for (k, seg) in segments.iter().enumerate() {
            if !seg.start.is_finite() || seg.poly.coefficients().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProblem(format!("forcing segment {} is not finite", k + 1)));
            }
            match seg.end {
                Some(end) if !(end.is_finite() && end > seg.start) => {
                    return Err(Error::InvalidProblem(format!(
                        "forcing segment {} is empty or reversed: [{}, {})",
                        k + 1,
                        seg.start,
                        end
                    )))
                }
                None if k + 1 != segments.len() => {
                    return Err(Error::InvalidProblem("only the last forcing segment may be unbounded".into()))
                }
                _ => {}
            }
            if let Some(next) = segments.get(k + 1) {
                if seg.end != Some(next.start) {
                    return Err(Error::InvalidProblem(format!(
                        "forcing segments {} and {} are not contiguous",
                        k + 1,
                        k + 2
                    )));
                }
            }
        }
        Ok(Self { segments })
    }

    /// `f ≡ c` on `[0, ∞)`.
    pub fn constant(c: T) -> Self {
        Self { segments: vec![ForcingSegment { start: T::zero(), end: None, poly: Polynomial::new(vec![c]) }] }
    }

    pub fn segments(&self) -> &[ForcingSegment<T>] {
        &self.segments
    }

    /// `f(t)`, or `None` past the last bounded segment (or before 0).
    pub fn eval(&self, t: T) -> Option<T> {
        if t < T::zero() {
            return None;
        }
        self.segments.iter().find(|s| t >= s.start && s.end.is_none_or(|e| t < e)).map(|s| s.poly.eval(t))
    }

    /// True when every `t ∈ [0, t_end]` falls in some segment.
    pub fn covers(&self, t_end: T) -> bool {
        self.segments.last().and_then(|s| s.end).is_none_or(|e| t_end < e)
    }
}

/// Forcing either as piecewise polynomials or as exact samples on the
/// solver grid (used for manufactured solutions, whose forcing contains
/// fractional powers of t).
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing<T> {
    Piecewise(PiecewiseForcing<T>),
    Sampled(SampleSeries<T>),
}

impl<T: Real> Forcing<T> {
    /// Forcing values on `nodes` grid points of step `h`.
    pub fn sample(&self, h: T, nodes: usize) -> Result<Vec<T>> {
        match self {
            Forcing::Piecewise(pw) => (0..nodes)
                .map(|i| {
                    let t = T::idx(i) * h;
                    pw.eval(t).ok_or_else(|| Error::InvalidProblem(format!("forcing undefined at t = {}", t)))
                })
                .collect(),
            Forcing::Sampled(s) => {
                if (s.h() - h).abs() > T::lit(1e-12) * h {
                    return Err(Error::Grid(format!("sampled forcing has step {}, solver uses {}", s.h(), h)));
                }
                if s.len() < nodes {
                    return Err(Error::Grid(format!(
                        "sampled forcing covers {} nodes, solver needs {}",
                        s.len(),
                        nodes
                    )));
                }
                Ok(s.values()[..nodes].to_vec())
            }
        }
    }
}

/// A validated fractional initial-value problem with lower terminal 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    terms: Vec<FracTerm<T>>,
    nonlinearity: Polynomial<T>,
    forcing: Forcing<T>,
    initial_conditions: Vec<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(
        terms: Vec<FracTerm<T>>,
        nonlinearity: Polynomial<T>,
        forcing: Forcing<T>,
        initial_conditions: Vec<T>,
    ) -> Result<Self> {
        validate_terms(&terms)?;
        if nonlinearity.coefficients().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem("nonlinearity coefficients must be finite".into()));
        }
        let m1 = terms[0].integer_order();
        if initial_conditions.len() != m1 {
            return Err(Error::InvalidProblem(format!(
                "expected {} initial conditions (k = 0…{}), got {}",
                m1,
                m1.saturating_sub(1),
                initial_conditions.len()
            )));
        }
        if initial_conditions.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidProblem("initial conditions must be finite".into()));
        }
        Ok(Self { terms, nonlinearity, forcing, initial_conditions })
    }

    pub fn terms(&self) -> &[FracTerm<T>] {
        &self.terms
    }

    pub fn nonlinearity(&self) -> &Polynomial<T> {
        &self.nonlinearity
    }

    pub fn forcing(&self) -> &Forcing<T> {
        &self.forcing
    }

    pub fn initial_conditions(&self) -> &[T] {
        &self.initial_conditions
    }

    /// Integer order of the leading term (number of initial conditions).
    pub fn m1(&self) -> usize {
        self.terms[0].integer_order()
    }

    /// Same problem with a different forcing.
    pub fn with_forcing(&self, forcing: Forcing<T>) -> Self {
        Self { forcing, ..self.clone() }
    }

    /// Same problem with different initial conditions.
    pub fn with_initial_conditions(&self, ics: Vec<T>) -> Result<Self> {
        Self::new(self.terms.clone(), self.nonlinearity.clone(), self.forcing.clone(), ics)
    }
}

fn validate_terms<T: Real>(terms: &[FracTerm<T>]) -> Result<()> {
    let Some(first) = terms.first() else {
        return Err(Error::InvalidProblem("no terms".into()));
    };
    if first.coefficient == T::zero() {
        return Err(Error::InvalidProblem("leading coefficient must be nonzero".into()));
    }
    for (k, term) in terms.iter().enumerate() {
        if !term.coefficient.is_finite() {
            return Err(Error::InvalidProblem(format!("term {} has a non-finite coefficient", k + 1)));
        }
        if !(term.order.is_finite() && term.order >= T::zero()) {
            return Err(Error::InvalidProblem(format!("term {} has invalid order {}", k + 1, term.order)));
        }
        if term.order >= T::lit(ORDER_CAP) {
            return Err(Error::InvalidProblem(format!(
                "term {} order {} exceeds the cap {}",
                k + 1,
                term.order,
                ORDER_CAP
            )));
        }
    }
    if terms.windows(2).any(|w| w[1].order >= w[0].order) {
        return Err(Error::InvalidProblem("orders must be strictly decreasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(start: f64, end: Option<f64>, c: &[f64]) -> ForcingSegment<f64> {
        ForcingSegment { start, end, poly: Polynomial::new(c.to_vec()) }
    }

    fn step_forcing() -> PiecewiseForcing<f64> {
        PiecewiseForcing::new(vec![seg(0.0, Some(1.0), &[8.0]), seg(1.0, None, &[0.0])]).unwrap()
    }

    #[test]
    fn half_open_segments() {
        let f = step_forcing();
        assert_eq!(f.eval(0.0), Some(8.0));
        assert_eq!(f.eval(0.999), Some(8.0));
        assert_eq!(f.eval(1.0), Some(0.0));
        assert_eq!(f.eval(1e6), Some(0.0));
        assert_eq!(f.eval(-0.1), None);
        assert!(f.covers(30.0));
    }

    #[test]
    fn bounded_forcing_coverage() {
        let f = PiecewiseForcing::new(vec![seg(0.0, Some(2.0), &[1.0, 2.0])]).unwrap();
        assert_eq!(f.eval(1.5), Some(4.0));
        assert_eq!(f.eval(2.0), None);
        assert!(f.covers(1.99));
        assert!(!f.covers(2.0));
    }

    #[test]
    fn forcing_validation() {
        assert!(PiecewiseForcing::<f64>::new(vec![]).is_err());
        assert!(PiecewiseForcing::new(vec![seg(0.5, None, &[1.0])]).is_err());
        assert!(PiecewiseForcing::new(vec![seg(0.0, Some(1.0), &[1.0]), seg(1.5, None, &[0.0])]).is_err());
        assert!(PiecewiseForcing::new(vec![seg(0.0, None, &[1.0]), seg(1.0, None, &[0.0])]).is_err());
        assert!(PiecewiseForcing::new(vec![seg(0.0, Some(0.0), &[1.0])]).is_err());
    }

    #[test]
    fn polynomial_eval_and_trim() {
        let mut g = Polynomial::monomial(3, 0.5_f64);
        g.add_monomial(1, 2.0);
        assert_eq!(g.degree(), Some(3));
        assert_eq!(g.eval(2.0), 0.5 * 8.0 + 4.0);
        g.add_monomial(3, -0.5);
        assert_eq!(g.degree(), Some(1));
        assert!(Polynomial::<f64>::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn problem_validation() {
        let forcing = Forcing::Piecewise(step_forcing());
        let g = Polynomial::monomial(1, 0.5);
        let bt = vec![FracTerm::new(1.0, 2.0), FracTerm::new(0.5, 1.5)];
        let p = ProblemSpec::new(bt.clone(), g.clone(), forcing.clone(), vec![0.0, 0.0]).unwrap();
        assert_eq!(p.m1(), 2);

        let err = |terms: Vec<FracTerm<f64>>, ics: Vec<f64>| {
            ProblemSpec::new(terms, g.clone(), forcing.clone(), ics).unwrap_err().to_string()
        };
        assert!(err(vec![], vec![]).contains("no terms"));
        assert!(err(bt.clone(), vec![0.0]).contains("expected 2 initial conditions"));
        assert!(err(vec![FracTerm::new(1.0, 0.5), FracTerm::new(1.0, 1.5)], vec![0.0])
            .contains("orders must be strictly decreasing"));
        assert!(err(vec![FracTerm::new(0.0, 0.5)], vec![0.0]).contains("leading coefficient"));
        assert!(err(vec![FracTerm::new(1.0, 12.0)], vec![0.0; 12]).contains("cap"));
        assert!(err(vec![FracTerm::new(1.0, -0.5)], vec![]).contains("invalid order"));
    }

    #[test]
    fn integer_order_convention() {
        assert_eq!(FracTerm::new(1.0, 2.0).integer_order(), 2);
        assert_eq!(FracTerm::new(1.0, 1.5).integer_order(), 2);
        assert_eq!(FracTerm::new(1.0, 0.3).integer_order(), 1);
        assert_eq!(FracTerm::new(1.0, 0.0).integer_order(), 0);
    }
}
