//! Reference solutions: a direct Grünwald-Letnikov solver for linear
//! problems and manufactured-solution generators.

use crate::error::{Error, Result};
use crate::fracops::{DiscreteOperator, OperatorOrder, WeightTable};
use crate::gamma::gamma;
use crate::problem::{Forcing, ProblemSpec};
use crate::scalar::Real;
use crate::series::SampleSeries;
use crate::stepper::{Diagnostics, SolverConfig, Trajectory};

/// Solves a linear problem with zero initial data by discretizing every
/// term with Grünwald-Letnikov weights:
///
/// `yᵢ(Σ a_k h^{−α_k} + c) = fᵢ − Σ a_k h^{−α_k} Σ_{j≥1} w_j^{(α_k)} y_{i−j}`
///
/// where `g(y) = c·y`. The returned `z1` is `I^ν y` (or `y` itself when `ν = 0`).
pub fn gl_direct_solve<T: Real>(p: &ProblemSpec<T>, cfg: &SolverConfig<T>) -> Result<Trajectory<T>> {
    let g = p.nonlinearity();
    if g.degree().is_some_and(|d| d > 1) || g.coefficient(0) != T::zero() {
        return Err(Error::Unsupported("the GL oracle handles g(y) = c·y only".into()));
    }
    if p.initial_conditions().iter().any(|&b| b != T::zero()) {
        return Err(Error::Unsupported("the GL oracle needs zero initial conditions".into()));
    }
    let n = cfg.steps()?;
    let h = cfg.step;
    let nodes = n + 1;
    let forcing = p.forcing().sample(h, nodes)?;

    let terms = p
        .terms()
        .iter()
        .map(|t| Ok((t.coefficient * h.powf(-t.order), WeightTable::grunwald(t.order, nodes)?)))
        .collect::<Result<Vec<_>>>()?;
    let pivot = terms.iter().fold(g.coefficient(1), |acc, (s, _)| acc + *s);
    if !pivot.is_finite() || pivot.abs() <= T::epsilon() {
        return Err(Error::Singular(format!("GL pivot is {}", pivot)));
    }

    let mut y: Vec<T> = Vec::with_capacity(nodes);
    let mut nan_node = None;
    for i in 0..nodes {
        let mut rhs = forcing[i];
        for (s, table) in &terms {
            let w = table.weights();
            let hist: T = (1..=i).map(|j| w[j] * y[i - j]).sum();
            rhs -= *s * hist;
        }
        let yi = rhs / pivot;
        if !yi.is_finite() {
            nan_node = Some(i);
            break;
        }
        y.push(yi);
    }
    let y = SampleSeries::new(h, y)?;

    let m1 = p.m1();
    let nu = T::idx(m1) - p.terms()[0].order;
    let z1 = DiscreteOperator::new(OperatorOrder::new(-nu)?, h, y.len())?.apply(&y)?;
    let y_derivs = if cfg.output_derivatives && nan_node.is_none() {
        Some(
            (1..m1)
                .map(|k| DiscreteOperator::new(OperatorOrder::new(T::idx(k))?, h, y.len())?.apply(&y))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(Trajectory { h, n, y, z1, y_derivs, diagnostics: Diagnostics { babenko_tail: None, nan_node } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Integral,
    Derivative,
}

/// Riemann-Liouville action on `t^p`: `Γ(p+1)/Γ(p+1±α)·t^{p±α}`.
pub fn power_rule<T: Real>(alpha: T, p: u32, t: T, kind: PowerKind) -> Result<T> {
    let pp = T::from_u32(p).expect("small integer");
    let shift = match kind {
        PowerKind::Integral => alpha,
        PowerKind::Derivative => -alpha,
    };
    if !(pp + shift > -T::one()) {
        return Err(Error::Domain(format!("power rule needs p ± α > −1, got p = {}, α = {}", p, alpha)));
    }
    let e = pp + shift;
    Ok(gamma(pp + T::one())? / gamma(e + T::one())? * t.powf(e))
}

/// A problem whose exact solution is `t^p`, with the forcing sampled at the
/// grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase<T> {
    pub target_power: u32,
    pub problem: ProblemSpec<T>,
}

impl<T: Real> ManufacturedCase<T> {
    pub fn exact(&self, t: T) -> T {
        t.powi(self.target_power as i32)
    }

    pub fn exact_series(&self, h: T, nodes: usize) -> Result<SampleSeries<T>> {
        SampleSeries::from_fn(h, nodes, |t| self.exact(t))
    }
}

/// Builds `f = Σ aᵢ D^{αᵢ} t^p + g(t^p)` on `nodes` grid points of step `h`.
/// The forcing of `base` is ignored; its initial conditions are replaced by
/// zeros, which match `t^p` for `p ≥ m₁`.
pub fn manufacture<T: Real>(base: &ProblemSpec<T>, p: u32, h: T, nodes: usize) -> Result<ManufacturedCase<T>> {
    let m1 = base.m1();
    if (p as usize) < m1 {
        return Err(Error::Precondition(format!("target power {} must be at least m₁ = {}", p, m1)));
    }
    let g = base.nonlinearity();
    let mut values = Vec::with_capacity(nodes);
    for i in 0..nodes {
        let t = T::idx(i) * h;
        let mut f = g.eval(t.powi(p as i32));
        for term in base.terms() {
            f += term.coefficient * power_rule(term.order, p, t, PowerKind::Derivative)?;
        }
        values.push(f);
    }
    let forcing = Forcing::Sampled(SampleSeries::new(h, values)?);
    let problem = base.with_forcing(forcing).with_initial_conditions(vec![T::zero(); m1])?;
    Ok(ManufacturedCase { target_power: p, problem })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{FracTerm, PiecewiseForcing, Polynomial};

    fn one_term() -> ProblemSpec<f64> {
        ProblemSpec::new(
            vec![FracTerm::new(1.0, 0.5)],
            Polynomial::monomial(1, 1.0),
            Forcing::Piecewise(PiecewiseForcing::constant(0.0)),
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn power_rule_values() {
        assert_eq!(power_rule(1.0, 1, 1.0, PowerKind::Derivative).unwrap(), 1.0);
        let d = power_rule(0.5_f64, 1, 1.0, PowerKind::Derivative).unwrap();
        assert!((d - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        let i = power_rule(0.5_f64, 1, 1.0, PowerKind::Integral).unwrap();
        assert!((i - 0.752_252_778_063_675).abs() < 1e-14);
        assert!(power_rule(2.0, 1, 0.5, PowerKind::Derivative).is_err());
        assert!(power_rule(1.5, 0, 1.0, PowerKind::Derivative).is_err());
    }

    #[test]
    fn manufactured_forcing() {
        let case = manufacture(&one_term(), 2, 0.25, 5).unwrap();
        let Forcing::Sampled(f) = case.problem.forcing() else { panic!("sampled forcing expected") };
        let c = 2.0 / 1.329_340_388_179_137;
        for (i, t) in f.times().enumerate() {
            let want = c * t.powf(1.5) + t * t;
            assert!((f.values()[i] - want).abs() < 1e-13);
        }
        assert!(manufacture(&one_term(), 0, 0.1, 3).is_err());

        let two = ProblemSpec::new(
            vec![FracTerm::new(1.0, 1.5), FracTerm::new(1.0, 0.5)],
            Polynomial::zero(),
            Forcing::Piecewise(PiecewiseForcing::constant(0.0)),
            vec![1.0, 2.0],
        )
        .unwrap();
        let case = manufacture(&two, 2, 0.5, 3).unwrap();
        assert_eq!(case.problem.initial_conditions(), &[0.0, 0.0]);
        let Forcing::Sampled(f) = case.problem.forcing() else { panic!("sampled forcing expected") };
        let want: f64 = 2.0 / 0.886_226_925_452_758 + 2.0 / 1.329_340_388_179_137;
        assert!((f.values()[2] - want).abs() < 1e-13);
    }

    #[test]
    fn gl_zero_forcing() {
        let cfg = SolverConfig::new(0.01, 1.0).unwrap();
        let traj = gl_direct_solve(&one_term(), &cfg).unwrap();
        assert!(traj.y.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gl_manufactured() {
        let h = 1e-3;
        let cfg = SolverConfig::new(h, 1.0).unwrap();
        let case = manufacture(&one_term(), 2, h, 1001).unwrap();
        let traj = gl_direct_solve(&case.problem, &cfg).unwrap();
        let err = traj.y.sup_distance(&case.exact_series(h, 1001).unwrap()).unwrap();
        assert!(err <= 1e-2, "{err}");
    }

    #[test]
    fn gl_rejects_unsupported() {
        let cfg = SolverConfig::new(0.01, 1.0).unwrap();
        let ic = one_term().with_initial_conditions(vec![1.0]).unwrap();
        assert!(matches!(gl_direct_solve(&ic, &cfg), Err(Error::Unsupported(_))));
        let cubic = ProblemSpec::new(
            vec![FracTerm::new(1.0, 0.5)],
            Polynomial::monomial(3, 1.0),
            Forcing::Piecewise(PiecewiseForcing::constant(1.0)),
            vec![0.0],
        )
        .unwrap();
        assert!(matches!(gl_direct_solve(&cubic, &cfg), Err(Error::Unsupported(_))));
        // h^{−1/2} = 2 cancels the reaction coefficient exactly.
        let singular = one_term().with_forcing(Forcing::Piecewise(PiecewiseForcing::constant(1.0)));
        let singular = ProblemSpec::new(
            singular.terms().to_vec(),
            Polynomial::monomial(1, -2.0),
            singular.forcing().clone(),
            vec![0.0],
        )
        .unwrap();
        let cfg = SolverConfig::new(0.25, 1.0).unwrap();
        assert!(matches!(gl_direct_solve(&singular, &cfg), Err(Error::Singular(_))));
    }
}
