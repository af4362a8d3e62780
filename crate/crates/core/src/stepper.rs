//! Explicit Euler integration of a decomposed system.
//!
//! The Euler state is `u = (s, s′, …, s^{(m₁−1)})` with `s = w` for the
//! dependent subclass and `s = z₁` otherwise; all components start at zero.
//! At node `i` the solver recovers `z₁ᵢ`, reconstructs `yᵢ`, evaluates the
//! right-hand side from the full history through node `i`, then advances
//! the state to node `i + 1`.

use log::warn;

use crate::decompose::{self, BabenkoInverter, DecomposedSystem, Inversion, VolterraInverter};
use crate::error::{Error, Result};
use crate::fracops::{frac_derivative01, DiscreteOperator, OperatorOrder};
use crate::problem::ProblemSpec;
use crate::scalar::Real;
use crate::series::SampleSeries;

/// Order in which the Euler state components are updated in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EulerSweep {
    /// Highest derivative first; each lower component then advances with the
    /// freshly updated one above it (semi-implicit Euler). Identical to
    /// `Forward` when `m₁ = 1`.
    #[default]
    TopDown,
    /// Every component advances with the values from the previous node
    /// (classical forward Euler).
    Forward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub step: T,
    pub t_end: T,
    pub inversion: Inversion,
    pub output_derivatives: bool,
    pub sweep: EulerSweep,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(step: T, t_end: T) -> Result<Self> {
        let cfg = Self {
            step,
            t_end,
            inversion: Inversion::default(),
            output_derivatives: false,
            sweep: EulerSweep::default(),
        };
        cfg.steps()?;
        Ok(cfg)
    }

    pub fn with_inversion(mut self, inversion: Inversion) -> Self {
        self.inversion = inversion;
        self
    }

    pub fn with_derivatives(mut self, on: bool) -> Self {
        self.output_derivatives = on;
        self
    }

    pub fn with_sweep(mut self, sweep: EulerSweep) -> Self {
        self.sweep = sweep;
        self
    }

    /// Number of steps `N = ⌊T/h⌋`, tolerant of `T/h` landing a few ulps
    /// below an integer. Fails unless `N ≥ 2`.
    pub fn steps(&self) -> Result<usize> {
        let (h, t_end) = (self.step, self.t_end);
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", h)));
        }
        if !(t_end.is_finite() && t_end > T::zero()) {
            return Err(Error::InvalidConfig(format!("end time must be positive, got {}", t_end)));
        }
        let ratio = t_end / h;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest { nearest } else { ratio.floor() };
        let n = n.to_usize().ok_or_else(|| Error::InvalidConfig(format!("too many steps: T/h = {}", ratio)))?;
        if n < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 steps, T/h = {}", ratio)));
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics<T> {
    /// Sup-norm of the last Babenko term over all nodes, when Babenko
    /// inversion was used.
    pub babenko_tail: Option<T>,
    /// First node whose value was not finite. Series stop just before it.
    pub nan_node: Option<usize>,
}

/// Solution on `t_i = i·h`, `i = 0…N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub h: T,
    /// Requested number of steps; the series hold `N + 1` nodes unless the
    /// run stopped at `diagnostics.nan_node`.
    pub n: usize,
    pub y: SampleSeries<T>,
    pub z1: SampleSeries<T>,
    /// `y′ … y^{(m₁−1)}` when requested.
    pub y_derivs: Option<Vec<SampleSeries<T>>>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn is_complete(&self) -> bool {
        self.diagnostics.nan_node.is_none()
    }

    /// Turns a run that hit a non-finite value into [`Error::NumericalFailure`].
    pub fn into_result(self) -> Result<Self> {
        match self.diagnostics.nan_node {
            Some(node) => Err(Error::NumericalFailure { node }),
            None => Ok(self),
        }
    }
}

/// Solves `p` by the decomposition method with explicit Euler stepping.
pub fn solve<T: Real>(p: &ProblemSpec<T>, cfg: &SolverConfig<T>) -> Result<Trajectory<T>> {
    let sys = decompose::build(p)?.with_inversion(cfg.inversion)?;
    let n = cfg.steps()?;
    let h = cfg.step;
    let nodes = n + 1;
    let forcing = p.forcing().sample(h, nodes)?;
    let g = p.nonlinearity();

    let links = sys
        .rhs_links
        .iter()
        .map(|l| Ok((l.coefficient, DiscreteOperator::new(OperatorOrder::new(l.order)?, h, nodes)?)))
        .collect::<Result<Vec<_>>>()?;
    let reconstruct = DiscreteOperator::new(OperatorOrder::new(sys.reconstruction_order)?, h, nodes)?;
    let inverter = Inverter::new(&sys, h, nodes)?;

    let mut state = vec![T::zero(); sys.m1];
    let mut s: Vec<T> = Vec::with_capacity(nodes);
    let mut z1: Vec<T> = Vec::with_capacity(nodes);
    let mut y: Vec<T> = Vec::with_capacity(nodes);
    let mut babenko_tail = None;
    let mut nan_node = None;

    for i in 0..nodes {
        let t = T::idx(i) * h;
        s.push(state[0]);
        let zi = match &inverter {
            Inverter::None => state[0],
            Inverter::Direct(inv) => inv.invert_at(s[i], &z1, i)?,
            Inverter::Babenko(inv) => {
                let (zi, last) = inv.invert_at(&s, i)?;
                babenko_tail = Some(babenko_tail.map_or(last.abs(), |m: T| m.max(last.abs())));
                zi
            }
        };
        z1.push(zi);
        let yi = sys.ic_derivative(0, t) + reconstruct.at(&z1, i)?;
        if !(zi.is_finite() && yi.is_finite()) {
            nan_node = Some(i);
            z1.pop();
            break;
        }
        y.push(yi);
        if i == n {
            break;
        }

        let mut rhs = forcing[i] - g.eval(yi);
        for (a, op) in &links {
            rhs -= *a * op.at(&z1, i)?;
        }
        rhs /= sys.a1;
        advance(&mut state, rhs, h, cfg.sweep);
    }

    if let (Inversion::Babenko { terms, tail_tolerance }, Some(tail)) = (sys.inversion, babenko_tail) {
        if tail.as_f64() > tail_tolerance {
            warn!(
                "Babenko series with K = {} not converged: last term sup-norm {:.3e} exceeds {:.1e}",
                terms,
                tail.as_f64(),
                tail_tolerance
            );
        }
    }

    // Node 0 is always finite: z₁(0) = 0 and y(0) = b₀.
    let z1 = SampleSeries::new(h, z1)?;
    let y = SampleSeries::new(h, y)?;
    let y_derivs = if cfg.output_derivatives && nan_node.is_none() {
        Some(reconstruct_derivatives(&z1, &sys.ic_poly, sys.alpha1, sys.m1)?)
    } else {
        None
    };
    Ok(Trajectory { h, n, y, z1, y_derivs, diagnostics: Diagnostics { babenko_tail, nan_node } })
}

enum Inverter<T> {
    None,
    Direct(VolterraInverter<T>),
    Babenko(BabenkoInverter<T>),
}

impl<T: Real> Inverter<T> {
    fn new(sys: &DecomposedSystem<T>, h: T, nodes: usize) -> Result<Self> {
        if !sys.is_dependent() {
            return Ok(Inverter::None);
        }
        Ok(match sys.inversion {
            Inversion::DirectVolterra => Inverter::Direct(VolterraInverter::new(&sys.w_links, h, nodes)?),
            Inversion::Babenko { terms, .. } => {
                let link = sys.w_links[0];
                Inverter::Babenko(BabenkoInverter::new(link.ratio, link.integral_order, terms, h, nodes)?)
            }
        })
    }
}

fn advance<T: Real>(state: &mut [T], rhs: T, h: T, sweep: EulerSweep) {
    let top = state.len() - 1;
    match sweep {
        EulerSweep::TopDown => {
            state[top] += h * rhs;
            for k in (0..top).rev() {
                let above = state[k + 1];
                state[k] += h * above;
            }
        }
        EulerSweep::Forward => {
            for k in 0..top {
                let above = state[k + 1];
                state[k] += h * above;
            }
            state[top] += h * rhs;
        }
    }
}

/// `yᵢ = Σ b_k t_i^k/k! + (D^ν z₁)ᵢ` for `0 ≤ ν < 1`.
pub fn reconstruct_y<T: Real>(z1: &SampleSeries<T>, ics: &[T], nu: T, i: usize) -> Result<T> {
    let t = z1.time(i);
    let poly = decompose::ic_poly_derivative(ics, 0, t);
    Ok(poly + frac_derivative01(z1, nu, i)?)
}

/// `y^{(k)}ᵢ = Σ_{j≥k} b_j t_i^{j−k}/(j−k)! + (D^{ν+k} z₁)ᵢ` for
/// `k = 1 … m₁−1`, with `ν = m₁ − α₁`.
pub fn reconstruct_derivatives<T: Real>(
    z1: &SampleSeries<T>,
    ics: &[T],
    alpha1: T,
    m1: usize,
) -> Result<Vec<SampleSeries<T>>> {
    let nu = T::idx(m1) - alpha1;
    (1..m1)
        .map(|k| {
            let op = DiscreteOperator::new(OperatorOrder::new(nu + T::idx(k))?, z1.h(), z1.len())?;
            let values = (0..z1.len())
                .map(|i| Ok(op.at(z1.values(), i)? + decompose::ic_poly_derivative(ics, k, z1.time(i))))
                .collect::<Result<Vec<_>>>()?;
            SampleSeries::new(z1.h(), values)
        })
        .collect()
}
