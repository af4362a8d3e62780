//! Built-in property suite behind the `verify` subcommand.

use serde::Serialize;

use fracdecomp::fracops::apply_operator;
use fracdecomp::gamma::gamma;
use fracdecomp::problem::ForcingSegment;
use fracdecomp::{
    solve, Config, Forcing, FracTerm, Inversion, OperatorOrder, PiecewiseForcing, Polynomial, Problem, Series,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured quantity (an error or difference) when the check has one.
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let measure = match (c.value, c.threshold) {
                (Some(v), Some(t)) => format!("{:.3e} <= {:.1e}", v, t),
                (Some(v), None) => format!("{:.3e}", v),
                _ => String::new(),
            };
            out.push_str(&format!("{status}  {:width$}  {measure:24}  {}\n", c.name, c.detail));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

pub type GammaFn = fn(f64) -> fracdecomp::Result<f64>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Gamma function used for every closed-form reference value.
    pub reference_gamma: GammaFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { reference_gamma: gamma::<f64> }
    }
}

pub fn run(opts: &VerifyOptions) -> Report {
    let checks = vec![
        gamma_values(opts),
        closed_forms(opts),
        semigroup(),
        left_inverse(),
        unit_order_trapezoid(),
        zero_order_identity(),
        operator_causality(),
        initial_data(),
        solver_causality(),
        determinism(),
        babenko_vs_direct(),
    ];
    Report { passed: checks.iter().all(|c| c.passed), checks }
}

fn bounded(name: &str, value: Option<f64>, threshold: f64, detail: impl Into<String>) -> Check {
    let passed = value.is_some_and(|v| v <= threshold);
    Check { name: name.into(), passed, value, threshold: Some(threshold), detail: detail.into() }
}

fn exact(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, value: None, threshold: None, detail: detail.into() }
}

fn failed(name: &str, err: impl std::fmt::Display) -> Check {
    Check { name: name.into(), passed: false, value: None, threshold: None, detail: err.to_string() }
}

fn bagley_torvik(g: Polynomial<f64>, ics: Vec<f64>) -> Problem {
    let forcing = PiecewiseForcing::new(vec![
        ForcingSegment { start: 0.0, end: Some(1.0), poly: Polynomial::new(vec![8.0]) },
        ForcingSegment { start: 1.0, end: None, poly: Polynomial::zero() },
    ])
    .expect("valid segments");
    Problem::new(vec![FracTerm::new(1.0, 2.0), FracTerm::new(0.5, 1.5)], g, Forcing::Piecewise(forcing), ics)
        .expect("valid problem")
}

fn ramp(h: f64, nodes: usize) -> Series {
    Series::from_fn(h, nodes, |t| t).expect("valid grid")
}

fn gamma_values(opts: &VerifyOptions) -> Check {
    const NAME: &str = "gamma reference values";
    let pi_sqrt = std::f64::consts::PI.sqrt();
    let cases = [
        (0.5, pi_sqrt),
        (1.5, pi_sqrt / 2.0),
        (2.5, 0.75 * pi_sqrt),
        (5.0, 24.0),
        (0.1, 9.513_507_698_668_732),
        (-0.5, -2.0 * pi_sqrt),
    ];
    let mut worst: f64 = 0.0;
    for (x, want) in cases {
        match (opts.reference_gamma)(x) {
            Ok(v) => worst = worst.max(((v - want) / want).abs()),
            Err(e) => return failed(NAME, e),
        }
    }
    bounded(NAME, Some(worst), 1e-12, "max relative error over 6 arguments")
}

fn closed_forms(opts: &VerifyOptions) -> Check {
    const NAME: &str = "operator closed forms on t^p";
    let h = 1e-3;
    let nodes = 1001;
    let mut worst_i: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        for p in 1..=3 {
            let z = Series::from_fn(h, nodes, |t| t.powi(p)).expect("valid grid");
            let pf = p as f64;
            // At t = 1 the closed form reduces to Γ(p+1)/Γ(p+1−μ).
            for mu in [-alpha, alpha] {
                let out = match apply_operator(&z, OperatorOrder::new(mu).expect("small order")) {
                    Ok(out) => out.values()[nodes - 1],
                    Err(e) => return failed(NAME, e),
                };
                let want = match ((opts.reference_gamma)(pf + 1.0), (opts.reference_gamma)(pf + 1.0 - mu)) {
                    (Ok(a), Ok(b)) => a / b,
                    (Err(e), _) | (_, Err(e)) => return failed(NAME, e),
                };
                let rel = ((out - want) / want).abs();
                if mu < 0.0 {
                    worst_i = worst_i.max(rel / 1e-2);
                } else {
                    worst_d = worst_d.max(rel / 2e-2);
                }
            }
        }
    }
    bounded(
        NAME,
        Some(worst_i.max(worst_d)),
        1.0,
        "relative error at t = 1 as a fraction of its tolerance (1% integral, 2% derivative)",
    )
}

fn semigroup() -> Check {
    const NAME: &str = "integral semigroup I^0.3 I^0.4 = I^0.7";
    let z = ramp(1e-3, 1001);
    let run = || -> fracdecomp::Result<f64> {
        let inner = apply_operator(&z, OperatorOrder::integral(0.4)?)?;
        let composed = apply_operator(&inner, OperatorOrder::integral(0.3)?)?;
        composed.sup_distance(&apply_operator(&z, OperatorOrder::integral(0.7)?)?)
    };
    match run() {
        Ok(d) => bounded(NAME, Some(d), 1e-2, "sup-norm on [0,1], h = 1e-3"),
        Err(e) => failed(NAME, e),
    }
}

fn left_inverse() -> Check {
    const NAME: &str = "left inverse D^0.5 I^0.5 = id";
    let z = ramp(1e-3, 1001);
    let run = || -> fracdecomp::Result<f64> {
        let i = apply_operator(&z, OperatorOrder::integral(0.5)?)?;
        apply_operator(&i, OperatorOrder::derivative(0.5)?)?.sup_distance(&z)
    };
    match run() {
        Ok(d) => bounded(NAME, Some(d), 2e-2, "sup-norm on [0,1], h = 1e-3"),
        Err(e) => failed(NAME, e),
    }
}

fn unit_order_trapezoid() -> Check {
    const NAME: &str = "unit-order integral is the trapezoid rule";
    let h = 0.01;
    let z = Series::from_fn(h, 201, |t| (3.0 * t).sin() + t * t).expect("valid grid");
    let out = match apply_operator(&z, OperatorOrder::integral(1.0).expect("order")) {
        Ok(out) => out,
        Err(e) => return failed(NAME, e),
    };
    let v = z.values();
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    for i in 1..v.len() {
        acc += 0.5 * h * (v[i - 1] + v[i]);
        worst = worst.max((out.values()[i] - acc).abs());
    }
    bounded(NAME, Some(worst), 1e-12, "sup-norm against cumulative trapezoid sums")
}

fn zero_order_identity() -> Check {
    const NAME: &str = "zero-order operator is the identity";
    let z = Series::from_fn(0.01, 101, |t| t.exp()).expect("valid grid");
    let same = apply_operator(&z, OperatorOrder::new(0.0).expect("order")).is_ok_and(|out| out == z);
    exact(NAME, same, "bit-identical output")
}

fn operator_causality() -> Check {
    const NAME: &str = "operator causality";
    let base = Series::from_fn(0.01, 300, |t| t * (2.0 * t).cos()).expect("valid grid");
    let mut altered = base.values().to_vec();
    for v in &mut altered[150..] {
        *v += 7.5;
    }
    let altered = Series::new(0.01, altered).expect("valid grid");
    for mu in [-1.3, -0.4, 0.35, 1.0, 1.6] {
        let order = OperatorOrder::new(mu).expect("order");
        let (Ok(a), Ok(b)) = (apply_operator(&base, order), apply_operator(&altered, order)) else {
            return failed(NAME, format!("operator of order {} failed", mu));
        };
        if a.values()[..150].iter().zip(&b.values()[..150]).any(|(x, y)| x.to_bits() != y.to_bits()) {
            return exact(NAME, false, format!("order {}: output before the change moved", mu));
        }
    }
    exact(NAME, true, "outputs before a perturbation are bit-identical for 5 orders")
}

fn initial_data() -> Check {
    const NAME: &str = "y(0) = b0 and z1(0) = 0";
    let cases = [
        bagley_torvik(Polynomial::monomial(1, 0.5), vec![0.3, -1.2]),
        bagley_torvik(Polynomial::monomial(3, 0.5), vec![-2.5, 0.0]),
        Problem::new(
            vec![FracTerm::new(2.0, 0.7), FracTerm::new(1.0, 0.2)],
            Polynomial::monomial(1, 1.0),
            Forcing::Piecewise(PiecewiseForcing::constant(1.0)),
            vec![0.125],
        )
        .expect("valid problem"),
    ];
    for p in &cases {
        for inversion in [Inversion::DirectVolterra, Inversion::babenko(30)] {
            let Ok(traj) = solve(p, &Config::new(0.05, 1.0).expect("config").with_inversion(inversion)) else {
                return failed(NAME, "solve failed");
            };
            let b0 = p.initial_conditions()[0];
            if traj.y.values()[0] != b0 || traj.z1.values()[0] != 0.0 {
                return exact(
                    NAME,
                    false,
                    format!("y(0) = {}, b0 = {}, z1(0) = {}", traj.y.values()[0], b0, traj.z1.values()[0]),
                );
            }
        }
    }
    exact(NAME, true, "exact equality on 3 problems, both inversions")
}

fn solver_causality() -> Check {
    const NAME: &str = "solver causality";
    let p = bagley_torvik(Polynomial::monomial(3, 0.5), vec![0.0, 0.0]);
    let (Ok(short), Ok(long)) =
        (solve(&p, &Config::new(0.02, 4.0).expect("config")), solve(&p, &Config::new(0.02, 8.0).expect("config")))
    else {
        return failed(NAME, "solve failed");
    };
    let same = short.y.values().iter().zip(long.y.values()).all(|(a, b)| a.to_bits() == b.to_bits());
    exact(NAME, same, "horizon 4 is a bit-identical prefix of horizon 8")
}

fn determinism() -> Check {
    const NAME: &str = "deterministic reruns";
    let p = bagley_torvik(Polynomial::monomial(3, 0.5), vec![0.0, 0.0]);
    let cfg = Config::new(0.02, 10.0).expect("config");
    let same = matches!((solve(&p, &cfg), solve(&p, &cfg)), (Ok(a), Ok(b)) if a == b);
    exact(NAME, same, "two runs compare equal bit for bit")
}

fn babenko_vs_direct() -> Check {
    const NAME: &str = "Babenko (K = 30) vs direct inversion";
    let p = bagley_torvik(Polynomial::monomial(1, 0.5), vec![0.0, 0.0]);
    let cfg = Config::new(0.01, 5.0).expect("config");
    let (Ok(direct), Ok(babenko)) = (solve(&p, &cfg), solve(&p, &cfg.clone().with_inversion(Inversion::babenko(30))))
    else {
        return failed(NAME, "solve failed");
    };
    let tail = babenko.diagnostics.babenko_tail.unwrap_or(f64::INFINITY);
    if tail > 1e-8 {
        return exact(NAME, false, format!("series not converged: last term {:.3e}", tail));
    }
    let diff = direct.y.sup_distance(&babenko.y).ok();
    bounded(NAME, diff, 2e-3, "Bagley-Torvik on [0,5], h = 0.01")
}
