use fracdecomp::oracle::{gl_direct_solve, manufacture};
use fracdecomp::problem::ForcingSegment;
use fracdecomp::{
    solve, Config, EulerSweep, Forcing, FracTerm, Inversion, PiecewiseForcing, Polynomial, Problem, Series,
};

fn bagley_torvik(g: Polynomial<f64>) -> Problem {
    let forcing = PiecewiseForcing::new(vec![
        ForcingSegment { start: 0.0, end: Some(1.0), poly: Polynomial::new(vec![8.0]) },
        ForcingSegment { start: 1.0, end: None, poly: Polynomial::zero() },
    ])
    .unwrap();
    Problem::new(vec![FracTerm::new(1.0, 2.0), FracTerm::new(0.5, 1.5)], g, Forcing::Piecewise(forcing), vec![0.0, 0.0])
        .unwrap()
}

fn unforced(terms: Vec<FracTerm<f64>>, g: Polynomial<f64>) -> Problem {
    let m1 = terms[0].integer_order();
    Problem::new(terms, g, Forcing::Piecewise(PiecewiseForcing::constant(0.0)), vec![0.0; m1]).unwrap()
}

fn manufactured_error(base: &Problem, h: f64) -> (f64, Vec<Series>) {
    let cfg = Config::new(h, 1.0).unwrap().with_derivatives(true);
    let nodes = cfg.steps().unwrap() + 1;
    let case = manufacture(base, 2, h, nodes).unwrap();
    let traj = solve(&case.problem, &cfg).unwrap();
    let err = traj.y.sup_distance(&case.exact_series(h, nodes).unwrap()).unwrap();
    (err, traj.y_derivs.unwrap())
}

#[test]
fn one_term_manufactured_converges() {
    let base = unforced(vec![FracTerm::new(1.0, 0.5)], Polynomial::monomial(1, 1.0));
    let (e1, _) = manufactured_error(&base, 2e-3);
    let (e2, _) = manufactured_error(&base, 1e-3);
    assert!(e2 <= 2e-2, "{e2}");
    assert!(e1 / e2 >= 1.8, "{e1} {e2}");
}

#[test]
fn two_term_manufactured_converges_with_derivative() {
    let base = unforced(vec![FracTerm::new(1.0, 1.7), FracTerm::new(1.0, 0.3)], Polynomial::monomial(1, 1.0));
    let (e1, _) = manufactured_error(&base, 2e-3);
    let (e2, derivs) = manufactured_error(&base, 1e-3);
    assert!(e2 <= 2e-2, "{e2}");
    assert!(e1 / e2 >= 1.8, "{e1} {e2}");
    let exact = Series::from_fn(1e-3, derivs[0].len(), |t| 2.0 * t).unwrap();
    let d_err = derivs[0].sup_distance(&exact).unwrap();
    assert!(d_err <= 5e-2, "{d_err}");
}

#[test]
fn bagley_torvik_matches_gl_reference() {
    let p = bagley_torvik(Polynomial::monomial(1, 0.5));
    let reference = gl_direct_solve(&p, &Config::new(0.001, 30.0).unwrap()).unwrap();
    let diffs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| {
            let traj = solve(&p, &Config::new(h, 30.0).unwrap()).unwrap();
            assert!(traj.is_complete());
            traj.y.sup_distance_common(&reference.y).unwrap()
        })
        .collect();
    assert!(diffs[2] <= 0.05, "{diffs:?}");
    assert!(diffs[0] / diffs[1] >= 1.5 && diffs[1] / diffs[2] >= 1.5, "{diffs:?}");
}

#[test]
fn bagley_torvik_initial_data() {
    let p = bagley_torvik(Polynomial::monomial(1, 0.5));
    let traj = solve(&p, &Config::new(0.01, 5.0).unwrap().with_derivatives(true)).unwrap();
    assert_eq!(traj.y.values()[0], 0.0);
    assert_eq!(traj.z1.values()[0], 0.0);
    assert_eq!(traj.y_derivs.as_ref().unwrap()[0].values()[0], 0.0);
    assert_eq!(traj.y.len(), 501);
}

#[test]
fn nonzero_initial_data_reproduced() {
    let p = bagley_torvik(Polynomial::monomial(1, 0.5)).with_initial_conditions(vec![0.3, -1.2]).unwrap();
    let slopes: Vec<f64> = [0.01, 0.005]
        .iter()
        .map(|&h| {
            let traj = solve(&p, &Config::new(h, 1.0).unwrap()).unwrap();
            assert_eq!(traj.y.values()[0], 0.3);
            (traj.y.values()[1] - traj.y.values()[0]) / h
        })
        .collect();
    assert!((slopes[1] + 1.2).abs() < (slopes[0] + 1.2).abs() || (slopes[1] + 1.2).abs() < 1e-9, "{slopes:?}");
}

#[test]
fn babenko_agrees_with_direct_on_short_horizon() {
    let p = bagley_torvik(Polynomial::monomial(1, 0.5));
    let direct = solve(&p, &Config::new(0.01, 5.0).unwrap()).unwrap();
    let babenko = solve(&p, &Config::new(0.01, 5.0).unwrap().with_inversion(Inversion::babenko(30))).unwrap();
    assert!(babenko.diagnostics.babenko_tail.unwrap() <= 1e-8);
    let diff = direct.y.sup_distance(&babenko.y).unwrap();
    assert!(diff <= 2e-3, "{diff}");
}

#[test]
fn cubic_case_is_finite_and_self_converges() {
    let p = bagley_torvik(Polynomial::monomial(3, 0.5));
    let coarse = solve(&p, &Config::new(0.1, 30.0).unwrap()).unwrap();
    assert!(coarse.is_complete());
    let runs: Vec<Series> =
        [0.01, 0.005, 0.0025].iter().map(|&h| solve(&p, &Config::new(h, 30.0).unwrap()).unwrap().y).collect();
    let d1 = runs[0].sup_distance_common(&runs[1]).unwrap();
    let d2 = runs[1].sup_distance_common(&runs[2]).unwrap();
    assert!(d1 / d2 >= 1.5, "{d1} {d2}");
}

#[test]
fn forward_sweep_still_available() {
    let p = bagley_torvik(Polynomial::monomial(1, 0.5));
    let cfg = Config::new(0.01, 2.0).unwrap();
    let a = solve(&p, &cfg.clone().with_sweep(EulerSweep::Forward)).unwrap();
    let b = solve(&p, &cfg).unwrap();
    assert!(a.y.sup_distance(&b.y).unwrap() > 0.0);
    assert!(a.y.sup_distance(&b.y).unwrap() < 0.1);
}

#[test]
fn reruns_are_bit_identical() {
    let p = bagley_torvik(Polynomial::monomial(3, 0.5));
    let cfg = Config::new(0.02, 10.0).unwrap();
    assert_eq!(solve(&p, &cfg).unwrap(), solve(&p, &cfg).unwrap());
}

#[test]
fn single_precision_runs() {
    let p = fracdecomp::ProblemSpec::<f32>::new(
        vec![FracTerm::new(1.0, 0.5)],
        Polynomial::monomial(1, 1.0),
        Forcing::Piecewise(PiecewiseForcing::constant(1.0)),
        vec![0.0],
    )
    .unwrap();
    let traj = solve(&p, &fracdecomp::SolverConfig::new(0.01_f32, 1.0).unwrap()).unwrap();
    assert!(traj.is_complete());
    // D^{1/2}y + y = 1 has y = 1 − E_{1/2}(−√t); y(1) ≈ 0.5724.
    assert!((traj.y.values()[100] - 0.5724).abs() < 2e-2, "{}", traj.y.values()[100]);
}
