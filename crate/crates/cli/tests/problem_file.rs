use fracdecomp::problem::ForcingSegment;
use fracdecomp::{Forcing, FracTerm, PiecewiseForcing, Polynomial, Problem};
use fracdecomp_cli::problem_file::{parse_problem, print_problem};
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, Just(0.5), Just(-2.0), 1e-12..1e-6f64]
}

fn nonzero() -> impl Strategy<Value = f64> {
    coefficient().prop_filter("nonzero", |c| *c != 0.0)
}

fn spec() -> impl Strategy<Value = Problem> {
    let orders = prop::collection::btree_set(0u32..5000, 1..5)
        .prop_map(|set| set.into_iter().rev().map(|k| k as f64 * 1e-3 + 1e-3).collect::<Vec<_>>());
    let terms = orders.prop_flat_map(|orders| {
        let n = orders.len();
        (Just(orders), nonzero(), prop::collection::vec(coefficient(), n - 1))
    });
    let g = prop::collection::vec(coefficient(), 0..5);
    let breaks = prop::collection::btree_set(1u32..1000, 0..4);
    let polys = prop::collection::vec(prop::collection::vec(coefficient(), 1..4), 5);
    let bounded_last = any::<bool>();
    (terms, g, breaks, polys, bounded_last, prop::collection::vec(coefficient(), 5)).prop_map(
        |((orders, lead, rest), g, breaks, polys, bounded_last, ics)| {
            let coefficients: Vec<f64> = std::iter::once(lead).chain(rest).collect();
            let terms: Vec<FracTerm<f64>> =
                orders.iter().zip(&coefficients).map(|(&o, &c)| FracTerm::new(c, o)).collect();
            let mut starts = vec![0.0];
            starts.extend(breaks.iter().map(|&b| b as f64 * 0.01));
            let segments = starts
                .iter()
                .enumerate()
                .map(|(i, &start)| {
                    let end = starts.get(i + 1).copied().or(if bounded_last { Some(start + 1.5) } else { None });
                    ForcingSegment { start, end, poly: Polynomial::new(polys[i].clone()) }
                })
                .collect();
            let forcing = PiecewiseForcing::new(segments).unwrap();
            let m1 = terms[0].integer_order();
            Problem::new(terms, Polynomial::new(g), Forcing::Piecewise(forcing), ics[..m1].to_vec()).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn parse_of_print_is_identity(spec in spec()) {
        let text = print_problem(&spec).unwrap();
        prop_assert_eq!(parse_problem(&text).unwrap(), spec);
    }
}

#[test]
fn shipped_problem_files_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "fode") {
            let text = std::fs::read_to_string(&path).unwrap();
            let spec = parse_problem(&text).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
            assert_eq!(parse_problem(&print_problem(&spec).unwrap()).unwrap(), spec);
            count += 1;
        }
    }
    assert!(count >= 3);
}
