mod common;

use std::collections::HashMap;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spc_core::engine::{count, RunOptions};
use spc_core::finite::{circuit_formula, count_formula};
use spc_core::lang::{load, parse, parse_with, Program};
use spc_core::logic::{enumerate_models, Logic, TheorySpec, DEFAULT_CAP};
use spc_core::measure::{factorize_demo, Problem};
use spc_core::result::Backend;
use spc_core::scalar::{int, rat};
use spc_core::semiring::{SemiringSpec, Value};

use common::{corpus, direct_count, grounded_count, random_fol_program, random_prop_program};

fn values(s: &SemiringSpec, xs: &[i64]) -> Vec<Value> {
    xs.iter().filter_map(|&x| s.value_from_number(&int(x)).ok()).collect()
}

fn same(a: &Value, b: &Value) -> bool {
    a == b || a.approx_eq(b)
}

fn exact(p: &Program) -> BigRational {
    let r = count(p, &RunOptions::default()).unwrap();
    r.value.as_rational().cloned().unwrap_or_else(|| panic!("not exact: {}", r.value))
}

const PLANE: &str = "(set-logic LRA) (set-algebra [REAL,+,*,0,1])
    (declare-function x () REAL) (declare-function y () REAL)
    (set-option bounds x 0 10) (set-option bounds y 0 10)
    (declare-measure x LEBESGUE) (declare-measure y LEBESGUE)";

fn area(f: &str) -> BigRational {
    exact(&parse(&format!("{PLANE} (count {f})")).unwrap())
}

fn boxed(b: [i64; 4]) -> String {
    format!("(({} <= x <= {}) and ({} <= y <= {}))", b[0], b[1], b[2], b[3])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fold_ignores_order(xs in prop::collection::vec(0i64..20, 0..8), seed: u64) {
        for s in SemiringSpec::catalog() {
            let vs = values(&s, &xs);
            let mut shuffled = vs.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let a = s.fold(vs).unwrap();
            let b = s.fold(shuffled).unwrap();
            prop_assert!(same(&a, &b), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn product_distributes_over_fold(a in 0i64..6, xs in prop::collection::vec(0i64..6, 0..6)) {
        for s in SemiringSpec::catalog().into_iter().filter(|s| !s.is_aggregator_only()) {
            let Ok(a) = s.value_from_number(&int(a)) else { continue };
            let vs = values(&s, &xs);
            let left = s.otimes(&a, &s.fold(vs.clone()).unwrap()).unwrap();
            let right = s.fold(vs.iter().map(|v| s.otimes(&a, v).unwrap())).unwrap();
            prop_assert!(same(&left, &right), "{s}: {left} vs {right}");
        }
    }

    #[test]
    fn circuit_matches_enumeration(seed: u64, which in 0usize..3) {
        let alg = ["[NAT,+,*,0,1]", "[NAT,max,*,0,1]", "[BOOL,or,and,0,1]"][which];
        let src = random_prop_program(&mut ChaCha8Rng::seed_from_u64(seed), alg, 8);
        let p = parse(&src).unwrap();
        let q = p.query_formula();
        let a = count_formula(&p, &q, DEFAULT_CAP).unwrap();
        let b = circuit_formula(&p, &q).unwrap();
        prop_assert_eq!(a.value, b.value, "{}", src);
    }

    #[test]
    fn minimal_models_are_the_subset_minimal_ones(seed: u64) {
        let src = random_prop_program(&mut ChaCha8Rng::seed_from_u64(seed), "[NAT,+,*,0,1]", 6);
        let p = parse(&src).unwrap();
        let f = p.resolve(&p.query_formula()).unwrap();
        let all = enumerate_models(&TheorySpec::new(vec![Logic::Pl]), &p.vocabulary, &f).unwrap();
        let min = enumerate_models(&TheorySpec::new(vec![Logic::PlMin]), &p.vocabulary, &f).unwrap();
        let expected: Vec<_> = all
            .iter()
            .filter(|m| !all.iter().any(|o| o.true_atoms.is_subset(&m.true_atoms) && o.true_atoms != m.true_atoms))
            .map(|m| m.true_atoms.clone())
            .collect();
        let got: Vec<_> = min.iter().map(|m| m.true_atoms.clone()).collect();
        prop_assert_eq!(got, expected, "{}", src);
    }

    #[test]
    fn measure_is_additive_on_a_line(a in 0i64..10, b in 0i64..10, c in 0i64..10) {
        let mut v = [a, b, c];
        v.sort();
        let [a, b, c] = v;
        let whole = area(&format!("(({a} <= x <= {c}) and (0 <= y <= 1))"));
        let left = area(&format!("(({a} <= x < {b}) and (0 <= y <= 1))"));
        let right = area(&format!("(({b} <= x <= {c}) and (0 <= y <= 1))"));
        prop_assert_eq!(whole.clone(), left + right.clone());
        prop_assert!(right <= whole);
    }

    #[test]
    fn measure_satisfies_inclusion_exclusion(a in prop::array::uniform4(0i64..10), b in prop::array::uniform4(0i64..10)) {
        let (fa, fb) = (boxed(a), boxed(b));
        let union = area(&format!("({fa} or {fb})"));
        let meet = area(&format!("({fa} and {fb})"));
        prop_assert_eq!(area(&fa) + area(&fb), union.clone() + meet.clone());
        prop_assert!(meet <= union);
    }

    #[test]
    fn factorization_error_never_increases(m in prop::array::uniform4(0i64..6), seed in 0u64..100) {
        let input = vec![vec![int(m[0]), int(m[1])], vec![int(m[2]), int(m[3])]];
        let f = factorize_demo(&input, 1, 300, &rat(1, 100), seed).unwrap();
        prop_assert!(!f.diverged);
        prop_assert!(f.history.windows(2).all(|w| w[1] <= w[0]), "{:?}", f.history);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn grounding_keeps_model_count(seed: u64) {
        let src = random_fol_program(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = parse(&src).unwrap();
        prop_assert_eq!(grounded_count(&p), direct_count(&p), "{}", src);
    }

    #[test]
    fn vertex_enumeration_agrees_with_grid(cx in -3i64..=3, cy in -3i64..=3, r in 0i64..6, max: bool) {
        let alg = if max { "[REAL,max,0]" } else { "[REAL,min,0]" };
        let src = format!(
            "(set-logic LRA) (set-algebra {alg})
             (declare-function x () REAL) (declare-function y () REAL)
             (set-option bounds x 0 3) (set-option bounds y 0 3)
             (declare-weight TRUE ({cx}*x + {cy}*y))
             (count (x + y >= {r}))"
        );
        let problem = Problem::from_program(&parse(&src).unwrap()).unwrap();
        let v = problem.vertex_enum().unwrap();
        let g = problem.grid_refine().unwrap();
        match (v.value, g.value) {
            (Some(v), Some(g)) => {
                let v = spc_core::Scalar::to_f64(&v);
                prop_assert!((v - g).abs() <= 1e-3, "{v} vs {g}");
            }
            (None, None) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }
}

#[test]
fn composition_projects_under_idempotent_sums() {
    let env1 = "(set-logic PL) (set-algebra [NAT,max,*,0,1])
        (declare-predicate a ()) (declare-predicate b ())
        (declare-weight (a 3)) (declare-weight ((neg a) 1)) (declare-weight (b 2)) (declare-weight ((neg b) 5))
        (count (a or b))";
    let env2 = "(set-logic PL) (set-algebra [NAT,max,*,0,1])
        (declare-predicate c ()) (declare-predicate d ())
        (declare-weight (c 4)) (declare-weight ((neg c) 2)) (declare-weight (d 1)) (declare-weight ((neg d) 7))
        (count (c => d))";
    let files: HashMap<&str, &str> = [("e1", env1), ("e2", env2)].into();
    let resolver = |name: &str| parse(files[name]).map_err(|d| d.to_string());
    let composed = parse_with("(compose \"e1\" \"e2\") (count ((a or b) and (c => d)))", &resolver).unwrap();
    let whole = count(&composed, &RunOptions::default()).unwrap().value;
    let (w1, w2) = whole.components().unwrap();
    let alone1 = count(&parse(env1).unwrap(), &RunOptions::default()).unwrap().value;
    let alone2 = count(&parse(env2).unwrap(), &RunOptions::default()).unwrap().value;
    assert_eq!(w1, &alone1);
    assert_eq!(w2, &alone2);
}

#[test]
fn monte_carlo_converges_to_the_exact_measure() {
    for file in ["volume_box.sp", "hybrid_done.sp"] {
        let p = corpus(file);
        let truth = spc_core::Scalar::to_f64(&exact(&p));
        let mut last_se = f64::INFINITY;
        for samples in [100_000, 1_000_000] {
            let opts = RunOptions { backend: Backend::Mc, samples, seed: 3, ..RunOptions::default() };
            let r = count(&p, &opts).unwrap();
            let est = r.value.as_f64().unwrap();
            let se = r.std_error.unwrap();
            assert!((est - truth).abs() <= 3.0 * se, "{file} n={samples}: {est} vs {truth} (se {se})");
            assert!(se < last_se);
            last_se = se;
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let p = load(common::corpus_dir().join("volume_box.sp")).unwrap();
    let opts = RunOptions { backend: Backend::Mc, samples: 50_000, seed: 9, ..RunOptions::default() };
    assert_eq!(count(&p, &opts).unwrap().value, count(&p, &opts).unwrap().value);
}

#[test]
fn learn_then_infer_scales_by_the_optimal_first_models() {
    let env1 = "(set-logic PL) (set-algebra [NAT,max,*,0,1])
        (declare-predicate a ()) (declare-predicate b ())
        (declare-weight (a 1)) (declare-weight ((neg a) 1)) (declare-weight (b 1)) (declare-weight ((neg b) 1))
        (count (a <=> not b))";
    let env2 = "(set-logic PL) (set-algebra [NAT,+,*,0,1])
        (declare-predicate c ()) (declare-predicate d ())
        (declare-weight (c 4)) (declare-weight ((neg c) 2)) (declare-weight (d 1)) (declare-weight ((neg d) 7))
        (count (c => d))";
    let files: HashMap<&str, &str> = [("e1", env1), ("e2", env2)].into();
    let resolver = |name: &str| parse(files[name]).map_err(|d| d.to_string());
    let composed = parse_with(
        "(compose \"e1\" \"e2\") (set-option composition learn-then-infer)
         (count ((a <=> not b) and (c => d)))",
        &resolver,
    )
    .unwrap();
    let whole = count(&composed, &RunOptions::default()).unwrap().value;
    let alone2 = count(&parse(env2).unwrap(), &RunOptions::default()).unwrap().value;
    assert_eq!(alone2, Value::int(20));
    assert_eq!(whole, Value::pair(Value::int(1), Value::int(40)));
}
