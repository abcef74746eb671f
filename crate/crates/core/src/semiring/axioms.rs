//! Empirical checks of the semiring laws on sampled elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Carrier, Ext, SemiringSpec, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Law {
    PlusCommutative,
    PlusAssociative,
    PlusIdentity,
    TimesCommutative,
    TimesAssociative,
    TimesIdentity,
    Distributive,
    /// An operation failed outright on the sampled elements.
    Defined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Severity {
    /// The two sides differ, but only by float rounding.
    Tolerance,
    Hard,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub law: Law,
    pub severity: Severity,
    pub elements: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub semiring: String,
    pub samples: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    /// No violation beyond float tolerance.
    pub fn passes(&self) -> bool {
        self.violations.iter().all(|v| v.severity == Severity::Tolerance)
    }

    pub fn hard_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Hard)
    }

    /// Distributivity (and the identities it relies on) held on every sample.
    pub fn distributive(&self) -> bool {
        self.passes()
    }
}

/// Samples `sample_count` triples and checks commutativity, associativity,
/// identities and distributivity. Deterministic in `seed`.
///
/// Identity laws are skipped for aggregator-only triples, whose `empty` is
/// just the value of an empty aggregate.
pub fn check_axioms(s: &SemiringSpec, sample_count: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        semiring: s.to_string(),
        samples: sample_count,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    if s.is_aggregator_only() {
        report
            .notes
            .push("aggregator-only: identity laws not demanded".to_string());
    }
    let with_inf = uses_infinity(s);
    for _ in 0..sample_count {
        let a = sample(&mut rng, s, with_inf);
        let b = sample(&mut rng, s, with_inf);
        let c = sample(&mut rng, s, with_inf);
        report.violations.extend(check_triple(s, &a, &b, &c));
    }
    report
}

/// All law violations witnessed by one triple.
pub fn check_triple(s: &SemiringSpec, a: &Value, b: &Value, c: &Value) -> Vec<Violation> {
    let mut out = Vec::new();
    let scale = a.magnitude() + b.magnitude() + c.magnitude();
    let mut law = |law: Law, elems: &[&Value], lhs: crate::Result<Value>, rhs: crate::Result<Value>, scale: f64| {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                if l != r {
                    let severity = if l.close_to(&r, scale) && !(l.is_exact() && r.is_exact()) {
                        Severity::Tolerance
                    } else {
                        Severity::Hard
                    };
                    out.push(Violation {
                        law,
                        severity,
                        elements: elems.iter().map(|v| v.to_string()).collect(),
                        lhs: l.to_string(),
                        rhs: r.to_string(),
                    });
                }
            }
            (l, r) => out.push(Violation {
                law: Law::Defined,
                severity: Severity::Hard,
                elements: elems.iter().map(|v| v.to_string()).collect(),
                lhs: l.map(|v| v.to_string()).unwrap_or_else(|e| e.to_string()),
                rhs: r.map(|v| v.to_string()).unwrap_or_else(|e| e.to_string()),
            }),
        }
    };

    law(Law::PlusCommutative, &[a, b], s.oplus(a, b), s.oplus(b, a), scale);
    law(
        Law::PlusAssociative,
        &[a, b, c],
        s.oplus(a, b).and_then(|ab| s.oplus(&ab, c)),
        s.oplus(b, c).and_then(|bc| s.oplus(a, &bc)),
        scale,
    );
    if !s.is_aggregator_only() {
        law(Law::PlusIdentity, &[a], s.oplus(a, &s.empty), Ok(a.clone()), scale);
    }
    if let Some(one) = &s.one {
        let prod_scale = a.magnitude() * (b.magnitude() + c.magnitude())
            + a.magnitude() * b.magnitude() * c.magnitude();
        law(Law::TimesCommutative, &[a, b], s.otimes(a, b), s.otimes(b, a), prod_scale);
        law(
            Law::TimesAssociative,
            &[a, b, c],
            s.otimes(a, b).and_then(|ab| s.otimes(&ab, c)),
            s.otimes(b, c).and_then(|bc| s.otimes(a, &bc)),
            prod_scale,
        );
        law(Law::TimesIdentity, &[a], s.otimes(a, one), Ok(a.clone()), scale);
        law(
            Law::Distributive,
            &[a, b, c],
            s.oplus(b, c).and_then(|bc| s.otimes(a, &bc)),
            s.otimes(a, b)
                .and_then(|ab| s.otimes(a, c).and_then(|ac| s.oplus(&ab, &ac))),
            prod_scale,
        );
    }
    out
}

fn uses_infinity(s: &SemiringSpec) -> bool {
    let inf = |v: &Value| matches!(v, Value::Num(Ext::PosInf | Ext::NegInf));
    inf(&s.empty) || s.one.as_ref().is_some_and(inf)
}

fn sample(rng: &mut ChaCha8Rng, s: &SemiringSpec, with_inf: bool) -> Value {
    if with_inf && rng.gen_bool(0.05) {
        return s.empty.clone();
    }
    match &s.carrier {
        Carrier::Boolean => Value::Bool(rng.gen()),
        Carrier::Natural => Value::Num(Ext::Fin(BigRational::from_integer(sample_int(rng, false)))),
        Carrier::Integer => Value::Num(Ext::Fin(BigRational::from_integer(sample_int(rng, true)))),
        Carrier::Rational | Carrier::Real | Carrier::ExtendedReal => {
            let n = sample_int(rng, true);
            let d = BigInt::from(rng.gen_range(1..=64u32));
            Value::Num(Ext::Fin(BigRational::new(n, d)))
        }
        Carrier::Float => {
            // mixed magnitudes make rounding visible
            let exp = rng.gen_range(-8..=8);
            let mant: f64 = rng.gen_range(-1.0..1.0);
            Value::Float(mant * 10f64.powi(exp))
        }
        Carrier::Pair(x, y) => Value::pair(
            sample(rng, x, with_inf && uses_infinity(x)),
            sample(rng, y, with_inf && uses_infinity(y)),
        ),
    }
}

fn sample_int(rng: &mut ChaCha8Rng, signed: bool) -> BigInt {
    let magnitude = match rng.gen_range(0..10) {
        0..=6 => BigInt::from(rng.gen_range(0..=20u32)),
        7 | 8 => BigInt::from(rng.gen_range(0..=1_000_000u64)),
        _ => BigInt::from(rng.gen::<u64>()) * BigInt::from(rng.gen::<u64>()),
    };
    if signed && rng.gen_bool(0.5) {
        -magnitude
    } else {
        magnitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_semiring_is_clean() {
        let r = check_axioms(&SemiringSpec::nat_sum_product(), 1000, 7);
        assert!(r.violations.is_empty(), "{:?}", r.violations.first());
        assert!(r.notes.is_empty());
    }

    #[test]
    fn aggregator_only_skips_identity() {
        let r = check_axioms(&SemiringSpec::builtin("[REAL,inf,0]"), 200, 1);
        assert!(r.passes());
        assert!(r.notes.iter().any(|n| n.contains("aggregator-only")));
        assert!(r.violations.iter().all(|v| v.law != Law::PlusIdentity));
    }

    #[test]
    fn float_rounding_is_tolerance_level() {
        let s = SemiringSpec::float_sum_product();
        let (a, b, c) = (Value::Float(0.1), Value::Float(0.2), Value::Float(0.3));
        // (0.1 + 0.2) + 0.3 != 0.1 + (0.2 + 0.3) in binary64
        assert_ne!((0.1f64 + 0.2) + 0.3, 0.1 + (0.2f64 + 0.3));
        let v = check_triple(&s, &a, &b, &c);
        let assoc: Vec<_> = v.iter().filter(|v| v.law == Law::PlusAssociative).collect();
        assert_eq!(assoc.len(), 1);
        assert_eq!(assoc[0].severity, Severity::Tolerance);
    }

    #[test]
    fn deterministic_in_seed() {
        let s = SemiringSpec::float_sum_product();
        let a = check_axioms(&s, 300, 42);
        let b = check_axioms(&s, 300, 42);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn non_identity_empty_is_caught() {
        // 5 is accepted as an empty-aggregate sentinel but is no ⊕-identity
        let s = SemiringSpec::builtin("[NAT,+,*,5,1]");
        let r = check_axioms(&s, 50, 0);
        assert!(r.hard_violations().any(|v| v.law == Law::PlusIdentity));
    }
}
