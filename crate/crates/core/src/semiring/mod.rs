//! Commutative semirings and aggregator triples.
//!
//! A [`SemiringSpec`] is one entry of the built-in catalog (selected with the
//! `[CARRIER,plus(,times),empty(,one)]` syntax) or the pairwise composition of
//! two specs. Values are runtime-tagged [`Value`]s; exact carriers compute with
//! arbitrary-precision rationals.

mod axioms;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{float_close, fmt_float, fmt_rational, int, parse_rational};

pub use axioms::{check_axioms, check_triple, AxiomReport, Law, Severity, Violation};

/// A number on the extended rational line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ext {
    NegInf,
    Fin(BigRational),
    PosInf,
}

impl Ext {
    pub fn int(n: i64) -> Self {
        Ext::Fin(int(n))
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Ext::Fin(r) => Some(r),
            _ => None,
        }
    }

    fn to_f64(&self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn add(&self, other: &Ext) -> Result<Ext> {
        Ok(match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::PosInf, Ext::NegInf) | (Ext::NegInf, Ext::PosInf) => {
                return Err(Error::Undefined("inf + -inf".into()))
            }
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
        })
    }

    fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a * b),
            // measure-theoretic convention 0 * inf = 0
            (Ext::Fin(a), _) | (_, Ext::Fin(a)) if a.is_zero() => Ext::Fin(BigRational::zero()),
            (a, b) => {
                if a.sign() * b.sign() > 0 {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
        }
    }

    fn sign(&self) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(r) if r.is_negative() => -1,
            Ext::Fin(r) if r.is_zero() => 0,
            Ext::Fin(_) => 1,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::PosInf => f.write_str("inf"),
            Ext::Fin(r) => f.write_str(&fmt_rational(r)),
        }
    }
}

/// An element of a semiring carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Bool(bool),
    Num(Ext),
    Float(f64),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Num(Ext::int(n))
    }

    pub fn rational(r: BigRational) -> Self {
        Value::Num(Ext::Fin(r))
    }

    pub fn pair(a: Value, b: Value) -> Self {
        Value::Pair(Box::new(a), Box::new(b))
    }

    /// The finite rational inside a numeric value.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Num(Ext::Fin(r)) => Some(r),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(e) => Some(e.to_f64()),
            Value::Float(x) => Some(*x),
            Value::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
            Value::Pair(..) => None,
        }
    }

    pub fn components(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// False if any component went through binary floating point.
    pub fn is_exact(&self) -> bool {
        match self {
            Value::Float(_) => false,
            Value::Pair(a, b) => a.is_exact() && b.is_exact(),
            _ => true,
        }
    }

    /// Equality that tolerates float rounding (1e-9 relative, 1e-12 absolute).
    pub fn approx_eq(&self, other: &Value) -> bool {
        self.close_to(other, 0.0)
    }

    pub(crate) fn close_to(&self, other: &Value, scale: f64) -> bool {
        match (self, other) {
            (Value::Float(_), _) | (_, Value::Float(_)) => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => float_close(a, b, scale),
                _ => false,
            },
            (Value::Pair(a, b), Value::Pair(c, d)) => a.close_to(c, scale) && b.close_to(d, scale),
            _ => self == other,
        }
    }

    fn magnitude(&self) -> f64 {
        match self {
            Value::Pair(a, b) => a.magnitude().max(b.magnitude()),
            v => v.as_f64().map(f64::abs).unwrap_or(0.0),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Num(_) => "number",
            Value::Float(_) => "float",
            Value::Pair(..) => "pair",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
            Value::Num(e) => e.fmt(f),
            Value::Float(x) => f.write_str(&fmt_float(*x)),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Carrier {
    Boolean,
    Natural,
    Integer,
    Rational,
    Real,
    ExtendedReal,
    /// Reals carried in binary64.
    Float,
    Pair(Box<SemiringSpec>, Box<SemiringSpec>),
}

impl Carrier {
    fn keyword(&self) -> &'static str {
        match self {
            Carrier::Boolean => "BOOL",
            Carrier::Natural => "NAT",
            Carrier::Integer => "INT",
            Carrier::Rational => "RAT",
            Carrier::Real => "REAL",
            Carrier::ExtendedReal => "EREAL",
            Carrier::Float => "FLOAT",
            Carrier::Pair(..) => "PAIR",
        }
    }

    fn from_keyword(s: &str) -> Option<Carrier> {
        Some(match s {
            "BOOL" => Carrier::Boolean,
            "NAT" => Carrier::Natural,
            "INT" => Carrier::Integer,
            "RAT" => Carrier::Rational,
            "REAL" => Carrier::Real,
            "EREAL" => Carrier::ExtendedReal,
            "FLOAT" => Carrier::Float,
            _ => return None,
        })
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Carrier::Boolean | Carrier::Pair(..))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlusOp {
    Or,
    Add,
    Max,
    Min,
    /// Infimum; on the finite aggregates used here it coincides with `Min`.
    Inf,
    Sup,
    /// Componentwise ⊕ of a composed pair.
    Pairwise,
}

impl PlusOp {
    fn keyword(self) -> &'static str {
        match self {
            PlusOp::Or => "or",
            PlusOp::Add => "+",
            PlusOp::Max => "max",
            PlusOp::Min => "min",
            PlusOp::Inf => "inf",
            PlusOp::Sup => "sup",
            PlusOp::Pairwise => "pairwise",
        }
    }

    fn from_keyword(s: &str) -> Option<PlusOp> {
        Some(match s {
            "or" => PlusOp::Or,
            "+" => PlusOp::Add,
            "max" => PlusOp::Max,
            "min" => PlusOp::Min,
            "inf" => PlusOp::Inf,
            "sup" => PlusOp::Sup,
            _ => return None,
        })
    }

    /// `a ⊕ b ∈ {a, b}` for all a, b.
    pub fn is_selective(self) -> bool {
        matches!(
            self,
            PlusOp::Or | PlusOp::Max | PlusOp::Min | PlusOp::Inf | PlusOp::Sup
        )
    }

    /// Whether ⊕ picks the smaller element (min/inf).
    pub fn minimizes(self) -> bool {
        matches!(self, PlusOp::Min | PlusOp::Inf)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimesOp {
    And,
    Mul,
}

impl TimesOp {
    fn keyword(self) -> &'static str {
        match self {
            TimesOp::And => "and",
            TimesOp::Mul => "*",
        }
    }

    fn from_keyword(s: &str) -> Option<TimesOp> {
        Some(match s {
            "and" => TimesOp::And,
            "*" => TimesOp::Mul,
            _ => return None,
        })
    }
}

/// A commutative semiring `(S, ⊕, ⊗, 0, 1)` or an aggregator triple `(S, ⊕, 0)`.
///
/// For aggregator triples `empty` is only the value of an empty aggregate; it
/// need not be a ⊕-identity (e.g. `[REAL,inf,0]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiringSpec {
    pub carrier: Carrier,
    pub plus: PlusOp,
    pub times: Option<TimesOp>,
    pub empty: Value,
    pub one: Option<Value>,
}

impl SemiringSpec {
    /// Builds and validates a catalog semiring.
    pub fn new(
        carrier: Carrier,
        plus: PlusOp,
        times: Option<TimesOp>,
        empty: Value,
        one: Option<Value>,
    ) -> std::result::Result<Self, String> {
        let spec = SemiringSpec {
            carrier,
            plus,
            times,
            empty,
            one,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let c = &self.carrier;
        if matches!(c, Carrier::Pair(..)) {
            return Ok(());
        }
        let plus_ok = match self.plus {
            PlusOp::Or => *c == Carrier::Boolean,
            PlusOp::Pairwise => false,
            _ => c.is_numeric(),
        };
        if !plus_ok {
            return Err(format!(
                "`{}` is not an addition on {}",
                self.plus.keyword(),
                c.keyword()
            ));
        }
        if let Some(t) = self.times {
            let times_ok = match t {
                TimesOp::And => *c == Carrier::Boolean,
                TimesOp::Mul => c.is_numeric(),
            };
            if !times_ok {
                return Err(format!(
                    "`{}` is not a multiplication on {}",
                    t.keyword(),
                    c.keyword()
                ));
            }
            if self.one.is_none() {
                return Err("a semiring with ⊗ must declare its ⊗-identity".into());
            }
        } else if self.one.is_some() {
            return Err("a ⊗-identity was given without ⊗".into());
        }
        if !self.contains(&self.empty) {
            return Err(format!("{} is not an element of {}", self.empty, c.keyword()));
        }
        if let Some(one) = &self.one {
            if !self.contains(one) {
                return Err(format!("{one} is not an element of {}", c.keyword()));
            }
        }
        Ok(())
    }

    /// Parses `[NAT,max,*,0,1]`, `[REAL,inf,0]`, ...
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format!("algebra `{text}` must be written as [CARRIER,plus,...]"))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let carrier = Carrier::from_keyword(parts[0])
            .ok_or_else(|| format!("unknown carrier `{}`", parts[0]))?;
        let (plus, times, empty, one) = match parts.len() {
            3 => (parts[1], None, parts[2], None),
            5 => (parts[1], Some(parts[2]), parts[3], Some(parts[4])),
            n => {
                return Err(format!(
                    "algebra needs 3 ([C,plus,empty]) or 5 ([C,plus,times,empty,one]) fields, got {n}"
                ))
            }
        };
        let plus = PlusOp::from_keyword(plus).ok_or_else(|| format!("unknown addition `{plus}`"))?;
        let times = times
            .map(|t| TimesOp::from_keyword(t).ok_or_else(|| format!("unknown multiplication `{t}`")))
            .transpose()?;
        let empty = parse_element(&carrier, empty)?;
        let one = one.map(|o| parse_element(&carrier, o)).transpose()?;
        SemiringSpec::new(carrier, plus, times, empty, one)
    }

    /// One of the built-in semirings by surface name.
    pub fn builtin(name: &str) -> Self {
        SemiringSpec::parse(name).unwrap_or_else(|e| panic!("bad builtin {name}: {e}"))
    }

    pub fn bool_or_and() -> Self {
        Self::builtin("[BOOL,or,and,0,1]")
    }

    pub fn nat_sum_product() -> Self {
        Self::builtin("[NAT,+,*,0,1]")
    }

    pub fn nat_max_product() -> Self {
        Self::builtin("[NAT,max,*,0,1]")
    }

    pub fn real_sum_product() -> Self {
        Self::builtin("[REAL,+,*,0,1]")
    }

    pub fn float_sum_product() -> Self {
        Self::builtin("[FLOAT,+,*,0,1]")
    }

    /// The surface algebras used throughout the examples, plus their variants.
    pub fn catalog() -> Vec<SemiringSpec> {
        [
            "[BOOL,or,and,0,1]",
            "[BOOL,or,0]",
            "[NAT,+,*,0,1]",
            "[NAT,+,0]",
            "[NAT,max,*,0,1]",
            "[NAT,max,0]",
            "[NAT,min,inf]",
            "[INT,+,*,0,1]",
            "[RAT,+,*,0,1]",
            "[REAL,+,*,0,1]",
            "[REAL,+,0]",
            "[REAL,inf,0]",
            "[REAL,sup,0]",
            "[FLOAT,+,*,0,1]",
        ]
        .into_iter()
        .map(SemiringSpec::builtin)
        .collect()
    }

    /// Pairwise composition: carrier `S1 × S2`, empty `(0₁, 0₂)`, componentwise ⊕.
    ///
    /// Only the aggregator triples take part; any ⊗ of the inputs is dropped.
    pub fn compose(first: &SemiringSpec, second: &SemiringSpec) -> SemiringSpec {
        SemiringSpec {
            empty: Value::pair(first.empty.clone(), second.empty.clone()),
            carrier: Carrier::Pair(Box::new(first.clone()), Box::new(second.clone())),
            plus: PlusOp::Pairwise,
            times: None,
            one: None,
        }
    }

    pub fn is_aggregator_only(&self) -> bool {
        self.times.is_none()
    }

    pub fn is_selective(&self) -> bool {
        self.plus.is_selective()
    }

    pub fn components(&self) -> Option<(&SemiringSpec, &SemiringSpec)> {
        match &self.carrier {
            Carrier::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.carrier, v) {
            (Carrier::Boolean, Value::Bool(_)) => true,
            (Carrier::Natural, Value::Num(Ext::Fin(r))) => r.is_integer() && !r.is_negative(),
            (Carrier::Natural, Value::Num(Ext::PosInf)) => true,
            (Carrier::Integer, Value::Num(Ext::Fin(r))) => r.is_integer(),
            (Carrier::Integer, Value::Num(_)) => true,
            (Carrier::Rational | Carrier::Real | Carrier::ExtendedReal, Value::Num(_)) => true,
            (Carrier::Real | Carrier::ExtendedReal | Carrier::Float, Value::Float(_)) => true,
            (Carrier::Pair(a, b), Value::Pair(x, y)) => a.contains(x) && b.contains(y),
            _ => false,
        }
    }

    fn check(&self, v: &Value) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(format!(
                "{} ({}) is not an element of {self}",
                v,
                v.kind()
            )))
        }
    }

    /// `a ⊕ b`.
    pub fn oplus(&self, a: &Value, b: &Value) -> Result<Value> {
        self.check(a)?;
        self.check(b)?;
        self.oplus_unchecked(a, b)
    }

    fn oplus_unchecked(&self, a: &Value, b: &Value) -> Result<Value> {
        if let (Carrier::Pair(s1, s2), Value::Pair(a1, a2), Value::Pair(b1, b2)) = (&self.carrier, a, b) {
            return Ok(Value::pair(s1.oplus_unchecked(a1, b1)?, s2.oplus_unchecked(a2, b2)?));
        }
        match self.plus {
            PlusOp::Or => match (a, b) {
                (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(*x || *y)),
                _ => Err(self.mismatch(a, b)),
            },
            PlusOp::Add => numeric(a, b, |x, y| x.add(y), |x, y| Ok(x + y)),
            PlusOp::Max | PlusOp::Sup => pick(a, b, Ordering::Greater),
            PlusOp::Min | PlusOp::Inf => pick(a, b, Ordering::Less),
            PlusOp::Pairwise => Err(self.mismatch(a, b)),
        }
    }

    /// `a ⊗ b`; fails for aggregator-only triples and composed pairs.
    pub fn otimes(&self, a: &Value, b: &Value) -> Result<Value> {
        let times = self.times.ok_or_else(|| Error::NoTimes(self.to_string()))?;
        self.check(a)?;
        self.check(b)?;
        match times {
            TimesOp::And => match (a, b) {
                (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(*x && *y)),
                _ => Err(self.mismatch(a, b)),
            },
            TimesOp::Mul => numeric(a, b, |x, y| Ok(x.mul(y)), |x, y| Ok(x * y)),
        }
    }

    /// Left fold with ⊕ in the given order; the empty sequence gives `empty`.
    pub fn fold<I>(&self, items: I) -> Result<Value>
    where
        I: IntoIterator<Item = Value>,
    {
        let mut iter = items.into_iter();
        let Some(first) = iter.next() else {
            return Ok(self.empty.clone());
        };
        self.check(&first)?;
        iter.try_fold(first, |acc, v| self.oplus(&acc, &v))
    }

    /// ⊗-product of a sequence, starting from `one`.
    pub fn product<I>(&self, items: I) -> Result<Value>
    where
        I: IntoIterator<Item = Value>,
    {
        let one = self.one.clone().ok_or_else(|| Error::NoTimes(self.to_string()))?;
        items.into_iter().try_fold(one, |acc, v| self.otimes(&acc, &v))
    }

    /// The value used for "weight one" when a program does not declare weights.
    pub fn unit(&self) -> Value {
        if let Some(one) = &self.one {
            return one.clone();
        }
        match &self.carrier {
            Carrier::Boolean => Value::Bool(true),
            Carrier::Float => Value::Float(1.0),
            Carrier::Pair(a, b) => Value::pair(a.unit(), b.unit()),
            _ => Value::int(1),
        }
    }

    /// Maps a number computed by a weight term into this carrier.
    pub fn value_from_number(&self, r: &BigRational) -> Result<Value> {
        let v = match &self.carrier {
            Carrier::Boolean => {
                if r.is_zero() {
                    Value::Bool(false)
                } else if *r == int(1) {
                    Value::Bool(true)
                } else {
                    return Err(Error::CarrierMismatch(format!(
                        "weight {} is not a boolean",
                        fmt_rational(r)
                    )));
                }
            }
            Carrier::Float => Value::Float(r.to_f64().unwrap_or(f64::NAN)),
            Carrier::Pair(..) => {
                return Err(Error::CarrierMismatch(
                    "a scalar weight cannot populate a pair carrier".into(),
                ))
            }
            _ => Value::Num(Ext::Fin(r.clone())),
        };
        self.check(&v)?;
        Ok(v)
    }

    fn mismatch(&self, a: &Value, b: &Value) -> Error {
        Error::CarrierMismatch(format!("cannot combine {a} and {b} in {self}"))
    }
}

impl fmt::Display for SemiringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Carrier::Pair(a, b) = &self.carrier {
            return write!(f, "({a} x {b})");
        }
        write!(f, "[{},{}", self.carrier.keyword(), self.plus.keyword())?;
        if let Some(t) = self.times {
            write!(f, ",{}", t.keyword())?;
        }
        write!(f, ",{}", element_keyword(&self.empty))?;
        if let Some(one) = &self.one {
            write!(f, ",{}", element_keyword(one))?;
        }
        f.write_str("]")
    }
}

fn element_keyword(v: &Value) -> String {
    match v {
        Value::Num(Ext::PosInf) => "inf".into(),
        Value::Num(Ext::NegInf) => "-inf".into(),
        other => other.to_string(),
    }
}

fn parse_element(carrier: &Carrier, text: &str) -> std::result::Result<Value, String> {
    let bad = || format!("`{text}` is not an element of {}", carrier.keyword());
    match carrier {
        Carrier::Boolean => match text {
            "0" | "false" => Ok(Value::Bool(false)),
            "1" | "true" => Ok(Value::Bool(true)),
            _ => Err(bad()),
        },
        Carrier::Float => match text {
            "inf" => Ok(Value::Float(f64::INFINITY)),
            "-inf" => Ok(Value::Float(f64::NEG_INFINITY)),
            _ => parse_rational(text)
                .and_then(|r| r.to_f64())
                .map(Value::Float)
                .ok_or_else(bad),
        },
        _ => match text {
            "inf" => Ok(Value::Num(Ext::PosInf)),
            "-inf" => Ok(Value::Num(Ext::NegInf)),
            _ => parse_rational(text).map(|r| Value::Num(Ext::Fin(r))).ok_or_else(bad),
        },
    }
}

fn numeric(
    a: &Value,
    b: &Value,
    exact: impl Fn(&Ext, &Ext) -> Result<Ext>,
    float: impl Fn(f64, f64) -> Result<f64>,
) -> Result<Value> {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => Ok(Value::Num(exact(x, y)?)),
        (Value::Num(_) | Value::Float(_), Value::Num(_) | Value::Float(_)) => Ok(Value::Float(float(
            a.as_f64().unwrap_or(f64::NAN),
            b.as_f64().unwrap_or(f64::NAN),
        )?)),
        _ => Err(Error::CarrierMismatch(format!("cannot combine {a} and {b}"))),
    }
}

/// Returns `a` if `a` compares `keep` to `b` or equal, else `b`.
fn pick(a: &Value, b: &Value, keep: Ordering) -> Result<Value> {
    let ord = match (a, b) {
        (Value::Num(x), Value::Num(y)) => x.cmp(y),
        (Value::Num(_) | Value::Float(_), Value::Num(_) | Value::Float(_)) => {
            let (x, y) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            x.partial_cmp(&y)
                .ok_or_else(|| Error::Undefined(format!("comparison of {x} and {y}")))?
        }
        _ => return Err(Error::CarrierMismatch(format!("cannot compare {a} and {b}"))),
    };
    Ok(if ord == keep || ord == Ordering::Equal {
        a.clone()
    } else {
        b.clone()
    })
}

/// `BigInt` helper for callers building large naturals.
pub fn nat(n: impl Into<BigInt>) -> Value {
    Value::Num(Ext::Fin(BigRational::from_integer(n.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn s(name: &str) -> SemiringSpec {
        SemiringSpec::builtin(name)
    }

    #[test]
    fn oplus_examples() {
        assert_eq!(s("[NAT,+,0]").oplus(&Value::int(1), &Value::int(1)).unwrap(), Value::int(2));
        assert_eq!(s("[NAT,max,0]").oplus(&Value::int(6), &Value::int(3)).unwrap(), Value::int(6));
        let b = s("[BOOL,or,0]");
        assert_eq!(b.oplus(&Value::Bool(true), &Value::Bool(true)).unwrap(), Value::Bool(true));
    }

    #[test]
    fn oplus_rejects_foreign_values() {
        let err = s("[NAT,+,0]").oplus(&Value::Bool(true), &Value::int(1));
        assert!(matches!(err, Err(Error::CarrierMismatch(_))));
        let err = s("[NAT,+,0]").oplus(&Value::rational(rat(1, 2)), &Value::int(1));
        assert!(matches!(err, Err(Error::CarrierMismatch(_))));
    }

    #[test]
    fn otimes_examples() {
        let mpe = s("[NAT,max,*,0,1]");
        assert_eq!(mpe.otimes(&Value::int(1), &Value::int(4)).unwrap(), Value::int(4));
        for sr in SemiringSpec::catalog().into_iter().filter(|s| s.times.is_some()) {
            let one = sr.one.clone().unwrap();
            let a = sr.unit();
            assert_eq!(sr.otimes(&a, &one).unwrap(), a, "{sr}");
        }
        let pair = SemiringSpec::compose(&s("[NAT,min,inf]"), &s("[REAL,+,0]"));
        let v = Value::pair(Value::int(0), Value::int(0));
        assert!(matches!(pair.otimes(&v, &v), Err(Error::NoTimes(_))));
    }

    #[test]
    fn fold_examples() {
        let wmc = s("[NAT,+,*,0,1]");
        let items = [6, 3, 4].map(Value::int);
        assert_eq!(wmc.fold(items).unwrap(), Value::int(13));
        for sr in SemiringSpec::catalog() {
            assert_eq!(sr.fold(Vec::new()).unwrap(), sr.empty);
        }
        let inf = s("[REAL,inf,0]");
        let items = [rat(3, 2), rat(1, 4), rat(2, 1)].map(Value::rational);
        assert_eq!(inf.fold(items).unwrap(), Value::rational(rat(1, 4)));
    }

    #[test]
    fn compose_examples() {
        let robot = SemiringSpec::compose(&s("[NAT,min,inf]"), &s("[REAL,+,0]"));
        let a = Value::pair(Value::int(0), Value::int(0));
        let b = Value::pair(Value::int(0), Value::rational(rat(3, 10)));
        assert_eq!(robot.oplus(&a, &b).unwrap(), b);
        assert_eq!(robot.empty, Value::pair(Value::Num(Ext::PosInf), Value::int(0)));

        let maxes = SemiringSpec::compose(&s("[NAT,max,0]"), &s("[NAT,max,0]"));
        let x = Value::pair(Value::int(2), Value::int(5));
        let y = Value::pair(Value::int(3), Value::int(1));
        assert_eq!(maxes.oplus(&x, &y).unwrap(), Value::pair(Value::int(3), Value::int(5)));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for sr in SemiringSpec::catalog() {
            assert_eq!(SemiringSpec::parse(&sr.to_string()).unwrap(), sr);
        }
    }

    #[test]
    fn parse_rejects_bad_algebras() {
        assert!(SemiringSpec::parse("[NAT,or,0]").is_err());
        assert!(SemiringSpec::parse("[BOOL,+,*,0,1]").is_err());
        assert!(SemiringSpec::parse("[NAT,+,*,0]").is_err());
        assert!(SemiringSpec::parse("[NAT,+,-1]").is_err());
        assert!(SemiringSpec::parse("[FOO,+,0]").is_err());
        assert!(SemiringSpec::parse("NAT,+,0").is_err());
    }

    #[test]
    fn extended_arithmetic() {
        let r = s("[EREAL,+,*,0,1]");
        let inf = Value::Num(Ext::PosInf);
        assert!(r.oplus(&inf, &Value::Num(Ext::NegInf)).is_err());
        assert_eq!(r.otimes(&inf, &Value::int(0)).unwrap(), Value::int(0));
        assert_eq!(r.otimes(&inf, &Value::int(-2)).unwrap(), Value::Num(Ext::NegInf));
        let m = s("[NAT,min,inf]");
        assert_eq!(m.oplus(&inf, &Value::int(7)).unwrap(), Value::int(7));
    }

    #[test]
    fn value_from_number_respects_carrier() {
        assert!(s("[NAT,+,0]").value_from_number(&rat(1, 2)).is_err());
        assert_eq!(s("[BOOL,or,0]").value_from_number(&int(1)).unwrap(), Value::Bool(true));
        assert!(s("[BOOL,or,0]").value_from_number(&int(2)).is_err());
        assert_eq!(
            s("[REAL,+,0]").value_from_number(&rat(7, 10)).unwrap(),
            Value::rational(rat(7, 10))
        );
    }
}
