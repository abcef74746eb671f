//! The surface language: SMT-LIB flavoured directives plus named formulas.
//!
//! ```text
//! (set-logic PL)
//! (set-algebra [NAT,max,*,0,1])
//! (declare-predicate p ())
//! (declare-predicate q ())
//! F = (p or q)
//! (declare-weight (p 1))
//! (declare-weight ((neg p) 2))
//! (count F)
//! ```

mod lexer;
mod parser;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Formula, GroundAtom, Term, TheorySpec, Vocabulary};
use crate::semiring::{SemiringSpec, Value};

pub use parser::{parse, parse_with};
pub use render::render;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

/// One or more positioned parse or validation errors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            d.fmt(f)?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

/// A weighted literal `p` or `(neg p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: GroundAtom,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            self.atom.fmt(f)
        } else {
            write!(f, "(neg {})", self.atom)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    Factorized,
    ModelLevel,
    Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    Lebesgue,
    Counting,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub sort: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    /// `None` when the program declares no weights; every model then weighs 1.
    pub mode: Option<WeightMode>,
    #[serde(with = "indexmap::map::serde_seq")]
    pub literals: IndexMap<Literal, Value>,
    pub guarded: Vec<(Formula, Term)>,
    pub measures: IndexMap<String, MeasureSpec>,
}

impl WeightSpec {
    pub fn literal_weight(&self, lit: &Literal) -> Option<&Value> {
        self.literals.get(lit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Query {
    Count(Formula),
    /// `#(phi ∧ q) / #(phi)`, optionally on one component of a pair.
    Conditional { phi: Formula, q: Formula, component: Option<u8> },
}

/// A composed wrapper's two environments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub paths: (String, String),
    pub first: Program,
    pub second: Program,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub theory: TheorySpec,
    pub algebra: SemiringSpec,
    pub vocabulary: Vocabulary,
    pub bindings: IndexMap<String, Formula>,
    pub weights: WeightSpec,
    pub query: Query,
    pub options: BTreeMap<String, String>,
    /// `(set-option bounds x lo hi)`, keyed by symbol name.
    pub bounds: BTreeMap<String, (BigRational, BigRational)>,
    pub components: Option<Box<Components>>,
}

impl Program {
    /// The query formula (for conditionals, `phi ∧ q`).
    pub fn query_formula(&self) -> Formula {
        match &self.query {
            Query::Count(f) => f.clone(),
            Query::Conditional { phi, q, .. } => Formula::and(vec![phi.clone(), q.clone()]),
        }
    }

    /// Named references inlined, recursively.
    pub fn resolve(&self, f: &Formula) -> Result<Formula> {
        resolve(f, &self.all_bindings(), &mut Vec::new())
    }

    pub fn option(&self, key: &str) -> Option<&str> {
        self.options.get(key).map(String::as_str)
    }

    /// Bindings of this program and, for wrappers, its components.
    pub fn all_bindings(&self) -> IndexMap<String, Formula> {
        let mut out = IndexMap::new();
        if let Some(c) = &self.components {
            out.extend(c.first.all_bindings());
            out.extend(c.second.all_bindings());
        }
        out.extend(self.bindings.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("programs serialize")
    }
}

fn resolve(f: &Formula, bindings: &IndexMap<String, Formula>, stack: &mut Vec<String>) -> Result<Formula> {
    let r = |g: &Formula, stack: &mut Vec<String>| resolve(g, bindings, stack).map(Box::new);
    Ok(match f {
        Formula::Ref(name) => {
            if stack.contains(name) {
                return Err(Error::UnresolvedRef(format!("{name} (cyclic)")));
            }
            let body = bindings.get(name).ok_or_else(|| Error::UnresolvedRef(name.clone()))?;
            stack.push(name.clone());
            let out = resolve(body, bindings, stack);
            stack.pop();
            out?
        }
        Formula::Not(g) => Formula::Not(r(g, stack)?),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| resolve(g, bindings, stack)).collect::<Result<_>>()?),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| resolve(g, bindings, stack)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::Implies(r(a, stack)?, r(b, stack)?),
        Formula::Iff(a, b) => Formula::Iff(r(a, stack)?, r(b, stack)?),
        Formula::Forall { vars, body, implicit } => Formula::Forall {
            vars: vars.clone(),
            body: r(body, stack)?,
            implicit: *implicit,
        },
        Formula::Exists { vars, body } => Formula::Exists {
            vars: vars.clone(),
            body: r(body, stack)?,
        },
        other => other.clone(),
    })
}

/// Reads and parses a program file, resolving `(compose A B)` relative to it.
pub fn load(path: impl AsRef<Path>) -> Result<Program> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolver = move |rel: &str| -> std::result::Result<Program, String> {
        let target = dir.join(rel);
        match load(&target) {
            Ok(p) => Ok(p),
            Err(e) => Err(format!("{}: {e}", target.display())),
        }
    };
    Ok(parse_with(&text, &resolver)?)
}
