//! Decision-DNNF compilation by DPLL tracing, smoothing, and semiring
//! evaluation of the compiled circuit.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lang::{Program, WeightMode};
use crate::logic::ir::{CFormula, Compiler, VarTable};
use crate::logic::{fix_data, Formula};
use crate::result::{Backend, CountResult, Stats};
use crate::semiring::{check_axioms, SemiringSpec, Value};

/// A propositional formula over numbered atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    pub fn not(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    /// Converts a compiled formula whose slots are all boolean.
    pub fn from_compiled<T>(f: &CFormula<T>, table: &VarTable) -> Result<Prop> {
        let r = |g: &CFormula<T>| Prop::from_compiled(g, table);
        Ok(match f {
            CFormula::Const(b) => Prop::Const(*b),
            CFormula::Var(v) => {
                if !table.vars[*v].is_bool() {
                    return Err(not_propositional());
                }
                Prop::Var(*v)
            }
            CFormula::Cmp(..) => return Err(not_propositional()),
            CFormula::Not(g) => Prop::not(r(g)?),
            CFormula::And(gs) => Prop::And(gs.iter().map(r).collect::<Result<_>>()?),
            CFormula::Or(gs) => Prop::Or(gs.iter().map(r).collect::<Result<_>>()?),
            CFormula::Implies(a, b) => Prop::Or(vec![Prop::not(r(a)?), r(b)?]),
            CFormula::Iff(a, b) => {
                let (a, b) = (r(a)?, r(b)?);
                Prop::Or(vec![
                    Prop::And(vec![a.clone(), b.clone()]),
                    Prop::And(vec![Prop::not(a), Prop::not(b)]),
                ])
            }
        })
    }

    pub fn eval(&self, assignment: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Var(v) => assignment(*v),
            Prop::Not(g) => !g.eval(assignment),
            Prop::And(gs) => gs.iter().all(|g| g.eval(assignment)),
            Prop::Or(gs) => gs.iter().any(|g| g.eval(assignment)),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |v| {
            out.insert(v);
        });
        out
    }

    fn visit(&self, k: &mut dyn FnMut(usize)) {
        match self {
            Prop::Const(_) => {}
            Prop::Var(v) => k(*v),
            Prop::Not(g) => g.visit(k),
            Prop::And(gs) | Prop::Or(gs) => gs.iter().for_each(|g| g.visit(k)),
        }
    }

    /// Substitutes `v := value` and simplifies.
    pub fn condition(&self, v: usize, value: bool) -> Prop {
        match self {
            Prop::Var(u) if *u == v => Prop::Const(value),
            Prop::Const(_) | Prop::Var(_) => self.clone(),
            Prop::Not(g) => match g.condition(v, value) {
                Prop::Const(b) => Prop::Const(!b),
                Prop::Not(h) => *h,
                h => Prop::not(h),
            },
            Prop::And(gs) => junction(gs.iter().map(|g| g.condition(v, value)), true),
            Prop::Or(gs) => junction(gs.iter().map(|g| g.condition(v, value)), false),
        }
    }

    pub fn simplify(&self) -> Prop {
        match self {
            Prop::Const(_) | Prop::Var(_) => self.clone(),
            Prop::Not(g) => match g.simplify() {
                Prop::Const(b) => Prop::Const(!b),
                Prop::Not(h) => *h,
                h => Prop::not(h),
            },
            Prop::And(gs) => junction(gs.iter().map(Prop::simplify), true),
            Prop::Or(gs) => junction(gs.iter().map(Prop::simplify), false),
        }
    }
}

/// Builds a flattened conjunction (`and`) or disjunction with constants removed.
fn junction(parts: impl Iterator<Item = Prop>, and: bool) -> Prop {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Prop::Const(b) if b == and => {}
            Prop::Const(b) => return Prop::Const(b),
            Prop::And(gs) if and => out.extend(gs),
            Prop::Or(gs) if !and => out.extend(gs),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Prop::Const(and),
        1 => out.pop().unwrap(),
        _ if and => Prop::And(out),
        _ => Prop::Or(out),
    }
}

fn not_propositional() -> Error {
    Error::BackendMismatch {
        backend: "circuit".into(),
        reason: "the circuit backend needs a propositional program".into(),
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Lit(usize, bool),
    And(Vec<NodeId>),
    /// `decision` is the atom the children disagree on.
    Or { decision: Option<usize>, children: Vec<NodeId> },
}

/// A compiled circuit; children always precede their parents.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub atoms: Vec<usize>,
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Builder {
    fn mk(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    fn and(&mut self, kids: Vec<NodeId>) -> NodeId {
        let mut out = Vec::new();
        for k in kids {
            match self.nodes[k] {
                Node::True => {}
                Node::False => return self.mk(Node::False),
                _ => out.push(k),
            }
        }
        match out.len() {
            0 => self.mk(Node::True),
            1 => out[0],
            _ => self.mk(Node::And(out)),
        }
    }

    fn or(&mut self, decision: Option<usize>, kids: Vec<NodeId>) -> NodeId {
        let out: Vec<NodeId> = kids.into_iter().filter(|&k| self.nodes[k] != Node::False).collect();
        match out.len() {
            0 => self.mk(Node::False),
            1 => out[0],
            _ => self.mk(Node::Or { decision, children: out }),
        }
    }

    fn build(&mut self, f: &Prop, rank: &HashMap<usize, usize>) -> NodeId {
        match f {
            Prop::Const(true) => return self.mk(Node::True),
            Prop::Const(false) => return self.mk(Node::False),
            Prop::Var(v) => return self.mk(Node::Lit(*v, true)),
            Prop::Not(g) => {
                if let Prop::Var(v) = g.as_ref() {
                    return self.mk(Node::Lit(*v, false));
                }
            }
            Prop::And(parts) => {
                let groups = components(parts);
                if groups.len() > 1 {
                    let kids = groups
                        .into_iter()
                        .map(|g| {
                            let sub = junction(g.into_iter(), true);
                            self.build(&sub, rank)
                        })
                        .collect();
                    return self.and(kids);
                }
            }
            Prop::Or(_) => {}
        }
        let v = *f
            .vars()
            .iter()
            .min_by_key(|v| (rank.get(v).copied().unwrap_or(usize::MAX), **v))
            .expect("a non-constant formula mentions an atom");
        let lo = self.build(&f.condition(v, false), rank);
        let hi = self.build(&f.condition(v, true), rank);
        let neg = self.mk(Node::Lit(v, false));
        let pos = self.mk(Node::Lit(v, true));
        let lo = self.and(vec![neg, lo]);
        let hi = self.and(vec![pos, hi]);
        self.or(Some(v), vec![lo, hi])
    }
}

/// Splits conjuncts into groups that share no atoms.
fn components(parts: &[Prop]) -> Vec<Vec<Prop>> {
    let vars: Vec<BTreeSet<usize>> = parts.iter().map(Prop::vars).collect();
    let mut group: Vec<usize> = (0..parts.len()).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, vs) in vars.iter().enumerate() {
        for v in vs {
            match owner.get(v) {
                Some(&j) => {
                    let (a, b) = (find(&mut group, i), find(&mut group, j));
                    group[a] = b;
                }
                None => {
                    owner.insert(*v, i);
                }
            }
        }
    }
    let mut out: Vec<(usize, Vec<Prop>)> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let r = find(&mut group, i);
        match out.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(p.clone()),
            None => out.push((r, vec![p.clone()])),
        }
    }
    out.into_iter().map(|(_, g)| g).collect()
}

impl Circuit {
    /// Compiles `f` and smooths it against `atoms`.
    pub fn compile(f: &Prop, atoms: &[usize]) -> Circuit {
        let f = f.simplify();
        let mut counts: HashMap<usize, usize> = HashMap::new();
        f.visit(&mut |v| *counts.entry(v).or_default() += 1);
        let mut order: Vec<(usize, usize)> = counts.into_iter().collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, (v, _))| (*v, r)).collect();
        let mut b = Builder::default();
        let root = b.build(&f, &rank);
        let raw = Circuit {
            nodes: b.nodes,
            root,
            atoms: atoms.to_vec(),
        };
        raw.smooth()
    }

    fn atom_sets(&self) -> Vec<BTreeSet<usize>> {
        let mut sets: Vec<BTreeSet<usize>> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match n {
                Node::True | Node::False => BTreeSet::new(),
                Node::Lit(v, _) => BTreeSet::from([*v]),
                Node::And(kids) | Node::Or { children: kids, .. } => {
                    kids.iter().flat_map(|&k| sets[k].iter().copied()).collect()
                }
            };
            sets.push(s);
        }
        sets
    }

    fn smooth(&self) -> Circuit {
        let sets = self.atom_sets();
        let mut b = Builder::default();
        let mut map: Vec<NodeId> = Vec::with_capacity(self.nodes.len());
        let pad = |b: &mut Builder, node: NodeId, have: &BTreeSet<usize>, want: &BTreeSet<usize>| {
            let mut kids = vec![node];
            for &a in want.difference(have) {
                let neg = b.mk(Node::Lit(a, false));
                let pos = b.mk(Node::Lit(a, true));
                kids.push(b.or(Some(a), vec![neg, pos]));
            }
            b.and(kids)
        };
        for (id, n) in self.nodes.iter().enumerate() {
            let new = match n {
                Node::True | Node::False | Node::Lit(..) => b.mk(n.clone()),
                Node::And(kids) => {
                    let kids = kids.iter().map(|&k| map[k]).collect();
                    b.and(kids)
                }
                Node::Or { decision, children } => {
                    let kids = children
                        .iter()
                        .map(|&k| pad(&mut b, map[k], &sets[k], &sets[id]))
                        .collect();
                    b.or(*decision, kids)
                }
            };
            map.push(new);
        }
        let root = map[self.root];
        let root = if b.nodes[root] == Node::False {
            root
        } else {
            let all: BTreeSet<usize> = self.atoms.iter().copied().collect();
            pad(&mut b, root, &sets[self.root], &all)
        };
        Circuit {
            nodes: b.nodes,
            root,
            atoms: self.atoms.clone(),
        }
    }

    /// Nodes reachable from the root, in child-first order.
    fn reachable(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            if let Node::And(k) | Node::Or { children: k, .. } = &self.nodes[n] {
                stack.extend(k);
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    pub fn size(&self) -> (usize, usize) {
        let live = self.reachable();
        let edges = live
            .iter()
            .map(|&n| match &self.nodes[n] {
                Node::And(k) | Node::Or { children: k, .. } => k.len(),
                _ => 0,
            })
            .sum();
        (live.len(), edges)
    }

    /// Checks decomposability, determinism and smoothness. Returns the first
    /// violation found.
    pub fn check(&self) -> std::result::Result<(), String> {
        let sets = self.atom_sets();
        for n in self.reachable() {
            match &self.nodes[n] {
                Node::And(kids) => {
                    let mut seen = BTreeSet::new();
                    for &k in kids {
                        if sets[k].iter().any(|a| !seen.insert(*a)) {
                            return Err(format!("node {n}: AND children share atoms"));
                        }
                    }
                }
                Node::Or { decision, children } => {
                    let Some(d) = decision else {
                        return Err(format!("node {n}: OR without a decision atom"));
                    };
                    let fixed: Vec<Option<bool>> = children.iter().map(|&c| self.fixes(c, *d)).collect();
                    let distinct: BTreeSet<bool> = fixed.iter().flatten().copied().collect();
                    if fixed.iter().any(Option::is_none) || distinct.len() != fixed.len() {
                        return Err(format!("node {n}: OR children do not disagree on atom {d}"));
                    }
                    if children.iter().any(|&c| sets[c] != sets[n]) {
                        return Err(format!("node {n}: OR is not smooth"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The value node `n` forces on atom `a`, if it is a literal or a
    /// conjunction containing one.
    fn fixes(&self, n: NodeId, a: usize) -> Option<bool> {
        match &self.nodes[n] {
            Node::Lit(v, s) if *v == a => Some(*s),
            Node::And(kids) => kids.iter().find_map(|&k| self.fixes(k, a)),
            _ => None,
        }
    }

    /// Labels every node with a semiring value.
    fn labels(&self, s: &SemiringSpec, lw: &dyn Fn(usize, bool) -> Value) -> Result<Vec<Option<Value>>> {
        let one = s.one.clone().ok_or_else(|| Error::NoTimes(s.to_string()))?;
        let mut vals: Vec<Option<Value>> = vec![None; self.nodes.len()];
        for n in self.reachable() {
            let v = match &self.nodes[n] {
                Node::True => one.clone(),
                Node::False => s.empty.clone(),
                Node::Lit(a, sign) => lw(*a, *sign),
                Node::And(kids) => s.product(kids.iter().map(|&k| vals[k].clone().expect("child first")))?,
                Node::Or { children, .. } => s.fold(children.iter().map(|&k| vals[k].clone().expect("child first")))?,
            };
            vals[n] = Some(v);
        }
        Ok(vals)
    }

    /// Evaluates with ⊕ at OR nodes and ⊗ at AND nodes.
    pub fn eval(&self, s: &SemiringSpec, lw: &dyn Fn(usize, bool) -> Value) -> Result<Value> {
        require_distributive(s)?;
        let vals = self.labels(s, lw)?;
        Ok(vals[self.root].clone().expect("root labelled"))
    }

    /// Value plus a maximizing assignment for selective semirings.
    pub fn eval_with_witness(
        &self,
        s: &SemiringSpec,
        lw: &dyn Fn(usize, bool) -> Value,
    ) -> Result<(Value, Option<Vec<(usize, bool)>>)> {
        require_distributive(s)?;
        let vals = self.labels(s, lw)?;
        let value = vals[self.root].clone().expect("root labelled");
        if !s.is_selective() || self.nodes[self.root] == Node::False {
            return Ok((value, None));
        }
        let mut lits = Vec::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Lit(a, sign) => lits.push((*a, *sign)),
                Node::And(kids) => stack.extend(kids.iter().rev()),
                Node::Or { children, .. } => {
                    let target = vals[n].as_ref();
                    let pick = children
                        .iter()
                        .find(|&&c| vals[c].as_ref() == target)
                        .copied()
                        .unwrap_or(children[0]);
                    stack.push(pick);
                }
                Node::True | Node::False => {}
            }
        }
        lits.sort();
        Ok((value, Some(lits)))
    }

    pub fn model_count(&self) -> num_bigint::BigInt {
        let s = SemiringSpec::nat_sum_product();
        match self.labels(&s, &|_, _| Value::int(1)) {
            Ok(v) => v[self.root]
                .as_ref()
                .and_then(Value::as_rational)
                .map(|r| r.to_integer())
                .unwrap_or_default(),
            Err(_) => Default::default(),
        }
    }

    /// Textual NNF: `nnf N E A`, then one node per line.
    pub fn dump(&self) -> String {
        let live = self.reachable();
        let renum: HashMap<NodeId, usize> = live.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let (nodes, edges) = self.size();
        let mut out = format!("nnf {nodes} {edges} {}\n", self.atoms.len());
        let ids = |k: &[NodeId]| k.iter().map(|c| renum[c].to_string()).collect::<Vec<_>>().join(" ");
        for &n in &live {
            match &self.nodes[n] {
                Node::True => out.push_str("A 0\n"),
                Node::False => out.push_str("O 0 0\n"),
                Node::Lit(a, sign) => {
                    let lit = *a as i64 + 1;
                    writeln!(out, "L {}", if *sign { lit } else { -lit }).unwrap();
                }
                Node::And(k) => writeln!(out, "A {} {}", k.len(), ids(k)).unwrap(),
                Node::Or { decision, children } => {
                    let d = decision.map(|d| d + 1).unwrap_or(0);
                    writeln!(out, "O {d} {} {}", children.len(), ids(children)).unwrap();
                }
            }
        }
        out
    }
}

fn require_distributive(s: &SemiringSpec) -> Result<()> {
    if s.times.is_none() {
        return Err(Error::NoTimes(s.to_string()));
    }
    if !check_axioms(s, 200, 0).passes() {
        return Err(Error::NonDistributive(s.to_string()));
    }
    Ok(())
}

/// `#(φ, w)` by compiling the grounded query to a circuit.
pub fn count_circuit(p: &Program) -> Result<CountResult> {
    circuit_formula(p, &p.query_formula())
}

/// `#(query, w)` through a compiled, smoothed circuit.
pub fn circuit_formula(p: &Program, query: &Formula) -> Result<CountResult> {
    let mismatch = |reason: &str| Error::BackendMismatch {
        backend: "circuit".into(),
        reason: reason.into(),
    };
    if p.components.is_some() {
        return Err(mismatch("composed programs are counted by the composition engine"));
    }
    if p.theory.minimal_models() {
        return Err(mismatch("minimal-model semantics is not compiled"));
    }
    if matches!(p.weights.mode, Some(WeightMode::ModelLevel | WeightMode::Measure)) {
        return Err(mismatch("the circuit backend needs literal weights"));
    }
    let bindings = p.all_bindings();
    let table = VarTable::new(&p.vocabulary, false)?;
    if table.vars.iter().any(|v| !v.is_bool()) {
        return Err(not_propositional());
    }
    let compiled: CFormula<BigRational> = Compiler::new(&p.vocabulary, &table, &bindings).formula(query)?;
    let mut fixed = vec![None; table.len()];
    fix_data(&p.vocabulary, &table, query, &bindings, &mut fixed)?;
    let mut parts = vec![Prop::from_compiled(&compiled, &table)?];
    for (v, f) in fixed.iter().enumerate() {
        match f {
            Some(1) => parts.push(Prop::Var(v)),
            Some(_) => parts.push(Prop::not(Prop::Var(v))),
            None => {}
        }
    }
    let atoms: Vec<usize> = (0..table.len()).collect();
    let circuit = Circuit::compile(&Prop::And(parts), &atoms);
    let one = p.algebra.unit();
    let mut weights: HashMap<(usize, bool), Value> = HashMap::new();
    for (lit, w) in &p.weights.literals {
        if let Some(slot) = table.lookup(&lit.atom.pred, &lit.atom.args) {
            weights.insert((slot, lit.positive), w.clone());
        }
    }
    let lw = |a: usize, s: bool| weights.get(&(a, s)).cloned().unwrap_or_else(|| one.clone());
    let (value, lits) = circuit.eval_with_witness(&p.algebra, &lw)?;
    let mut r = CountResult::exact(value, Backend::Circuit);
    r.witness = lits.map(|lits| {
        let mut assignment = vec![0u32; table.len()];
        for (a, s) in lits {
            assignment[a] = u32::from(s);
        }
        table.interpretation(&assignment)
    });
    let (nodes, edges) = circuit.size();
    r.stats = Stats {
        circuit_nodes: Some(nodes as u64),
        circuit_edges: Some(edges as u64),
        ..Stats::default()
    };
    Ok(r)
}

/// Counts assignments to atoms `0..n` satisfying `f`, by brute force.
pub fn brute_force_count(f: &Prop, n: usize) -> u64 {
    (0..1u64 << n)
        .filter(|bits| f.eval(&|v| bits >> v & 1 == 1))
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(i: usize) -> Prop {
        Prop::Var(i)
    }

    #[test]
    fn single_literal() {
        let c = Circuit::compile(&v(0), &[0]);
        assert_eq!(c.nodes[c.root], Node::Lit(0, true));
        assert_eq!(c.dump(), "nnf 1 0 1\nL 1\n");
    }

    #[test]
    fn disjunction_has_three_models() {
        let c = Circuit::compile(&Prop::Or(vec![v(0), v(1)]), &[0, 1]);
        c.check().unwrap();
        assert_eq!(c.model_count(), 3.into());
    }

    #[test]
    fn unused_atoms_are_smoothed_in() {
        let c = Circuit::compile(&v(0), &[0, 1, 2]);
        c.check().unwrap();
        assert_eq!(c.model_count(), 4.into());
        let c = Circuit::compile(&Prop::Const(true), &[0, 1]);
        assert_eq!(c.model_count(), 4.into());
        let c = Circuit::compile(&Prop::Const(false), &[0, 1]);
        assert_eq!(c.model_count(), 0.into());
        assert_eq!(c.dump(), "nnf 1 0 2\nO 0 0\n");
    }

    fn random_cnf(rng: &mut ChaCha8Rng, n: usize, clauses: usize) -> Prop {
        Prop::And(
            (0..clauses)
                .map(|_| {
                    Prop::Or(
                        (0..3)
                            .map(|_| {
                                let a = v(rng.gen_range(0..n));
                                if rng.gen_bool(0.5) {
                                    a
                                } else {
                                    Prop::not(a)
                                }
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn random_cnf_counts_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let atoms: Vec<usize> = (0..8).collect();
        for _ in 0..40 {
            let clauses = rng.gen_range(1..14);
            let f = random_cnf(&mut rng, 8, clauses);
            let c = Circuit::compile(&f, &atoms);
            c.check().unwrap();
            assert_eq!(c.model_count(), brute_force_count(&f, 8).into(), "{f:?}");
        }
    }

    #[test]
    fn aggregator_only_is_refused() {
        let c = Circuit::compile(&v(0), &[0]);
        let s = SemiringSpec::builtin("[NAT,max,0]");
        assert!(matches!(c.eval(&s, &|_, _| Value::int(1)), Err(Error::NoTimes(_))));
    }
}
