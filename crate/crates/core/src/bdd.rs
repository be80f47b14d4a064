//! Reduced ordered BDDs over axiom variables.
//!
//! Nodes are hash-consed in a unique table, so two handles from the same
//! manager denote the same Boolean function iff they are equal. Variable
//! order is the variable index order and never changes. Only the monotone
//! connectives are exposed.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::BddError;

/// Handle to a node of one [`BddManager`]. Meaningless with any other manager.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bdd(u32);

impl Bdd {
    pub const FALSE: Bdd = Bdd(0);
    pub const TRUE: Bdd = Bdd(1);

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn is_false(self) -> bool {
        self == Bdd::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Bdd::TRUE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: Bdd,
    hi: Bdd,
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct BddManager {
    num_vars: usize,
    nodes: Vec<Node>,
    unique: HashMap<Node, Bdd>,
    and_cache: HashMap<(Bdd, Bdd), Bdd>,
    or_cache: HashMap<(Bdd, Bdd), Bdd>,
}

impl BddManager {
    pub fn new(num_vars: usize) -> Self {
        let terminal = |b| Node {
            var: TERMINAL_VAR,
            lo: b,
            hi: b,
        };
        BddManager {
            num_vars,
            nodes: vec![terminal(Bdd::FALSE), terminal(Bdd::TRUE)],
            unique: HashMap::new(),
            and_cache: HashMap::new(),
            or_cache: HashMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Nodes allocated so far, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, value: bool) -> Bdd {
        if value {
            Bdd::TRUE
        } else {
            Bdd::FALSE
        }
    }

    pub fn var(&mut self, index: usize) -> Result<Bdd, BddError> {
        if index >= self.num_vars {
            return Err(BddError::VarOutOfRange {
                index,
                count: self.num_vars,
            });
        }
        Ok(self.mk(index as u32, Bdd::FALSE, Bdd::TRUE))
    }

    fn mk(&mut self, var: u32, lo: Bdd, hi: Bdd) -> Bdd {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&b) = self.unique.get(&node) {
            return b;
        }
        let b = Bdd(self.nodes.len() as u32);
        self.nodes.push(node);
        self.unique.insert(node, b);
        b
    }

    fn node(&self, b: Bdd) -> Node {
        self.nodes[b.0 as usize]
    }

    /// Decision variable of an internal node; `None` for terminals.
    pub fn var_of(&self, b: Bdd) -> Option<usize> {
        (!b.is_const()).then(|| self.node(b).var as usize)
    }

    /// 0-child of an internal node.
    pub fn low(&self, b: Bdd) -> Bdd {
        self.node(b).lo
    }

    /// 1-child of an internal node.
    pub fn high(&self, b: Bdd) -> Bdd {
        self.node(b).hi
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        if a.is_false() || b.is_false() {
            return Bdd::FALSE;
        }
        if a.is_true() || a == b {
            return b;
        }
        if b.is_true() {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.and_cache.get(&key) {
            return r;
        }
        let (v, (a0, a1), (b0, b1)) = self.split(a, b);
        let lo = self.and(a0, b0);
        let hi = self.and(a1, b1);
        let r = self.mk(v, lo, hi);
        self.and_cache.insert(key, r);
        r
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        if a.is_true() || b.is_true() {
            return Bdd::TRUE;
        }
        if a.is_false() || a == b {
            return b;
        }
        if b.is_false() {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.or_cache.get(&key) {
            return r;
        }
        let (v, (a0, a1), (b0, b1)) = self.split(a, b);
        let lo = self.or(a0, b0);
        let hi = self.or(a1, b1);
        let r = self.mk(v, lo, hi);
        self.or_cache.insert(key, r);
        r
    }

    /// Top variable of two non-terminals and the cofactors of each on it.
    fn split(&self, a: Bdd, b: Bdd) -> (u32, (Bdd, Bdd), (Bdd, Bdd)) {
        let (na, nb) = (self.node(a), self.node(b));
        let v = na.var.min(nb.var);
        let cof = |n: Node, b: Bdd| if n.var == v { (n.lo, n.hi) } else { (b, b) };
        (v, cof(na, a), cof(nb, b))
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        items.into_iter().fold(Bdd::TRUE, |acc, b| self.and(acc, b))
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        items.into_iter().fold(Bdd::FALSE, |acc, b| self.or(acc, b))
    }

    /// Disjunction of conjunctions of positive literals.
    pub fn from_dnf<I, S>(&mut self, terms: I) -> Result<Bdd, BddError>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let mut acc = Bdd::FALSE;
        for term in terms {
            let mut conj = Bdd::TRUE;
            for v in term {
                let x = self.var(v)?;
                conj = self.and(conj, x);
            }
            acc = self.or(acc, conj);
        }
        Ok(acc)
    }

    /// `a ⊨ b`, decided by canonicity: `a ∨ b = b`.
    pub fn implies(&mut self, a: Bdd, b: Bdd) -> bool {
        self.or(a, b) == b
    }

    /// Value of the function under `assignment` (indexed by variable).
    pub fn eval(&self, b: Bdd, assignment: impl Fn(usize) -> bool) -> bool {
        let mut cur = b;
        while !cur.is_const() {
            let n = self.node(cur);
            cur = if assignment(n.var as usize) {
                n.hi
            } else {
                n.lo
            };
        }
        cur.is_true()
    }

    /// Value with every variable set to true.
    pub fn eval_all_true(&self, b: Bdd) -> bool {
        self.eval(b, |_| true)
    }

    /// Nodes reachable from `b`, terminals included.
    pub fn node_count(&self, b: Bdd) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![b];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur) || cur.is_const() {
                continue;
            }
            let n = self.node(cur);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        seen.len()
    }

    /// Variables the function depends on, ascending.
    pub fn support(&self, b: Bdd) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        let mut vars = std::collections::BTreeSet::new();
        let mut stack = vec![b];
        while let Some(cur) = stack.pop() {
            if cur.is_const() || !seen.insert(cur) {
                continue;
            }
            let n = self.node(cur);
            vars.insert(n.var as usize);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        vars.into_iter().collect()
    }

    /// Probability that the function is true when variable `i` is true with
    /// probability `vm[i]`, independently.
    pub fn prob(&self, b: Bdd, vm: &VarMap) -> Result<f64, BddError> {
        Ok(self.prob_table(b, vm)?.value)
    }

    /// Like [`prob`](Self::prob), also returning the per-node memo table.
    pub fn prob_table(&self, b: Bdd, vm: &VarMap) -> Result<ProbTable, BddError> {
        let mut table = HashMap::new();
        let value = self.prob_rec(b, vm, &mut table)?;
        Ok(ProbTable { value, table })
    }

    fn prob_rec(
        &self,
        b: Bdd,
        vm: &VarMap,
        table: &mut HashMap<Bdd, f64>,
    ) -> Result<f64, BddError> {
        if b.is_const() {
            return Ok(if b.is_true() { 1.0 } else { 0.0 });
        }
        if let Some(&p) = table.get(&b) {
            return Ok(p);
        }
        let n = self.node(b);
        let px = vm
            .get(n.var as usize)
            .ok_or(BddError::MissingProbability(n.var as usize))?;
        let p1 = self.prob_rec(n.hi, vm, table)?;
        let p0 = self.prob_rec(n.lo, vm, table)?;
        let p = px * p1 + (1.0 - px) * p0;
        table.insert(b, p);
        Ok(p)
    }

    /// All ⊆-minimal variable sets whose assignment to true satisfies `b`,
    /// each sorted ascending, the list sorted lexicographically.
    ///
    /// Requires `b` to be monotone.
    pub fn minimal_models(&self, b: Bdd) -> Vec<Vec<usize>> {
        self.minimal_models_capped(b, usize::MAX)
            .expect("uncapped enumeration cannot overflow")
    }

    /// Returns `None` as soon as more than `cap` minimal models are found.
    ///
    /// Every minimal model of a monotone function is the set of positive
    /// decisions on some 1-path, so enumeration walks the 1-paths and keeps
    /// the candidates no single removal can falsify.
    pub fn minimal_models_capped(&self, b: Bdd, cap: usize) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        if !self.walk_paths(b, b, &mut path, &mut out, cap) {
            return None;
        }
        out.sort();
        Some(out)
    }

    fn walk_paths(
        &self,
        root: Bdd,
        cur: Bdd,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> bool {
        if cur.is_false() {
            return true;
        }
        if cur.is_true() {
            if self.is_minimal(root, path) {
                if out.len() == cap {
                    return false;
                }
                out.push(path.clone());
            }
            return true;
        }
        let n = self.node(cur);
        if !self.walk_paths(root, n.lo, path, out, cap) {
            return false;
        }
        path.push(n.var as usize);
        let ok = self.walk_paths(root, n.hi, path, out, cap);
        path.pop();
        ok
    }

    fn is_minimal(&self, root: Bdd, set: &[usize]) -> bool {
        (0..set.len()).all(|skip| {
            let without = |v: usize| set.binary_search(&v).is_ok_and(|i| i != skip);
            !self.eval(root, without)
        })
    }

    /// DOT rendering: solid edges to 1-children, dashed edges to 0-children.
    pub fn to_dot(&self, b: Bdd, var_name: impl Fn(usize) -> String) -> String {
        let mut out = String::from("digraph bdd {\n");
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![b];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur) || cur.is_const() {
                continue;
            }
            let n = self.node(cur);
            stack.push(n.hi);
            stack.push(n.lo);
        }
        for &cur in &seen {
            if cur.is_const() {
                let v = u8::from(cur.is_true());
                let _ = writeln!(out, "  n{} [shape=box,label=\"{v}\"];", cur.0);
            } else {
                let n = self.node(cur);
                let _ = writeln!(
                    out,
                    "  n{} [label=\"{}\"];",
                    cur.0,
                    var_name(n.var as usize)
                );
                let _ = writeln!(out, "  n{} -> n{} [style=solid];", cur.0, n.hi.0);
                let _ = writeln!(out, "  n{} -> n{} [style=dashed];", cur.0, n.lo.0);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Result of the probability traversal with its memo table.
#[derive(Clone, Debug)]
pub struct ProbTable {
    pub value: f64,
    /// Probability of every internal node visited.
    pub table: HashMap<Bdd, f64>,
}

/// Probability of each variable being true.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarMap {
    probs: Vec<f64>,
}

impl VarMap {
    pub fn new(probs: Vec<f64>) -> Self {
        VarMap { probs }
    }

    pub fn get(&self, var: usize) -> Option<f64> {
        self.probs.get(var).copied()
    }

    pub fn set(&mut self, var: usize, p: f64) {
        self.probs[var] = p;
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_canonical() {
        let m = BddManager::new(0);
        assert_eq!(m.constant(true), Bdd::TRUE);
        assert_eq!(m.constant(false), Bdd::FALSE);
        assert_eq!(m.constant(true), m.constant(true));
    }

    #[test]
    fn single_variable() {
        let mut m = BddManager::new(2);
        let x = m.var(0).unwrap();
        assert_eq!(
            (m.var_of(x), m.low(x), m.high(x)),
            (Some(0), Bdd::FALSE, Bdd::TRUE)
        );
        assert_eq!(m.var(0).unwrap(), x);
        let vm = VarMap::new(vec![0.4, 0.5]);
        assert_eq!(m.prob(x, &vm).unwrap(), 0.4);
        assert_eq!(
            m.var(2),
            Err(BddError::VarOutOfRange { index: 2, count: 2 })
        );
    }

    #[test]
    fn absorption_and_idempotence() {
        let mut m = BddManager::new(1);
        let x = m.var(0).unwrap();
        assert_eq!(m.or(x, Bdd::TRUE), Bdd::TRUE);
        assert_eq!(m.and(x, x), x);
        assert_eq!(m.and(x, Bdd::FALSE), Bdd::FALSE);
    }

    #[test]
    fn fig2_shape_under_index_order() {
        // (X1∧X3)∨(X2∧X3) with X1<X2<X3
        let mut m = BddManager::new(3);
        let f = m.from_dnf([vec![0, 2], vec![1, 2]]).unwrap();
        assert_eq!(m.node_count(f), 5);
        assert_eq!(m.var_of(f), Some(0));
        let n3 = m.high(f);
        let n2 = m.low(f);
        assert_eq!(m.var_of(n3), Some(2));
        assert_eq!(m.var_of(n2), Some(1));
        assert_eq!(m.high(n2), n3);
        assert_eq!(m.low(n2), Bdd::FALSE);
        assert_eq!((m.high(n3), m.low(n3)), (Bdd::TRUE, Bdd::FALSE));
    }

    #[test]
    fn terminal_probabilities() {
        let m = BddManager::new(0);
        let vm = VarMap::default();
        assert_eq!(m.prob(Bdd::TRUE, &vm).unwrap(), 1.0);
        assert_eq!(m.prob(Bdd::FALSE, &vm).unwrap(), 0.0);
    }

    #[test]
    fn missing_probability() {
        let mut m = BddManager::new(2);
        let x = m.var(1).unwrap();
        assert_eq!(
            m.prob(x, &VarMap::new(vec![0.5])),
            Err(BddError::MissingProbability(1))
        );
    }

    #[test]
    fn minimal_models_of_explanations() {
        let mut m = BddManager::new(3);
        let f = m.from_dnf([vec![0, 2], vec![1, 2]]).unwrap();
        assert_eq!(m.minimal_models(f), vec![vec![0, 2], vec![1, 2]]);
        assert_eq!(m.minimal_models(Bdd::TRUE), vec![Vec::<usize>::new()]);
        assert!(m.minimal_models(Bdd::FALSE).is_empty());
        assert_eq!(m.minimal_models_capped(f, 1), None);
        assert!(m.minimal_models_capped(f, 2).is_some());
    }

    #[test]
    fn non_minimal_paths_are_dropped() {
        // x2 ∨ (x0 ∧ x1): the 1-path x0=1,x1=0,x2=1 yields {x0,x2}, which is not minimal.
        let mut m = BddManager::new(3);
        let f = m.from_dnf([vec![2], vec![0, 1]]).unwrap();
        assert_eq!(m.minimal_models(f), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn dot_export_marks_low_edges_dashed() {
        let mut m = BddManager::new(1);
        let x = m.var(0).unwrap();
        let dot = m.to_dot(x, |v| format!("x{v}"));
        assert!(dot.contains("label=\"x0\""));
        assert!(dot.contains("-> n1 [style=solid]"));
        assert!(dot.contains("-> n0 [style=dashed]"));
    }
}
