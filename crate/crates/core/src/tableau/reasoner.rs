use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pool::{ConceptId, ConceptPool, RoleId, RoleLabels, RoleName, Shape};
use super::state::{Assertion, CachedMatches, Individual, NodeId, TableauState};
use crate::bdd::{Bdd, BddManager};
use crate::error::{Error, Result};
use crate::syntax::{Axiom, AxiomId};
use crate::syntax::{Concept, KnowledgeBase, Query, RoleExpr};

/// Expansion rules. The declaration order is the priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Unfold,
    Ce,
    And,
    Forall,
    ForallPlus,
    Exists,
    Or,
}

impl Rule {
    /// 1: unfold, CE, ⊓. 2: ∀, ∀+, ∃. 3: ⊔.
    pub fn class(self) -> u8 {
        match self {
            Rule::Unfold | Rule::Ce | Rule::And => 1,
            Rule::Forall | Rule::ForallPlus | Rule::Exists => 2,
            Rule::Or => 3,
        }
    }

    pub fn is_deterministic(self) -> bool {
        self != Rule::Or
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Unfold => "unfold",
            Rule::Ce => "CE",
            Rule::And => "and",
            Rule::Forall => "forall",
            Rule::ForallPlus => "forall+",
            Rule::Exists => "exists",
            Rule::Or => "or",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantiated consequence of a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consequence {
    Assert(Assertion),
    /// An anonymous `y` with `(from,y):role` and `y:concept`: fresh, or the
    /// one an earlier application for the same concept created.
    Fresh {
        from: NodeId,
        role: RoleId,
        concept: ConceptId,
    },
}

/// A rule together with its substitution, premises and axiom set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule: Rule,
    /// Image of `x`.
    pub node: NodeId,
    /// Image of `y` for ∀ and ∀+.
    pub target: Option<NodeId>,
    pub premises: Vec<Assertion>,
    pub axioms: Vec<AxiomId>,
    /// Conjunction of the premise labels and the axiom variables.
    pub psi: Bdd,
    pub branches: Vec<Vec<Consequence>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Rule classes in priority order, matches in a fixed order.
    #[default]
    Priority,
    /// One match at a time, picked by a seeded generator: usually from the
    /// highest-priority class, sometimes from any deterministic class.
    /// Branching waits until nothing deterministic applies.
    Shuffled { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionOptions {
    pub strategy: Strategy,
    /// Cap on labeled assertions in one tableau.
    pub max_assertions: usize,
    /// Cap on tableaux created over the whole expansion, pruned ones
    /// included.
    pub max_tableaux: usize,
    /// Drop a tableau once the conjunction of the clash BDDs of the
    /// tableaux completed so far implies its own clash BDD. Expansion only
    /// adds disjuncts to a clash BDD, so the tableau cannot change the
    /// pinpointing result. With every label ⊤ this is ordinary closure of
    /// clashing branches.
    pub prune: bool,
    pub trace: bool,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            strategy: Strategy::Priority,
            max_assertions: 100_000,
            max_tableaux: 100_000,
            prune: true,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpansionStats {
    /// Tableaux in the forest over the whole run: the initial one plus one
    /// per extra ⊔ branch.
    pub created: usize,
    pub completed: usize,
    pub applications: usize,
    /// Tableaux dropped by `prune`.
    pub pruned: usize,
    /// Largest number of anonymous individuals in one completed tableau.
    pub max_anonymous: usize,
}

/// Per-query reasoning context: owns the BDD manager and the concept pool
/// that every tableau of the forest shares.
pub struct Reasoner<'kb> {
    kb: &'kb KnowledgeBase,
    query: Query,
    options: ExpansionOptions,
    mgr: BddManager,
    pool: ConceptPool,
    roles: RoleLabels,
    unfold: BTreeMap<u32, Vec<(AxiomId, ConceptId)>>,
    ce: Vec<(AxiomId, ConceptId)>,
    warnings: Vec<String>,
    trace: Vec<String>,
    rng: ChaCha8Rng,
    stats: ExpansionStats,
}

impl<'kb> Reasoner<'kb> {
    pub fn new(kb: &'kb KnowledgeBase, query: &Query, options: ExpansionOptions) -> Self {
        Self::with_manager(kb, query, options, BddManager::new(kb.len()))
    }

    /// Builds labels in an existing manager, so BDDs from several runs over
    /// the same KB can be compared by id. Panics if `mgr` has fewer
    /// variables than the KB has axioms.
    pub fn with_manager(
        kb: &'kb KnowledgeBase,
        query: &Query,
        options: ExpansionOptions,
        mut mgr: BddManager,
    ) -> Self {
        assert!(mgr.num_vars() >= kb.len(), "manager has too few variables");
        let mut pool = ConceptPool::default();
        for r in crate::syntax::kb_roles(kb) {
            pool.role(&r);
        }
        let mut unfold: BTreeMap<u32, Vec<(AxiomId, ConceptId)>> = BTreeMap::new();
        let mut ce = Vec::new();
        for inc in kb.inclusions() {
            let sup = pool.intern(&inc.sup);
            match &inc.sub {
                Concept::Atomic(_) => {
                    let sub = pool.intern(&inc.sub);
                    let Shape::Atom(a) = pool.shape(sub) else {
                        unreachable!()
                    };
                    unfold.entry(a).or_default().push((inc.id, sup));
                }
                complex => {
                    let sub = pool.intern(complex);
                    let neg = pool.complement(sub);
                    ce.push((inc.id, pool.or(neg, sup)));
                }
            }
        }
        for ax in &kb.axioms {
            if let Axiom::ClassAssertion(c, _) = &ax.axiom {
                pool.intern(c);
            }
        }
        match query {
            Query::InstanceOf(_, c) => {
                pool.intern(&Concept::not(c.clone()));
            }
            Query::Subsumption(c, d) => {
                pool.intern(&Concept::and(c.clone(), Concept::not(d.clone())));
            }
        }
        let roles = RoleLabels::build(kb, &mut pool, &mut mgr);
        let warnings = query
            .unknown_names(&kb.signature())
            .into_iter()
            .map(|n| format!("query mentions `{n}`, which the KB never uses"))
            .collect();
        let seed = match options.strategy {
            Strategy::Shuffled { seed } => seed,
            Strategy::Priority => 0,
        };
        Reasoner {
            kb,
            query: query.clone(),
            options,
            mgr,
            pool,
            roles,
            unfold,
            ce,
            warnings,
            trace: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: ExpansionStats::default(),
        }
    }

    pub fn manager(&self) -> &BddManager {
        &self.mgr
    }

    pub fn manager_mut(&mut self) -> &mut BddManager {
        &mut self.mgr
    }

    pub fn into_manager(self) -> BddManager {
        self.mgr
    }

    pub fn pool(&self) -> &ConceptPool {
        &self.pool
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    pub fn stats(&self) -> ExpansionStats {
        self.stats
    }

    /// BDD variable of an axiom.
    pub fn var(&mut self, id: AxiomId) -> Bdd {
        self.mgr.var(id).expect("axiom id within manager")
    }

    /// Label of `ind : c` in `st`, if present.
    pub fn label_of(&self, st: &TableauState, ind: &Individual, c: &Concept) -> Option<Bdd> {
        let n = st.find(ind)?;
        let c = self.pool.lookup(c)?;
        st.label(Assertion::Concept(n, c))
    }

    /// Label of `(a,b) : r` in `st`, if present.
    pub fn role_label_of(
        &self,
        st: &TableauState,
        a: &Individual,
        b: &Individual,
        r: &str,
    ) -> Option<Bdd> {
        let (x, y) = (st.find(a)?, st.find(b)?);
        st.role_assertions()
            .find(|((p, q, name), _)| *p == x && *q == y && self.pool.role_name_str(*name) == r)
            .map(|(_, l)| l)
    }

    /// Concept annotations of an individual, as syntax trees.
    pub fn annotations(&self, st: &TableauState, ind: &Individual) -> Vec<(Concept, Bdd)> {
        match st.find(ind) {
            Some(n) => st
                .concepts(n)
                .iter()
                .map(|(&c, &l)| (self.pool.concept(c), l))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Initial tableau: every ABox assertion labeled with its own variable,
    /// plus the negated query labeled ⊤.
    pub fn init_tableau(&mut self) -> TableauState {
        let mut st = TableauState::new();
        for name in &self.kb.individuals {
            st.named_node(name);
        }
        for &id in &self.kb.abox {
            let v = self.var(id);
            match &self.kb.axioms[id].axiom {
                Axiom::ClassAssertion(c, a) => {
                    let n = st.named_node(a);
                    let c = self.pool.intern(c);
                    st.psi_insert(&mut self.mgr, Assertion::Concept(n, c), v);
                }
                Axiom::PropertyAssertion(r, a, b) => {
                    let (x, y) = (st.named_node(a), st.named_node(b));
                    let r = self.pool.role_name(r.name());
                    st.psi_insert(&mut self.mgr, Assertion::Role(x, y, r), v);
                }
                _ => unreachable!("abox index holds a non-ABox axiom"),
            }
        }
        match self.query.clone() {
            Query::InstanceOf(a, c) => {
                let n = st.named_node(&a);
                let neg = self.pool.intern(&Concept::not(c));
                st.psi_insert(&mut self.mgr, Assertion::Concept(n, neg), Bdd::TRUE);
            }
            Query::Subsumption(c, d) => {
                let x0 = st.fresh_node(None);
                let test = self.pool.intern(&Concept::and(c, Concept::not(d)));
                st.psi_insert(&mut self.mgr, Assertion::Concept(x0, test), Bdd::TRUE);
            }
        }
        st
    }

    /// Blocking status of every node, from one depth-first pass that keeps
    /// the fingerprints of the concept maps on the current ancestor path.
    fn blocked_all(&self, st: &TableauState, print: &[u64]) -> Vec<bool> {
        let n = st.nodes.len();
        let mut blocked = vec![false; n];
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for x in st.node_ids() {
            match st.parent(x) {
                Some(p) => children[p.index()].push(x),
                None => roots.push(x),
            }
        }
        // depth-first, keeping the fingerprints of the current path
        let mut path: HashMap<u64, usize> = HashMap::new();
        let mut stack: Vec<(NodeId, bool)> = roots.into_iter().rev().map(|r| (r, true)).collect();
        while let Some((x, enter)) = stack.pop() {
            let f = print[x.index()];
            if !enter {
                if let Some(c) = path.get_mut(&f) {
                    *c -= 1;
                    if *c == 0 {
                        path.remove(&f);
                    }
                }
                continue;
            }
            if let Some(p) = st.parent(x) {
                if st.is_anonymous(x)
                    && (blocked[p.index()]
                        || (path.contains_key(&f) && self.has_twin_ancestor(st, x)))
                {
                    blocked[x.index()] = true;
                }
            }
            *path.entry(f).or_insert(0) += 1;
            stack.push((x, false));
            for &c in children[x.index()].iter().rev() {
                stack.push((c, true));
            }
        }
        blocked
    }

    fn has_twin_ancestor(&self, st: &TableauState, x: NodeId) -> bool {
        let mine = st.concepts(x);
        let mut anc = st.parent(x);
        while let Some(y) = anc {
            if st.concepts(y) == mine {
                return true;
            }
            anc = st.parent(y);
        }
        false
    }

    /// An anonymous node is blocked when an ancestor carries exactly the
    /// same concept annotations with identical labels, or its parent is
    /// blocked. Named individuals are never blocked.
    pub fn blocked(&self, st: &TableauState, x: NodeId) -> bool {
        let mut z = Some(x);
        while let Some(n) = z {
            if !st.is_anonymous(n) {
                return false;
            }
            if self.has_twin_ancestor(st, n) {
                return true;
            }
            z = st.parent(n);
        }
        false
    }

    /// `R`-successors of `x` with the label under which each one is a
    /// successor: the join, over connecting role assertions `(x,y):S` (or
    /// `(y,x):S` read as `S⁻`), of the assertion label and the label of
    /// `S ⊑* R`.
    pub fn r_successors(&mut self, st: &TableauState, x: NodeId, r: RoleId) -> Vec<(NodeId, Bdd)> {
        let mut acc: BTreeMap<NodeId, Bdd> = BTreeMap::new();
        let mut edges: Vec<(NodeId, RoleId, Bdd)> = Vec::new();
        for y in st.successors(x) {
            for name in st.roles_between(x, y) {
                let l = st
                    .label(Assertion::Role(x, y, name))
                    .expect("indexed role assertion");
                edges.push((y, RoleId::forward(name), l));
            }
        }
        for y in st.predecessors(x) {
            for name in st.roles_between(y, x) {
                let l = st
                    .label(Assertion::Role(y, x, name))
                    .expect("indexed role assertion");
                edges.push((y, RoleId::backward(name), l));
            }
        }
        for (y, s, l) in edges {
            let sub = self.roles.sub(s, r);
            if sub.is_false() {
                continue;
            }
            let via = self.mgr.and(l, sub);
            let slot = acc.entry(y).or_insert(Bdd::FALSE);
            *slot = self.mgr.or(*slot, via);
        }
        acc.into_iter().collect()
    }

    /// Individuals that are `r`-successors of `x`, by syntax.
    pub fn successors_of(
        &mut self,
        st: &TableauState,
        x: &Individual,
        r: &RoleExpr,
    ) -> Vec<Individual> {
        let Some(n) = st.find(x) else {
            return Vec::new();
        };
        let r = self.pool.role(r);
        self.r_successors(st, n, r)
            .into_iter()
            .map(|(y, _)| st.individual(y).clone())
            .collect()
    }

    /// Some `y` with `(x,y):r` and `y:c` whose labels ψ already implies.
    fn has_witness(
        &mut self,
        st: &TableauState,
        x: NodeId,
        r: RoleId,
        c: ConceptId,
        psi: Bdd,
    ) -> bool {
        for (y, via) in self.r_successors(st, x, r) {
            if let Some(lc) = st.label(Assertion::Concept(y, c)) {
                if self.mgr.implies(psi, via) && self.mgr.implies(psi, lc) {
                    return true;
                }
            }
        }
        false
    }

    /// Every branch must have at least one ψ-insertable consequence; the
    /// ∃ rule additionally needs an unblocked node without a witness.
    fn is_applicable(&mut self, st: &TableauState, m: &RuleMatch, blocked: Option<bool>) -> bool {
        if m.rule == Rule::Exists {
            let is_blocked = match blocked {
                Some(b) => b,
                None => self.blocked(st, m.node),
            };
            if is_blocked {
                return false;
            }
            if let Some(Consequence::Fresh {
                from,
                role,
                concept,
            }) = m.branches[0].first().copied()
            {
                return !self.has_witness(st, from, role, concept, m.psi);
            }
        }
        let psi = m.psi;
        m.branches.iter().all(|branch| {
            branch.iter().any(|cons| match *cons {
                Consequence::Assert(a) => st.is_insertable(&mut self.mgr, a, psi),
                Consequence::Fresh { .. } => true,
            })
        })
    }

    /// All applicable matches in priority order.
    pub fn applicable_matches(&mut self, st: &TableauState) -> Vec<RuleMatch> {
        let mut scratch = st.clone();
        let print: Vec<u64> = (0..st.nodes.len() as u32)
            .map(|i| scratch.fingerprint(NodeId(i)))
            .collect();
        let blocked = self.blocked_all(st, &print);
        let mut out = Vec::new();
        for x in st.node_ids() {
            out.extend(self.node_matches(st, x, blocked[x.index()]));
        }
        out.sort_by_key(|m| (m.rule.class(), m.rule));
        out
    }

    /// Same as `applicable_matches`, reusing per-node results while the
    /// node, its neighbours and its blocking status are unchanged.
    fn cached_matches(&mut self, st: &mut TableauState) -> Vec<Arc<RuleMatch>> {
        let print: Vec<u64> = (0..st.nodes.len() as u32)
            .map(|i| st.fingerprint(NodeId(i)))
            .collect();
        let blocked = self.blocked_all(st, &print);
        let mut out = Vec::new();
        for i in 0..st.nodes.len() as u32 {
            let x = NodeId(i);
            let b = blocked[x.index()];
            let fresh = match &st.scratch.cache[x.index()] {
                Some(c) => {
                    c.blocked == b
                        && st.stamp(x) <= c.at
                        && st
                            .successors(x)
                            .chain(st.predecessors(x))
                            .all(|y| st.stamp(y) <= c.at)
                }
                None => false,
            };
            if !fresh {
                let matches = Arc::new(
                    self.node_matches(st, x, b)
                        .into_iter()
                        .map(Arc::new)
                        .collect(),
                );
                st.scratch.cache[x.index()] = Some(CachedMatches {
                    at: st.scratch.clock,
                    blocked: b,
                    matches,
                });
            }
            let cached = st.scratch.cache[x.index()].as_ref().expect("filled above");
            out.extend(cached.matches.iter().cloned());
        }
        out.sort_by_key(|m| (m.rule.class(), m.rule));
        out
    }

    /// Applicable matches whose premise sits on `x`, plus the CE matches
    /// for `x`, in discovery order.
    fn node_matches(&mut self, st: &TableauState, x: NodeId, blocked: bool) -> Vec<RuleMatch> {
        let mut out = Vec::new();
        let ce = self.ce.clone();
        let concepts: Vec<(ConceptId, Bdd)> =
            st.concepts(x).iter().map(|(&c, &l)| (c, l)).collect();
        for (c, lab) in concepts {
            let premise = Assertion::Concept(x, c);
            let mut base = RuleMatch {
                rule: Rule::And,
                node: x,
                target: None,
                premises: vec![premise],
                axioms: Vec::new(),
                psi: lab,
                branches: Vec::new(),
            };
            match self.pool.shape(c) {
                Shape::Atom(a) => {
                    let incs = self.unfold.get(&a).cloned().unwrap_or_default();
                    for (id, sup) in incs {
                        let v = self.var(id);
                        let psi = self.mgr.and(lab, v);
                        let m = RuleMatch {
                            rule: Rule::Unfold,
                            axioms: vec![id],
                            psi,
                            branches: vec![vec![Consequence::Assert(Assertion::Concept(x, sup))]],
                            ..base.clone()
                        };
                        self.push_if_applicable(st, blocked, &mut out, m);
                    }
                }
                Shape::And(a, b) => {
                    base.branches = vec![vec![
                        Consequence::Assert(Assertion::Concept(x, a)),
                        Consequence::Assert(Assertion::Concept(x, b)),
                    ]];
                    self.push_if_applicable(st, blocked, &mut out, base);
                }
                Shape::Or(a, b) => {
                    base.rule = Rule::Or;
                    base.branches = vec![
                        vec![Consequence::Assert(Assertion::Concept(x, a))],
                        vec![Consequence::Assert(Assertion::Concept(x, b))],
                    ];
                    self.push_if_applicable(st, blocked, &mut out, base);
                }
                Shape::Exists(r, d) => {
                    base.rule = Rule::Exists;
                    base.branches = vec![vec![Consequence::Fresh {
                        from: x,
                        role: r,
                        concept: d,
                    }]];
                    self.push_if_applicable(st, blocked, &mut out, base);
                }
                Shape::Forall(r, d) => {
                    for (y, via) in self.r_successors(st, x, r) {
                        let psi = self.mgr.and(lab, via);
                        let m = RuleMatch {
                            rule: Rule::Forall,
                            target: Some(y),
                            premises: self.linking_premises(st, premise, x, y),
                            axioms: self.rbox_support(via),
                            psi,
                            branches: vec![vec![Consequence::Assert(Assertion::Concept(y, d))]],
                            ..base.clone()
                        };
                        self.push_if_applicable(st, blocked, &mut out, m);
                    }
                    let transitive: Vec<RoleId> = self
                        .roles
                        .roles()
                        .filter(|&t| {
                            !self.roles.transitive(t).is_false() && !self.roles.sub(t, r).is_false()
                        })
                        .collect();
                    for t in transitive {
                        let tl = self.roles.transitive(t);
                        let sl = self.roles.sub(t, r);
                        let side = self.mgr.and(tl, sl);
                        let fc = self.pool.forall(t, d);
                        for (y, via) in self.r_successors(st, x, t) {
                            let cond = self.mgr.and(side, via);
                            let psi = self.mgr.and(lab, cond);
                            let m = RuleMatch {
                                rule: Rule::ForallPlus,
                                target: Some(y),
                                premises: self.linking_premises(st, premise, x, y),
                                axioms: self.rbox_support(cond),
                                psi,
                                branches: vec![vec![Consequence::Assert(Assertion::Concept(
                                    y, fc,
                                ))]],
                                ..base.clone()
                            };
                            self.push_if_applicable(st, blocked, &mut out, m);
                        }
                    }
                }
                Shape::Top | Shape::Bottom | Shape::NegAtom(_) => {}
            }
        }
        for &(id, gci) in &ce {
            let psi = self.var(id);
            let m = RuleMatch {
                rule: Rule::Ce,
                node: x,
                target: None,
                premises: Vec::new(),
                axioms: vec![id],
                psi,
                branches: vec![vec![Consequence::Assert(Assertion::Concept(x, gci))]],
            };
            self.push_if_applicable(st, blocked, &mut out, m);
        }
        out
    }

    fn push_if_applicable(
        &mut self,
        st: &TableauState,
        blocked: bool,
        out: &mut Vec<RuleMatch>,
        m: RuleMatch,
    ) {
        if self.is_applicable(st, &m, Some(blocked)) {
            out.push(m);
        }
    }

    fn linking_premises(
        &self,
        st: &TableauState,
        first: Assertion,
        x: NodeId,
        y: NodeId,
    ) -> Vec<Assertion> {
        let mut out = vec![first];
        out.extend(st.roles_between(x, y).map(|r| Assertion::Role(x, y, r)));
        out.extend(st.roles_between(y, x).map(|r| Assertion::Role(y, x, r)));
        out
    }

    fn rbox_support(&self, label: Bdd) -> Vec<AxiomId> {
        self.mgr
            .support(label)
            .into_iter()
            .filter(|&id| self.kb.axioms[id].axiom.kind() == crate::syntax::AxiomKind::RBox)
            .collect()
    }

    /// Applies a match, returning one tableau per branch. A match that is
    /// no longer applicable leaves the state as it is.
    pub fn apply_match(
        &mut self,
        mut st: TableauState,
        m: &RuleMatch,
    ) -> Result<Vec<TableauState>> {
        if !self.is_applicable(&st, m, None) {
            return Ok(vec![st]);
        }
        self.stats.applications += 1;
        if m.branches.len() == 1 {
            self.insert_branch(&mut st, m, 0)?;
            return Ok(vec![st]);
        }
        let mut out = Vec::with_capacity(m.branches.len());
        for i in 0..m.branches.len() {
            let mut s = st.clone();
            self.insert_branch(&mut s, m, i)?;
            out.push(s);
        }
        Ok(out)
    }

    fn apply_in_place(&mut self, st: &mut TableauState, m: &RuleMatch) -> Result<()> {
        debug_assert!(m.rule.is_deterministic());
        if self.is_applicable(st, m, None) {
            self.stats.applications += 1;
            self.insert_branch(st, m, 0)?;
        }
        Ok(())
    }

    fn insert_branch(&mut self, st: &mut TableauState, m: &RuleMatch, branch: usize) -> Result<()> {
        let mut inserted = Vec::new();
        for &cons in &m.branches[branch] {
            match cons {
                Consequence::Assert(a) => {
                    if st.psi_insert(&mut self.mgr, a, m.psi) {
                        inserted.push(a);
                    }
                }
                Consequence::Fresh {
                    from,
                    role,
                    concept,
                } => {
                    // a witness made under a weaker label is widened, not
                    // duplicated
                    let y = match st.witness_of(from, role, concept) {
                        Some(y) => y,
                        None => st.fresh_witness(from, role, concept),
                    };
                    let edge = if role.is_inverse() {
                        Assertion::Role(y, from, role.name())
                    } else {
                        Assertion::Role(from, y, role.name())
                    };
                    for a in [edge, Assertion::Concept(y, concept)] {
                        if st.psi_insert(&mut self.mgr, a, m.psi) {
                            inserted.push(a);
                        }
                    }
                }
            }
        }
        if st.assertion_count() > self.options.max_assertions {
            return Err(Error::ResourceCap {
                what: "assertions in one tableau",
                limit: self.options.max_assertions,
            });
        }
        if self.options.trace {
            let line = self.trace_line(st, m, branch, &inserted);
            self.trace.push(line);
        }
        Ok(())
    }

    fn trace_line(
        &self,
        st: &TableauState,
        m: &RuleMatch,
        branch: usize,
        inserted: &[Assertion],
    ) -> String {
        let mut line = format!("{} x={}", m.rule, st.individual(m.node));
        if let Some(y) = m.target {
            line.push_str(&format!(" y={}", st.individual(y)));
        }
        if !m.axioms.is_empty() {
            let ids: Vec<String> = m.axioms.iter().map(|a| a.to_string()).collect();
            line.push_str(&format!(" axioms=[{}]", ids.join(",")));
        }
        if m.branches.len() > 1 {
            line.push_str(&format!(" branch={}", branch + 1));
        }
        line.push_str(" =>");
        for &a in inserted {
            let l = st.label(a).expect("just inserted");
            line.push_str(&format!(" {} @{}", self.show(st, a), l.id()));
        }
        line
    }

    /// Human-readable assertion.
    pub fn show(&self, st: &TableauState, a: Assertion) -> String {
        match a {
            Assertion::Concept(n, c) => format!("{}:{}", st.individual(n), self.pool.concept(c)),
            Assertion::Role(x, y, r) => format!(
                "({},{}):{}",
                st.individual(x),
                st.individual(y),
                self.pool.role_name_str(r)
            ),
        }
    }

    /// Expands a forest that starts from `initial` and returns the tableaux
    /// to which no rule applies. With `prune`, tableaux that cannot affect
    /// the pinpointing BDD are dropped instead of being saturated.
    pub fn expand(&mut self, initial: TableauState) -> Result<Vec<TableauState>> {
        let mut work = vec![initial];
        self.stats.created += 1;
        let mut done = Vec::new();
        let mut bound = Bdd::TRUE;
        while let Some(mut st) = work.pop() {
            loop {
                if self.options.prune {
                    let clash = self.clash_bdd(&st);
                    if self.mgr.implies(bound, clash) {
                        self.stats.pruned += 1;
                        break;
                    }
                }
                let matches = self.cached_matches(&mut st);
                if matches.is_empty() {
                    self.stats.max_anonymous = self.stats.max_anonymous.max(st.anonymous_count());
                    let clash = self.clash_bdd(&st);
                    bound = self.mgr.and(bound, clash);
                    done.push(st);
                    break;
                }
                let pick = match self.options.strategy {
                    Strategy::Priority => None,
                    Strategy::Shuffled { .. } => {
                        let top = matches[0].rule.class();
                        let first = matches.iter().take_while(|m| m.rule.class() == top).count();
                        let det = matches
                            .iter()
                            .take_while(|m| m.rule.is_deterministic())
                            .count();
                        let pool = if det > first && self.rng.gen_ratio(1, 4) {
                            det
                        } else {
                            first
                        };
                        Some(self.rng.gen_range(0..pool))
                    }
                };
                let chosen = match pick {
                    Some(i) => &matches[i],
                    None => &matches[0],
                };
                if !chosen.rule.is_deterministic() {
                    let mut branches = self.apply_match(st, chosen)?;
                    self.stats.created += branches.len() - 1;
                    branches.reverse();
                    work.extend(branches);
                    break;
                }
                match pick {
                    Some(_) => self.apply_in_place(&mut st, chosen)?,
                    None => {
                        let class = chosen.rule.class();
                        for m in matches.iter().take_while(|m| m.rule.class() == class) {
                            self.apply_in_place(&mut st, m)?;
                        }
                    }
                }
            }
            if self.stats.created > self.options.max_tableaux {
                return Err(Error::ResourceCap {
                    what: "tableaux created in the forest",
                    limit: self.options.max_tableaux,
                });
            }
        }
        self.stats.completed = done.len();
        Ok(done)
    }

    /// Join over the clashes of a tableau of the conjoined clash labels.
    /// `x:⊥` counts as a clash on its own.
    pub fn clash_bdd(&mut self, st: &TableauState) -> Bdd {
        let mut acc = Bdd::FALSE;
        for x in st.node_ids() {
            for (&c, &lab) in st.concepts(x) {
                match self.pool.shape(c) {
                    Shape::Bottom => acc = self.mgr.or(acc, lab),
                    Shape::Atom(a) => {
                        let Some(neg) = self.pool.find(Shape::NegAtom(a)) else {
                            continue;
                        };
                        if let Some(&ln) = st.concepts(x).get(&neg) {
                            let both = self.mgr.and(lab, ln);
                            acc = self.mgr.or(acc, both);
                        }
                    }
                    _ => {}
                }
            }
        }
        acc
    }

    /// Expands the query's forest and conjoins the clash BDDs of the
    /// completed tableaux.
    pub fn run(&mut self) -> Result<Bdd> {
        let init = self.init_tableau();
        let completed = self.expand(init)?;
        let mut acc = Bdd::TRUE;
        for st in &completed {
            let c = self.clash_bdd(st);
            acc = self.mgr.and(acc, c);
        }
        Ok(acc)
    }

    #[doc(hidden)]
    pub fn role_name(&mut self, name: &str) -> RoleName {
        self.pool.role_name(name)
    }

    #[doc(hidden)]
    pub fn concept_id(&mut self, c: &Concept) -> ConceptId {
        self.pool.intern(c)
    }

    #[doc(hidden)]
    pub fn role_id(&mut self, r: &RoleExpr) -> RoleId {
        self.pool.role(r)
    }
}
