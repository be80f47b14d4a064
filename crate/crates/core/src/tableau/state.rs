use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use std::sync::Arc;

use super::pool::{ConceptId, RoleId, RoleName};
use super::reasoner::RuleMatch;
use crate::bdd::{Bdd, BddManager};

/// Index of an individual inside one tableau state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Individual {
    Named(String),
    /// Created by the ∃ rule (or the subsumption test node). Serials are
    /// never reused within a state.
    Anonymous(u32),
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Individual::Named(n) => f.write_str(n),
            Individual::Anonymous(i) => write!(f, "_:an{i}"),
        }
    }
}

/// Labeled assertion key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Concept(NodeId, ConceptId),
    /// Always over a named role; inverses are stored with swapped endpoints.
    Role(NodeId, NodeId, RoleName),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct NodeInfo {
    pub individual: Individual,
    pub parent: Option<NodeId>,
    /// The `∃role.concept` of the parent this node witnesses.
    pub origin: Option<(RoleId, ConceptId)>,
    pub concepts: BTreeMap<ConceptId, Bdd>,
}

/// One tableau: labeled assertions plus the graph and the two role indexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauState {
    pub(crate) nodes: Vec<NodeInfo>,
    named: BTreeMap<String, NodeId>,
    roles: BTreeMap<(NodeId, NodeId, RoleName), Bdd>,
    /// Edges x → y for every role assertion (x,y):R.
    graph: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Reverse edges, for inverse-role successors.
    incoming: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// (x,y) → roles linking them.
    rbn: BTreeMap<(NodeId, NodeId), BTreeSet<RoleName>>,
    /// role → pairs it links.
    rbr: BTreeMap<RoleName, BTreeSet<(NodeId, NodeId)>>,
    next_anon: u32,
    assertion_count: usize,
    pub(crate) scratch: Scratch,
}

/// Matches of one node, valid while no stamp in its neighbourhood passes
/// `at` and its blocking status stays the same.
#[derive(Clone, Debug)]
pub(crate) struct CachedMatches {
    pub at: u64,
    pub blocked: bool,
    pub matches: Arc<Vec<Arc<RuleMatch>>>,
}

/// Modification stamps and the match cache. Not part of the tableau
/// proper, so equality ignores it.
#[derive(Clone, Debug, Default)]
pub(crate) struct Scratch {
    pub clock: u64,
    pub stamps: Vec<u64>,
    pub cache: Vec<Option<CachedMatches>>,
    /// Hash of each node's concept map with the stamp it was taken at.
    pub prints: Vec<(u64, u64)>,
}

impl PartialEq for Scratch {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Scratch {}

impl Scratch {
    fn touch(&mut self, n: NodeId) {
        self.clock += 1;
        self.stamps[n.index()] = self.clock;
    }

    fn add_node(&mut self) {
        self.clock += 1;
        self.stamps.push(self.clock);
        self.cache.push(None);
        self.prints.push((0, 0));
    }
}

impl Default for TableauState {
    fn default() -> Self {
        Self::new()
    }
}

impl TableauState {
    pub fn new() -> Self {
        TableauState {
            nodes: Vec::new(),
            named: BTreeMap::new(),
            roles: BTreeMap::new(),
            graph: BTreeMap::new(),
            incoming: BTreeMap::new(),
            rbn: BTreeMap::new(),
            rbr: BTreeMap::new(),
            next_anon: 0,
            assertion_count: 0,
            scratch: Scratch::default(),
        }
    }

    pub fn named_node(&mut self, name: &str) -> NodeId {
        if let Some(&n) = self.named.get(name) {
            return n;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeInfo {
            individual: Individual::Named(name.to_string()),
            parent: None,
            origin: None,
            concepts: BTreeMap::new(),
        });
        self.named.insert(name.to_string(), id);
        self.scratch.add_node();
        id
    }

    pub fn fresh_node(&mut self, parent: Option<NodeId>) -> NodeId {
        self.push_anonymous(parent, None)
    }

    /// A new anonymous child of `parent` witnessing `parent : ∃role.concept`.
    pub fn fresh_witness(&mut self, parent: NodeId, role: RoleId, concept: ConceptId) -> NodeId {
        self.push_anonymous(Some(parent), Some((role, concept)))
    }

    /// The child created for `parent : ∃role.concept`, if any.
    pub fn witness_of(&self, parent: NodeId, role: RoleId, concept: ConceptId) -> Option<NodeId> {
        self.node_ids().find(|&n| {
            self.nodes[n.index()].parent == Some(parent)
                && self.nodes[n.index()].origin == Some((role, concept))
        })
    }

    fn push_anonymous(
        &mut self,
        parent: Option<NodeId>,
        origin: Option<(RoleId, ConceptId)>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeInfo {
            individual: Individual::Anonymous(self.next_anon),
            parent,
            origin,
            concepts: BTreeMap::new(),
        });
        self.next_anon += 1;
        self.scratch.add_node();
        id
    }

    pub fn find_named(&self, name: &str) -> Option<NodeId> {
        self.named.get(name).copied()
    }

    pub fn find(&self, ind: &Individual) -> Option<NodeId> {
        match ind {
            Individual::Named(n) => self.find_named(n),
            Individual::Anonymous(_) => self.node_ids().find(|&n| self.individual(n) == ind),
        }
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn individual(&self, n: NodeId) -> &Individual {
        &self.nodes[n.index()].individual
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n.index()].parent
    }

    pub fn is_anonymous(&self, n: NodeId) -> bool {
        matches!(self.nodes[n.index()].individual, Individual::Anonymous(_))
    }

    pub fn anonymous_count(&self) -> usize {
        self.next_anon as usize
    }

    pub fn assertion_count(&self) -> usize {
        self.assertion_count
    }

    /// Concept annotations of a node with their labels.
    pub fn concepts(&self, n: NodeId) -> &BTreeMap<ConceptId, Bdd> {
        &self.nodes[n.index()].concepts
    }

    pub fn label(&self, a: Assertion) -> Option<Bdd> {
        match a {
            Assertion::Concept(n, c) => self.nodes[n.index()].concepts.get(&c).copied(),
            Assertion::Role(x, y, r) => self.roles.get(&(x, y, r)).copied(),
        }
    }

    /// All labeled assertions, concepts first, in a fixed order.
    pub fn assertions(&self) -> Vec<(Assertion, Bdd)> {
        let mut out: Vec<(Assertion, Bdd)> = self
            .node_ids()
            .flat_map(|n| {
                self.concepts(n)
                    .iter()
                    .map(move |(&c, &l)| (Assertion::Concept(n, c), l))
            })
            .collect();
        out.extend(
            self.roles
                .iter()
                .map(|(&(x, y, r), &l)| (Assertion::Role(x, y, r), l)),
        );
        out
    }

    pub fn role_assertions(&self) -> impl Iterator<Item = ((NodeId, NodeId, RoleName), Bdd)> + '_ {
        self.roles.iter().map(|(&k, &v)| (k, v))
    }

    pub fn successors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph.get(&n).into_iter().flatten().copied()
    }

    pub fn predecessors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.incoming.get(&n).into_iter().flatten().copied()
    }

    /// Roles on the edge x → y.
    pub fn roles_between(&self, x: NodeId, y: NodeId) -> impl Iterator<Item = RoleName> + '_ {
        self.rbn.get(&(x, y)).into_iter().flatten().copied()
    }

    /// Pairs linked by a role.
    pub fn pairs_of(&self, r: RoleName) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.rbr.get(&r).into_iter().flatten().copied()
    }

    /// ψ-insertion of one assertion. Returns whether the state changed.
    ///
    /// An absent assertion is stored with label ψ. A present one with label
    /// B becomes B ∨ ψ, unless that disjunction is B itself (ψ ⊨ B).
    /// Labels are never the 0-terminal: inserting it is a no-op.
    pub fn psi_insert(&mut self, mgr: &mut BddManager, a: Assertion, psi: Bdd) -> bool {
        if psi.is_false() {
            return false;
        }
        let slot = match a {
            Assertion::Concept(n, c) => self.nodes[n.index()].concepts.get_mut(&c),
            Assertion::Role(x, y, r) => self.roles.get_mut(&(x, y, r)),
        };
        if let Some(label) = slot {
            let joined = mgr.or(*label, psi);
            if joined == *label {
                return false;
            }
            *label = joined;
            self.touch(a);
            return true;
        }
        self.assertion_count += 1;
        match a {
            Assertion::Concept(n, c) => {
                self.nodes[n.index()].concepts.insert(c, psi);
            }
            Assertion::Role(x, y, r) => {
                self.roles.insert((x, y, r), psi);
                self.graph.entry(x).or_default().insert(y);
                self.incoming.entry(y).or_default().insert(x);
                self.rbn.entry((x, y)).or_default().insert(r);
                self.rbr.entry(r).or_default().insert((x, y));
            }
        }
        self.touch(a);
        true
    }

    fn touch(&mut self, a: Assertion) {
        match a {
            Assertion::Concept(n, _) => self.scratch.touch(n),
            Assertion::Role(x, y, _) => {
                self.scratch.touch(x);
                self.scratch.touch(y);
            }
        }
    }

    /// Hash of the node's concept map, recomputed only after it changed.
    pub(crate) fn fingerprint(&mut self, n: NodeId) -> u64 {
        use std::hash::{DefaultHasher, Hash, Hasher};
        let stamp = self.stamp(n);
        let (at, print) = self.scratch.prints[n.index()];
        if at == stamp {
            return print;
        }
        let mut h = DefaultHasher::new();
        self.concepts(n).hash(&mut h);
        let print = h.finish();
        self.scratch.prints[n.index()] = (stamp, print);
        print
    }

    /// Last modification time of the node or anything incident to it.
    pub(crate) fn stamp(&self, n: NodeId) -> u64 {
        self.scratch.stamps[n.index()]
    }

    /// Whether inserting `a` with label ψ would change the state.
    pub fn is_insertable(&self, mgr: &mut BddManager, a: Assertion, psi: Bdd) -> bool {
        if psi.is_false() {
            return false;
        }
        match self.label(a) {
            None => true,
            Some(label) => !mgr.implies(psi, label),
        }
    }
}
