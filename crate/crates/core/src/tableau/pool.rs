use std::collections::HashMap;

use crate::bdd::{Bdd, BddManager};
use crate::syntax::{negate, to_nnf, Axiom, Concept, KnowledgeBase, RoleExpr};

/// Interned NNF concept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub(crate) u32);

/// Interned atomic role name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleName(pub(crate) u32);

/// Interned role expression: a name plus a direction bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleId(u32);

impl RoleId {
    pub fn forward(name: RoleName) -> RoleId {
        RoleId(name.0 * 2)
    }

    pub fn backward(name: RoleName) -> RoleId {
        RoleId(name.0 * 2 + 1)
    }

    pub fn name(self) -> RoleName {
        RoleName(self.0 / 2)
    }

    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn inverse(self) -> RoleId {
        RoleId(self.0 ^ 1)
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Shape {
    Top,
    Bottom,
    Atom(u32),
    NegAtom(u32),
    And(ConceptId, ConceptId),
    Or(ConceptId, ConceptId),
    Exists(RoleId, ConceptId),
    Forall(RoleId, ConceptId),
}

/// Hash-consed NNF concepts and role names for one reasoning run.
#[derive(Clone, Debug, Default)]
pub struct ConceptPool {
    shapes: Vec<Shape>,
    index: HashMap<Shape, ConceptId>,
    atoms: Vec<String>,
    atom_index: HashMap<String, u32>,
    roles: Vec<String>,
    role_index: HashMap<String, RoleName>,
}

impl ConceptPool {
    pub(crate) fn shape(&self, c: ConceptId) -> Shape {
        self.shapes[c.0 as usize]
    }

    fn insert(&mut self, s: Shape) -> ConceptId {
        if let Some(&c) = self.index.get(&s) {
            return c;
        }
        let c = ConceptId(self.shapes.len() as u32);
        self.shapes.push(s);
        self.index.insert(s, c);
        c
    }

    pub(crate) fn find(&self, s: Shape) -> Option<ConceptId> {
        self.index.get(&s).copied()
    }

    fn atom(&mut self, name: &str) -> u32 {
        if let Some(&a) = self.atom_index.get(name) {
            return a;
        }
        let a = self.atoms.len() as u32;
        self.atoms.push(name.to_string());
        self.atom_index.insert(name.to_string(), a);
        a
    }

    pub(crate) fn atom_id(&self, name: &str) -> Option<u32> {
        self.atom_index.get(name).copied()
    }

    pub fn role_name(&mut self, name: &str) -> RoleName {
        if let Some(&r) = self.role_index.get(name) {
            return r;
        }
        let r = RoleName(self.roles.len() as u32);
        self.roles.push(name.to_string());
        self.role_index.insert(name.to_string(), r);
        r
    }

    pub fn role(&mut self, r: &RoleExpr) -> RoleId {
        let name = self.role_name(r.name());
        if r.is_inverse() {
            RoleId::backward(name)
        } else {
            RoleId::forward(name)
        }
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn role_expr(&self, r: RoleId) -> RoleExpr {
        let name = self.roles[r.name().0 as usize].clone();
        if r.is_inverse() {
            RoleExpr::Inverse(name)
        } else {
            RoleExpr::Named(name)
        }
    }

    pub fn role_name_str(&self, r: RoleName) -> &str {
        &self.roles[r.0 as usize]
    }

    /// Interns the NNF of `c`.
    pub fn intern(&mut self, c: &Concept) -> ConceptId {
        match c {
            Concept::Top => self.insert(Shape::Top),
            Concept::Bottom => self.insert(Shape::Bottom),
            Concept::Atomic(n) => {
                let a = self.atom(n);
                self.insert(Shape::Atom(a))
            }
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Atomic(n) => {
                    let a = self.atom(n);
                    self.insert(Shape::NegAtom(a))
                }
                other => {
                    let nnf = negate(other);
                    self.intern(&nnf)
                }
            },
            Concept::And(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.insert(Shape::And(a, b))
            }
            Concept::Or(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.insert(Shape::Or(a, b))
            }
            Concept::Exists(r, inner) => {
                let (r, inner) = (self.role(r), self.intern(inner));
                self.insert(Shape::Exists(r, inner))
            }
            Concept::Forall(r, inner) => {
                let (r, inner) = (self.role(r), self.intern(inner));
                self.insert(Shape::Forall(r, inner))
            }
        }
    }

    /// Interned NNF of `¬c`.
    pub fn complement(&mut self, c: ConceptId) -> ConceptId {
        match self.shape(c) {
            Shape::Top => self.insert(Shape::Bottom),
            Shape::Bottom => self.insert(Shape::Top),
            Shape::Atom(a) => self.insert(Shape::NegAtom(a)),
            Shape::NegAtom(a) => self.insert(Shape::Atom(a)),
            Shape::And(a, b) => {
                let (a, b) = (self.complement(a), self.complement(b));
                self.insert(Shape::Or(a, b))
            }
            Shape::Or(a, b) => {
                let (a, b) = (self.complement(a), self.complement(b));
                self.insert(Shape::And(a, b))
            }
            Shape::Exists(r, inner) => {
                let inner = self.complement(inner);
                self.insert(Shape::Forall(r, inner))
            }
            Shape::Forall(r, inner) => {
                let inner = self.complement(inner);
                self.insert(Shape::Exists(r, inner))
            }
        }
    }

    pub(crate) fn or(&mut self, a: ConceptId, b: ConceptId) -> ConceptId {
        self.insert(Shape::Or(a, b))
    }

    pub(crate) fn forall(&mut self, r: RoleId, c: ConceptId) -> ConceptId {
        self.insert(Shape::Forall(r, c))
    }

    /// Back to the syntax tree.
    pub fn concept(&self, c: ConceptId) -> Concept {
        match self.shape(c) {
            Shape::Top => Concept::Top,
            Shape::Bottom => Concept::Bottom,
            Shape::Atom(a) => Concept::Atomic(self.atoms[a as usize].clone()),
            Shape::NegAtom(a) => Concept::not(Concept::Atomic(self.atoms[a as usize].clone())),
            Shape::And(a, b) => Concept::and(self.concept(a), self.concept(b)),
            Shape::Or(a, b) => Concept::or(self.concept(a), self.concept(b)),
            Shape::Exists(r, inner) => Concept::exists(self.role_expr(r), self.concept(inner)),
            Shape::Forall(r, inner) => Concept::forall(self.role_expr(r), self.concept(inner)),
        }
    }

    /// Looks up an already interned concept given in any form.
    pub fn lookup(&self, c: &Concept) -> Option<ConceptId> {
        let nnf = to_nnf(c);
        self.lookup_nnf(&nnf)
    }

    fn lookup_nnf(&self, c: &Concept) -> Option<ConceptId> {
        let shape = match c {
            Concept::Top => Shape::Top,
            Concept::Bottom => Shape::Bottom,
            Concept::Atomic(n) => Shape::Atom(self.atom_id(n)?),
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Atomic(n) => Shape::NegAtom(self.atom_id(n)?),
                _ => return None,
            },
            Concept::And(a, b) => Shape::And(self.lookup_nnf(a)?, self.lookup_nnf(b)?),
            Concept::Or(a, b) => Shape::Or(self.lookup_nnf(a)?, self.lookup_nnf(b)?),
            Concept::Exists(r, inner) => {
                Shape::Exists(self.lookup_role(r)?, self.lookup_nnf(inner)?)
            }
            Concept::Forall(r, inner) => {
                Shape::Forall(self.lookup_role(r)?, self.lookup_nnf(inner)?)
            }
        };
        self.find(shape)
    }

    fn lookup_role(&self, r: &RoleExpr) -> Option<RoleId> {
        let name = *self.role_index.get(r.name())?;
        Some(if r.is_inverse() {
            RoleId::backward(name)
        } else {
            RoleId::forward(name)
        })
    }
}

/// Role inclusion and transitivity, each labeled with the BDD of the RBox
/// axiom sets that derive it.
#[derive(Clone, Debug)]
pub struct RoleLabels {
    n: usize,
    /// sub[s * n + r]: label of `s ⊑* r`.
    sub: Vec<Bdd>,
    trans: Vec<Bdd>,
}

impl RoleLabels {
    /// Labeled reflexive-transitive closure over every role in `pool`.
    ///
    /// The (∨, ∧) algebra of monotone functions is a distributive lattice,
    /// so a Floyd–Warshall sweep yields the join over all inclusion paths.
    pub fn build(kb: &KnowledgeBase, pool: &mut ConceptPool, mgr: &mut BddManager) -> RoleLabels {
        let mut edges = Vec::new();
        let mut declared = Vec::new();
        for ax in &kb.axioms {
            match &ax.axiom {
                Axiom::SubPropertyOf(s, r) => edges.push((pool.role(s), pool.role(r), ax.id)),
                Axiom::TransitiveProperty(r) => declared.push((pool.role(r), ax.id)),
                _ => {}
            }
        }
        let n = pool.role_count() * 2;
        let mut sub = vec![Bdd::FALSE; n * n];
        for i in 0..n {
            sub[i * n + i] = Bdd::TRUE;
        }
        let mut trans = vec![Bdd::FALSE; n];
        for (s, r, id) in edges {
            let v = mgr.var(id).expect("axiom id within manager");
            for (a, b) in [(s, r), (s.inverse(), r.inverse())] {
                let cell = &mut sub[a.index() * n + b.index()];
                *cell = mgr.or(*cell, v);
            }
        }
        for (r, id) in declared {
            let v = mgr.var(id).expect("axiom id within manager");
            for a in [r, r.inverse()] {
                trans[a.index()] = mgr.or(trans[a.index()], v);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = sub[i * n + k];
                if ik.is_false() || i == k {
                    continue;
                }
                for j in 0..n {
                    let kj = sub[k * n + j];
                    if kj.is_false() {
                        continue;
                    }
                    let path = mgr.and(ik, kj);
                    sub[i * n + j] = mgr.or(sub[i * n + j], path);
                }
            }
        }
        RoleLabels { n, sub, trans }
    }

    /// Label of `s ⊑* r`; the 0-terminal when `s` is not a sub-role of `r`.
    pub fn sub(&self, s: RoleId, r: RoleId) -> Bdd {
        if s.index() >= self.n || r.index() >= self.n {
            return if s == r { Bdd::TRUE } else { Bdd::FALSE };
        }
        self.sub[s.index() * self.n + r.index()]
    }

    /// Label of `Trans(r)`.
    pub fn transitive(&self, r: RoleId) -> Bdd {
        self.trans.get(r.index()).copied().unwrap_or(Bdd::FALSE)
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        (0..self.n as u32).map(RoleId)
    }
}
