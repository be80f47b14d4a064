use std::collections::BTreeSet;
use std::fmt;

/// Dense index of a stated axiom. Source order, starting at zero.
///
/// The id doubles as the BDD variable index of the axiom.
pub type AxiomId = usize;

/// Role expression: an atomic role or the inverse of one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleExpr {
    Named(String),
    Inverse(String),
}

impl RoleExpr {
    pub fn named(name: impl Into<String>) -> Self {
        RoleExpr::Named(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            RoleExpr::Named(n) | RoleExpr::Inverse(n) => n,
        }
    }

    pub fn is_inverse(&self) -> bool {
        matches!(self, RoleExpr::Inverse(_))
    }

    /// `R` becomes `R⁻` and `R⁻` becomes `R`.
    pub fn inverse(&self) -> RoleExpr {
        match self {
            RoleExpr::Named(n) => RoleExpr::Inverse(n.clone()),
            RoleExpr::Inverse(n) => RoleExpr::Named(n.clone()),
        }
    }
}

/// SHI concept expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Atomic(String),
    Top,
    Bottom,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(RoleExpr, Box<Concept>),
    Forall(RoleExpr, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(r: RoleExpr, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: RoleExpr, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    /// Right fold of an n-ary intersection. Empty input gives `Top`.
    pub fn and_all(items: Vec<Concept>) -> Self {
        fold_right(items, Concept::Top, Concept::and)
    }

    /// Right fold of an n-ary union. Empty input gives `Bottom`.
    pub fn or_all(items: Vec<Concept>) -> Self {
        fold_right(items, Concept::Bottom, Concept::or)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Concept::Atomic(_))
    }

    /// Atomic concept names occurring in the expression.
    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Atomic(n) => {
                out.insert(n.clone());
            }
            Concept::Top | Concept::Bottom => {}
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => c.atoms(out),
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Role names occurring in the expression.
    pub fn roles(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => {}
            Concept::Not(c) => c.roles(out),
            Concept::Exists(r, c) | Concept::Forall(r, c) => {
                out.insert(r.name().to_string());
                c.roles(out);
            }
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.roles(out);
                b.roles(out);
            }
        }
    }
}

fn fold_right(items: Vec<Concept>, empty: Concept, op: fn(Concept, Concept) -> Concept) -> Concept {
    let mut iter = items.into_iter().rev();
    match iter.next() {
        None => empty,
        Some(last) => iter.fold(last, |acc, c| op(c, acc)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    SubClassOf(Concept, Concept),
    EquivalentClasses(Vec<Concept>),
    SubPropertyOf(RoleExpr, RoleExpr),
    TransitiveProperty(RoleExpr),
    ClassAssertion(Concept, String),
    /// Always stored with a named role; `(a,b):R⁻` is kept as `(b,a):R`.
    PropertyAssertion(RoleExpr, String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    TBox,
    RBox,
    ABox,
}

impl Axiom {
    pub fn kind(&self) -> AxiomKind {
        match self {
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(_) => AxiomKind::TBox,
            Axiom::SubPropertyOf(..) | Axiom::TransitiveProperty(_) => AxiomKind::RBox,
            Axiom::ClassAssertion(..) | Axiom::PropertyAssertion(..) => AxiomKind::ABox,
        }
    }

    /// Builds a property assertion, swapping the individuals of an inverse role.
    pub fn property_assertion(role: RoleExpr, a: String, b: String) -> Axiom {
        match role {
            RoleExpr::Named(_) => Axiom::PropertyAssertion(role, a, b),
            RoleExpr::Inverse(n) => Axiom::PropertyAssertion(RoleExpr::Named(n), b, a),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedAxiom {
    pub id: AxiomId,
    pub axiom: Axiom,
    /// `None` for certain axioms.
    pub probability: Option<f64>,
}

impl AnnotatedAxiom {
    pub fn is_probabilistic(&self) -> bool {
        self.probability.is_some()
    }
}

/// A concept inclusion ready for reasoning: equivalences are already split
/// into pairwise inclusions that share the id of the stated axiom.
#[derive(Clone, Debug, PartialEq)]
pub struct Inclusion {
    pub id: AxiomId,
    pub sub: Concept,
    pub sup: Concept,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeBase {
    pub axioms: Vec<AnnotatedAxiom>,
    pub tbox: Vec<AxiomId>,
    pub rbox: Vec<AxiomId>,
    pub abox: Vec<AxiomId>,
    pub individuals: BTreeSet<String>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an axiom and returns its id.
    pub fn push(&mut self, axiom: Axiom, probability: Option<f64>) -> AxiomId {
        let id = self.axioms.len();
        match axiom.kind() {
            AxiomKind::TBox => self.tbox.push(id),
            AxiomKind::RBox => self.rbox.push(id),
            AxiomKind::ABox => self.abox.push(id),
        }
        match &axiom {
            Axiom::ClassAssertion(_, a) => {
                self.individuals.insert(a.clone());
            }
            Axiom::PropertyAssertion(_, a, b) => {
                self.individuals.insert(a.clone());
                self.individuals.insert(b.clone());
            }
            _ => {}
        }
        self.axioms.push(AnnotatedAxiom {
            id,
            axiom,
            probability,
        });
        id
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn axiom(&self, id: AxiomId) -> &AnnotatedAxiom {
        &self.axioms[id]
    }

    pub fn probabilistic_count(&self) -> usize {
        self.axioms.iter().filter(|a| a.is_probabilistic()).count()
    }

    /// All concept inclusions, with `equivalentClasses` expanded into the
    /// k·(k−1) ordered pairs of its members.
    pub fn inclusions(&self) -> Vec<Inclusion> {
        let mut out = Vec::new();
        for &id in &self.tbox {
            match &self.axioms[id].axiom {
                Axiom::SubClassOf(sub, sup) => out.push(Inclusion {
                    id,
                    sub: sub.clone(),
                    sup: sup.clone(),
                }),
                Axiom::EquivalentClasses(members) => {
                    for (i, sub) in members.iter().enumerate() {
                        for (j, sup) in members.iter().enumerate() {
                            if i != j {
                                out.push(Inclusion {
                                    id,
                                    sub: sub.clone(),
                                    sup: sup.clone(),
                                });
                            }
                        }
                    }
                }
                _ => unreachable!("tbox index holds a non-TBox axiom"),
            }
        }
        out
    }

    /// Atomic concept, role and individual names used anywhere in the KB.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.axioms {
            match &ax.axiom {
                Axiom::SubClassOf(a, b) => {
                    sig.add_concept(a);
                    sig.add_concept(b);
                }
                Axiom::EquivalentClasses(cs) => cs.iter().for_each(|c| sig.add_concept(c)),
                Axiom::SubPropertyOf(r, s) => {
                    sig.roles.insert(r.name().to_string());
                    sig.roles.insert(s.name().to_string());
                }
                Axiom::TransitiveProperty(r) => {
                    sig.roles.insert(r.name().to_string());
                }
                Axiom::ClassAssertion(c, a) => {
                    sig.add_concept(c);
                    sig.individuals.insert(a.clone());
                }
                Axiom::PropertyAssertion(r, a, b) => {
                    sig.roles.insert(r.name().to_string());
                    sig.individuals.insert(a.clone());
                    sig.individuals.insert(b.clone());
                }
            }
        }
        sig
    }

    /// The sub-KB made of the axioms accepted by `keep`, renumbered densely.
    pub fn restrict(&self, mut keep: impl FnMut(AxiomId) -> bool) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for ax in &self.axioms {
            if keep(ax.id) {
                kb.push(ax.axiom.clone(), ax.probability);
            }
        }
        kb
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    fn add_concept(&mut self, c: &Concept) {
        c.atoms(&mut self.concepts);
        c.roles(&mut self.roles);
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.roles.len() + self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    /// `a : C`
    InstanceOf(String, Concept),
    /// `C ⊑ D`
    Subsumption(Concept, Concept),
}

impl Query {
    /// Names used by the query that the KB never mentions.
    pub fn unknown_names(&self, sig: &Signature) -> Vec<String> {
        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        let mut unknown = Vec::new();
        match self {
            Query::InstanceOf(a, c) => {
                if !sig.individuals.contains(a) {
                    unknown.push(a.clone());
                }
                c.atoms(&mut concepts);
                c.roles(&mut roles);
            }
            Query::Subsumption(c, d) => {
                c.atoms(&mut concepts);
                d.atoms(&mut concepts);
                c.roles(&mut roles);
                d.roles(&mut roles);
            }
        }
        unknown.extend(concepts.into_iter().filter(|n| !sig.concepts.contains(n)));
        unknown.extend(roles.into_iter().filter(|n| !sig.roles.contains(n)));
        unknown
    }
}

// Printing uses the same functional syntax the parser reads.

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleExpr::Named(n) => f.write_str(n),
            RoleExpr::Inverse(n) => write!(f, "inverseOf({n})"),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atomic(n) => f.write_str(n),
            Concept::Top => f.write_str("top"),
            Concept::Bottom => f.write_str("bottom"),
            Concept::Not(c) => write!(f, "complementOf({c})"),
            Concept::And(a, b) => write!(f, "intersectionOf([{a},{b}])"),
            Concept::Or(a, b) => write!(f, "unionOf([{a},{b}])"),
            Concept::Exists(r, c) => write!(f, "someValuesFrom({r},{c})"),
            Concept::Forall(r, c) => write!(f, "allValuesFrom({r},{c})"),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf(a, b) => write!(f, "subClassOf({a},{b})"),
            Axiom::EquivalentClasses(cs) => {
                f.write_str("equivalentClasses([")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("])")
            }
            Axiom::SubPropertyOf(r, s) => write!(f, "subPropertyOf({r},{s})"),
            Axiom::TransitiveProperty(r) => write!(f, "transitiveProperty({r})"),
            Axiom::ClassAssertion(c, a) => write!(f, "classAssertion({c},{a})"),
            Axiom::PropertyAssertion(r, a, b) => write!(f, "propertyAssertion({r},{a},{b})"),
        }
    }
}

impl fmt::Display for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.probability {
            Some(p) => write!(f, "{p} :: {}", self.axiom),
            None => write!(f, "{}", self.axiom),
        }
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            writeln!(f, "{ax}.")?;
        }
        Ok(())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::InstanceOf(a, c) => write!(f, "classAssertion({c},{a})"),
            Query::Subsumption(c, d) => write!(f, "subClassOf({c},{d})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nary_connectives_fold_right() {
        let c = Concept::and_all(vec![
            Concept::atomic("a"),
            Concept::atomic("b"),
            Concept::atomic("c"),
        ]);
        assert_eq!(
            c,
            Concept::and(
                Concept::atomic("a"),
                Concept::and(Concept::atomic("b"), Concept::atomic("c"))
            )
        );
        assert_eq!(
            Concept::or_all(vec![Concept::atomic("a")]),
            Concept::atomic("a")
        );
    }

    #[test]
    fn inverse_property_assertion_swaps_individuals() {
        let ax = Axiom::property_assertion(RoleExpr::Inverse("r".into()), "a".into(), "b".into());
        assert_eq!(
            ax,
            Axiom::PropertyAssertion(RoleExpr::named("r"), "b".into(), "a".into())
        );
    }

    #[test]
    fn equivalence_expands_to_ordered_pairs_with_shared_id() {
        let mut kb = KnowledgeBase::new();
        kb.push(
            Axiom::EquivalentClasses(vec![
                Concept::atomic("a"),
                Concept::atomic("b"),
                Concept::atomic("c"),
            ]),
            None,
        );
        let incs = kb.inclusions();
        assert_eq!(incs.len(), 6);
        assert!(incs.iter().all(|i| i.id == 0));
    }
}
