#![allow(dead_code)]

use probdl::syntax::Axiom;
use probdl::{Concept, KnowledgeBase, Query, RoleExpr};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated KBs.
#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    pub max_axioms: usize,
    pub atoms: usize,
    pub roles: usize,
    pub individuals: usize,
    /// Chance that an axiom carries a probability.
    pub p_prob: f64,
    pub allow_rbox: bool,
    pub depth: usize,
}

impl GenSpec {
    pub fn small() -> Self {
        GenSpec {
            max_axioms: 8,
            atoms: 3,
            roles: 2,
            individuals: 2,
            p_prob: 0.7,
            allow_rbox: true,
            depth: 2,
        }
    }

    pub fn role_free() -> Self {
        GenSpec {
            roles: 0,
            allow_rbox: false,
            atoms: 4,
            individuals: 3,
            ..GenSpec::small()
        }
    }
}

fn atom(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Concept {
    Concept::atomic(format!("a{}", rng.gen_range(0..spec.atoms)))
}

fn role(rng: &mut ChaCha8Rng, spec: &GenSpec) -> RoleExpr {
    let r = RoleExpr::named(format!("r{}", rng.gen_range(0..spec.roles)));
    if rng.gen_bool(0.25) {
        r.inverse()
    } else {
        r
    }
}

pub fn concept(rng: &mut ChaCha8Rng, spec: &GenSpec, depth: usize) -> Concept {
    if depth == 0 {
        return match rng.gen_range(0..20) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            2..=5 => Concept::not(atom(rng, spec)),
            _ => atom(rng, spec),
        };
    }
    let top = if spec.roles > 0 { 7 } else { 5 };
    match rng.gen_range(0..top) {
        0 | 1 => atom(rng, spec),
        2 => Concept::not(concept(rng, spec, depth - 1)),
        3 => Concept::and(concept(rng, spec, depth - 1), concept(rng, spec, depth - 1)),
        4 => Concept::or(concept(rng, spec, depth - 1), concept(rng, spec, depth - 1)),
        5 => Concept::exists(role(rng, spec), concept(rng, spec, depth - 1)),
        _ => Concept::forall(role(rng, spec), concept(rng, spec, depth - 1)),
    }
}

fn individual(rng: &mut ChaCha8Rng, spec: &GenSpec) -> String {
    format!("i{}", rng.gen_range(0..spec.individuals))
}

pub fn axiom(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Axiom {
    let kinds = if spec.roles == 0 {
        4
    } else if spec.allow_rbox {
        8
    } else {
        6
    };
    match rng.gen_range(0..kinds) {
        0 | 1 => {
            let sub = if rng.gen_bool(0.8) {
                atom(rng, spec)
            } else {
                concept(rng, spec, spec.depth - 1)
            };
            Axiom::SubClassOf(sub, concept(rng, spec, spec.depth))
        }
        2 => Axiom::ClassAssertion(concept(rng, spec, spec.depth - 1), individual(rng, spec)),
        3 => {
            if rng.gen_bool(0.3) {
                Axiom::EquivalentClasses(vec![atom(rng, spec), concept(rng, spec, 1)])
            } else {
                Axiom::ClassAssertion(atom(rng, spec), individual(rng, spec))
            }
        }
        4 | 5 => {
            let (a, b) = (individual(rng, spec), individual(rng, spec));
            Axiom::property_assertion(role(rng, spec), a, b)
        }
        6 => Axiom::SubPropertyOf(role(rng, spec), role(rng, spec)),
        _ => Axiom::TransitiveProperty(role(rng, spec)),
    }
}

pub fn random_kb(rng: &mut ChaCha8Rng, spec: &GenSpec) -> KnowledgeBase {
    let n = rng.gen_range(1..=spec.max_axioms);
    let mut kb = KnowledgeBase::new();
    for _ in 0..n {
        let ax = axiom(rng, spec);
        let p = if rng.gen_bool(spec.p_prob) {
            Some(f64::from(rng.gen_range(1..=9u32)) / 10.0)
        } else {
            None
        };
        kb.push(ax, p);
    }
    kb
}

pub fn random_query(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Query {
    if rng.gen_bool(0.7) {
        let c = if rng.gen_bool(0.6) {
            atom(rng, spec)
        } else {
            concept(rng, spec, 1)
        };
        Query::InstanceOf(individual(rng, spec), c)
    } else {
        Query::Subsumption(atom(rng, spec), concept(rng, spec, 1))
    }
}

/// Random KB plus query, with the query individual guaranteed to exist.
pub fn random_case(rng: &mut ChaCha8Rng, spec: &GenSpec) -> (KnowledgeBase, Query) {
    (random_kb(rng, spec), random_query(rng, spec))
}

/// Brute-force closure of the role inclusions on role expressions, used as
/// an oracle for the library's hierarchy.
pub fn brute_subroles(kb: &KnowledgeBase, r: &RoleExpr) -> std::collections::BTreeSet<RoleExpr> {
    let mut pairs: Vec<(RoleExpr, RoleExpr)> = Vec::new();
    for ax in &kb.axioms {
        if let Axiom::SubPropertyOf(s, t) = &ax.axiom {
            pairs.push((s.clone(), t.clone()));
            pairs.push((s.inverse(), t.inverse()));
        }
    }
    let mut out = std::collections::BTreeSet::from([r.clone()]);
    loop {
        let before = out.len();
        for (s, t) in &pairs {
            if out.contains(t) {
                out.insert(s.clone());
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Independent semantics: concept extensions over small finite domains.

/// A finite interpretation over `size` elements, at most 8.
pub struct Interp<'a> {
    pub size: usize,
    /// Extension bitmask of each atom.
    pub atoms: &'a dyn Fn(&str) -> u8,
    /// `role(name)[x]` is the bitmask of `y` with `(x,y)` in the role.
    pub role: &'a dyn Fn(&str) -> Vec<u8>,
}

fn full(size: usize) -> u8 {
    ((1u16 << size) - 1) as u8
}

fn edges(i: &Interp, r: &RoleExpr) -> Vec<u8> {
    let fwd = (i.role)(r.name());
    if !r.is_inverse() {
        return fwd;
    }
    let mut inv = vec![0u8; i.size];
    for (x, row) in fwd.iter().enumerate() {
        for (y, slot) in inv.iter_mut().enumerate() {
            if row >> y & 1 == 1 {
                *slot |= 1 << x;
            }
        }
    }
    inv
}

pub fn extension(i: &Interp, c: &Concept) -> u8 {
    let all = full(i.size);
    match c {
        Concept::Top => all,
        Concept::Bottom => 0,
        Concept::Atomic(n) => (i.atoms)(n) & all,
        Concept::Not(d) => !extension(i, d) & all,
        Concept::And(a, b) => extension(i, a) & extension(i, b),
        Concept::Or(a, b) => extension(i, a) | extension(i, b),
        Concept::Exists(r, d) => {
            let (e, d) = (edges(i, r), extension(i, d));
            (0..i.size)
                .filter(|&x| e[x] & d != 0)
                .fold(0, |m, x| m | 1 << x)
        }
        Concept::Forall(r, d) => {
            let (e, d) = (edges(i, r), extension(i, d));
            (0..i.size)
                .filter(|&x| e[x] & !d == 0)
                .fold(0, |m, x| m | 1 << x)
        }
    }
}

fn satisfies(i: &Interp, names: &dyn Fn(&str) -> usize, ax: &Axiom) -> bool {
    let all = full(i.size);
    match ax {
        Axiom::SubClassOf(c, d) => extension(i, c) & !extension(i, d) & all == 0,
        Axiom::EquivalentClasses(cs) => cs
            .windows(2)
            .all(|w| extension(i, &w[0]) == extension(i, &w[1])),
        Axiom::SubPropertyOf(s, r) => {
            let (s, r) = (edges(i, s), edges(i, r));
            s.iter().zip(&r).all(|(a, b)| a & !b == 0)
        }
        Axiom::TransitiveProperty(r) => {
            let e = edges(i, r);
            (0..i.size).all(|x| {
                (0..i.size)
                    .filter(|&y| e[x] >> y & 1 == 1)
                    .all(|y| e[y] & !e[x] == 0)
            })
        }
        Axiom::ClassAssertion(c, a) => extension(i, c) >> names(a) & 1 == 1,
        Axiom::PropertyAssertion(r, a, b) => edges(i, r)[names(a)] >> names(b) & 1 == 1,
    }
}

fn names_of(kb: &KnowledgeBase, q: &Query) -> (Vec<String>, Vec<String>, Vec<String>) {
    let sig = kb.signature();
    let mut atoms: std::collections::BTreeSet<String> = sig.concepts.clone();
    let mut roles = sig.roles.clone();
    let mut inds = sig.individuals.clone();
    match q {
        Query::InstanceOf(a, c) => {
            inds.insert(a.clone());
            c.atoms(&mut atoms);
            c.roles(&mut roles);
        }
        Query::Subsumption(c, d) => {
            for x in [c, d] {
                x.atoms(&mut atoms);
                x.roles(&mut roles);
            }
        }
    }
    (
        atoms.into_iter().collect(),
        roles.into_iter().collect(),
        inds.into_iter().collect(),
    )
}

/// Searches for a countermodel of `kb ⊨ q` with at most `max_size` elements.
/// `Some(true)` means one exists, so the query is not entailed; `None` means
/// the search space is too large to try.
pub fn finite_countermodel(kb: &KnowledgeBase, q: &Query, max_size: usize) -> Option<bool> {
    let (atoms, roles, inds) = names_of(kb, q);
    for size in 1..=max_size {
        let atom_bits = atoms.len() * size;
        let role_bits = roles.len() * size * size;
        let map_count = size.checked_pow(inds.len() as u32)?;
        let total_bits = atom_bits + role_bits;
        if total_bits > 20 || map_count > 64 {
            return None;
        }
        for map in 0..map_count {
            let place: Vec<usize> = (0..inds.len())
                .map(|k| map / size.pow(k as u32) % size)
                .collect();
            let names =
                |n: &str| place[inds.iter().position(|x| x == n).expect("known individual")];
            for bits in 0u32..1 << total_bits {
                let atoms_of = |n: &str| {
                    let k = atoms.iter().position(|x| x == n).expect("known atom");
                    ((bits >> (k * size)) & ((1 << size) - 1)) as u8
                };
                let role_of = |n: &str| {
                    let k = roles.iter().position(|x| x == n).expect("known role");
                    let base = atom_bits + k * size * size;
                    (0..size)
                        .map(|x| ((bits >> (base + x * size)) & ((1 << size) - 1)) as u8)
                        .collect()
                };
                let i = Interp {
                    size,
                    atoms: &atoms_of,
                    role: &role_of,
                };
                if !kb.axioms.iter().all(|a| satisfies(&i, &names, &a.axiom)) {
                    continue;
                }
                let violated = match q {
                    Query::InstanceOf(a, c) => extension(&i, c) >> names(a) & 1 == 0,
                    Query::Subsumption(c, d) => extension(&i, c) & !extension(&i, d) != 0,
                };
                if violated {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

/// Exact entailment for KBs without roles: every individual and the
/// subsumption witness is an independent propositional model, so the KB
/// entails the query iff one of them has no satisfying atom assignment.
pub fn role_free_entails(kb: &KnowledgeBase, q: &Query) -> bool {
    let (atoms, roles, inds) = names_of(kb, q);
    assert!(roles.is_empty(), "role-free oracle given a KB with roles");
    let gcis: Vec<(Concept, Concept)> = kb
        .inclusions()
        .into_iter()
        .map(|i| (i.sub, i.sup))
        .collect();
    // one-element domains suffice: there are no roles to connect elements
    let consistent = |constraints: &[Concept]| {
        (0u32..1 << atoms.len()).any(|bits| {
            let lookup = |n: &str| ((bits >> atoms.iter().position(|x| x == n).unwrap()) & 1) as u8;
            let no_roles = |_: &str| vec![0u8];
            let i = Interp {
                size: 1,
                atoms: &lookup,
                role: &no_roles,
            };
            gcis.iter()
                .all(|(c, d)| extension(&i, c) & !extension(&i, d) & 1 == 0)
                && constraints.iter().all(|c| extension(&i, c) == 1)
        })
    };
    let mut elements: Vec<Vec<Concept>> = inds
        .iter()
        .map(|a| {
            let mut cs: Vec<Concept> = kb
                .axioms
                .iter()
                .filter_map(|ax| match &ax.axiom {
                    Axiom::ClassAssertion(c, b) if b == a => Some(c.clone()),
                    _ => None,
                })
                .collect();
            if let Query::InstanceOf(qa, c) = q {
                if qa == a {
                    cs.push(Concept::not(c.clone()));
                }
            }
            cs
        })
        .collect();
    if let Query::Subsumption(c, d) = q {
        elements.push(vec![c.clone(), Concept::not(d.clone())]);
    }
    elements.iter().any(|cs| !consistent(cs))
}

/// Truth-table probability of a Boolean function given as a predicate over
/// assignments.
pub fn truth_table_prob(probs: &[f64], f: impl Fn(&[bool]) -> bool) -> f64 {
    let n = probs.len();
    let mut total = 0.0;
    for mask in 0u32..1 << n {
        let a: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if f(&a) {
            total += a
                .iter()
                .zip(probs)
                .map(|(&on, &p)| if on { p } else { 1.0 - p })
                .product::<f64>();
        }
    }
    total
}
