use super::ast::Concept;

/// Negation normal form: negation is pushed down to atomic concepts.
pub fn to_nnf(c: &Concept) -> Concept {
    match c {
        Concept::Atomic(_) | Concept::Top | Concept::Bottom => c.clone(),
        Concept::Not(inner) => negate(inner),
        Concept::And(a, b) => Concept::and(to_nnf(a), to_nnf(b)),
        Concept::Or(a, b) => Concept::or(to_nnf(a), to_nnf(b)),
        Concept::Exists(r, inner) => Concept::exists(r.clone(), to_nnf(inner)),
        Concept::Forall(r, inner) => Concept::forall(r.clone(), to_nnf(inner)),
    }
}

/// NNF of `¬c`.
pub fn negate(c: &Concept) -> Concept {
    match c {
        Concept::Atomic(_) => Concept::not(c.clone()),
        Concept::Top => Concept::Bottom,
        Concept::Bottom => Concept::Top,
        Concept::Not(inner) => to_nnf(inner),
        Concept::And(a, b) => Concept::or(negate(a), negate(b)),
        Concept::Or(a, b) => Concept::and(negate(a), negate(b)),
        Concept::Exists(r, inner) => Concept::forall(r.clone(), negate(inner)),
        Concept::Forall(r, inner) => Concept::exists(r.clone(), negate(inner)),
    }
}

pub fn is_nnf(c: &Concept) -> bool {
    match c {
        Concept::Atomic(_) | Concept::Top | Concept::Bottom => true,
        Concept::Not(inner) => inner.is_atomic(),
        Concept::And(a, b) | Concept::Or(a, b) => is_nnf(a) && is_nnf(b),
        Concept::Exists(_, inner) | Concept::Forall(_, inner) => is_nnf(inner),
    }
}
