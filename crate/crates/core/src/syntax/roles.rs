use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Axiom, KnowledgeBase, RoleExpr};

/// Reflexive-transitive closure of the role inclusions, closed under inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleHierarchy {
    /// role → every role included in it (itself included).
    pub subroles: BTreeMap<RoleExpr, BTreeSet<RoleExpr>>,
    pub transitive: BTreeSet<RoleExpr>,
}

impl RoleHierarchy {
    /// Sub-roles of `r`. Roles never mentioned in the KB only contain themselves.
    pub fn subroles(&self, r: &RoleExpr) -> BTreeSet<RoleExpr> {
        self.subroles
            .get(r)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([r.clone()]))
    }

    pub fn is_subrole(&self, sub: &RoleExpr, sup: &RoleExpr) -> bool {
        sub == sup || self.subroles.get(sup).is_some_and(|s| s.contains(sub))
    }

    pub fn is_transitive(&self, r: &RoleExpr) -> bool {
        self.transitive.contains(r)
    }
}

/// Every role mentioned by the KB, in both directions.
pub fn kb_roles(kb: &KnowledgeBase) -> BTreeSet<RoleExpr> {
    kb.signature()
        .roles
        .into_iter()
        .flat_map(|n| [RoleExpr::Named(n.clone()), RoleExpr::Inverse(n)])
        .collect()
}

pub fn role_closure(kb: &KnowledgeBase) -> RoleHierarchy {
    let roles = kb_roles(kb);
    // direct[sup] = roles directly included in sup
    let mut direct: BTreeMap<RoleExpr, BTreeSet<RoleExpr>> = BTreeMap::new();
    let mut transitive = BTreeSet::new();
    for ax in &kb.axioms {
        match &ax.axiom {
            Axiom::SubPropertyOf(sub, sup) => {
                direct.entry(sup.clone()).or_default().insert(sub.clone());
                direct
                    .entry(sup.inverse())
                    .or_default()
                    .insert(sub.inverse());
            }
            Axiom::TransitiveProperty(r) => {
                transitive.insert(r.clone());
                transitive.insert(r.inverse());
            }
            _ => {}
        }
    }
    let mut subroles = BTreeMap::new();
    for r in &roles {
        let mut seen = BTreeSet::from([r.clone()]);
        let mut stack = vec![r.clone()];
        while let Some(cur) = stack.pop() {
            for s in direct.get(&cur).into_iter().flatten() {
                if seen.insert(s.clone()) {
                    stack.push(s.clone());
                }
            }
        }
        subroles.insert(r.clone(), seen);
    }
    RoleHierarchy {
        subroles,
        transitive,
    }
}
