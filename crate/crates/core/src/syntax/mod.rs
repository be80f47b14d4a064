//! Abstract syntax, the text reader, negation normal form and the role
//! hierarchy.

mod ast;
mod nnf;
mod parser;
mod roles;

pub use ast::{
    AnnotatedAxiom, Axiom, AxiomId, AxiomKind, Concept, Inclusion, KnowledgeBase, Query, RoleExpr,
    Signature,
};
pub use nnf::{is_nnf, negate, to_nnf};
pub use parser::{parse_kb, parse_query};
pub use roles::{kb_roles, role_closure, RoleHierarchy};
