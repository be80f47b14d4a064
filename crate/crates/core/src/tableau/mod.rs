//! Labeled tableau for SHI with pinpointing.

mod pool;
mod reasoner;
mod state;

pub use pool::{ConceptId, ConceptPool, RoleId, RoleLabels, RoleName};
pub use reasoner::{
    Consequence, ExpansionOptions, ExpansionStats, Reasoner, Rule, RuleMatch, Strategy,
};
pub use state::{Assertion, Individual, NodeId, TableauState};

use crate::bdd::{Bdd, BddManager};
use crate::error::Result;
use crate::syntax::{KnowledgeBase, Query};

/// Outcome of one pinpointing run.
#[derive(Debug)]
pub struct Pinpointing {
    pub manager: BddManager,
    /// Holds for exactly the axiom subsets (by id) that entail the query.
    pub root: Bdd,
    pub stats: ExpansionStats,
    pub warnings: Vec<String>,
    pub trace: Vec<String>,
}

/// Builds the pinpointing BDD of `query` against `kb`.
pub fn pinpointing_bdd(
    kb: &KnowledgeBase,
    query: &Query,
    options: &ExpansionOptions,
) -> Result<Pinpointing> {
    let mut r = Reasoner::new(kb, query, options.clone());
    let root = r.run()?;
    let stats = r.stats();
    let warnings = r.warnings().to_vec();
    let trace = r.trace().to_vec();
    Ok(Pinpointing {
        manager: r.into_manager(),
        root,
        stats,
        warnings,
        trace,
    })
}
