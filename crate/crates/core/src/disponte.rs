//! Probabilistic semantics: worlds, query probability and explanations.

use crate::bdd::{Bdd, BddManager, VarMap};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::syntax::{AxiomId, KnowledgeBase, Query};
use crate::tableau::{pinpointing_bdd, ExpansionOptions, ExpansionStats};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub expansion: ExpansionOptions,
    /// Explanations beyond this count are not enumerated.
    pub max_explanations: usize,
    /// The world-enumeration oracle refuses KBs with more probabilistic
    /// axioms than this.
    pub oracle_cap: usize,
    pub execution: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            expansion: ExpansionOptions::default(),
            max_explanations: 10_000,
            oracle_cap: 20,
            execution: Execution::default(),
        }
    }
}

/// Boolean verdict read off the pinpointing BDD.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// The full KB entails the query.
    Yes,
    /// Satisfiable but false with every axiom present. Pinpointing labels
    /// are monotone, so this only arises for a non-monotone input BDD.
    Possible,
    No,
}

impl Entailment {
    pub fn of(mgr: &BddManager, root: Bdd) -> Entailment {
        if mgr.eval_all_true(root) {
            Entailment::Yes
        } else if !root.is_false() {
            Entailment::Possible
        } else {
            Entailment::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Entailment::Yes => "yes",
            Entailment::Possible => "possible",
            Entailment::No => "no",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryResult {
    pub probability: f64,
    /// Whether the full KB entails the query.
    pub entailed: bool,
    /// Minimal explanations as sorted axiom ids, sorted lexicographically.
    /// Empty when `explanations_complete` is false.
    pub explanations: Vec<Vec<AxiomId>>,
    pub explanations_complete: bool,
    pub bdd_nodes: usize,
    pub stats: ExpansionStats,
    pub warnings: Vec<String>,
    pub trace: Vec<String>,
}

/// Probability of every axiom's variable; certain axioms get 1.
pub fn var_map(kb: &KnowledgeBase) -> VarMap {
    VarMap::new(
        kb.axioms
            .iter()
            .map(|a| a.probability.unwrap_or(1.0))
            .collect(),
    )
}

pub fn probability_of_query(
    kb: &KnowledgeBase,
    query: &Query,
    opts: &Options,
) -> Result<QueryResult> {
    let pp = pinpointing_bdd(kb, query, &opts.expansion)?;
    let probability = pp.manager.prob(pp.root, &var_map(kb))?;
    let (explanations, explanations_complete) = match pp
        .manager
        .minimal_models_capped(pp.root, opts.max_explanations)
    {
        Some(e) => (e, true),
        None => (Vec::new(), false),
    };
    Ok(QueryResult {
        probability,
        entailed: pp.manager.eval_all_true(pp.root),
        explanations,
        explanations_complete,
        bdd_nodes: pp.manager.node_count(pp.root),
        stats: pp.stats,
        warnings: pp.warnings,
        trace: pp.trace,
    })
}

/// All minimal explanations, or an error past `max_explanations`.
pub fn explanations(
    kb: &KnowledgeBase,
    query: &Query,
    opts: &Options,
) -> Result<Vec<Vec<AxiomId>>> {
    let pp = pinpointing_bdd(kb, query, &opts.expansion)?;
    pp.manager
        .minimal_models_capped(pp.root, opts.max_explanations)
        .ok_or(Error::ExplanationCap {
            cap: opts.max_explanations,
        })
}

/// Whether the whole KB, every axiom taken as certain, entails the query.
pub fn entails(kb: &KnowledgeBase, query: &Query, opts: &Options) -> Result<bool> {
    let pp = pinpointing_bdd(kb, query, &opts.expansion)?;
    Ok(pp.manager.eval_all_true(pp.root))
}

/// Verdict of the query against the KB.
pub fn entailment(kb: &KnowledgeBase, query: &Query, opts: &Options) -> Result<Entailment> {
    let pp = pinpointing_bdd(kb, query, &opts.expansion)?;
    Ok(Entailment::of(&pp.manager, pp.root))
}

/// A choice of probabilistic axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct World {
    /// One flag per probabilistic axiom, in KB order.
    pub selection: Vec<bool>,
    /// Ids of the axioms present: every certain one plus the selected ones.
    pub axioms: Vec<AxiomId>,
    pub weight: f64,
}

fn probabilistic_ids(kb: &KnowledgeBase, cap: usize) -> Result<Vec<AxiomId>> {
    let ids: Vec<AxiomId> = kb
        .axioms
        .iter()
        .filter(|a| a.is_probabilistic())
        .map(|a| a.id)
        .collect();
    if ids.len() > cap {
        return Err(Error::OracleCap {
            count: ids.len(),
            cap,
        });
    }
    Ok(ids)
}

fn world(kb: &KnowledgeBase, prob_ids: &[AxiomId], mask: u64) -> World {
    let selection: Vec<bool> = (0..prob_ids.len()).map(|i| mask >> i & 1 == 1).collect();
    let mut weight = 1.0;
    for (&id, &on) in prob_ids.iter().zip(&selection) {
        let p = kb.axioms[id].probability.expect("probabilistic axiom");
        weight *= if on { p } else { 1.0 - p };
    }
    let axioms = kb
        .axioms
        .iter()
        .filter(|a| match prob_ids.binary_search(&a.id) {
            Ok(i) => selection[i],
            Err(_) => true,
        })
        .map(|a| a.id)
        .collect();
    World {
        selection,
        axioms,
        weight,
    }
}

/// Every world with its weight, refusing more than `cap` probabilistic axioms.
pub fn enumerate_worlds(kb: &KnowledgeBase, cap: usize) -> Result<Vec<World>> {
    let ids = probabilistic_ids(kb, cap)?;
    Ok((0..1u64 << ids.len()).map(|m| world(kb, &ids, m)).collect())
}

/// Reference probability: the weight of the worlds whose axioms entail the
/// query, each world checked by a separate tableau run.
///
/// Worlds are checked in parallel under [`Execution::Parallel`]; the sum is
/// taken in world order so both modes give bit-identical results.
pub fn oracle_probability(kb: &KnowledgeBase, query: &Query, opts: &Options) -> Result<f64> {
    let ids = probabilistic_ids(kb, opts.oracle_cap)?;
    let per_world = par::map_range(opts.execution, 1u64 << ids.len(), |mask| -> Result<f64> {
        let w = world(kb, &ids, mask);
        let sub = kb.restrict(|id| w.axioms.binary_search(&id).is_ok());
        Ok(if entails(&sub, query, opts)? {
            w.weight
        } else {
            0.0
        })
    });
    let mut total = 0.0;
    for w in per_world {
        total += w?;
    }
    Ok(total)
}
