//! Probabilistic reasoning for the description logic SHI.
//!
//! Each axiom gets a Boolean variable. The tableau labels every derived
//! assertion with a BDD over those variables; once the forest is fully
//! expanded, the clash labels combine into a BDD that holds exactly for
//! the axiom subsets entailing the query. Query probability, minimal
//! explanations and entailment verdicts are all read off that BDD.
//!
//! ```
//! use probdl::{parse_kb, parse_query, probability_of_query, Options};
//!
//! let kb = parse_kb(probdl::families::PEOPLE_PETS).unwrap();
//! let q = parse_query("classAssertion(natureLover,kevin)").unwrap();
//! let res = probability_of_query(&kb, &q, &Options::default()).unwrap();
//! assert!((res.probability - 0.348).abs() < 1e-12);
//! assert_eq!(res.explanations.len(), 2);
//! ```

pub mod bdd;
pub mod disponte;
pub mod error;
pub mod families;
pub mod par;
pub mod syntax;
pub mod tableau;

pub use bdd::{Bdd, BddManager, VarMap};
pub use disponte::{
    entailment, entails, enumerate_worlds, explanations, oracle_probability, probability_of_query,
    var_map, Entailment, Options, QueryResult, World,
};
pub use error::{Error, ParseError, Result};
pub use syntax::{parse_kb, parse_query, to_nnf, Concept, KnowledgeBase, Query, RoleExpr};
pub use tableau::{pinpointing_bdd, ExpansionOptions, Pinpointing, Reasoner, Strategy};
