//! Small KBs and generated families used by tests, benches and docs.

use std::fmt::Write;

/// Kevin owns fluffy and tom. Axiom ids: 0 the nature-lover inclusion,
/// 1-2 the ownership facts, 3-5 the probabilistic cat and pet axioms.
pub const PEOPLE_PETS: &str = "\
% Nature lovers own pets.
subClassOf(someValuesFrom(hasAnimal,pet),natureLover).
propertyAssertion(hasAnimal,kevin,fluffy).
propertyAssertion(hasAnimal,kevin,tom).
0.4 :: classAssertion(cat,fluffy).
0.3 :: classAssertion(cat,tom).
0.6 :: subClassOf(cat,pet).
";

/// The same facts with every axiom certain.
pub const PEOPLE_PETS_CERTAIN: &str = "\
subClassOf(someValuesFrom(hasAnimal,pet),natureLover).
propertyAssertion(hasAnimal,kevin,fluffy).
propertyAssertion(hasAnimal,kevin,tom).
classAssertion(cat,fluffy).
classAssertion(cat,tom).
subClassOf(cat,pet).
";

/// The four-axiom extract used to walk through one expansion.
pub const KEVIN_TOM: &str = "\
subClassOf(someValuesFrom(hasAnimal,pet),natureLover).
classAssertion(cat,tom).
propertyAssertion(hasAnimal,kevin,tom).
subClassOf(cat,pet).
";

/// A cyclic inclusion that needs blocking to terminate.
pub const CYCLE: &str = "\
subClassOf(c,someValuesFrom(r,c)).
classAssertion(c,a).
";

/// `n` levels of `b{i-1} ⊑ p_i ⊓ q_i`, `p_i ⊑ b_i`, `q_i ⊑ b_i`, each axiom
/// optionally probabilistic. Query `subClassOf(b0,b{n})` has 2^n
/// explanations. Axiom `3(i-1) + k` is the k-th axiom of level i.
pub fn exponential(n: usize, probability: Option<f64>) -> String {
    let prefix = probability.map(|p| format!("{p} :: ")).unwrap_or_default();
    let mut out = String::new();
    for i in 1..=n {
        let _ = writeln!(
            out,
            "{prefix}subClassOf(b{},intersectionOf([p{i},q{i}])).",
            i - 1
        );
        let _ = writeln!(out, "{prefix}subClassOf(p{i},b{i}).");
        let _ = writeln!(out, "{prefix}subClassOf(q{i},b{i}).");
    }
    out
}

pub fn exponential_query(n: usize) -> String {
    format!("subClassOf(b0,b{n})")
}

/// `m` parallel inclusion chains of length `n` from `c1_1` to `goal`, plus
/// `a:c1_1`. Query `classAssertion(goal,a)` has `m` explanations.
pub fn chains(m: usize, n: usize) -> String {
    let mut out = String::from("classAssertion(c1_1,a).\n");
    for chain in 1..=m {
        let mut prev = "c1_1".to_string();
        for step in 2..=n {
            let next = format!("c{chain}_{step}");
            let _ = writeln!(out, "subClassOf({prev},{next}).");
            prev = next;
        }
        let _ = writeln!(out, "subClassOf({prev},goal).");
    }
    out
}
