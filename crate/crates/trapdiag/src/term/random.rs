//! Random well-typed term generation for tests and benchmarks.
//!
//! Terms are grown top-down against a required boundary: a `Seq` node picks
//! a fresh middle boundary, a `Ten` node splits both boundaries, and leaves
//! are generators whose type matches the requirement (or identities when
//! source equals target). When the depth budget runs out and no leaf fits,
//! a deterministic bridge of splitter/merger chains fills the gap, so the
//! generator is total.
//!
//! Only single-object signatures are supported; boundaries are then fully
//! described by their lengths.

use super::{RawTerm, Signature};
use rand::Rng;

/// Knobs for [`random_term`].
#[derive(Clone, Debug)]
pub struct TermGenConfig {
    /// Maximum nesting depth of the randomly grown part.
    pub max_depth: usize,
    /// Boundary lengths are drawn from `1..=max_arity`.
    pub max_arity: usize,
}

impl Default for TermGenConfig {
    fn default() -> Self {
        TermGenConfig {
            max_depth: 8,
            max_arity: 4,
        }
    }
}

/// The two-generator signature used across the test suite: a splitter
/// `f : x -> x x`, a merger `g : x x -> x`, and a few passthrough shapes.
pub fn paper_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_object("x").unwrap();
    let x = |n: usize| vec!["x".to_string(); n];
    sig.add_generator("f", x(1), x(2)).unwrap();
    sig.add_generator("g", x(2), x(1)).unwrap();
    sig.add_generator("h", x(1), x(1)).unwrap();
    sig.add_generator("s", x(2), x(2)).unwrap();
    sig.add_generator("d", x(1), x(3)).unwrap();
    sig.add_generator("e", x(3), x(1)).unwrap();
    sig
}

fn single_object(sig: &Signature) -> String {
    let mut objects = sig.objects();
    let first = objects.next().expect("signature has an object").to_string();
    assert!(
        objects.next().is_none(),
        "random term generation supports single-object signatures only"
    );
    first
}

fn matching_generators(sig: &Signature, src: usize, tgt: usize) -> Vec<String> {
    sig.generators()
        .filter(|(_, ty)| ty.src.len() == src && ty.tgt.len() == tgt)
        .map(|(name, _)| name.to_string())
        .collect()
}

/// A term with `src` inputs and `tgt` outputs built only from `f`/`g`
/// chains and identities. Used when the random walk cannot finish with a
/// leaf.
fn bridge(obj: &str, src: usize, tgt: usize) -> RawTerm {
    let id_n = |n: usize| RawTerm::Id(vec![obj.to_string(); n]);
    // Shrink src -> 1 with mergers, then grow 1 -> tgt with splitters.
    let mut steps: Vec<RawTerm> = Vec::new();
    let mut width = src;
    while width > 1 {
        let step = if width == 2 {
            RawTerm::gen("g")
        } else {
            RawTerm::ten(RawTerm::gen("g"), id_n(width - 2))
        };
        steps.push(step);
        width -= 1;
    }
    while width < tgt {
        let step = if width == 1 {
            RawTerm::gen("f")
        } else {
            RawTerm::ten(RawTerm::gen("f"), id_n(width - 1))
        };
        steps.push(step);
        width += 1;
    }
    steps
        .into_iter()
        .reduce(RawTerm::seq)
        .unwrap_or_else(|| id_n(src))
}

fn leaf(rng: &mut impl Rng, sig: &Signature, obj: &str, src: usize, tgt: usize) -> RawTerm {
    let gens = matching_generators(sig, src, tgt);
    let id_possible = src == tgt;
    if !gens.is_empty() && (!id_possible || rng.random_bool(0.7)) {
        let name = &gens[rng.random_range(0..gens.len())];
        RawTerm::gen(name)
    } else if id_possible {
        RawTerm::Id(vec![obj.to_string(); src])
    } else if !gens.is_empty() {
        RawTerm::gen(&gens[rng.random_range(0..gens.len())])
    } else {
        bridge(obj, src, tgt)
    }
}

fn grow(
    rng: &mut impl Rng,
    sig: &Signature,
    obj: &str,
    src: usize,
    tgt: usize,
    depth: usize,
    cfg: &TermGenConfig,
) -> RawTerm {
    if depth == 0 {
        return leaf(rng, sig, obj, src, tgt);
    }
    let can_split = src >= 2 && tgt >= 2;
    let choice = rng.random_range(0..10);
    match choice {
        0..=2 => leaf(rng, sig, obj, src, tgt),
        3..=6 => {
            let mid = rng.random_range(1..=cfg.max_arity);
            RawTerm::seq(
                grow(rng, sig, obj, src, mid, depth - 1, cfg),
                grow(rng, sig, obj, mid, tgt, depth - 1, cfg),
            )
        }
        _ if can_split => {
            let src_split = rng.random_range(1..src);
            let tgt_split = rng.random_range(1..tgt);
            RawTerm::ten(
                grow(rng, sig, obj, src_split, tgt_split, depth - 1, cfg),
                grow(rng, sig, obj, src - src_split, tgt - tgt_split, depth - 1, cfg),
            )
        }
        _ => leaf(rng, sig, obj, src, tgt),
    }
}

/// Generates a random well-typed term over `sig` with a random boundary.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, cfg: &TermGenConfig) -> RawTerm {
    let obj = single_object(sig);
    let src = rng.random_range(1..=cfg.max_arity);
    let tgt = rng.random_range(1..=cfg.max_arity);
    grow(rng, sig, &obj, src, tgt, cfg.max_depth, cfg)
}

/// Generates a random well-typed term with the given boundary lengths.
pub fn random_term_with_interface(
    rng: &mut impl Rng,
    sig: &Signature,
    src: usize,
    tgt: usize,
    cfg: &TermGenConfig,
) -> RawTerm {
    assert!(src >= 1 && tgt >= 1);
    let obj = single_object(sig);
    grow(rng, sig, &obj, src, tgt, cfg.max_depth, cfg)
}

/// Generates a term with at least `leaves` leaf nodes, splitting the budget
/// randomly so the tree stays shallow on average.
pub fn random_term_with_leaves(
    rng: &mut impl Rng,
    sig: &Signature,
    cfg: &TermGenConfig,
    leaves: usize,
) -> RawTerm {
    let obj = single_object(sig);
    let src = rng.random_range(1..=cfg.max_arity);
    let tgt = rng.random_range(1..=cfg.max_arity);
    grow_budget(rng, sig, &obj, src, tgt, leaves.max(1), cfg)
}

fn grow_budget(
    rng: &mut impl Rng,
    sig: &Signature,
    obj: &str,
    src: usize,
    tgt: usize,
    budget: usize,
    cfg: &TermGenConfig,
) -> RawTerm {
    if budget <= 1 {
        return leaf(rng, sig, obj, src, tgt);
    }
    let can_split = src >= 2 && tgt >= 2;
    let cut = rng.random_range(1..budget);
    if can_split && rng.random_bool(0.4) {
        let src_split = rng.random_range(1..src);
        let tgt_split = rng.random_range(1..tgt);
        RawTerm::ten(
            grow_budget(rng, sig, obj, src_split, tgt_split, cut, cfg),
            grow_budget(rng, sig, obj, src - src_split, tgt - tgt_split, budget - cut, cfg),
        )
    } else {
        let mid = rng.random_range(1..=cfg.max_arity);
        RawTerm::seq(
            grow_budget(rng, sig, obj, src, mid, cut, cfg),
            grow_budget(rng, sig, obj, mid, tgt, budget - cut, cfg),
        )
    }
}

/// Rewrites one randomly chosen `Seq` node so its composition boundary no
/// longer matches, by widening the right operand with an extra identity
/// strand. Returns `None` when the term contains no `Seq` node.
pub fn break_random_seq(rng: &mut impl Rng, term: &RawTerm) -> Option<RawTerm> {
    fn count_seqs(term: &RawTerm) -> usize {
        match term {
            RawTerm::Seq(l, r) => 1 + count_seqs(l) + count_seqs(r),
            RawTerm::Ten(l, r) => count_seqs(l) + count_seqs(r),
            _ => 0,
        }
    }

    fn rewrite(term: &RawTerm, target: &mut usize, obj: &str) -> RawTerm {
        match term {
            RawTerm::Seq(l, r) => {
                if *target == 0 {
                    *target = usize::MAX;
                    return RawTerm::seq(
                        (**l).clone(),
                        RawTerm::ten((**r).clone(), RawTerm::Id(vec![obj.to_string()])),
                    );
                }
                *target -= 1;
                let left = rewrite(l, target, obj);
                let right = rewrite(r, target, obj);
                RawTerm::seq(left, right)
            }
            RawTerm::Ten(l, r) => {
                let left = rewrite(l, target, obj);
                let right = rewrite(r, target, obj);
                RawTerm::ten(left, right)
            }
            other => other.clone(),
        }
    }

    fn first_object(term: &RawTerm) -> Option<String> {
        match term {
            RawTerm::Gen(_) => None,
            RawTerm::Id(objects) => objects.first().cloned(),
            RawTerm::Seq(l, r) | RawTerm::Ten(l, r) => first_object(l).or_else(|| first_object(r)),
        }
    }

    let total = count_seqs(term);
    if total == 0 {
        return None;
    }
    let obj = first_object(term).unwrap_or_else(|| "x".to_string());
    let mut target = rng.random_range(0..total);
    Some(rewrite(term, &mut target, &obj))
}
