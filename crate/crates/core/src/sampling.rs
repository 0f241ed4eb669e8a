//! Seeded random diagram generation for tests and verification runs.
//!
//! Diagrams are grown by a dangling-stub process: start from a base word
//! whose wires hang from the frame top, then repeatedly attach a transistor
//! whose top contacts consume existing stubs spelling one side of a relation
//! and whose bottom contacts emit fresh stubs spelling the other side.
//! Finally the surviving stubs attach to the frame bottom in random order.
//! Every diagram built this way is valid by construction.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Diagram, Transistor, WireId};
use crate::presentation::{Letter, SemigroupPresentation, Word};

/// Builds a random diagram with the given top label and at most
/// `max_transistors` transistors.
pub fn random_diagram_over(
    pres: &Arc<SemigroupPresentation>,
    base: &Word,
    max_transistors: usize,
    rng: &mut impl Rng,
) -> Diagram {
    let mut labels: Vec<Letter> = base.letters().to_vec();
    let frame_top: Vec<WireId> = (0..labels.len()).collect();
    let mut stubs: Vec<WireId> = frame_top.clone();
    let mut transistors: Vec<Transistor> = Vec::new();

    let target = rng.random_range(0..=max_transistors);
    'grow: while transistors.len() < target {
        // Candidate moves: (relation, direction). Collect those whose
        // consumed side can be spelled from the available stubs.
        let mut moves: Vec<(usize, bool)> = Vec::new();
        for (ri, rel) in pres.relations().iter().enumerate() {
            for forward in [true, false] {
                let consumed = if forward { &rel.lhs } else { &rel.rhs };
                let fits = consumed.letter_multiset().iter().all(|&(l, need)| {
                    stubs.iter().filter(|&&w| labels[w] == l).count() >= need
                });
                if fits {
                    moves.push((ri, forward));
                }
            }
        }
        if moves.is_empty() {
            break 'grow;
        }
        let &(ri, forward) = &moves[rng.random_range(0..moves.len())];
        let rel = &pres.relations()[ri];
        let (consumed, emitted) = if forward { (&rel.lhs, &rel.rhs) } else { (&rel.rhs, &rel.lhs) };

        // Pick a random unused stub of the right label for each contact.
        let mut pool = stubs.clone();
        pool.shuffle(rng);
        let mut top = Vec::with_capacity(consumed.len());
        for &l in consumed.letters() {
            let at = pool.iter().position(|&w| labels[w] == l).expect("availability checked");
            top.push(pool.remove(at));
        }
        stubs.retain(|w| !top.contains(w));
        let mut bottom = Vec::with_capacity(emitted.len());
        for &l in emitted.letters() {
            let w = labels.len();
            labels.push(l);
            bottom.push(w);
            stubs.push(w);
        }
        transistors.push(Transistor { top, bottom });
    }

    stubs.shuffle(rng);
    Diagram::new(pres.clone(), false, labels, frame_top, stubs, transistors)
        .expect("stub growth produces valid diagrams")
}

/// Random diagram with a random nonempty base word of length at most
/// `max_base_len`.
pub fn random_diagram(
    pres: &Arc<SemigroupPresentation>,
    max_base_len: usize,
    max_transistors: usize,
    rng: &mut impl Rng,
) -> Diagram {
    let len = rng.random_range(1..=max_base_len.max(1));
    let gens = pres.generators().len();
    let base = Word::new(
        (0..len).map(|_| Letter(rng.random_range(0..gens) as u16)).collect(),
    );
    random_diagram_over(pres, &base, max_transistors, rng)
}
