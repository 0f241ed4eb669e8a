//! Dipole detection, removal, insertion, and reduction to normal form.
//!
//! A dipole is a stacked pair of transistors T1 (lower) and T2 (upper) such
//! that the wires rising from the top of T1 attach, in left-to-right order,
//! to exactly the whole bottom of T2, and the top label of T2 equals the
//! bottom label of T1. Removing all dipoles yields the unique reduced
//! diagram in the equivalence class.

use rand::Rng;
use thiserror::Error;

use crate::diagram::{Diagram, TopAttachment, TransId, Transistor, WireId};

/// A removable dipole: `lower` is the transistor whose top wires feed
/// `upper`'s bottom completely and in order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DipoleSite {
    pub lower: TransId,
    pub upper: TransId,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("site ({lower}, {upper}) is not a dipole of this diagram")]
    StaleSite { lower: TransId, upper: TransId },
    #[error("wire labels do not spell the requested relation side")]
    LabelMismatch,
    #[error("relation index {index} out of range")]
    UnknownRelation { index: usize },
    #[error("cut wires must be distinct")]
    DuplicateWire,
}

/// Direction in which a relation is read when inserting a dipole: `Forward`
/// cuts wires spelling the left-hand side, `Backward` the right-hand side.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelationDirection {
    Forward,
    Backward,
}

fn dipole_at(d: &Diagram, lower: TransId) -> Option<DipoleSite> {
    let top = &d.transistor(lower).top;
    let first = top.first()?;
    let upper = match d.wire_top(*first) {
        TopAttachment::TransistorBottom { t, .. } => t,
        TopAttachment::FrameTop { .. } => return None,
    };
    if d.transistor(upper).bottom.len() != top.len() {
        return None;
    }
    for (i, &w) in top.iter().enumerate() {
        match d.wire_top(w) {
            TopAttachment::TransistorBottom { t, slot } if t == upper && slot == i => {}
            _ => return None,
        }
    }
    if d.transistor_top_label(upper) != d.transistor_bottom_label(lower) {
        return None;
    }
    Some(DipoleSite { lower, upper })
}

/// All dipoles, in (lower id, upper id) order.
pub fn find_dipoles(d: &Diagram) -> Vec<DipoleSite> {
    let mut sites: Vec<DipoleSite> = (0..d.transistor_count()).filter_map(|t| dipole_at(d, t)).collect();
    sites.sort_by_key(|s| (s.lower, s.upper));
    sites
}

pub fn is_reduced(d: &Diagram) -> bool {
    (0..d.transistor_count()).all(|t| dipole_at(d, t).is_none())
}

/// Removes a dipole: both transistors and the wires between them are
/// deleted, and the wires above the upper transistor fuse onto the wires
/// below the lower one, in order. Wire and transistor ids are rebuilt.
pub fn remove_dipole(d: &Diagram, site: DipoleSite) -> Result<Diagram, RewriteError> {
    let stale = RewriteError::StaleSite { lower: site.lower, upper: site.upper };
    if site.lower >= d.transistor_count() || site.upper >= d.transistor_count() {
        return Err(stale);
    }
    match dipole_at(d, site.lower) {
        Some(s) if s == site => {}
        _ => return Err(stale),
    }
    let lower = d.transistor(site.lower);
    let upper = d.transistor(site.upper);

    // Fused wire i keeps the identity of the wire hanging below the lower
    // transistor and inherits the top attachment of the wire rising above
    // the upper one.
    let carriers: &[WireId] = &lower.bottom;
    let dropped: &[WireId] = &upper.top;
    let middles: &[WireId] = &lower.top;

    let mut wire_map: Vec<Option<WireId>> = vec![None; d.wire_count()];
    let mut labels = Vec::with_capacity(d.wire_count() - middles.len() - dropped.len());
    let mut is_removed = vec![false; d.wire_count()];
    for &w in middles.iter().chain(dropped.iter()) {
        is_removed[w] = true;
    }
    for w in 0..d.wire_count() {
        if !is_removed[w] {
            wire_map[w] = Some(labels.len());
            labels.push(d.label(w));
        }
    }
    // Route each dropped wire to its carrier.
    for (i, &b) in dropped.iter().enumerate() {
        debug_assert_eq!(d.label(b), d.label(carriers[i]));
        wire_map[b] = wire_map[carriers[i]];
    }

    let mut trans_map: Vec<Option<TransId>> = vec![None; d.transistor_count()];
    let mut transistors = Vec::with_capacity(d.transistor_count() - 2);
    for t in 0..d.transistor_count() {
        if t == site.lower || t == site.upper {
            continue;
        }
        trans_map[t] = Some(transistors.len());
        let tr = d.transistor(t);
        transistors.push(Transistor {
            top: tr.top.iter().map(|&w| wire_map[w].expect("kept wire")).collect(),
            bottom: tr.bottom.iter().map(|&w| wire_map[w].expect("kept wire")).collect(),
        });
    }

    let map_list = |wires: &[WireId]| -> Vec<WireId> {
        wires.iter().map(|&w| wire_map[w].expect("frame wire survives")).collect()
    };
    Ok(Diagram::new(
        d.presentation().clone(),
        d.annular_mode(),
        labels,
        map_list(d.frame_top()),
        map_list(d.frame_bottom()),
        transistors,
    )
    .expect("removing a dipole preserves validity"))
}

/// Inverse of `remove_dipole`: cuts the given parallel wires (which must
/// spell the chosen relation side, in order) and inserts a cancelling pair
/// of transistors across the cut.
pub fn insert_dipole(
    d: &Diagram,
    wires: &[WireId],
    relation_index: usize,
    direction: RelationDirection,
) -> Result<Diagram, RewriteError> {
    let relation = d
        .presentation()
        .relations()
        .get(relation_index)
        .ok_or(RewriteError::UnknownRelation { index: relation_index })?;
    let (cut_word, middle_word) = match direction {
        RelationDirection::Forward => (&relation.lhs, &relation.rhs),
        RelationDirection::Backward => (&relation.rhs, &relation.lhs),
    };
    if wires.len() != cut_word.len() {
        return Err(RewriteError::LabelMismatch);
    }
    let mut seen = std::collections::HashSet::new();
    for &w in wires {
        if !seen.insert(w) {
            return Err(RewriteError::DuplicateWire);
        }
    }
    for (i, &w) in wires.iter().enumerate() {
        if w >= d.wire_count() || d.label(w) != cut_word.letters()[i] {
            return Err(RewriteError::LabelMismatch);
        }
    }

    // Wire w_i keeps its bottom attachment and becomes the lower piece; a
    // fresh upper piece takes over its old top attachment.
    let mut labels = d.labels().to_vec();
    let mut upper_piece = Vec::with_capacity(wires.len());
    for &w in wires {
        upper_piece.push(labels.len());
        labels.push(d.label(w));
    }
    let mut middle = Vec::with_capacity(middle_word.len());
    for &l in middle_word.letters() {
        middle.push(labels.len());
        labels.push(l);
    }

    let replace = |list: &[WireId]| -> Vec<WireId> {
        list.iter()
            .map(|&w| match wires.iter().position(|&c| c == w) {
                Some(i) => upper_piece[i],
                None => w,
            })
            .collect()
    };
    // Old top attachments of the cut wires move to the upper pieces.
    let frame_top = replace(d.frame_top());
    let mut transistors: Vec<Transistor> = d
        .transistors()
        .iter()
        .map(|tr| Transistor { top: tr.top.clone(), bottom: replace(&tr.bottom) })
        .collect();
    // Lower transistor: bottom contacts take the cut wires, top contacts the
    // middle wires. Upper transistor: bottom takes the middles, top the
    // upper pieces.
    transistors.push(Transistor { top: middle.clone(), bottom: wires.to_vec() });
    transistors.push(Transistor { top: upper_piece, bottom: middle });

    Diagram::new(
        d.presentation().clone(),
        d.annular_mode(),
        labels,
        frame_top,
        d.frame_bottom().to_vec(),
        transistors,
    )
    .map_err(|_| RewriteError::LabelMismatch)
}

/// Reduces by repeatedly removing the first dipole in (lower, upper) order.
/// Terminates because each step removes two transistors; the result is the
/// unique reduced form of the class.
pub fn reduce(d: &Diagram) -> Diagram {
    let mut current = d.clone();
    loop {
        let sites = find_dipoles(&current);
        match sites.first() {
            Some(&site) => current = remove_dipole(&current, site).expect("fresh site"),
            None => return current,
        }
    }
}

/// Reduces using a randomly chosen dipole at each step. Confluence testing
/// compares the outcome against `reduce`.
pub fn reduce_with_order(d: &Diagram, rng: &mut impl Rng) -> Diagram {
    let mut current = d.clone();
    loop {
        let sites = find_dipoles(&current);
        if sites.is_empty() {
            return current;
        }
        let site = sites[rng.random_range(0..sites.len())];
        current = remove_dipole(&current, site).expect("fresh site");
    }
}

/// Reduces a batch of diagrams, in parallel when the `parallel` feature is
/// enabled. Output order matches input order either way.
pub fn reduce_batch(ds: &[Diagram]) -> Vec<Diagram> {
    crate::par::map_batch(ds, reduce)
}

/// Sequential batch reduction, kept callable for benchmarks.
pub fn reduce_batch_seq(ds: &[Diagram]) -> Vec<Diagram> {
    ds.iter().map(reduce).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{canonical_code, CodeFlavor};
    use crate::presentation::SemigroupPresentation;
    use rand::SeedableRng;
    use std::sync::Arc;

    fn qv() -> Arc<SemigroupPresentation> {
        SemigroupPresentation::qv_base()
    }

    fn caret(p: &Arc<SemigroupPresentation>) -> Diagram {
        let x = p.letter("x").unwrap();
        let a = p.letter("a").unwrap();
        Diagram::new(
            p.clone(),
            false,
            vec![x, x, a, x],
            vec![0],
            vec![1, 2, 3],
            vec![Transistor { top: vec![0], bottom: vec![1, 2, 3] }],
        )
        .unwrap()
    }

    #[test]
    fn permutation_diagram_has_no_dipoles() {
        let p = qv();
        let d = Diagram::identity(p.clone(), &p.word_from_str("xax").unwrap(), false);
        assert!(find_dipoles(&d).is_empty());
        assert!(is_reduced(&d));
    }

    #[test]
    fn caret_stack_is_the_defining_dipole() {
        let p = qv();
        let d = caret(&p).concatenate(&caret(&p).invert()).unwrap();
        let sites = find_dipoles(&d);
        assert_eq!(sites.len(), 1);
        let reduced = remove_dipole(&d, sites[0]).unwrap();
        assert!(reduced.is_permutation());
        assert_eq!(reduced.wire_count(), 1);
    }

    #[test]
    fn stale_site_is_rejected() {
        let p = qv();
        let d = caret(&p).concatenate(&caret(&p).invert()).unwrap();
        let site = find_dipoles(&d)[0];
        let reduced = remove_dipole(&d, site).unwrap();
        assert!(matches!(
            remove_dipole(&reduced, site),
            Err(RewriteError::StaleSite { .. })
        ));
    }

    #[test]
    fn insert_then_remove_is_identity_up_to_equivalence() {
        let p = qv();
        let d = Diagram::identity(p.clone(), &p.word_from_str("xax").unwrap(), false);
        let inserted = insert_dipole(&d, &[0, 1, 2], 0, RelationDirection::Backward).unwrap();
        assert_eq!(inserted.transistor_count(), 2);
        let sites = find_dipoles(&inserted);
        assert_eq!(sites.len(), 1);
        let back = remove_dipole(&inserted, sites[0]).unwrap();
        assert_eq!(
            canonical_code(&back, CodeFlavor::Full),
            canonical_code(&d, CodeFlavor::Full)
        );
    }

    #[test]
    fn insert_rejects_wrong_labels() {
        let p = qv();
        let d = Diagram::identity(p.clone(), &p.word_from_str("xax").unwrap(), false);
        // Wires 0,1,2 spell x a x; cutting them as the left-hand side "x"
        // has the wrong arity, and cutting (1,0,2) spells a x x.
        assert!(insert_dipole(&d, &[0], 0, RelationDirection::Backward).is_err());
        assert!(insert_dipole(&d, &[1, 0, 2], 0, RelationDirection::Backward).is_err());
    }

    #[test]
    fn reduce_is_idempotent_and_kills_inverses() {
        let p = qv();
        let c = caret(&p);
        let stacked = c.concatenate(&c.invert()).unwrap();
        let reduced = reduce(&stacked);
        assert!(reduced.is_permutation());
        let again = reduce(&reduced);
        assert_eq!(
            canonical_code(&again, CodeFlavor::Full),
            canonical_code(&reduced, CodeFlavor::Full)
        );
    }

    #[test]
    fn random_orders_are_confluent_on_small_stacks() {
        let p = qv();
        let c = caret(&p);
        // (x,xax) over (xax,x) over (x,xax) over (xax,x): plenty of dipoles.
        let tower = c
            .concatenate(&c.invert())
            .unwrap()
            .concatenate(&c)
            .unwrap()
            .concatenate(&c.invert())
            .unwrap();
        let expected = canonical_code(&reduce(&tower), CodeFlavor::Full);
        for seed in 0..10 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let got = canonical_code(&reduce_with_order(&tower, &mut rng), CodeFlavor::Full);
            assert_eq!(got, expected);
        }
    }
}
