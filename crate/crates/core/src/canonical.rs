//! Canonical codes for diagram equivalence.
//!
//! Equivalence of braided diagrams is a label- and orientation-preserving
//! homeomorphism, i.e. an isomorphism of the incidence structure that fixes
//! the frame contact orders. The code renumbers everything by a breadth-first
//! traversal that starts from the frame-top contacts in index order and, at
//! each transistor, enqueues bottom ports then top ports in index order. The
//! traversal never consults the frame-bottom order, which is what makes the
//! bottom-unordered flavor work.
//!
//! Equal codes of equal flavor hold exactly for equivalent diagrams under
//! that flavor's frame freedom:
//! * `Full` - frame orders on both sides fixed;
//! * `BottomUnordered` - frame-bottom contacts may be permuted freely
//!   (composition with a permutation diagram);
//! * `BottomCyclic` - frame-bottom contacts may be rotated.

use std::collections::VecDeque;

use crate::diagram::{BottomAttachment, Diagram, TopAttachment, TransId, WireId};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CodeFlavor {
    Full,
    BottomUnordered,
    BottomCyclic,
}

impl CodeFlavor {
    pub fn parse(s: &str) -> Option<CodeFlavor> {
        match s {
            "full" => Some(CodeFlavor::Full),
            "bottom-unordered" => Some(CodeFlavor::BottomUnordered),
            "bottom-cyclic" => Some(CodeFlavor::BottomCyclic),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CodeFlavor::Full => "full",
            CodeFlavor::BottomUnordered => "bottom-unordered",
            CodeFlavor::BottomCyclic => "bottom-cyclic",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalCode {
    pub flavor: CodeFlavor,
    pub bytes: Vec<u8>,
}

impl CanonicalCode {
    pub fn hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub(crate) struct Traversal {
    pub wire_rank: Vec<usize>,
    pub trans_rank: Vec<usize>,
}

/// First-visit numbering of wires and transistors. Every component of a
/// valid diagram is reachable from the frame top: a maximal transistor in
/// the vertical order has all of its top wires on the frame top.
pub(crate) fn traversal(d: &Diagram) -> Traversal {
    let nw = d.wire_count();
    let nt = d.transistor_count();
    let mut wire_rank = vec![usize::MAX; nw];
    let mut trans_rank = vec![usize::MAX; nt];
    let mut next_wire = 0usize;
    let mut next_trans = 0usize;
    let mut queue: VecDeque<WireId> = VecDeque::new();

    for &w in d.frame_top() {
        if wire_rank[w] == usize::MAX {
            wire_rank[w] = next_wire;
            next_wire += 1;
            queue.push_back(w);
        }
    }

    let visit_trans = |t: TransId,
                           trans_rank: &mut Vec<usize>,
                           wire_rank: &mut Vec<usize>,
                           next_trans: &mut usize,
                           next_wire: &mut usize,
                           queue: &mut VecDeque<WireId>| {
        if trans_rank[t] != usize::MAX {
            return;
        }
        trans_rank[t] = *next_trans;
        *next_trans += 1;
        let tr = d.transistor(t);
        for &w in tr.bottom.iter().chain(tr.top.iter()) {
            if wire_rank[w] == usize::MAX {
                wire_rank[w] = *next_wire;
                *next_wire += 1;
                queue.push_back(w);
            }
        }
    };

    while let Some(w) = queue.pop_front() {
        if let BottomAttachment::TransistorTop { t, .. } = d.wire_bottom(w) {
            visit_trans(t, &mut trans_rank, &mut wire_rank, &mut next_trans, &mut next_wire, &mut queue);
        }
        if let TopAttachment::TransistorBottom { t, .. } = d.wire_top(w) {
            visit_trans(t, &mut trans_rank, &mut wire_rank, &mut next_trans, &mut next_wire, &mut queue);
        }
    }

    debug_assert_eq!(next_wire, nw, "every wire is reachable from the frame top");
    debug_assert_eq!(next_trans, nt, "every transistor is reachable from the frame top");
    Traversal { wire_rank, trans_rank }
}

struct ByteWriter(Vec<u8>);

impl ByteWriter {
    fn new() -> Self {
        ByteWriter(Vec::new())
    }

    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }

    fn list(&mut self, xs: impl ExactSizeIterator<Item = u32>) {
        self.u32(xs.len() as u32);
        for x in xs {
            self.u32(x);
        }
    }
}

fn bottom_ranks(d: &Diagram, tr: &Traversal) -> Vec<u32> {
    d.frame_bottom().iter().map(|&w| tr.wire_rank[w] as u32).collect()
}

fn lex_min_rotation(xs: &[u32]) -> Vec<u32> {
    if xs.is_empty() {
        return Vec::new();
    }
    let mut best: Option<Vec<u32>> = None;
    for r in 0..xs.len() {
        let rotated: Vec<u32> = xs[r..].iter().chain(xs[..r].iter()).copied().collect();
        if best.as_ref().map_or(true, |b| rotated < *b) {
            best = Some(rotated);
        }
    }
    best.unwrap()
}

/// Computes the canonical code of a diagram under the given flavor.
pub fn canonical_code(d: &Diagram, flavor: CodeFlavor) -> CanonicalCode {
    let tr = traversal(d);
    let mut w = ByteWriter::new();
    w.u8(match flavor {
        CodeFlavor::Full => 0,
        CodeFlavor::BottomUnordered => 1,
        CodeFlavor::BottomCyclic => 2,
    });
    w.u8(d.annular_mode() as u8);

    let pres = d.presentation();
    w.u32(pres.generators().len() as u32);
    for g in pres.generators() {
        w.str(g);
    }
    w.u32(pres.relations().len() as u32);
    for rel in pres.relations() {
        w.list(rel.lhs.letters().iter().map(|l| l.0 as u32));
        w.list(rel.rhs.letters().iter().map(|l| l.0 as u32));
    }

    // Wire labels in canonical order.
    let nw = d.wire_count();
    let mut labels = vec![0u32; nw];
    for w_id in 0..nw {
        labels[tr.wire_rank[w_id]] = d.label(w_id).0 as u32;
    }
    w.list(labels.into_iter());

    // Transistor contact lists in canonical order, wires as ranks.
    let nt = d.transistor_count();
    let mut order: Vec<TransId> = (0..nt).collect();
    order.sort_by_key(|&t| tr.trans_rank[t]);
    w.u32(nt as u32);
    for t in order {
        let trans = d.transistor(t);
        w.list(trans.top.iter().map(|&x| tr.wire_rank[x] as u32));
        w.list(trans.bottom.iter().map(|&x| tr.wire_rank[x] as u32));
    }

    w.list(d.frame_top().iter().map(|&x| tr.wire_rank[x] as u32));

    match flavor {
        CodeFlavor::Full => {
            w.list(bottom_ranks(d, &tr).into_iter());
        }
        CodeFlavor::BottomUnordered => {}
        CodeFlavor::BottomCyclic => {
            w.list(lex_min_rotation(&bottom_ranks(d, &tr)).into_iter());
        }
    }

    CanonicalCode { flavor, bytes: w.0 }
}

/// Equivalence test under the flavor's frame freedom.
pub fn is_equivalent(d1: &Diagram, d2: &Diagram, flavor: CodeFlavor) -> bool {
    canonical_code(d1, flavor) == canonical_code(d2, flavor)
}

/// Renumbers wires and transistors by the canonical traversal; frame contact
/// orders are preserved. Serializing the result gives the canonical JSON.
pub fn canonicalize(d: &Diagram) -> Diagram {
    let tr = traversal(d);
    d.renumbered(&tr.wire_rank, &tr.trans_rank)
}

/// Canonical representative under the flavor's frame freedom: for
/// `BottomUnordered` the frame-bottom contacts are reordered by traversal
/// discovery order, for `BottomCyclic` they are rotated to the
/// lexicographically least position.
pub fn canonicalize_flavored(d: &Diagram, flavor: CodeFlavor) -> Diagram {
    match flavor {
        CodeFlavor::Full => canonicalize(d),
        CodeFlavor::BottomUnordered => {
            let tr = traversal(d);
            let mut bottom = d.frame_bottom().to_vec();
            bottom.sort_by_key(|&w| tr.wire_rank[w]);
            canonicalize(&d.with_frame_bottom(bottom))
        }
        CodeFlavor::BottomCyclic => {
            let tr = traversal(d);
            let ranks = bottom_ranks(d, &tr);
            let min = lex_min_rotation(&ranks);
            let shift = (0..ranks.len())
                .find(|&r| {
                    (0..ranks.len()).all(|i| ranks[(r + i) % ranks.len()] == min[i])
                })
                .unwrap_or(0);
            let bottom: Vec<WireId> = (0..ranks.len())
                .map(|i| d.frame_bottom()[(shift + i) % ranks.len()])
                .collect();
            canonicalize(&d.with_frame_bottom(bottom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Transistor;
    use crate::presentation::SemigroupPresentation;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn qv() -> std::sync::Arc<SemigroupPresentation> {
        SemigroupPresentation::qv_base()
    }

    fn shuffled_relabel(d: &Diagram, seed: u64) -> Diagram {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut wire_map: Vec<usize> = (0..d.wire_count()).collect();
        wire_map.shuffle(&mut rng);
        let mut trans_map: Vec<usize> = (0..d.transistor_count()).collect();
        trans_map.shuffle(&mut rng);
        d.renumbered(&wire_map, &trans_map)
    }

    fn caret(p: &std::sync::Arc<SemigroupPresentation>) -> Diagram {
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
    fn identical_wiring_gives_equal_codes() {
        let p = qv();
        let w = p.word_from_str("xa").unwrap();
        let d1 = Diagram::identity(p.clone(), &w, false);
        let d2 = Diagram::identity(p.clone(), &w, false);
        assert!(is_equivalent(&d1, &d2, CodeFlavor::Full));
    }

    #[test]
    fn code_is_stable_under_internal_relabeling() {
        let p = qv();
        let d = caret(&p).concatenate(&caret(&p).invert()).unwrap();
        for seed in 0..20 {
            let shuffled = shuffled_relabel(&d, seed);
            assert_eq!(
                canonical_code(&d, CodeFlavor::Full),
                canonical_code(&shuffled, CodeFlavor::Full)
            );
        }
    }

    #[test]
    fn frame_order_matters_for_full_but_not_unordered() {
        let p = qv();
        let w = p.word_from_str("xx").unwrap();
        let id = Diagram::identity(p.clone(), &w, false);
        let swap = Diagram::permutation(p.clone(), &w, &[1, 0], false).unwrap();
        assert!(!is_equivalent(&id, &swap, CodeFlavor::Full));
        assert!(is_equivalent(&id, &swap, CodeFlavor::BottomUnordered));
        assert!(is_equivalent(&id, &swap, CodeFlavor::BottomCyclic));
    }

    #[test]
    fn cyclic_flavor_detects_rotations() {
        let p = qv();
        let w = p.word_from_str("xxx").unwrap();
        let id = Diagram::identity(p.clone(), &w, false);
        let shift = Diagram::permutation(p.clone(), &w, &[1, 2, 0], false).unwrap();
        assert!(!is_equivalent(&id, &shift, CodeFlavor::Full));
        assert!(is_equivalent(&id, &shift, CodeFlavor::BottomCyclic));
    }

    #[test]
    fn distinct_labels_break_unordered_equivalence() {
        let p = qv();
        let w = p.word_from_str("xa").unwrap();
        let id = Diagram::identity(p.clone(), &w, false);
        let wa = p.word_from_str("ax").unwrap();
        let other = Diagram::identity(p.clone(), &wa, false);
        assert!(!is_equivalent(&id, &other, CodeFlavor::BottomUnordered));
    }

    #[test]
    fn canonicalize_flavored_normalizes() {
        let p = qv();
        let w = p.word_from_str("xxx").unwrap();
        let shift = Diagram::permutation(p.clone(), &w, &[1, 2, 0], false).unwrap();
        let id = Diagram::identity(p.clone(), &w, false);

        let c1 = canonicalize_flavored(&shift, CodeFlavor::BottomCyclic);
        let c2 = canonicalize_flavored(&id, CodeFlavor::BottomCyclic);
        assert_eq!(
            canonical_code(&c1, CodeFlavor::Full),
            canonical_code(&c2, CodeFlavor::Full)
        );

        let swap = Diagram::permutation(p.clone(), &w, &[2, 0, 1], false).unwrap();
        let u1 = canonicalize_flavored(&swap, CodeFlavor::BottomUnordered);
        let u2 = canonicalize_flavored(&id, CodeFlavor::BottomUnordered);
        assert_eq!(
            canonical_code(&u1, CodeFlavor::Full),
            canonical_code(&u2, CodeFlavor::Full)
        );
    }
}
