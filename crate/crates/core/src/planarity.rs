//! Planarity and annularity of braided diagrams.
//!
//! A diagram is planar when it embeds in the plane preserving the left-right
//! and top-bottom orientations of its transistors and frame, and annular
//! when it embeds in an annulus with both frame circles read counterclockwise
//! from their basepoints. The decision procedure peels transistors from the
//! top: a transistor whose top wires occupy consecutive frame-top positions
//! in matching left-to-right order (cyclically consecutive in the annular
//! case) is removed and its bottom label spliced into the frame top. A
//! diagram is planar (annular) exactly when peeling consumes every
//! transistor and the residual permutation is the identity (a rotation).
//!
//! The greedy strategy peels the leftmost candidate and never backtracks.
//! `*_exhaustive` searches all peel orders instead; tests keep the two in
//! agreement on every diagram with few transistors.

use std::collections::HashSet;

use crate::diagram::{Diagram, TransId, WireId};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Planar,
    Annular,
}

/// A peelable transistor: its top wires sit at consecutive positions
/// `start..start+arity` (mod length in annular mode) of the current top
/// sequence, in contact order.
fn candidates(seq: &[WireId], remaining: &[TransId], d: &Diagram, mode: Mode) -> Vec<(usize, TransId)> {
    let len = seq.len();
    let mut out = Vec::new();
    for &t in remaining {
        let top = &d.transistor(t).top;
        if top.len() > len {
            continue;
        }
        let starts: Vec<usize> = match mode {
            Mode::Planar => (0..=len - top.len()).collect(),
            Mode::Annular => (0..len).collect(),
        };
        for start in starts {
            let matches = top
                .iter()
                .enumerate()
                .all(|(i, &w)| seq[(start + i) % len] == w);
            if matches {
                out.push((start, t));
                break;
            }
        }
    }
    out.sort_unstable();
    out
}

fn peel(seq: &[WireId], start: usize, t: TransId, d: &Diagram) -> Vec<WireId> {
    let arity = d.transistor(t).top.len();
    let len = seq.len();
    let bottom = &d.transistor(t).bottom;
    let mut next = Vec::with_capacity(len - arity + bottom.len());
    if start + arity <= len {
        next.extend_from_slice(&seq[..start]);
        next.extend_from_slice(bottom);
        next.extend_from_slice(&seq[start + arity..]);
    } else {
        // Wrapped run (annular only). The result is one rotation of the
        // cyclic splice, which annular matching and the residual check
        // absorb.
        next.extend_from_slice(bottom);
        for i in arity..len {
            next.push(seq[(start + i) % len]);
        }
    }
    next
}

fn residual_ok(seq: &[WireId], d: &Diagram, mode: Mode) -> bool {
    let bottom = d.frame_bottom();
    if seq.len() != bottom.len() {
        return false;
    }
    match mode {
        Mode::Planar => seq == bottom,
        Mode::Annular => {
            let len = seq.len();
            (0..len).any(|r| (0..len).all(|i| seq[(r + i) % len] == bottom[i]))
        }
    }
}

fn greedy(d: &Diagram, mode: Mode) -> bool {
    let mut seq = d.frame_top().to_vec();
    let mut remaining: Vec<TransId> = (0..d.transistor_count()).collect();
    while !remaining.is_empty() {
        let cands = candidates(&seq, &remaining, d, mode);
        let Some(&(start, t)) = cands.first() else {
            return false;
        };
        seq = peel(&seq, start, t, d);
        remaining.retain(|&r| r != t);
    }
    residual_ok(&seq, d, mode)
}

fn exhaustive(d: &Diagram, mode: Mode) -> bool {
    fn search(
        seq: Vec<WireId>,
        remaining: Vec<TransId>,
        d: &Diagram,
        mode: Mode,
        seen: &mut HashSet<(Vec<WireId>, Vec<TransId>)>,
    ) -> bool {
        if remaining.is_empty() {
            return residual_ok(&seq, d, mode);
        }
        if !seen.insert((seq.clone(), remaining.clone())) {
            return false;
        }
        for (start, t) in candidates(&seq, &remaining, d, mode) {
            let next_seq = peel(&seq, start, t, d);
            let next_remaining: Vec<TransId> = remaining.iter().copied().filter(|&r| r != t).collect();
            if search(next_seq, next_remaining, d, mode, seen) {
                return true;
            }
        }
        false
    }
    search(d.frame_top().to_vec(), (0..d.transistor_count()).collect(), d, mode, &mut HashSet::new())
}

/// Greedy peeling decision for planarity.
pub fn is_planar(d: &Diagram) -> bool {
    greedy(d, Mode::Planar)
}

/// Greedy peeling decision for annularity (basepointed cyclic semantics).
pub fn is_annular(d: &Diagram) -> bool {
    greedy(d, Mode::Annular)
}

/// Oracle: searches every peel order. Exponential in the worst case; meant
/// for diagrams with few transistors.
pub fn is_planar_exhaustive(d: &Diagram) -> bool {
    exhaustive(d, Mode::Planar)
}

pub fn is_annular_exhaustive(d: &Diagram) -> bool {
    exhaustive(d, Mode::Annular)
}

/// Enumerates, up to full equivalence, every diagram with top label `x` and
/// at most `max_transistors` transistors over the given presentation,
/// including all frame-bottom orderings. Used to guard greedy peeling
/// against the exhaustive oracle.
pub fn enumerate_small_diagrams(
    pres: &std::sync::Arc<crate::presentation::SemigroupPresentation>,
    max_transistors: usize,
) -> Vec<Diagram> {
    use crate::canonical::{canonical_code, CodeFlavor};
    use crate::diagram::Transistor;
    use crate::presentation::Letter;

    // Grow by the same dangling-stub process as `sampling`, but breadth-first
    // over all choices with canonical dedup per level.
    #[derive(Clone)]
    struct State {
        labels: Vec<Letter>,
        transistors: Vec<Transistor>,
        stubs: Vec<WireId>,
    }

    let x = pres.letter("x").expect("presentation has a generator x");
    let seed = State { labels: vec![x], transistors: Vec::new(), stubs: vec![0] };
    let finish = |s: &State, order: &[usize]| -> Diagram {
        let bottom: Vec<WireId> = order.iter().map(|&i| s.stubs[i]).collect();
        Diagram::new(
            pres.clone(),
            false,
            s.labels.clone(),
            vec![0],
            bottom,
            s.transistors.clone(),
        )
        .expect("enumerated states are valid")
    };

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..n).collect();
        permute(&mut items, 0, &mut out);
        out
    }
    fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, out);
            items.swap(k, i);
        }
    }

    let mut results: Vec<Diagram> = Vec::new();
    let mut result_codes: HashSet<crate::canonical::CanonicalCode> = HashSet::new();
    let mut level: Vec<State> = vec![seed];
    for _depth in 0..=max_transistors {
        // Emit all frame-bottom orderings of every state at this level.
        for s in &level {
            for order in permutations(s.stubs.len()) {
                let d = finish(s, &order);
                let code = canonical_code(&d, CodeFlavor::Full);
                if result_codes.insert(code) {
                    results.push(d);
                }
            }
        }
        if _depth == max_transistors {
            break;
        }
        // Expand: attach one more transistor in every possible way. States
        // are deduplicated by the bottom-unordered code of a representative.
        let mut next: Vec<State> = Vec::new();
        let mut codes: HashSet<crate::canonical::CanonicalCode> = HashSet::new();
        for s in &level {
            for rel in pres.relations() {
                for (consumed, emitted) in [(&rel.lhs, &rel.rhs), (&rel.rhs, &rel.lhs)] {
                    // All ordered tuples of distinct stubs spelling `consumed`.
                    let mut tuples: Vec<Vec<WireId>> = vec![vec![]];
                    for &l in consumed.letters() {
                        let mut grown = Vec::new();
                        for tuple in &tuples {
                            for &stub in &s.stubs {
                                if s.labels[stub] == l && !tuple.contains(&stub) {
                                    let mut t = tuple.clone();
                                    t.push(stub);
                                    grown.push(t);
                                }
                            }
                        }
                        tuples = grown;
                    }
                    for top in tuples {
                        let mut st = s.clone();
                        st.stubs.retain(|w| !top.contains(w));
                        let mut bottom = Vec::with_capacity(emitted.len());
                        for &l in emitted.letters() {
                            let w = st.labels.len();
                            st.labels.push(l);
                            st.stubs.push(w);
                            bottom.push(w);
                        }
                        st.transistors.push(Transistor { top, bottom });
                        let rep = finish(&st, &(0..st.stubs.len()).collect::<Vec<_>>());
                        let code = canonical_code(&rep, CodeFlavor::BottomUnordered);
                        if codes.insert(code) {
                            next.push(st);
                        }
                    }
                }
            }
        }
        level = next;
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Transistor;
    use crate::presentation::SemigroupPresentation;
    use std::sync::Arc;

    fn v_base() -> Arc<SemigroupPresentation> {
        SemigroupPresentation::v_base()
    }

    fn split(p: &Arc<SemigroupPresentation>) -> Diagram {
        let x = p.letter("x").unwrap();
        Diagram::new(
            p.clone(),
            false,
            vec![x, x, x],
            vec![0],
            vec![1, 2],
            vec![Transistor { top: vec![0], bottom: vec![1, 2] }],
        )
        .unwrap()
    }

    #[test]
    fn single_split_is_planar() {
        let d = split(&v_base());
        assert!(is_planar(&d));
        assert!(is_annular(&d));
    }

    #[test]
    fn nonidentity_permutations_are_not_planar() {
        let p = v_base();
        let w = p.word_from_str("xx").unwrap();
        let swap = Diagram::permutation(p.clone(), &w, &[1, 0], false).unwrap();
        assert!(!is_planar(&swap));
        assert!(is_annular(&swap)); // a 2-cycle is a rotation

        let w3 = p.word_from_str("xxx").unwrap();
        let shift = Diagram::permutation(p.clone(), &w3, &[1, 2, 0], false).unwrap();
        assert!(!is_planar(&shift));
        assert!(is_annular(&shift));

        let transpose = Diagram::permutation(p.clone(), &w3, &[1, 0, 2], false).unwrap();
        assert!(!is_planar(&transpose));
        assert!(!is_annular(&transpose));
    }

    #[test]
    fn crossed_split_is_annular_not_planar() {
        // Split x into two wires that attach to the frame bottom in swapped
        // order: the crossing can be absorbed by a rotation of the annulus.
        let p = v_base();
        let x = p.letter("x").unwrap();
        let d = Diagram::new(
            p.clone(),
            false,
            vec![x, x, x],
            vec![0],
            vec![2, 1],
            vec![Transistor { top: vec![0], bottom: vec![1, 2] }],
        )
        .unwrap();
        assert!(!is_planar(&d));
        assert!(is_annular(&d));
        assert_eq!(is_planar_exhaustive(&d), is_planar(&d));
        assert_eq!(is_annular_exhaustive(&d), is_annular(&d));
    }

    #[test]
    fn planar_implies_annular_on_enumerated_diagrams() {
        let p = v_base();
        for d in enumerate_small_diagrams(&p, 2) {
            if is_planar(&d) {
                assert!(is_annular(&d), "planar diagram must be annular: {d:?}");
            }
        }
    }

    #[test]
    fn greedy_matches_oracle_on_two_transistors() {
        let p = v_base();
        let diagrams = enumerate_small_diagrams(&p, 2);
        assert!(diagrams.len() > 10);
        for d in diagrams {
            assert_eq!(is_planar(&d), is_planar_exhaustive(&d), "planar mismatch on {d:?}");
            assert_eq!(is_annular(&d), is_annular_exhaustive(&d), "annular mismatch on {d:?}");
        }
    }
}
