//! The groups QF <= QT <= QV as diagram groups over `<x, a | x = xax>`.
//!
//! A group element is a reduced (w,w)-diagram with base word w = x^k a^l
//! (default x). Multiplication stacks the left factor on top of the right
//! and reduces; evaluation applies the lower diagram first.
//!
//! The tree-pair correspondence reads a reduced (x,x)-diagram in two halves.
//! Transistors are positive (top label x, bottom xax) or negative (top xax,
//! bottom x); in reduced form no positive sits below a negative, so the
//! negative transistors encode a dissection of the domain tree, read bottom
//! up, and the positive ones a dissection of the range tree, read top down.
//! Each caret splits an x-wire into (left subtree, root vertex, right
//! subtree) = (x, a, x). Middle x-wires realize the leaf bijection sigma and
//! middle a-wires the interior-node bijection f.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::canonical::{canonical_code, CanonicalCode, CodeFlavor};
use crate::diagram::{BottomAttachment, Diagram, TopAttachment, TransId, Transistor, WireId};
use crate::presentation::{Letter, SemigroupPresentation, Word};
use crate::rewriting::reduce;
use crate::treepair::{Address, FiniteBinaryTree, TreePair};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QvError {
    #[error("top label {top:?} differs from bottom label {bottom:?}")]
    NotAGroupDiagram { top: String, bottom: String },
    #[error("base words differ")]
    BaseMismatch,
    #[error("presentations differ")]
    PresentationMismatch,
    #[error("operation requires base word x, got {base:?}")]
    BaseNotX { base: String },
    #[error("base word must have the form x^k a^l, got {base:?}")]
    BaseNotStandardForm { base: String },
    #[error("malformed element: {reason}")]
    Malformed { reason: String },
    #[error("projection failed: {reason}")]
    ProjectionFailed { reason: String },
}

/// A group element: a reduced (w,w)-diagram over its presentation.
#[derive(Clone, Debug)]
pub struct GroupElement {
    diagram: Diagram,
    base: Word,
}

impl GroupElement {
    /// Wraps a (w,w)-diagram, reducing it first.
    pub fn from_diagram(d: Diagram) -> Result<GroupElement, QvError> {
        let top = d.top_label();
        let bottom = d.bottom_label();
        if top != bottom {
            return Err(QvError::NotAGroupDiagram {
                top: d.presentation().word_string(&top),
                bottom: d.presentation().word_string(&bottom),
            });
        }
        Ok(GroupElement { diagram: reduce(&d), base: top })
    }

    pub fn identity(pres: &Arc<SemigroupPresentation>, base: &Word) -> GroupElement {
        GroupElement { diagram: Diagram::identity(pres.clone(), base, false), base: base.clone() }
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn presentation(&self) -> &Arc<SemigroupPresentation> {
        self.diagram.presentation()
    }

    pub fn code(&self) -> CanonicalCode {
        canonical_code(&self.diagram, CodeFlavor::Full)
    }

    /// Stacks `self` on top of `other` and reduces. The lower factor acts
    /// first under evaluation, so this is `self` after `other`.
    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, QvError> {
        if *self.presentation() != *other.presentation() {
            return Err(QvError::PresentationMismatch);
        }
        if self.base != other.base {
            return Err(QvError::BaseMismatch);
        }
        let stacked = self
            .diagram
            .concatenate(&other.diagram)
            .expect("equal base words make (w,w)-diagrams stackable");
        Ok(GroupElement { diagram: reduce(&stacked), base: self.base.clone() })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { diagram: reduce(&self.diagram.invert()), base: self.base.clone() }
    }

    pub fn is_identity(&self) -> bool {
        let id = GroupElement::identity(self.presentation(), &self.base);
        self.code() == id.code()
    }
}

fn letters_xa(pres: &SemigroupPresentation) -> Result<(Letter, Letter), QvError> {
    match (pres.letter("x"), pres.letter("a")) {
        (Some(x), Some(a)) => Ok((x, a)),
        _ => Err(QvError::Malformed { reason: "presentation lacks generators x and a".into() }),
    }
}

/// Splits a base word of the form x^k a^l into (k, l).
pub fn base_word_shape(pres: &SemigroupPresentation, base: &Word) -> Result<(usize, usize), QvError> {
    let (x, a) = letters_xa(pres)?;
    let k = base.letters().iter().take_while(|&&l| l == x).count();
    let l = base.len() - k;
    if base.letters()[k..].iter().all(|&q| q == a) {
        Ok((k, l))
    } else {
        Err(QvError::BaseNotStandardForm { base: pres.word_string(base) })
    }
}

/// A pair of ordered forests with leaf and vertex bijections, representing
/// an element over the base word x^k a^l: k binary trees plus l isolated
/// points on each side.
///
/// `sigma_x[i]` sends the i-th leaf of the domain forest (tree-major,
/// lexicographic within each tree) to a leaf of the range forest.
/// `sigma_a[j]` acts on the a-entities: the l base isolated points first, in
/// frame order, then the interior nodes, tree-major lexicographic.
#[derive(Clone, Debug)]
pub struct ForestPair {
    pub domain: Vec<FiniteBinaryTree>,
    pub range: Vec<FiniteBinaryTree>,
    pub isolated: usize,
    pub sigma_x: Vec<usize>,
    pub sigma_a: Vec<usize>,
}

impl ForestPair {
    pub fn from_tree_pair(tp: &TreePair) -> ForestPair {
        ForestPair {
            domain: vec![tp.t1.clone()],
            range: vec![tp.t2.clone()],
            isolated: 0,
            sigma_x: tp.sigma.clone(),
            sigma_a: tp.f.clone(),
        }
    }
}

struct ElementBuilder {
    labels: Vec<Letter>,
    transistors: Vec<Transistor>,
}

impl ElementBuilder {
    fn wire(&mut self, l: Letter) -> WireId {
        self.labels.push(l);
        self.labels.len() - 1
    }
}

/// Builds the reduced diagram of a forest pair. Negative transistors encode
/// the domain forest, positive transistors the range forest, and the middle
/// wires realize the two bijections.
pub fn forest_pair_to_diagram(
    pres: &Arc<SemigroupPresentation>,
    fp: &ForestPair,
) -> Result<GroupElement, QvError> {
    let (x, a) = letters_xa(pres)?;
    let total_leaves: usize = fp.domain.iter().map(FiniteBinaryTree::leaf_count).sum();
    let range_leaves: usize = fp.range.iter().map(FiniteBinaryTree::leaf_count).sum();
    if fp.domain.len() != fp.range.len() || total_leaves != range_leaves {
        return Err(QvError::Malformed { reason: "forest shapes do not match".into() });
    }
    let carets = total_leaves - fp.domain.len();
    if fp.sigma_x.len() != total_leaves || fp.sigma_a.len() != fp.isolated + carets {
        return Err(QvError::Malformed { reason: "bijection sizes do not match the forests".into() });
    }

    let mut b = ElementBuilder { labels: Vec::new(), transistors: Vec::new() };

    // Range half: positive transistors, expanded downward from the frame top.
    fn expand_range(
        b: &mut ElementBuilder,
        tree: &FiniteBinaryTree,
        addr: Address,
        wire: WireId,
        x_slots: &mut Vec<WireId>,
        a_slots: &mut Vec<WireId>,
        x: Letter,
        a: Letter,
    ) {
        if tree.is_leaf(&addr) {
            x_slots.push(wire);
            return;
        }
        let wl = b.wire(x);
        let wa = b.wire(a);
        let wr = b.wire(x);
        b.transistors.push(Transistor { top: vec![wire], bottom: vec![wl, wa, wr] });
        a_slots.push(wa);
        expand_range(b, tree, addr.child(0), wl, x_slots, a_slots, x, a);
        expand_range(b, tree, addr.child(1), wr, x_slots, a_slots, x, a);
    }

    // a_slots must list interior nodes in lexicographic order per tree; the
    // preorder expansion above visits interiors in exactly that order.
    let mut frame_top = Vec::new();
    let mut x_slots: Vec<WireId> = Vec::new();
    let mut a_slots_interior: Vec<WireId> = Vec::new();
    let mut range_roots = Vec::new();
    for tree in &fp.range {
        let root = b.wire(x);
        range_roots.push(root);
        expand_range(&mut b, tree, Address::root(), root, &mut x_slots, &mut a_slots_interior, x, a);
    }
    let mut a_slots: Vec<WireId> = Vec::new();
    for _ in 0..fp.isolated {
        a_slots.push(b.wire(a));
    }
    frame_top.extend(&range_roots);
    frame_top.extend(&a_slots);
    a_slots.extend(a_slots_interior);

    // Domain half: negative transistors, expanded upward from the frame
    // bottom.
    fn expand_domain(
        b: &mut ElementBuilder,
        tree: &FiniteBinaryTree,
        addr: Address,
        wire: WireId,
        x_pieces: &mut Vec<WireId>,
        a_pieces: &mut Vec<WireId>,
        x: Letter,
        a: Letter,
    ) {
        if tree.is_leaf(&addr) {
            x_pieces.push(wire);
            return;
        }
        let wl = b.wire(x);
        let wa = b.wire(a);
        let wr = b.wire(x);
        b.transistors.push(Transistor { top: vec![wl, wa, wr], bottom: vec![wire] });
        a_pieces.push(wa);
        expand_domain(b, tree, addr.child(0), wl, x_pieces, a_pieces, x, a);
        expand_domain(b, tree, addr.child(1), wr, x_pieces, a_pieces, x, a);
    }

    let mut frame_bottom = Vec::new();
    let mut x_pieces: Vec<WireId> = Vec::new();
    let mut a_pieces_interior: Vec<WireId> = Vec::new();
    let mut domain_roots = Vec::new();
    for tree in &fp.domain {
        let root = b.wire(x);
        domain_roots.push(root);
        expand_domain(&mut b, tree, Address::root(), root, &mut x_pieces, &mut a_pieces_interior, x, a);
    }
    let mut a_pieces: Vec<WireId> = Vec::new();
    for _ in 0..fp.isolated {
        a_pieces.push(b.wire(a));
    }
    frame_bottom.extend(&domain_roots);
    frame_bottom.extend(&a_pieces);
    a_pieces.extend(a_pieces_interior);

    // Merge each domain piece with its image slot: the slot wire's single
    // occurrence is redirected onto the piece wire.
    let mut target: Vec<WireId> = (0..b.labels.len()).collect();
    for (i, &j) in fp.sigma_x.iter().enumerate() {
        target[x_slots[j]] = x_pieces[i];
    }
    for (i, &j) in fp.sigma_a.iter().enumerate() {
        target[a_slots[j]] = a_pieces[i];
    }

    // Compact ids over the surviving wires.
    let mut dense: Vec<Option<WireId>> = vec![None; b.labels.len()];
    let mut labels = Vec::new();
    for w in 0..b.labels.len() {
        if target[w] == w {
            dense[w] = Some(labels.len());
            labels.push(b.labels[w]);
        }
    }
    let map = |w: WireId| dense[target[w]].expect("merge targets survive");
    let transistors = b
        .transistors
        .iter()
        .map(|tr| Transistor {
            top: tr.top.iter().map(|&w| map(w)).collect(),
            bottom: tr.bottom.iter().map(|&w| map(w)).collect(),
        })
        .collect();
    let frame_top: Vec<WireId> = frame_top.iter().map(|&w| map(w)).collect();
    let frame_bottom: Vec<WireId> = frame_bottom.iter().map(|&w| map(w)).collect();

    let d = Diagram::new(pres.clone(), false, labels, frame_top, frame_bottom, transistors)
        .map_err(|v| QvError::Malformed {
            reason: v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
        })?;
    GroupElement::from_diagram(d)
}

/// Builds the element represented by a tree pair (base word x).
pub fn treepair_to_diagram(
    pres: &Arc<SemigroupPresentation>,
    tp: &TreePair,
) -> Result<GroupElement, QvError> {
    forest_pair_to_diagram(pres, &ForestPair::from_tree_pair(tp))
}

fn word_is_x(pres: &SemigroupPresentation, w: &Word) -> bool {
    w.len() == 1 && pres.letter("x") == Some(w.letters()[0])
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Positive,
    Negative,
}

fn classify(d: &Diagram, x: Letter, a: Letter) -> Result<Vec<Sign>, QvError> {
    let xax = Word::new(vec![x, a, x]);
    let just_x = Word::new(vec![x]);
    (0..d.transistor_count())
        .map(|t| {
            let top = d.transistor_top_label(t);
            let bottom = d.transistor_bottom_label(t);
            if top == just_x && bottom == xax {
                Ok(Sign::Positive)
            } else if top == xax && bottom == just_x {
                Ok(Sign::Negative)
            } else {
                Err(QvError::Malformed { reason: format!("transistor {t} has unexpected labels") })
            }
        })
        .collect()
}

/// Splits a reduced (x,x)-diagram at the positive/negative interface and
/// reconstructs the tree pair: the domain tree from the negative half, the
/// range tree from the positive half, sigma from the middle x-wires and f
/// from the middle a-wires.
pub fn diagram_to_treepair(g: &GroupElement) -> Result<TreePair, QvError> {
    let d = &g.diagram;
    let pres = d.presentation();
    if !word_is_x(pres, &g.base) {
        return Err(QvError::BaseNotX { base: pres.word_string(&g.base) });
    }
    let (x, a) = letters_xa(pres)?;
    let signs = classify(d, x, a)?;

    // Range recursion: walk down from the frame-top wire through positive
    // transistors. A wire whose bottom leaves the positive half marks a leaf
    // slot of the range tree.
    let mut t2_leaves: Vec<(Address, WireId)> = Vec::new();
    let mut t2_interiors: Vec<(Address, WireId)> = Vec::new();
    let mut visited_pos = 0usize;
    let mut stack: Vec<(Address, WireId)> = vec![(Address::root(), d.frame_top()[0])];
    while let Some((addr, w)) = stack.pop() {
        match d.wire_bottom(w) {
            BottomAttachment::TransistorTop { t, .. } if signs[t] == Sign::Positive => {
                visited_pos += 1;
                let tr = d.transistor(t);
                t2_interiors.push((addr.clone(), tr.bottom[1]));
                stack.push((addr.child(1), tr.bottom[2]));
                stack.push((addr.child(0), tr.bottom[0]));
            }
            _ => t2_leaves.push((addr, w)),
        }
    }

    // Domain recursion: walk up from the frame-bottom wire through negative
    // transistors.
    let mut t1_leaves: Vec<(Address, WireId)> = Vec::new();
    let mut t1_interiors: Vec<(Address, WireId)> = Vec::new();
    let mut visited_neg = 0usize;
    let mut stack: Vec<(Address, WireId)> = vec![(Address::root(), d.frame_bottom()[0])];
    while let Some((addr, w)) = stack.pop() {
        match d.wire_top(w) {
            TopAttachment::TransistorBottom { t, .. } if signs[t] == Sign::Negative => {
                visited_neg += 1;
                let tr = d.transistor(t);
                t1_interiors.push((addr.clone(), tr.top[1]));
                stack.push((addr.child(1), tr.top[2]));
                stack.push((addr.child(0), tr.top[0]));
            }
            _ => t1_leaves.push((addr, w)),
        }
    }

    if visited_pos + visited_neg != d.transistor_count() {
        return Err(QvError::Malformed {
            reason: "transistors unreachable from the frame spine".into(),
        });
    }

    t1_leaves.sort_by(|p, q| p.0.cmp(&q.0));
    t2_leaves.sort_by(|p, q| p.0.cmp(&q.0));
    t1_interiors.sort_by(|p, q| p.0.cmp(&q.0));
    t2_interiors.sort_by(|p, q| p.0.cmp(&q.0));

    let t1 = FiniteBinaryTree::new(t1_leaves.iter().map(|(a, _)| a.clone()).collect())
        .map_err(|e| QvError::Malformed { reason: e.to_string() })?;
    let t2 = FiniteBinaryTree::new(t2_leaves.iter().map(|(a, _)| a.clone()).collect())
        .map_err(|e| QvError::Malformed { reason: e.to_string() })?;

    let slot_of: HashMap<WireId, usize> =
        t2_leaves.iter().enumerate().map(|(i, (_, w))| (*w, i)).collect();
    let sigma = t1_leaves
        .iter()
        .map(|(_, w)| {
            slot_of.get(w).copied().ok_or_else(|| QvError::Malformed {
                reason: "a domain leaf wire does not reach a range slot".into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let a_slot_of: HashMap<WireId, usize> =
        t2_interiors.iter().enumerate().map(|(i, (_, w))| (*w, i)).collect();
    let f = t1_interiors
        .iter()
        .map(|(_, w)| {
            a_slot_of.get(w).copied().ok_or_else(|| QvError::Malformed {
                reason: "a domain vertex wire does not reach a range vertex".into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    TreePair::new(t1, t2, sigma, f).map_err(|e| QvError::Malformed { reason: e.to_string() })
}

/// Applies the element to one vertex address (base word x).
pub fn evaluate(g: &GroupElement, v: &Address) -> Result<Address, QvError> {
    Ok(diagram_to_treepair(g)?.apply(v))
}

/// Erases the a-wires and reduces: the projection pi onto Thompson's V,
/// realized over `<x | x = x^2>`. A homomorphism.
pub fn project_to_v(g: &GroupElement) -> Result<GroupElement, QvError> {
    let erased = g
        .diagram
        .erase_letter("a")
        .map_err(|e| QvError::ProjectionFailed { reason: e.to_string() })?;
    GroupElement::from_diagram(erased)
}

/// Membership in QF: sigma preserves the linear order of the leaves.
pub fn member_qf(g: &GroupElement) -> Result<bool, QvError> {
    Ok(diagram_to_treepair(g)?.sigma_is_order_preserving())
}

/// Membership in QT: sigma is a rotation of the cyclic leaf order.
pub fn member_qt(g: &GroupElement) -> Result<bool, QvError> {
    Ok(diagram_to_treepair(g)?.sigma_is_rotation())
}

/// Kernel of pi: elements projecting to the identity of V, i.e. finitely
/// supported permutations of the vertices.
pub fn is_kernel_element(g: &GroupElement) -> Result<bool, QvError> {
    Ok(project_to_v(g)?.is_identity())
}

/// All moved addresses of length at most `depth`, with their images.
pub fn support(g: &GroupElement, depth: usize) -> Result<Vec<(Address, Address)>, QvError> {
    let tp = diagram_to_treepair(g)?;
    let mut out = Vec::new();
    let mut frontier = vec![Address::root()];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for v in frontier {
            let image = tp.apply(&v);
            if image != v {
                out.push((v.clone(), image));
            }
            if v.len() < depth {
                next.push(v.child(0));
                next.push(v.child(1));
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// A random binary tree with exactly `carets` interior nodes.
pub fn random_tree(carets: usize, rng: &mut impl Rng) -> FiniteBinaryTree {
    fn grow(carets: usize, prefix: Address, leaves: &mut Vec<Address>, rng: &mut impl Rng) {
        if carets == 0 {
            leaves.push(prefix);
            return;
        }
        let left = rng.random_range(0..carets);
        grow(left, prefix.child(0), leaves, rng);
        grow(carets - 1 - left, prefix.child(1), leaves, rng);
    }
    let mut leaves = Vec::new();
    grow(carets, Address::root(), &mut leaves, rng);
    FiniteBinaryTree::new(leaves).expect("grown trees are complete antichains")
}

fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Deterministic per seed: a random element over base word x^k a^l with at
/// most `caret_budget` carets in each forest.
pub fn random_element(
    pres: &Arc<SemigroupPresentation>,
    base: &Word,
    caret_budget: usize,
    seed: u64,
) -> Result<GroupElement, QvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, l) = base_word_shape(pres, base)?;
    if k == 0 {
        // No trees: just a random permutation of the isolated points.
        let perm = random_permutation(l, &mut rng);
        let d = Diagram::permutation(pres.clone(), base, &perm, false)
            .map_err(|v| QvError::Malformed {
                reason: v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
            })?;
        return GroupElement::from_diagram(d);
    }
    let carets = rng.random_range(0..=caret_budget);
    let split_into = |total: usize, parts: usize, rng: &mut ChaCha8Rng| -> Vec<usize> {
        let mut counts = vec![0usize; parts];
        for _ in 0..total {
            counts[rng.random_range(0..parts)] += 1;
        }
        counts
    };
    let domain: Vec<FiniteBinaryTree> =
        split_into(carets, k, &mut rng).into_iter().map(|c| random_tree(c, &mut rng)).collect();
    let range: Vec<FiniteBinaryTree> =
        split_into(carets, k, &mut rng).into_iter().map(|c| random_tree(c, &mut rng)).collect();
    let fp = ForestPair {
        domain,
        range,
        isolated: l,
        sigma_x: random_permutation(k + carets, &mut rng),
        sigma_a: random_permutation(l + carets, &mut rng),
    };
    forest_pair_to_diagram(pres, &fp)
}

/// Classification of a transistor over the QV base presentation: positive
/// means top label x and bottom label xax.
pub fn is_positive_transistor(d: &Diagram, t: TransId) -> Option<bool> {
    let pres = d.presentation();
    let (x, a) = match (pres.letter("x"), pres.letter("a")) {
        (Some(x), Some(a)) => (x, a),
        _ => return None,
    };
    let xax = Word::new(vec![x, a, x]);
    let just_x = Word::new(vec![x]);
    let top = d.transistor_top_label(t);
    let bottom = d.transistor_bottom_label(t);
    if top == just_x && bottom == xax {
        Some(true)
    } else if top == xax && bottom == just_x {
        Some(false)
    } else {
        None
    }
}
