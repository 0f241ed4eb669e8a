//! Braided diagrams: wires, transistors, and the frame.
//!
//! A diagram is a pure incidence structure with ordered contacts. Wire
//! crossings are not recorded. Every wire has exactly two endpoints: its
//! bottom attaches to the bottom of the frame or to the top of a transistor,
//! and its top attaches to the top of the frame or to the bottom of a
//! transistor. Diagrams are immutable after validation; every operation
//! returns a new value.

use std::collections::VecDeque;
use std::sync::Arc;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::presentation::{Letter, SemigroupPresentation, Word};

pub type WireId = usize;
pub type TransId = usize;

/// Where a wire's top endpoint attaches.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TopAttachment {
    FrameTop { index: usize },
    TransistorBottom { t: TransId, slot: usize },
}

/// Where a wire's bottom endpoint attaches.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BottomAttachment {
    FrameBottom { index: usize },
    TransistorTop { t: TransId, slot: usize },
}

/// A relation application. `top` lists the wires whose bottom endpoints sit
/// on the transistor's top side, `bottom` those whose top endpoints sit on
/// its bottom side, both in left-to-right contact order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transistor {
    pub top: Vec<WireId>,
    pub bottom: Vec<WireId>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DiagramViolation {
    #[error("diagram has no wires")]
    NoWires,
    #[error("frame {side} side has no contacts")]
    EmptyFrameSide { side: &'static str },
    #[error("transistor {t} has an empty {side} side")]
    EmptyTransistorSide { t: TransId, side: &'static str },
    #[error("wire {wire} is out of range")]
    UnknownWire { wire: WireId },
    #[error("wire {wire} has {count} top attachments (expected exactly 1)")]
    TopAttachmentCount { wire: WireId, count: usize },
    #[error("wire {wire} has {count} bottom attachments (expected exactly 1)")]
    BottomAttachmentCount { wire: WireId, count: usize },
    #[error("transistor {t} label pair is not a relation")]
    LabelPairNotRelation { t: TransId },
    #[error("vertical order is not strict; cycle through transistors {cycle:?}")]
    OrderNotStrict { cycle: Vec<TransId> },
}

impl DiagramViolation {
    pub fn code(&self) -> &'static str {
        match self {
            DiagramViolation::NoWires => "no_wires",
            DiagramViolation::EmptyFrameSide { .. } => "empty_frame_side",
            DiagramViolation::EmptyTransistorSide { .. } => "empty_transistor_side",
            DiagramViolation::UnknownWire { .. } => "unknown_wire",
            DiagramViolation::TopAttachmentCount { .. } => "top_attachment_count",
            DiagramViolation::BottomAttachmentCount { .. } => "bottom_attachment_count",
            DiagramViolation::LabelPairNotRelation { .. } => "label_pair_not_relation",
            DiagramViolation::OrderNotStrict { .. } => "order_not_strict",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("presentations differ")]
    PresentationMismatch,
    #[error("annular modes differ")]
    ModeMismatch,
    #[error("bottom label {bottom:?} does not match top label {top:?}")]
    LabelMismatch { bottom: String, top: String },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EraseError {
    #[error("letter {name:?} is not in the alphabet")]
    UnknownLetter { name: String },
    #[error("erasing would leave transistor {t} with an empty side")]
    EmptiesTransistorSide { t: TransId },
    #[error("erasing would leave the diagram without wires")]
    EmptiesDiagram,
    #[error("induced presentation is invalid: {reason}")]
    InvalidInducedPresentation { reason: String },
}

/// A braided diagram over a semigroup presentation.
#[derive(Clone)]
pub struct Diagram {
    presentation: Arc<SemigroupPresentation>,
    annular: bool,
    labels: Vec<Letter>,
    frame_top: Vec<WireId>,
    frame_bottom: Vec<WireId>,
    transistors: Vec<Transistor>,
    wire_tops: Vec<TopAttachment>,
    wire_bottoms: Vec<BottomAttachment>,
}

impl std::fmt::Debug for Diagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Diagram({} -> {}, {} wires, {} transistors{})",
            self.presentation.word_string(&self.top_label()),
            self.presentation.word_string(&self.bottom_label()),
            self.labels.len(),
            self.transistors.len(),
            if self.annular { ", annular" } else { "" }
        )
    }
}

impl Diagram {
    /// Validates and builds a diagram from raw parts.
    pub fn new(
        presentation: Arc<SemigroupPresentation>,
        annular: bool,
        labels: Vec<Letter>,
        frame_top: Vec<WireId>,
        frame_bottom: Vec<WireId>,
        transistors: Vec<Transistor>,
    ) -> Result<Diagram, Vec<DiagramViolation>> {
        let mut violations = Vec::new();
        let n = labels.len();
        if n == 0 {
            violations.push(DiagramViolation::NoWires);
        }
        if frame_top.is_empty() {
            violations.push(DiagramViolation::EmptyFrameSide { side: "top" });
        }
        if frame_bottom.is_empty() {
            violations.push(DiagramViolation::EmptyFrameSide { side: "bottom" });
        }

        let mut top_count = vec![0usize; n];
        let mut bottom_count = vec![0usize; n];
        let mut wire_tops = vec![TopAttachment::FrameTop { index: usize::MAX }; n];
        let mut wire_bottoms = vec![BottomAttachment::FrameBottom { index: usize::MAX }; n];
        {
            let mut record_top = |w: WireId, at: TopAttachment, violations: &mut Vec<_>| {
                if w >= n {
                    violations.push(DiagramViolation::UnknownWire { wire: w });
                    return;
                }
                top_count[w] += 1;
                wire_tops[w] = at;
            };
            for (index, &w) in frame_top.iter().enumerate() {
                record_top(w, TopAttachment::FrameTop { index }, &mut violations);
            }
            for (t, tr) in transistors.iter().enumerate() {
                for (slot, &w) in tr.bottom.iter().enumerate() {
                    record_top(w, TopAttachment::TransistorBottom { t, slot }, &mut violations);
                }
            }
        }
        {
            let mut record_bottom = |w: WireId, at: BottomAttachment, violations: &mut Vec<_>| {
                if w >= n {
                    violations.push(DiagramViolation::UnknownWire { wire: w });
                    return;
                }
                bottom_count[w] += 1;
                wire_bottoms[w] = at;
            };
            for (index, &w) in frame_bottom.iter().enumerate() {
                record_bottom(w, BottomAttachment::FrameBottom { index }, &mut violations);
            }
            for (t, tr) in transistors.iter().enumerate() {
                for (slot, &w) in tr.top.iter().enumerate() {
                    record_bottom(w, BottomAttachment::TransistorTop { t, slot }, &mut violations);
                }
            }
        }
        for w in 0..n {
            if top_count[w] != 1 {
                violations.push(DiagramViolation::TopAttachmentCount { wire: w, count: top_count[w] });
            }
            if bottom_count[w] != 1 {
                violations
                    .push(DiagramViolation::BottomAttachmentCount { wire: w, count: bottom_count[w] });
            }
        }

        for (t, tr) in transistors.iter().enumerate() {
            if tr.top.is_empty() {
                violations.push(DiagramViolation::EmptyTransistorSide { t, side: "top" });
            }
            if tr.bottom.is_empty() {
                violations.push(DiagramViolation::EmptyTransistorSide { t, side: "bottom" });
            }
        }

        let word_of = |wires: &[WireId]| -> Option<Word> {
            let mut letters = Vec::with_capacity(wires.len());
            for &w in wires {
                letters.push(*labels.get(w)?);
            }
            Some(Word::new(letters))
        };
        for (t, tr) in transistors.iter().enumerate() {
            if let (Some(top), Some(bottom)) = (word_of(&tr.top), word_of(&tr.bottom)) {
                if !top.is_empty()
                    && !bottom.is_empty()
                    && !presentation.is_relation_pair(&top, &bottom)
                {
                    violations.push(DiagramViolation::LabelPairNotRelation { t });
                }
            }
        }

        // Acyclicity of the vertical order: edge t1 -> t2 when a wire rises
        // from the top of t1 to the bottom of t2. Kahn's algorithm; whatever
        // is left over witnesses a cycle.
        if violations.is_empty() && !transistors.is_empty() {
            let m = transistors.len();
            let mut succs: Vec<Vec<TransId>> = vec![Vec::new(); m];
            let mut indeg = vec![0usize; m];
            for w in 0..n {
                if let (BottomAttachment::TransistorTop { t: t1, .. }, TopAttachment::TransistorBottom { t: t2, .. }) =
                    (wire_bottoms[w], wire_tops[w])
                {
                    succs[t1].push(t2);
                    indeg[t2] += 1;
                }
            }
            let mut queue: VecDeque<TransId> = (0..m).filter(|&t| indeg[t] == 0).collect();
            let mut seen = 0;
            while let Some(t) = queue.pop_front() {
                seen += 1;
                for &s in &succs[t] {
                    indeg[s] -= 1;
                    if indeg[s] == 0 {
                        queue.push_back(s);
                    }
                }
            }
            if seen != m {
                let cycle: Vec<TransId> = (0..m).filter(|&t| indeg[t] > 0).collect();
                violations.push(DiagramViolation::OrderNotStrict { cycle });
            }
        }

        if !violations.is_empty() {
            return Err(violations);
        }
        Ok(Diagram {
            presentation,
            annular,
            labels,
            frame_top,
            frame_bottom,
            transistors,
            wire_tops,
            wire_bottoms,
        })
    }

    /// The permutation diagram with straight wires labelled by `word`.
    pub fn identity(
        presentation: Arc<SemigroupPresentation>,
        word: &Word,
        annular: bool,
    ) -> Diagram {
        let n = word.len();
        assert!(n > 0, "identity diagram needs a nonempty word");
        let ids: Vec<WireId> = (0..n).collect();
        Diagram::new(presentation, annular, word.letters().to_vec(), ids.clone(), ids, Vec::new())
            .expect("identity diagram is valid")
    }

    /// A permutation diagram: wire at top position `i` attaches to bottom
    /// position `perm[i]`.
    pub fn permutation(
        presentation: Arc<SemigroupPresentation>,
        word: &Word,
        perm: &[usize],
        annular: bool,
    ) -> Result<Diagram, Vec<DiagramViolation>> {
        assert_eq!(word.len(), perm.len());
        let n = word.len();
        let mut frame_bottom = vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            frame_bottom[p] = i;
        }
        Diagram::new(
            presentation,
            annular,
            word.letters().to_vec(),
            (0..n).collect(),
            frame_bottom,
            Vec::new(),
        )
    }

    pub fn presentation(&self) -> &Arc<SemigroupPresentation> {
        &self.presentation
    }

    pub fn annular_mode(&self) -> bool {
        self.annular
    }

    pub fn wire_count(&self) -> usize {
        self.labels.len()
    }

    pub fn transistor_count(&self) -> usize {
        self.transistors.len()
    }

    pub fn label(&self, w: WireId) -> Letter {
        self.labels[w]
    }

    pub fn labels(&self) -> &[Letter] {
        &self.labels
    }

    pub fn frame_top(&self) -> &[WireId] {
        &self.frame_top
    }

    pub fn frame_bottom(&self) -> &[WireId] {
        &self.frame_bottom
    }

    pub fn transistors(&self) -> &[Transistor] {
        &self.transistors
    }

    pub fn transistor(&self, t: TransId) -> &Transistor {
        &self.transistors[t]
    }

    pub fn wire_top(&self, w: WireId) -> TopAttachment {
        self.wire_tops[w]
    }

    pub fn wire_bottom(&self, w: WireId) -> BottomAttachment {
        self.wire_bottoms[w]
    }

    fn word_of(&self, wires: &[WireId]) -> Word {
        Word::new(wires.iter().map(|&w| self.labels[w]).collect())
    }

    /// Labels along the top of the frame, in contact order. In annular mode
    /// the order starts at the basepoint, which is index 0 by convention.
    pub fn top_label(&self) -> Word {
        self.word_of(&self.frame_top)
    }

    pub fn bottom_label(&self) -> Word {
        self.word_of(&self.frame_bottom)
    }

    pub fn transistor_top_label(&self, t: TransId) -> Word {
        self.word_of(&self.transistors[t].top)
    }

    pub fn transistor_bottom_label(&self, t: TransId) -> Word {
        self.word_of(&self.transistors[t].bottom)
    }

    /// True iff the diagram has no transistors.
    pub fn is_permutation(&self) -> bool {
        self.transistors.is_empty()
    }

    /// True iff no two transistors are comparable in the vertical order.
    /// Comparability always exhibits a direct wire between two transistors,
    /// so it suffices to look for one.
    pub fn is_thin(&self) -> bool {
        (0..self.labels.len()).all(|w| {
            !matches!(
                (self.wire_bottoms[w], self.wire_tops[w]),
                (BottomAttachment::TransistorTop { .. }, TopAttachment::TransistorBottom { .. })
            )
        })
    }

    /// Stacks `self` on top of `other`, fusing frame-bottom contacts of
    /// `self` to frame-top contacts of `other` index by index.
    pub fn concatenate(&self, other: &Diagram) -> Result<Diagram, ComposeError> {
        if *self.presentation != *other.presentation {
            return Err(ComposeError::PresentationMismatch);
        }
        if self.annular != other.annular {
            return Err(ComposeError::ModeMismatch);
        }
        let bottom = self.bottom_label();
        let top = other.top_label();
        if bottom != top {
            return Err(ComposeError::LabelMismatch {
                bottom: self.presentation.word_string(&bottom),
                top: other.presentation.word_string(&top),
            });
        }

        // Interface wires of `other` merge into the matching wire of `self`;
        // all other wires of `other` get fresh ids.
        let mut other_map: Vec<WireId> = vec![usize::MAX; other.labels.len()];
        for (pos, &w) in other.frame_top.iter().enumerate() {
            other_map[w] = self.frame_bottom[pos];
        }
        let mut labels = self.labels.clone();
        for (w, &l) in other.labels.iter().enumerate() {
            if other_map[w] == usize::MAX {
                other_map[w] = labels.len();
                labels.push(l);
            }
        }

        let mut transistors = self.transistors.clone();
        for tr in &other.transistors {
            transistors.push(Transistor {
                top: tr.top.iter().map(|&w| other_map[w]).collect(),
                bottom: tr.bottom.iter().map(|&w| other_map[w]).collect(),
            });
        }
        let frame_bottom: Vec<WireId> = other.frame_bottom.iter().map(|&w| other_map[w]).collect();

        Ok(Diagram::new(
            self.presentation.clone(),
            self.annular,
            labels,
            self.frame_top.clone(),
            frame_bottom,
            transistors,
        )
        .expect("concatenation of valid diagrams is valid"))
    }

    /// Top/bottom reflection: frame sides swap, every transistor's sides
    /// swap, wires keep their labels. An involution.
    pub fn invert(&self) -> Diagram {
        Diagram::new(
            self.presentation.clone(),
            self.annular,
            self.labels.clone(),
            self.frame_bottom.clone(),
            self.frame_top.clone(),
            self.transistors
                .iter()
                .map(|tr| Transistor { top: tr.bottom.clone(), bottom: tr.top.clone() })
                .collect(),
        )
        .expect("reflection of a valid diagram is valid")
    }

    /// Removes every wire labelled by the named generator, shrinking
    /// transistor contact lists accordingly. The result lives over the
    /// induced presentation with that generator deleted.
    pub fn erase_letter(&self, name: &str) -> Result<Diagram, EraseError> {
        let erase = self
            .presentation
            .letter(name)
            .ok_or_else(|| EraseError::UnknownLetter { name: name.to_string() })?;
        let (pres, letter_map) = self
            .presentation
            .erased(erase)
            .map_err(|v| EraseError::InvalidInducedPresentation {
                reason: v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
            })?;

        let mut wire_map: Vec<Option<WireId>> = vec![None; self.labels.len()];
        let mut labels = Vec::new();
        for (w, &l) in self.labels.iter().enumerate() {
            if l != erase {
                wire_map[w] = Some(labels.len());
                labels.push(letter_map[l.0 as usize].expect("kept letters are mapped"));
            }
        }
        if labels.is_empty() {
            return Err(EraseError::EmptiesDiagram);
        }
        let strip = |wires: &[WireId]| -> Vec<WireId> {
            wires.iter().filter_map(|&w| wire_map[w]).collect()
        };
        let mut transistors = Vec::with_capacity(self.transistors.len());
        for (t, tr) in self.transistors.iter().enumerate() {
            let top = strip(&tr.top);
            let bottom = strip(&tr.bottom);
            if top.is_empty() || bottom.is_empty() {
                return Err(EraseError::EmptiesTransistorSide { t });
            }
            transistors.push(Transistor { top, bottom });
        }
        let frame_top = strip(&self.frame_top);
        let frame_bottom = strip(&self.frame_bottom);
        Ok(Diagram::new(pres, self.annular, labels, frame_top, frame_bottom, transistors)
            .expect("erasure of a valid diagram is valid"))
    }

    /// Rebuilds the diagram with wires and transistors renumbered by the
    /// given maps (new id = map[old id]). Used by canonicalization.
    pub(crate) fn renumbered(&self, wire_map: &[usize], trans_map: &[usize]) -> Diagram {
        let n = self.labels.len();
        let m = self.transistors.len();
        let mut labels = vec![Letter(0); n];
        for w in 0..n {
            labels[wire_map[w]] = self.labels[w];
        }
        let mut transistors = vec![Transistor { top: Vec::new(), bottom: Vec::new() }; m];
        for t in 0..m {
            transistors[trans_map[t]] = Transistor {
                top: self.transistors[t].top.iter().map(|&w| wire_map[w]).collect(),
                bottom: self.transistors[t].bottom.iter().map(|&w| wire_map[w]).collect(),
            };
        }
        Diagram::new(
            self.presentation.clone(),
            self.annular,
            labels,
            self.frame_top.iter().map(|&w| wire_map[w]).collect(),
            self.frame_bottom.iter().map(|&w| wire_map[w]).collect(),
            transistors,
        )
        .expect("renumbering preserves validity")
    }

    /// Rebuilds with the frame-bottom contact list replaced (same wires in a
    /// different order).
    pub(crate) fn with_frame_bottom(&self, frame_bottom: Vec<WireId>) -> Diagram {
        let mut sorted_old = self.frame_bottom.clone();
        let mut sorted_new = frame_bottom.clone();
        sorted_old.sort_unstable();
        sorted_new.sort_unstable();
        assert_eq!(sorted_old, sorted_new, "frame bottom must keep the same wires");
        Diagram::new(
            self.presentation.clone(),
            self.annular,
            self.labels.clone(),
            self.frame_top.clone(),
            frame_bottom,
            self.transistors.clone(),
        )
        .expect("reordering the frame bottom preserves validity")
    }

    /// Canonical JSON serialization. Wires and transistors are renumbered by
    /// the canonical traversal first, keys are sorted, ids are dense.
    pub fn to_json(&self) -> Value {
        let canon = crate::canonical::canonicalize(self);
        let mut obj = Map::new();
        obj.insert("annular".into(), Value::Bool(canon.annular));
        obj.insert("presentation".into(), canon.presentation.to_json());
        obj.insert(
            "frame_top".into(),
            Value::Array(canon.frame_top.iter().map(|&w| Value::from(w as u64)).collect()),
        );
        obj.insert(
            "frame_bottom".into(),
            Value::Array(canon.frame_bottom.iter().map(|&w| Value::from(w as u64)).collect()),
        );
        obj.insert(
            "wires".into(),
            Value::Array(
                canon
                    .labels
                    .iter()
                    .enumerate()
                    .map(|(id, &l)| {
                        let mut w = Map::new();
                        w.insert("id".into(), Value::from(id as u64));
                        w.insert(
                            "label".into(),
                            Value::String(canon.presentation.letter_name(l).to_string()),
                        );
                        Value::Object(w)
                    })
                    .collect(),
            ),
        );
        obj.insert(
            "transistors".into(),
            Value::Array(
                canon
                    .transistors
                    .iter()
                    .enumerate()
                    .map(|(id, tr)| {
                        let mut t = Map::new();
                        t.insert("id".into(), Value::from(id as u64));
                        t.insert(
                            "top".into(),
                            Value::Array(tr.top.iter().map(|&w| Value::from(w as u64)).collect()),
                        );
                        t.insert(
                            "bottom".into(),
                            Value::Array(tr.bottom.iter().map(|&w| Value::from(w as u64)).collect()),
                        );
                        Value::Object(t)
                    })
                    .collect(),
            ),
        );
        Value::Object(obj)
    }

    /// Parses diagram JSON. Wire and transistor ids may be arbitrary distinct
    /// integers; they are remapped densely in order of appearance in the
    /// `wires`/`transistors` arrays.
    pub fn from_json(v: &Value) -> Result<Diagram, String> {
        let obj = v.as_object().ok_or("diagram must be a JSON object")?;
        let presentation = SemigroupPresentation::from_json(
            obj.get("presentation").ok_or("missing presentation")?,
        )?;
        let annular = obj.get("annular").and_then(Value::as_bool).unwrap_or(false);

        let wires = obj.get("wires").and_then(Value::as_array).ok_or("missing wires array")?;
        let mut ids: Vec<u64> = Vec::with_capacity(wires.len());
        let mut labels = Vec::with_capacity(wires.len());
        for w in wires {
            let id = w.get("id").and_then(Value::as_u64).ok_or("wire id must be an integer")?;
            let name = w.get("label").and_then(Value::as_str).ok_or("wire label must be a string")?;
            let letter = presentation
                .letter(name)
                .ok_or_else(|| format!("wire label {name:?} is not a generator"))?;
            if ids.contains(&id) {
                return Err(format!("duplicate wire id {id}"));
            }
            ids.push(id);
            labels.push(letter);
        }
        let wire_index = |id: u64| -> Result<WireId, String> {
            ids.iter().position(|&i| i == id).ok_or_else(|| format!("unknown wire id {id}"))
        };
        let id_list = |v: &Value, what: &str| -> Result<Vec<WireId>, String> {
            v.as_array()
                .ok_or_else(|| format!("{what} must be an array"))?
                .iter()
                .map(|x| {
                    x.as_u64().ok_or_else(|| format!("{what} entries must be integers")).and_then(wire_index)
                })
                .collect()
        };

        let frame_top = id_list(obj.get("frame_top").ok_or("missing frame_top")?, "frame_top")?;
        let frame_bottom =
            id_list(obj.get("frame_bottom").ok_or("missing frame_bottom")?, "frame_bottom")?;

        let mut transistors = Vec::new();
        if let Some(ts) = obj.get("transistors").and_then(Value::as_array) {
            for t in ts {
                transistors.push(Transistor {
                    top: id_list(t.get("top").ok_or("transistor missing top")?, "transistor top")?,
                    bottom: id_list(
                        t.get("bottom").ok_or("transistor missing bottom")?,
                        "transistor bottom",
                    )?,
                });
            }
        }

        Diagram::new(presentation, annular, labels, frame_top, frame_bottom, transistors)
            .map_err(|v| v.iter().map(|e| format!("{e}")).collect::<Vec<_>>().join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::StandardPresentation;

    fn qv() -> Arc<SemigroupPresentation> {
        SemigroupPresentation::qv_base()
    }

    fn x_word(p: &SemigroupPresentation) -> Word {
        p.word_from_str("x").unwrap()
    }

    /// One (x, xax) transistor: frame top x, frame bottom xax.
    pub(crate) fn caret_down(p: &Arc<SemigroupPresentation>) -> Diagram {
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
    fn single_wire_is_valid_permutation() {
        let p = qv();
        let d = Diagram::identity(p.clone(), &x_word(&p), false);
        assert!(d.is_permutation());
        assert!(d.is_thin());
        assert_eq!(d.top_label(), d.bottom_label());
        assert_eq!(p.word_string(&d.top_label()), "x");
    }

    #[test]
    fn caret_is_valid_and_labelled() {
        let p = qv();
        let d = caret_down(&p);
        assert_eq!(p.word_string(&d.top_label()), "x");
        assert_eq!(p.word_string(&d.bottom_label()), "xax");
        assert!(!d.is_permutation());
        assert!(d.is_thin());
    }

    #[test]
    fn cycle_is_rejected() {
        let p = SemigroupPresentation::v_base();
        let x = p.letter("x").unwrap();
        // Wire 1 rises from t1 into t0, wire 2 rises from t0 into t1.
        let result = Diagram::new(
            p,
            false,
            vec![x, x, x, x],
            vec![0],
            vec![3],
            vec![
                Transistor { top: vec![0, 2], bottom: vec![1] },
                Transistor { top: vec![1], bottom: vec![2, 3] },
            ],
        );
        let violations = result.err().expect("cycle must be rejected");
        assert!(violations.iter().any(|v| v.code() == "order_not_strict"));
    }

    #[test]
    fn bad_label_pair_is_rejected() {
        let p = qv();
        let x = p.letter("x").unwrap();
        let result = Diagram::new(
            p,
            false,
            vec![x, x, x],
            vec![0],
            vec![1, 2],
            vec![Transistor { top: vec![0], bottom: vec![1, 2] }],
        );
        let violations = result.err().expect("xx is not related to x over the QV base");
        assert!(violations.iter().any(|v| v.code() == "label_pair_not_relation"));
    }

    #[test]
    fn port_bijectivity_is_checked() {
        let p = qv();
        let x = p.letter("x").unwrap();
        let result = Diagram::new(p, false, vec![x, x], vec![0, 0], vec![1, 1], Vec::new());
        let violations = result.err().unwrap();
        assert!(violations.iter().any(|v| v.code() == "top_attachment_count"));
    }

    #[test]
    fn invert_is_an_involution() {
        let p = qv();
        let d = caret_down(&p);
        let inv = d.invert();
        assert_eq!(p.word_string(&inv.top_label()), "xax");
        assert_eq!(p.word_string(&inv.bottom_label()), "x");
        let back = inv.invert();
        assert_eq!(back.frame_top(), d.frame_top());
        assert_eq!(back.frame_bottom(), d.frame_bottom());
        assert_eq!(back.transistors(), d.transistors());
    }

    #[test]
    fn concatenate_caret_with_inverse() {
        let p = qv();
        let d = caret_down(&p);
        let stacked = d.concatenate(&d.invert()).unwrap();
        assert_eq!(stacked.transistor_count(), 2);
        assert_eq!(p.word_string(&stacked.top_label()), "x");
        assert_eq!(p.word_string(&stacked.bottom_label()), "x");
    }

    #[test]
    fn concatenate_rejects_label_mismatch() {
        let p = qv();
        let d = caret_down(&p);
        let err = d.concatenate(&d).unwrap_err();
        assert!(matches!(err, ComposeError::LabelMismatch { .. }));
    }

    #[test]
    fn erase_letter_caret_becomes_v_caret() {
        let p = qv();
        let d = caret_down(&p);
        let erased = d.erase_letter("a").unwrap();
        assert_eq!(*erased.presentation().as_ref(), *SemigroupPresentation::v_base());
        assert_eq!(erased.wire_count(), 3);
        assert_eq!(erased.transistor_count(), 1);
        assert_eq!(erased.presentation().word_string(&erased.bottom_label()), "xx");
    }

    #[test]
    fn erase_letter_pure_x_diagram_unchanged() {
        let p = qv();
        let d = Diagram::identity(p.clone(), &x_word(&p), false);
        let erased = d.erase_letter("a").unwrap();
        assert_eq!(erased.wire_count(), 1);
        assert_eq!(erased.transistor_count(), 0);
    }

    #[test]
    fn erase_letter_can_empty_a_side() {
        // Over <x, a | x = xa>, erasing a leaves a transistor with an empty
        // bottom side.
        let p = SemigroupPresentation::new(
            vec!["x".into(), "a".into()],
            vec![(vec!["x".into()], vec!["x".into(), "a".into()])],
        )
        .unwrap();
        let x = p.letter("x").unwrap();
        let a = p.letter("a").unwrap();
        let d = Diagram::new(
            p,
            false,
            vec![x, x, a],
            vec![0],
            vec![1, 2],
            vec![Transistor { top: vec![0], bottom: vec![1, 2] }],
        )
        .unwrap();
        // The induced presentation <x, | x = x> is reflexive, which is also
        // an error; either failure mode is acceptable here.
        assert!(d.erase_letter("a").is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = qv();
        let d = caret_down(&p);
        let js = d.to_json();
        let back = Diagram::from_json(&js).unwrap();
        assert_eq!(back.to_json(), js);
        assert_eq!(back.wire_count(), d.wire_count());
        assert_eq!(back.transistor_count(), 1);
    }

    #[test]
    fn n_ary_presentation_supports_diagrams() {
        let p = SemigroupPresentation::standard(StandardPresentation::NAry(2)).unwrap();
        let x = p.letter("x").unwrap();
        let a = p.letter("a").unwrap();
        let d = Diagram::new(
            p.clone(),
            false,
            vec![x, x, x, a],
            vec![0],
            vec![1, 2, 3],
            vec![Transistor { top: vec![0], bottom: vec![1, 2, 3] }],
        )
        .unwrap();
        assert_eq!(p.word_string(&d.bottom_label()), "xxa");
    }
}
