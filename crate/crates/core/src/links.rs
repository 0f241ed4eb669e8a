//! Links and descending links of vertices in the diagram complexes for QF,
//! QT, and QV, plus marked cubes and their realizations.
//!
//! For a vertex with bottom label x^k a^l (up to permutation), the link has
//! one vertex per single-transistor diagram attached below: descending
//! vertices (m, n, p) consume the m-th and n-th x-contacts (left and right
//! top contact of an (xax, x)-transistor) and the p-th a-contact, ascending
//! vertices (m) consume the m-th x-contact alone. A family of vertices spans
//! a simplex exactly when no x-index and no color repeats, which is a
//! pairwise condition, so every link here is flag by construction.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::canonical::{canonical_code, CanonicalCode, CodeFlavor};
use crate::diagram::{BottomAttachment, Diagram, TransId, Transistor, WireId};
use crate::presentation::{SemigroupPresentation, Word};
use crate::rewriting::reduce;
use crate::simplicial::{ComplexError, SimplexList, SimplicialComplex};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LinkFamily {
    Qf,
    Qt,
    Qv,
}

impl LinkFamily {
    pub fn parse(s: &str) -> Option<LinkFamily> {
        match s.to_ascii_lowercase().as_str() {
            "qf" => Some(LinkFamily::Qf),
            "qt" => Some(LinkFamily::Qt),
            "qv" => Some(LinkFamily::Qv),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LinkFamily::Qf => "QF",
            LinkFamily::Qt => "QT",
            LinkFamily::Qv => "QV",
        }
    }
}

/// A descending link vertex (m, n, p), 1-based: left top x-contact wired to
/// the m-th x-contact, right to the n-th, a-contact to the p-th.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DescVertex {
    pub m: u16,
    pub n: u16,
    pub p: u16,
}

impl DescVertex {
    pub fn label(&self) -> String {
        format!("({},{},{})", self.m, self.n, self.p)
    }

    fn x_slots(&self) -> [u16; 2] {
        [self.m, self.n]
    }

    pub fn disjoint(&self, other: &DescVertex) -> bool {
        let [m, n] = self.x_slots();
        let [m2, n2] = other.x_slots();
        m != m2 && m != n2 && n != m2 && n != n2 && self.p != other.p
    }
}

/// A vertex of the full abstract link: descending or ascending.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LinkVertex {
    Descending(DescVertex),
    Ascending { m: u16 },
}

impl LinkVertex {
    pub fn label(&self) -> String {
        match self {
            LinkVertex::Descending(v) => v.label(),
            LinkVertex::Ascending { m } => format!("({m})"),
        }
    }

    fn x_slots(&self) -> Vec<u16> {
        match self {
            LinkVertex::Descending(v) => vec![v.m, v.n],
            LinkVertex::Ascending { m } => vec![*m],
        }
    }

    fn color(&self) -> Option<u16> {
        match self {
            LinkVertex::Descending(v) => Some(v.p),
            LinkVertex::Ascending { .. } => None,
        }
    }

    pub fn compatible(&self, other: &LinkVertex) -> bool {
        let xs = self.x_slots();
        if other.x_slots().iter().any(|s| xs.contains(s)) {
            return false;
        }
        match (self.color(), other.color()) {
            (Some(p), Some(q)) => p != q,
            _ => true,
        }
    }
}

/// The descending-link vertex lists per family.
pub fn descending_vertices(family: LinkFamily, k: usize, l: usize) -> Vec<DescVertex> {
    let mut out = Vec::new();
    match family {
        LinkFamily::Qv => {
            for m in 1..=k as u16 {
                for n in 1..=k as u16 {
                    if m == n {
                        continue;
                    }
                    for p in 1..=l as u16 {
                        out.push(DescVertex { m, n, p });
                    }
                }
            }
        }
        LinkFamily::Qf | LinkFamily::Qt => {
            for m in 1..k as u16 {
                for p in 1..=l as u16 {
                    out.push(DescVertex { m, n: m + 1, p });
                }
            }
            if family == LinkFamily::Qt && k >= 2 {
                for p in 1..=l as u16 {
                    out.push(DescVertex { m: k as u16, n: 1, p });
                }
            }
        }
    }
    out.sort();
    out
}

/// A constructed descending link: the vertex tuples plus the simplicial
/// complex on them (built to `max_dim`, or the natural dimension when that
/// is larger than any clique).
#[derive(Clone, Debug)]
pub struct DescendingLink {
    pub family: LinkFamily,
    pub k: usize,
    pub l: usize,
    pub vertices: Vec<DescVertex>,
    pub complex: SimplicialComplex,
    pub built_dim: usize,
}

/// Builds the abstract descending link for a family at (k, l). `max_dim`
/// caps the stored dimension; `None` stores everything.
pub fn abstract_descending_link(
    family: LinkFamily,
    k: usize,
    l: usize,
    max_dim: Option<usize>,
) -> DescendingLink {
    let vertices = descending_vertices(family, k, l);
    // No simplex exceeds min(k/2, l) vertices.
    let natural = (k / 2).min(l).max(1) - 1;
    let built_dim = max_dim.unwrap_or(natural).min(natural.max(1));
    let labels = vertices.iter().map(DescVertex::label).collect();
    let complex = SimplicialComplex::from_cliques(
        labels,
        |i, j| vertices[i as usize].disjoint(&vertices[j as usize]),
        built_dim,
    );
    DescendingLink { family, k, l, vertices, complex, built_dim }
}

/// The full abstract link at (k, l): descending and ascending vertices.
#[derive(Clone, Debug)]
pub struct AbstractLink {
    pub k: usize,
    pub l: usize,
    pub vertices: Vec<LinkVertex>,
    pub complex: SimplicialComplex,
}

pub fn abstract_link(k: usize, l: usize, max_dim: Option<usize>) -> AbstractLink {
    let mut vertices: Vec<LinkVertex> =
        descending_vertices(LinkFamily::Qv, k, l).into_iter().map(LinkVertex::Descending).collect();
    for m in 1..=k as u16 {
        vertices.push(LinkVertex::Ascending { m });
    }
    vertices.sort();
    // The k ascending vertices are pairwise compatible, so cliques can reach
    // size k.
    let natural = k.max(1) - 1;
    let built_dim = max_dim.unwrap_or(natural.max(1));
    let labels = vertices.iter().map(LinkVertex::label).collect();
    let complex = SimplicialComplex::from_cliques(
        labels,
        |i, j| vertices[i as usize].compatible(&vertices[j as usize]),
        built_dim,
    );
    AbstractLink { k, l, vertices, complex }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LinkError {
    #[error("diagram is not over the QV base presentation")]
    WrongPresentation,
    #[error("bottom label is not x^k a^l up to permutation")]
    BottomNotXa,
    #[error("expected a single-transistor diagram")]
    NotSingleTransistor,
    #[error("top labels differ")]
    TopLabelMismatch,
    #[error("corner length {got} does not match transistor count {expected}")]
    CornerLength { got: usize, expected: usize },
    #[error("marked cube is invalid: {reason}")]
    BadCube { reason: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A vertex of the diagram complex: an equivalence class of reduced
/// (w,*)-diagrams modulo permutation diagrams, keyed by the bottom-unordered
/// canonical code.
#[derive(Clone, Debug)]
pub struct ComplexVertex {
    diagram: Diagram,
    code: CanonicalCode,
}

impl ComplexVertex {
    pub fn new(d: Diagram) -> ComplexVertex {
        let reduced = reduce(&d);
        let code = canonical_code(&reduced, CodeFlavor::BottomUnordered);
        ComplexVertex { diagram: reduced, code }
    }

    pub fn representative(&self) -> &Diagram {
        &self.diagram
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }
}

impl PartialEq for ComplexVertex {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for ComplexVertex {}

/// The filtration level j of a vertex whose bottom label has j x's and j-1
/// a's.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FiltrationLevel {
    pub j: usize,
}

pub fn filtration_level(v: &ComplexVertex) -> Result<FiltrationLevel, LinkError> {
    let d = v.representative();
    let pres = d.presentation();
    let (x, a) = match (pres.letter("x"), pres.letter("a")) {
        (Some(x), Some(a)) => (x, a),
        _ => return Err(LinkError::WrongPresentation),
    };
    let w = d.bottom_label();
    let j = w.count_letter(x);
    if w.count_letter(a) + 1 != j || j + w.count_letter(a) != w.len() {
        return Err(LinkError::BottomNotXa);
    }
    Ok(FiltrationLevel { j })
}

/// Two vertices lie in the same orbit of the group action exactly when
/// their bottom labels are permutations of each other.
pub fn same_orbit(v1: &ComplexVertex, v2: &ComplexVertex) -> bool {
    v1.representative().bottom_label().letter_multiset()
        == v2.representative().bottom_label().letter_multiset()
}

/// Positions (0-based) of the frame-top contacts whose wires feed a
/// transistor.
fn consumed_positions(d: &Diagram) -> Vec<usize> {
    d.frame_top()
        .iter()
        .enumerate()
        .filter(|(_, &w)| matches!(d.wire_bottom(w), BottomAttachment::TransistorTop { .. }))
        .map(|(i, _)| i)
        .collect()
}

/// Disjointness of two single-transistor applications to a common word: the
/// sets of consumed frame-top positions do not intersect.
pub fn are_disjoint(d1: &Diagram, d2: &Diagram) -> Result<bool, LinkError> {
    if d1.transistor_count() != 1 || d2.transistor_count() != 1 {
        return Err(LinkError::NotSingleTransistor);
    }
    if d1.top_label() != d2.top_label() {
        return Err(LinkError::TopLabelMismatch);
    }
    let s1 = consumed_positions(d1);
    let s2 = consumed_positions(d2);
    Ok(s1.iter().all(|p| !s2.contains(p)))
}

/// A link built from actual single-transistor diagrams.
#[derive(Clone, Debug)]
pub struct DiagramLink {
    pub vertices: Vec<(LinkVertex, Diagram)>,
    pub complex: SimplicialComplex,
}

/// Builds the link of a vertex from diagrams: one vertex per equivalence
/// class of single-transistor diagrams under the bottom label, simplices the
/// pairwise-disjoint families.
pub fn link_from_diagrams(v: &ComplexVertex, max_dim: Option<usize>) -> Result<DiagramLink, LinkError> {
    let d = v.representative();
    let pres = d.presentation().clone();
    let (x, a) = match (pres.letter("x"), pres.letter("a")) {
        (Some(x), Some(a)) => (x, a),
        _ => return Err(LinkError::WrongPresentation),
    };
    let w = d.bottom_label();
    let x_positions: Vec<usize> =
        w.letters().iter().enumerate().filter(|(_, &l)| l == x).map(|(i, _)| i).collect();
    let a_positions: Vec<usize> =
        w.letters().iter().enumerate().filter(|(_, &l)| l == a).map(|(i, _)| i).collect();
    if x_positions.len() + a_positions.len() != w.len() {
        return Err(LinkError::BottomNotXa);
    }
    let k = x_positions.len();
    let l = a_positions.len();

    // Attach one transistor below the word w: the new diagram's frame top
    // spells w, the wires not consumed pass straight through.
    let build = |kind: &LinkVertex| -> Diagram {
        let mut labels = w.letters().to_vec();
        let frame_top: Vec<WireId> = (0..labels.len()).collect();
        let mut consumed = Vec::new();
        let transistor = match kind {
            LinkVertex::Descending(DescVertex { m, n, p }) => {
                let wm = x_positions[(m - 1) as usize];
                let wn = x_positions[(n - 1) as usize];
                let wp = a_positions[(p - 1) as usize];
                consumed.extend([wm, wp, wn]);
                let out = labels.len();
                labels.push(x);
                Transistor { top: vec![wm, wp, wn], bottom: vec![out] }
            }
            LinkVertex::Ascending { m } => {
                let wm = x_positions[(m - 1) as usize];
                consumed.push(wm);
                let o1 = labels.len();
                labels.push(x);
                let o2 = labels.len();
                labels.push(a);
                let o3 = labels.len();
                labels.push(x);
                Transistor { top: vec![wm], bottom: vec![o1, o2, o3] }
            }
        };
        let mut frame_bottom: Vec<WireId> =
            (0..w.len()).filter(|i| !consumed.contains(i)).collect();
        frame_bottom.extend(w.len()..labels.len());
        Diagram::new(pres.clone(), false, labels, frame_top, frame_bottom, vec![transistor])
            .expect("single-transistor link diagrams are valid")
    };

    let mut kinds: Vec<LinkVertex> =
        descending_vertices(LinkFamily::Qv, k, l).into_iter().map(LinkVertex::Descending).collect();
    for m in 1..=k as u16 {
        kinds.push(LinkVertex::Ascending { m });
    }
    kinds.sort();
    let vertices: Vec<(LinkVertex, Diagram)> =
        kinds.into_iter().map(|kind| (kind, build(&kind))).collect();

    // Distinct kinds must give inequivalent diagrams; diagram-level
    // disjointness drives the simplices.
    let mut seen: HashMap<CanonicalCode, usize> = HashMap::new();
    for (i, (_, diag)) in vertices.iter().enumerate() {
        let code = canonical_code(diag, CodeFlavor::BottomUnordered);
        if seen.insert(code, i).is_some() {
            return Err(LinkError::BadCube {
                reason: "two distinct applications produced equivalent diagrams".into(),
            });
        }
    }

    let natural = k.max(1) - 1;
    let built_dim = max_dim.unwrap_or(natural.max(1));
    let vertex_labels: Vec<String> = vertices.iter().map(|(kind, _)| kind.label()).collect();
    let complex = SimplicialComplex::from_cliques(
        vertex_labels,
        |i, j| {
            are_disjoint(&vertices[i as usize].1, &vertices[j as usize].1)
                .expect("link vertices share the top word")
        },
        built_dim,
    );
    Ok(DiagramLink { vertices, complex })
}

/// A marked cube (delta, psi): a reduced diagram followed by a thin diagram,
/// with an explicit numbering of psi's transistors.
#[derive(Clone, Debug)]
pub struct MarkedCube {
    pub delta: Diagram,
    pub psi: Diagram,
    pub numbering: Vec<TransId>,
}

impl MarkedCube {
    pub fn new(delta: Diagram, psi: Diagram, numbering: Vec<TransId>) -> Result<MarkedCube, LinkError> {
        if !psi.is_thin() {
            return Err(LinkError::BadCube { reason: "psi is not thin".into() });
        }
        if delta.bottom_label() != psi.top_label() {
            return Err(LinkError::BadCube {
                reason: "bottom label of delta differs from top label of psi".into(),
            });
        }
        if *delta.presentation() != *psi.presentation() {
            return Err(LinkError::BadCube { reason: "presentations differ".into() });
        }
        let mut sorted = numbering.clone();
        sorted.sort_unstable();
        if sorted != (0..psi.transistor_count()).collect::<Vec<_>>() {
            return Err(LinkError::BadCube {
                reason: "numbering is not a permutation of psi's transistors".into(),
            });
        }
        Ok(MarkedCube { delta, psi, numbering })
    }

    pub fn dimension(&self) -> usize {
        self.numbering.len()
    }
}

/// Realizes one corner of a marked cube: transistors of psi with corner bit
/// 0 are removed by clipping, their consumed wires fall through to the frame
/// bottom, and the corner is the class of reduce(delta o psi_corner).
pub fn realize_cube(cube: &MarkedCube, corner: &[bool]) -> Result<ComplexVertex, LinkError> {
    if corner.len() != cube.numbering.len() {
        return Err(LinkError::CornerLength {
            got: corner.len(),
            expected: cube.numbering.len(),
        });
    }
    let psi = &cube.psi;
    let mut keep_trans = vec![true; psi.transistor_count()];
    for (bit, &t) in corner.iter().zip(&cube.numbering) {
        keep_trans[t] = *bit;
    }

    // Wires hanging below a removed transistor disappear; wires entering a
    // removed transistor from above are re-routed to the frame bottom.
    let mut removed_wire = vec![false; psi.wire_count()];
    let mut rerouted: Vec<WireId> = Vec::new();
    for (t, tr) in psi.transistors().iter().enumerate() {
        if keep_trans[t] {
            continue;
        }
        for &w in &tr.bottom {
            removed_wire[w] = true;
        }
        rerouted.extend(tr.top.iter().copied());
    }

    let mut wire_map: Vec<Option<WireId>> = vec![None; psi.wire_count()];
    let mut labels = Vec::new();
    for w in 0..psi.wire_count() {
        if !removed_wire[w] {
            wire_map[w] = Some(labels.len());
            labels.push(psi.label(w));
        }
    }
    let map_list = |wires: &[WireId]| -> Vec<WireId> {
        wires.iter().filter_map(|&w| wire_map[w]).collect()
    };
    let mut transistors = Vec::new();
    for (t, tr) in psi.transistors().iter().enumerate() {
        if keep_trans[t] {
            transistors.push(Transistor { top: map_list(&tr.top), bottom: map_list(&tr.bottom) });
        }
    }
    let frame_top = map_list(psi.frame_top());
    let mut frame_bottom = map_list(psi.frame_bottom());
    frame_bottom.extend(rerouted.iter().filter_map(|&w| wire_map[w]));

    let psi_corner = Diagram::new(
        psi.presentation().clone(),
        psi.annular_mode(),
        labels,
        frame_top,
        frame_bottom,
        transistors,
    )
    .map_err(|v| LinkError::BadCube {
        reason: v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "),
    })?;
    let stacked = cube
        .delta
        .concatenate(&psi_corner)
        .map_err(|e| LinkError::BadCube { reason: e.to_string() })?;
    Ok(ComplexVertex::new(stacked))
}

/// Result of intersecting the links of a vertex set S inside a descending
/// link: the full subcomplex on the vertices disjoint from every member of
/// S, plus, when the remaining slot structure matches a smaller descending
/// link, the verified recognition.
#[derive(Clone, Debug)]
pub struct LinkIntersection {
    pub kept: Vec<DescVertex>,
    pub complex: SimplicialComplex,
    pub recognized: Option<RecognizedLink>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognizedLink {
    pub family: LinkFamily,
    pub k: usize,
    pub l: usize,
}

/// Relabels the kept vertices by slot and color maps and compares against
/// the target descending link, dimension by dimension.
fn verify_recognition(
    kept: &[DescVertex],
    sub: &SimplicialComplex,
    slot_map: &HashMap<u16, u16>,
    color_map: &HashMap<u16, u16>,
    target: &DescendingLink,
) -> bool {
    if kept.len() != target.vertices.len() {
        return false;
    }
    let mut to_target = Vec::with_capacity(kept.len());
    for v in kept {
        let (Some(&m), Some(&n), Some(&p)) =
            (slot_map.get(&v.m), slot_map.get(&v.n), color_map.get(&v.p))
        else {
            return false;
        };
        let mapped = DescVertex { m, n, p };
        match target.vertices.binary_search(&mapped) {
            Ok(i) => to_target.push(i as u32),
            Err(_) => return false,
        }
    }
    let dims = sub.max_dim().map_or(0, |d| d + 1).max(target.complex.max_dim().map_or(0, |d| d + 1));
    for d in 0..dims {
        let mut mapped = SimplexList::new(d + 1);
        if let Some(dl) = sub.simplices(d) {
            let mut buf = Vec::with_capacity(d + 1);
            for s in dl.iter() {
                buf.clear();
                buf.extend(s.iter().map(|&i| to_target[i as usize]));
                buf.sort_unstable();
                mapped.push(&buf);
            }
        }
        let mut expect = target.complex.simplices(d).cloned().unwrap_or_else(|| SimplexList::new(d + 1));
        let mut got = mapped;
        // Compare as sorted sets.
        got.data = {
            let mut rows: Vec<Vec<u32>> = got.iter().map(|r| r.to_vec()).collect();
            rows.sort();
            rows.concat()
        };
        expect.data = {
            let mut rows: Vec<Vec<u32>> = expect.iter().map(|r| r.to_vec()).collect();
            rows.sort();
            rows.concat()
        };
        if got.data != expect.data {
            return false;
        }
    }
    true
}

/// Maximal runs of consecutive integers in a sorted slot list. For the
/// cyclic variant, a run wrapping k -> 1 is rotated into one run.
fn runs(sorted: &[u16], k: usize, cyclic: bool) -> Vec<Vec<u16>> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let mut runs: Vec<Vec<u16>> = vec![vec![sorted[0]]];
    for &s in &sorted[1..] {
        if s == runs.last().unwrap().last().unwrap() + 1 {
            runs.last_mut().unwrap().push(s);
        } else {
            runs.push(vec![s]);
        }
    }
    if cyclic && runs.len() > 1 {
        let wraps = sorted[0] == 1 && *sorted.last().unwrap() == k as u16;
        if wraps {
            let first = runs.remove(0);
            runs.last_mut().unwrap().extend(first);
        }
    }
    runs
}

/// Intersects the links of the members of `s` inside a descending link: the
/// complex induced on all vertices disjoint from every member of `s`.
pub fn intersect_links(link: &DescendingLink, s: &[DescVertex]) -> LinkIntersection {
    let keep_flags: Vec<bool> =
        link.vertices.iter().map(|v| s.iter().all(|w| v.disjoint(w))).collect();
    let kept: Vec<DescVertex> = link
        .vertices
        .iter()
        .zip(&keep_flags)
        .filter(|(_, &k)| k)
        .map(|(v, _)| *v)
        .collect();
    let (complex, _) = link.complex.full_subcomplex(&keep_flags);

    if s.is_empty() {
        return LinkIntersection {
            kept,
            complex,
            recognized: Some(RecognizedLink { family: link.family, k: link.k, l: link.l }),
        };
    }

    let mut used_slots: Vec<u16> = s.iter().flat_map(|v| v.x_slots()).collect();
    used_slots.sort_unstable();
    used_slots.dedup();
    let mut used_colors: Vec<u16> = s.iter().map(|v| v.p).collect();
    used_colors.sort_unstable();
    used_colors.dedup();
    let remaining_slots: Vec<u16> =
        (1..=link.k as u16).filter(|m| !used_slots.contains(m)).collect();
    let remaining_colors: Vec<u16> =
        (1..=link.l as u16).filter(|p| !used_colors.contains(p)).collect();
    let color_map: HashMap<u16, u16> =
        remaining_colors.iter().enumerate().map(|(i, &p)| (p, i as u16 + 1)).collect();
    let l2 = remaining_colors.len();

    let recognized = match link.family {
        LinkFamily::Qv => {
            let slot_map: HashMap<u16, u16> =
                remaining_slots.iter().enumerate().map(|(i, &m)| (m, i as u16 + 1)).collect();
            let k2 = remaining_slots.len();
            let target =
                abstract_descending_link(LinkFamily::Qv, k2, l2, Some(link.built_dim));
            verify_recognition(&kept, &complex, &slot_map, &color_map, &target)
                .then_some(RecognizedLink { family: LinkFamily::Qv, k: k2, l: l2 })
        }
        LinkFamily::Qf | LinkFamily::Qt => {
            let cyclic = link.family == LinkFamily::Qt;
            let slot_runs = runs(&remaining_slots, link.k, cyclic);
            let mut fertile: Vec<&Vec<u16>> = slot_runs.iter().filter(|r| r.len() >= 2).collect();
            let run: Vec<u16> = match fertile.len() {
                0 => Vec::new(),
                1 => fertile.pop().unwrap().clone(),
                _ => return LinkIntersection { kept, complex, recognized: None },
            };
            let slot_map: HashMap<u16, u16> =
                run.iter().enumerate().map(|(i, &m)| (m, i as u16 + 1)).collect();
            let k2 = run.len();
            // Intersections inside a QT link lose the wraparound and match a
            // QF-type descending link.
            let target = abstract_descending_link(LinkFamily::Qf, k2, l2, Some(link.built_dim));
            verify_recognition(&kept, &complex, &slot_map, &color_map, &target)
                .then_some(RecognizedLink { family: LinkFamily::Qf, k: k2, l: l2 })
        }
    };
    LinkIntersection { kept, complex, recognized }
}

/// A cover of the (n+2)-skeleton of a QF or QT descending link by the
/// skeleton neighborhoods C(m, m+1, beta), m in {1, 2}.
#[derive(Clone, Debug)]
pub struct SkeletonCover {
    pub link: DescendingLink,
    pub centers: Vec<DescVertex>,
    pub skeleton_dim: usize,
}

/// Builds the cover at the proof's parameters. The link is constructed one
/// dimension above the skeleton so membership queries are decidable.
pub fn cover_by_skeleton_neighborhoods(
    family: LinkFamily,
    k: usize,
    l: usize,
    n: usize,
) -> Result<SkeletonCover, LinkError> {
    if family == LinkFamily::Qv {
        return Err(LinkError::BadCube { reason: "the neighborhood cover is for QF and QT".into() });
    }
    let skeleton_dim = n + 2;
    let link = abstract_descending_link(family, k, l, Some(skeleton_dim + 1));
    let mut centers = Vec::new();
    for m in [1u16, 2u16] {
        for p in 1..=l as u16 {
            centers.push(DescVertex { m, n: m + 1, p });
        }
    }
    Ok(SkeletonCover { link, centers, skeleton_dim })
}

impl SkeletonCover {
    fn center_index(&self, c: &DescVertex) -> u32 {
        self.link.vertices.binary_search(c).expect("centers are link vertices") as u32
    }

    /// Is the simplex inside the closed neighborhood of the center?
    fn in_neighborhood(&self, simplex: &[u32], center: &DescVertex) -> bool {
        let ci = self.center_index(center);
        if simplex.binary_search(&ci).is_ok() {
            return self.link.complex.contains(simplex);
        }
        let mut grown = Vec::with_capacity(simplex.len() + 1);
        grown.extend_from_slice(simplex);
        grown.push(ci);
        grown.sort_unstable();
        self.link.complex.contains(&grown)
    }

    /// Checks that every simplex of dimension <= n+2 lies in some member.
    /// Returns the first witness simplex on failure.
    pub fn coverage_certificate(&self) -> Result<(), Vec<u32>> {
        for d in 0..=self.skeleton_dim {
            if let Some(dl) = self.link.complex.simplices(d) {
                for s in dl.iter() {
                    if !self.centers.iter().any(|c| self.in_neighborhood(s, c)) {
                        return Err(s.to_vec());
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that every subfamily of the given size has a common vertex.
    pub fn subfamilies_intersect(&self, size: usize) -> bool {
        let n = self.centers.len();
        if size == 0 || size > n {
            return true;
        }
        let mut choice: Vec<usize> = (0..size).collect();
        loop {
            let members: Vec<&DescVertex> = choice.iter().map(|&i| &self.centers[i]).collect();
            let has_common = (0..self.link.vertices.len() as u32).any(|v| {
                members.iter().all(|c| self.in_neighborhood(&[v], c))
            });
            if !has_common {
                return false;
            }
            // Next combination.
            let mut i = size;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if choice[i] != i + n - size {
                    choice[i] += 1;
                    for j in i + 1..size {
                        choice[j] = choice[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Member subcomplexes (as subcomplexes of the link), for nerve
    /// computations.
    pub fn member_complexes(&self) -> Result<Vec<SimplicialComplex>, LinkError> {
        self.centers
            .iter()
            .map(|c| {
                self.link
                    .complex
                    .simplicial_neighborhood(self.center_index(c), self.skeleton_dim)
                    .map_err(LinkError::from)
            })
            .collect()
    }
}

/// Convenience: the identity vertex over the QV base with bottom label w.
pub fn word_vertex(pres: &Arc<SemigroupPresentation>, w: &Word) -> ComplexVertex {
    ComplexVertex::new(Diagram::identity(pres.clone(), w, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::SemigroupPresentation;

    fn qv_pres() -> Arc<SemigroupPresentation> {
        SemigroupPresentation::qv_base()
    }

    #[test]
    fn descending_vertex_counts() {
        assert_eq!(descending_vertices(LinkFamily::Qv, 3, 2).len(), 12); // k(k-1)l
        assert_eq!(descending_vertices(LinkFamily::Qf, 2, 1).len(), 1);
        assert_eq!(descending_vertices(LinkFamily::Qf, 8, 5).len(), 35); // (k-1)l
        assert_eq!(descending_vertices(LinkFamily::Qt, 8, 5).len(), 40); // kl
        assert_eq!(descending_vertices(LinkFamily::Qv, 2, 1).len(), 2);
    }

    #[test]
    fn qv_2_1_has_no_edges() {
        let link = abstract_descending_link(LinkFamily::Qv, 2, 1, None);
        assert_eq!(link.complex.simplex_count(0), 2);
        assert_eq!(link.complex.simplex_count(1), 0);
    }

    #[test]
    fn full_link_vertex_counts() {
        // k(k-1)l + k
        let link = abstract_link(2, 1, None);
        assert_eq!(link.complex.simplex_count(0), 4);
        let link = abstract_link(3, 2, None);
        assert_eq!(link.complex.simplex_count(0), 15);
    }

    #[test]
    fn links_are_flag() {
        for (k, l) in [(3, 2), (4, 2), (5, 3)] {
            assert!(abstract_descending_link(LinkFamily::Qv, k, l, None).complex.is_flag());
            assert!(abstract_descending_link(LinkFamily::Qf, k, l, None).complex.is_flag());
            assert!(abstract_descending_link(LinkFamily::Qt, k, l, None).complex.is_flag());
            assert!(abstract_link(k, l, None).complex.is_flag());
        }
    }

    #[test]
    fn qf_and_qt_links_are_full_in_qv() {
        for (k, l) in [(4, 2), (5, 3), (6, 3)] {
            let qv = abstract_descending_link(LinkFamily::Qv, k, l, None);
            for fam in [LinkFamily::Qf, LinkFamily::Qt] {
                let sub = abstract_descending_link(fam, k, l, None);
                let injection: Vec<u32> = sub
                    .vertices
                    .iter()
                    .map(|v| qv.vertices.binary_search(v).unwrap() as u32)
                    .collect();
                assert!(SimplicialComplex::full_subcomplex_check(
                    &sub.complex,
                    &qv.complex,
                    &injection
                )
                .unwrap());
            }
        }
    }

    #[test]
    fn diagram_link_matches_abstract_link() {
        let pres = qv_pres();
        for (k, l) in [(2, 1), (3, 2), (4, 3)] {
            let word =
                pres.word_from_str(&format!("{}{}", "x".repeat(k), "a".repeat(l))).unwrap();
            let v = word_vertex(&pres, &word);
            let dl = link_from_diagrams(&v, None).unwrap();
            let al = abstract_link(k, l, None);
            assert_eq!(dl.vertices.len(), al.vertices.len());
            // The vertex kinds coincide and are sorted identically, so the
            // complexes must agree simplex by simplex.
            for (got, expect) in dl.vertices.iter().map(|(kind, _)| kind).zip(&al.vertices) {
                assert_eq!(got, expect);
            }
            assert_eq!(dl.complex, al.complex);
        }
    }

    #[test]
    fn disjointness_examples() {
        let pres = qv_pres();
        let word = pres.word_from_str("xxxxaa").unwrap();
        let v = word_vertex(&pres, &word);
        let dl = link_from_diagrams(&v, Some(1)).unwrap();
        let find = |kind: LinkVertex| {
            dl.vertices.iter().find(|(k, _)| *k == kind).map(|(_, d)| d.clone()).unwrap()
        };
        let d12 = find(LinkVertex::Descending(DescVertex { m: 1, n: 2, p: 1 }));
        let d34 = find(LinkVertex::Descending(DescVertex { m: 3, n: 4, p: 2 }));
        let d13 = find(LinkVertex::Descending(DescVertex { m: 1, n: 3, p: 2 }));
        let d34_same_color = find(LinkVertex::Descending(DescVertex { m: 3, n: 4, p: 1 }));
        assert!(are_disjoint(&d12, &d34).unwrap());
        assert!(!are_disjoint(&d12, &d13).unwrap()); // shares x-slot 1
        assert!(!are_disjoint(&d12, &d34_same_color).unwrap()); // shares the a-slot
    }

    #[test]
    fn intersection_recognition_qv() {
        let link = abstract_descending_link(LinkFamily::Qv, 7, 4, None);
        let s = [DescVertex { m: 1, n: 2, p: 1 }];
        let out = intersect_links(&link, &s);
        assert_eq!(
            out.recognized,
            Some(RecognizedLink { family: LinkFamily::Qv, k: 5, l: 3 })
        );
        let empty = intersect_links(&link, &[]);
        assert_eq!(empty.complex, link.complex);
    }

    #[test]
    fn intersection_recognition_qf_and_qt() {
        let qf = abstract_descending_link(LinkFamily::Qf, 8, 5, None);
        let out = intersect_links(&qf, &[DescVertex { m: 1, n: 2, p: 1 }]);
        // Slots 3..8 survive: one run of length 6.
        assert_eq!(out.recognized, Some(RecognizedLink { family: LinkFamily::Qf, k: 6, l: 4 }));
        let out = intersect_links(&qf, &[DescVertex { m: 2, n: 3, p: 1 }]);
        // Slots {1} and {4..8}: only the length-5 run carries vertices.
        assert_eq!(out.recognized, Some(RecognizedLink { family: LinkFamily::Qf, k: 5, l: 4 }));

        let qt = abstract_descending_link(LinkFamily::Qt, 8, 5, None);
        let out = intersect_links(&qt, &[DescVertex { m: 8, n: 1, p: 2 }]);
        // The cycle breaks into the run 2..7.
        assert_eq!(out.recognized, Some(RecognizedLink { family: LinkFamily::Qf, k: 6, l: 4 }));
        let out = intersect_links(&qt, &[DescVertex { m: 3, n: 4, p: 1 }]);
        // Remaining slots {5..8, 1, 2} wrap into one cyclic run.
        assert_eq!(out.recognized, Some(RecognizedLink { family: LinkFamily::Qf, k: 6, l: 4 }));
    }

    #[test]
    fn marked_square_realization() {
        let pres = SemigroupPresentation::v_base();
        let x = pres.letter("x").unwrap();
        // delta: identity on x^4; psi: two parallel merges (x^4 -> x^2).
        let w4 = pres.word_from_str("xxxx").unwrap();
        let delta = Diagram::identity(pres.clone(), &w4, false);
        let psi = Diagram::new(
            pres.clone(),
            false,
            vec![x, x, x, x, x, x],
            vec![0, 1, 2, 3],
            vec![4, 5],
            vec![
                Transistor { top: vec![0, 1], bottom: vec![4] },
                Transistor { top: vec![2, 3], bottom: vec![5] },
            ],
        )
        .unwrap();
        assert!(psi.is_thin());
        let cube = MarkedCube::new(delta.clone(), psi, vec![0, 1]).unwrap();
        assert_eq!(cube.dimension(), 2);

        let v00 = realize_cube(&cube, &[false, false]).unwrap();
        assert_eq!(v00, ComplexVertex::new(delta.clone()));
        let v11 = realize_cube(&cube, &[true, true]).unwrap();
        assert_eq!(v11.representative().transistor_count(), 2);
        assert_eq!(
            pres.word_string(&v11.representative().bottom_label()),
            "xx"
        );
        let v10 = realize_cube(&cube, &[true, false]).unwrap();
        assert_eq!(v10.representative().transistor_count(), 1);
        assert_eq!(v10.representative().bottom_label().len(), 3);
        assert!(realize_cube(&cube, &[true]).is_err());
    }

    #[test]
    fn filtration_and_orbits() {
        let pres = qv_pres();
        let v = word_vertex(&pres, &pres.word_from_str("xxxaa").unwrap());
        assert_eq!(filtration_level(&v).unwrap(), FiltrationLevel { j: 3 });
        let id = word_vertex(&pres, &pres.word_from_str("x").unwrap());
        assert_eq!(filtration_level(&id).unwrap(), FiltrationLevel { j: 1 });
        let shuffled = word_vertex(&pres, &pres.word_from_str("xaxax").unwrap());
        assert!(same_orbit(&v, &shuffled));
        assert!(!same_orbit(&v, &id));
    }

    #[test]
    fn qf_cover_certificate_at_n0() {
        let cover = cover_by_skeleton_neighborhoods(LinkFamily::Qf, 5, 3, 0).unwrap();
        assert!(cover.coverage_certificate().is_ok());
    }
}
