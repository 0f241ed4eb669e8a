//! Explicit finite simplicial complexes.
//!
//! Simplices are stored per dimension as flat arrays of ascending vertex
//! indices, rows sorted lexicographically. A complex may be a subcomplex of
//! an ambient one, in which case it shares the ambient vertex labelling and
//! its dimension-0 list is a subset.

use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("complex stores dimension {stored} but the operation needs dimension {needed}")]
    InsufficientDimension { stored: usize, needed: usize },
    #[error("vertex {v} out of range")]
    UnknownVertex { v: u32 },
    #[error("empty complex")]
    Empty,
    #[error("vertex injection is not injective")]
    NotInjective,
}

/// Simplices of one dimension: rows of `stride` ascending vertex indices,
/// sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SimplexList {
    pub stride: usize,
    pub data: Vec<u32>,
}

impl SimplexList {
    pub fn new(stride: usize) -> Self {
        SimplexList { stride, data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        if self.stride == 0 {
            0
        } else {
            self.data.len() / self.stride
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.stride.max(1))
    }

    pub fn push(&mut self, simplex: &[u32]) {
        debug_assert_eq!(simplex.len(), self.stride);
        self.data.extend_from_slice(simplex);
    }

    fn sort_rows(&mut self) {
        if self.stride == 0 || self.data.is_empty() {
            return;
        }
        let mut rows: Vec<&[u32]> = self.data.chunks_exact(self.stride).collect();
        rows.sort_unstable();
        rows.dedup();
        let mut data = Vec::with_capacity(rows.len() * self.stride);
        for r in rows {
            data.extend_from_slice(r);
        }
        self.data = data;
    }

    pub fn position(&self, simplex: &[u32]) -> Option<usize> {
        if simplex.len() != self.stride || self.stride == 0 {
            return None;
        }
        let n = self.len();
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        self.position(simplex).is_some()
    }
}

/// Fixed-capacity bitset over vertex indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter_map(move |b| if w & (1u64 << b) != 0 { Some((wi * 64 + b) as u32) } else { None })
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialComplex {
    vertex_labels: Vec<String>,
    dims: Vec<SimplexList>,
}

impl SimplicialComplex {
    /// Builds from an explicit simplex list, closing downward under faces.
    pub fn from_maximal(vertex_labels: Vec<String>, maximal: &[Vec<u32>]) -> SimplicialComplex {
        let mut dims: Vec<SimplexList> = Vec::new();
        let mut stack: Vec<Vec<u32>> = maximal
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
        while let Some(s) = stack.pop() {
            if s.is_empty() || !seen.insert(s.clone()) {
                continue;
            }
            let d = s.len() - 1;
            while dims.len() <= d {
                dims.push(SimplexList::new(dims.len() + 1));
            }
            dims[d].push(&s);
            if d > 0 {
                for omit in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(omit);
                    stack.push(face);
                }
            }
        }
        for dl in &mut dims {
            dl.sort_rows();
        }
        SimplicialComplex { vertex_labels, dims }
    }

    /// Builds from already-closed per-dimension lists (sorted or not).
    pub fn from_parts(vertex_labels: Vec<String>, mut dims: Vec<SimplexList>) -> SimplicialComplex {
        for dl in &mut dims {
            dl.sort_rows();
        }
        while dims.last().is_some_and(SimplexList::is_empty) {
            dims.pop();
        }
        SimplicialComplex { vertex_labels, dims }
    }

    /// Enumerates all cliques of the adjacency relation with at most
    /// `max_dim + 1` vertices; the result is a flag complex (truncated at
    /// `max_dim` if the relation has larger cliques).
    pub fn from_cliques(
        vertex_labels: Vec<String>,
        adjacent: impl Fn(u32, u32) -> bool,
        max_dim: usize,
    ) -> SimplicialComplex {
        let n = vertex_labels.len();
        let mut adj: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                if adjacent(i, j) {
                    adj[i as usize].insert(j);
                    adj[j as usize].insert(i);
                }
            }
        }
        let mut dims: Vec<SimplexList> = vec![SimplexList::new(1)];
        for v in 0..n as u32 {
            dims[0].push(&[v]);
        }
        // after[v] = vertices strictly beyond v, so cliques enumerate in
        // ascending order.
        let mut after: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        for v in 0..n {
            for u in (v + 1)..n {
                after[v].insert(u as u32);
            }
        }

        fn extend(
            clique: &mut Vec<u32>,
            candidates: &BitSet,
            adj: &[BitSet],
            after: &[BitSet],
            dims: &mut Vec<SimplexList>,
            max_dim: usize,
        ) {
            for v in candidates.iter() {
                clique.push(v);
                let d = clique.len() - 1;
                while dims.len() <= d {
                    dims.push(SimplexList::new(dims.len() + 1));
                }
                dims[d].push(clique);
                if d < max_dim {
                    let mut next = candidates.clone();
                    next.intersect_with(&adj[v as usize]);
                    next.intersect_with(&after[v as usize]);
                    if next.any() {
                        extend(clique, &next, adj, after, dims, max_dim);
                    }
                }
                clique.pop();
            }
        }

        if max_dim >= 1 {
            let mut clique = Vec::new();
            for v in 0..n as u32 {
                clique.push(v);
                let mut cands = adj[v as usize].clone();
                cands.intersect_with(&after[v as usize]);
                if cands.any() {
                    extend(&mut clique, &cands, &adj, &after, &mut dims, max_dim);
                }
                clique.pop();
            }
        }
        SimplicialComplex::from_parts(vertex_labels, dims)
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertex_labels
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.first().map_or(0, SimplexList::len)
    }

    /// Highest dimension with stored simplices.
    pub fn max_dim(&self) -> Option<usize> {
        if self.dims.is_empty() {
            None
        } else {
            Some(self.dims.len() - 1)
        }
    }

    pub fn simplices(&self, d: usize) -> Option<&SimplexList> {
        self.dims.get(d)
    }

    pub fn simplex_count(&self, d: usize) -> usize {
        self.dims.get(d).map_or(0, SimplexList::len)
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        if simplex.is_empty() {
            return false;
        }
        self.dims.get(simplex.len() - 1).is_some_and(|dl| dl.contains(simplex))
    }

    /// Adjacency bitsets of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<BitSet> {
        let n = self.vertex_labels.len();
        let mut adj: Vec<BitSet> = (0..n).map(|_| BitSet::new(n)).collect();
        if let Some(edges) = self.dims.get(1) {
            for e in edges.iter() {
                adj[e[0] as usize].insert(e[1]);
                adj[e[1] as usize].insert(e[0]);
            }
        }
        adj
    }

    /// True iff every clique of the 1-skeleton spans a stored simplex.
    /// Inductively, it suffices that for every stored simplex S and vertex v
    /// beyond max(S) adjacent to all of S, the simplex S + v is stored.
    pub fn is_flag(&self) -> bool {
        let adj = self.adjacency();
        for d in 1..self.dims.len() {
            for s in self.dims[d].iter() {
                let mut cands = adj[s[0] as usize].clone();
                for &v in &s[1..] {
                    cands.intersect_with(&adj[v as usize]);
                }
                let mut grown = Vec::with_capacity(d + 2);
                for v in cands.iter() {
                    if v <= s[d] {
                        continue;
                    }
                    grown.clear();
                    grown.extend_from_slice(s);
                    grown.push(v);
                    if !self.contains(&grown) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Full subcomplex on the kept vertices, relabeled densely. Also returns
    /// the kept original indices in order.
    pub fn full_subcomplex(&self, keep: &[bool]) -> (SimplicialComplex, Vec<u32>) {
        let mut old_ids = Vec::new();
        let mut new_id = vec![u32::MAX; self.vertex_labels.len()];
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_id[v] = old_ids.len() as u32;
                old_ids.push(v as u32);
            }
        }
        let labels = old_ids.iter().map(|&v| self.vertex_labels[v as usize].clone()).collect();
        let mut dims = Vec::new();
        for (d, dl) in self.dims.iter().enumerate() {
            let mut out = SimplexList::new(d + 1);
            'rows: for s in dl.iter() {
                let mut mapped = Vec::with_capacity(s.len());
                for &v in s {
                    if !keep[v as usize] {
                        continue 'rows;
                    }
                    mapped.push(new_id[v as usize]);
                }
                out.push(&mapped);
            }
            dims.push(out);
        }
        (SimplicialComplex::from_parts(labels, dims), old_ids)
    }

    /// Checks that `sub` sits inside `ambient` as a full subcomplex under
    /// the vertex injection: every ambient simplex supported on injected
    /// vertices pulls back to a simplex of `sub`.
    pub fn full_subcomplex_check(
        sub: &SimplicialComplex,
        ambient: &SimplicialComplex,
        injection: &[u32],
    ) -> Result<bool, ComplexError> {
        let n = ambient.vertex_labels.len();
        let mut back = vec![u32::MAX; n];
        for (i, &v) in injection.iter().enumerate() {
            if v as usize >= n {
                return Err(ComplexError::UnknownVertex { v });
            }
            if back[v as usize] != u32::MAX {
                return Err(ComplexError::NotInjective);
            }
            back[v as usize] = i as u32;
        }
        for dl in &ambient.dims {
            'rows: for s in dl.iter() {
                let mut pulled = Vec::with_capacity(s.len());
                for &v in s {
                    if back[v as usize] == u32::MAX {
                        continue 'rows;
                    }
                    pulled.push(back[v as usize]);
                }
                pulled.sort_unstable();
                if !sub.contains(&pulled) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The `skeleton_dim`-skeleton of the simplicial neighborhood of `v`:
    /// all simplices S with dim S <= skeleton_dim such that S + {v} is a
    /// simplex. Needs simplices stored one dimension above the skeleton.
    pub fn simplicial_neighborhood(
        &self,
        v: u32,
        skeleton_dim: usize,
    ) -> Result<SimplicialComplex, ComplexError> {
        if v as usize >= self.vertex_labels.len() {
            return Err(ComplexError::UnknownVertex { v });
        }
        self.max_dim().ok_or(ComplexError::Empty)?;
        // Membership of a skeleton_dim simplex is decided one dimension up,
        // so callers must build the ambient complex to skeleton_dim + 1.
        let mut dims = Vec::new();
        for d in 0..=skeleton_dim.min(self.dims.len().saturating_sub(1)) {
            let mut out = SimplexList::new(d + 1);
            let mut grown = Vec::with_capacity(d + 2);
            for s in self.dims[d].iter() {
                if s.binary_search(&v).is_ok() {
                    out.push(s);
                    continue;
                }
                grown.clear();
                grown.extend_from_slice(s);
                grown.push(v);
                grown.sort_unstable();
                if self.contains(&grown) {
                    out.push(s);
                }
            }
            dims.push(out);
        }
        Ok(SimplicialComplex::from_parts(self.vertex_labels.clone(), dims))
    }

    /// Vertices present in this (sub)complex, as a bitset over the shared
    /// labelling.
    pub fn vertex_set(&self) -> BitSet {
        let mut set = BitSet::new(self.vertex_labels.len());
        if let Some(dl) = self.dims.first() {
            for s in dl.iter() {
                set.insert(s[0]);
            }
        }
        set
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "vertex_labels".into(),
            Value::Array(self.vertex_labels.iter().map(|l| Value::String(l.clone())).collect()),
        );
        obj.insert(
            "simplices_by_dim".into(),
            Value::Array(
                self.dims
                    .iter()
                    .map(|dl| {
                        Value::Array(
                            dl.iter()
                                .map(|s| {
                                    Value::Array(s.iter().map(|&v| Value::from(v as u64)).collect())
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        );
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<SimplicialComplex, String> {
        let obj = v.as_object().ok_or("complex must be a JSON object")?;
        let vertex_labels: Vec<String> = obj
            .get("vertex_labels")
            .and_then(Value::as_array)
            .ok_or("missing vertex_labels")?
            .iter()
            .map(|l| l.as_str().map(str::to_string).ok_or("labels must be strings"))
            .collect::<Result<_, _>>()?;
        let mut dims = Vec::new();
        for (d, list) in obj
            .get("simplices_by_dim")
            .and_then(Value::as_array)
            .ok_or("missing simplices_by_dim")?
            .iter()
            .enumerate()
        {
            let mut dl = SimplexList::new(d + 1);
            for s in list.as_array().ok_or("each dimension must be an array")? {
                let simplex: Vec<u32> = s
                    .as_array()
                    .ok_or("each simplex must be an array")?
                    .iter()
                    .map(|x| x.as_u64().map(|v| v as u32).ok_or("vertex indices must be integers"))
                    .collect::<Result<_, _>>()?;
                if simplex.len() != d + 1 {
                    return Err(format!("simplex {simplex:?} has wrong size for dimension {d}"));
                }
                if simplex.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(format!("simplex {simplex:?} is not strictly ascending"));
                }
                if simplex.iter().any(|&v| v as usize >= vertex_labels.len()) {
                    return Err(format!("simplex {simplex:?} references unknown vertices"));
                }
                dl.push(&simplex);
            }
            dims.push(dl);
        }
        Ok(SimplicialComplex::from_parts(vertex_labels, dims))
    }
}

/// Nerve of a cover: one vertex per member, a simplex for every subfamily
/// with a common vertex, up to `max_dim`.
pub fn nerve_of_cover(members: &[SimplicialComplex], max_dim: usize) -> SimplicialComplex {
    let labels: Vec<String> = (0..members.len()).map(|i| format!("N{i}")).collect();
    let sets: Vec<BitSet> = members.iter().map(SimplicialComplex::vertex_set).collect();

    let mut dims: Vec<SimplexList> = vec![SimplexList::new(1)];
    for i in 0..members.len() as u32 {
        if sets[i as usize].any() {
            dims[0].push(&[i]);
        }
    }

    fn extend(
        simplex: &mut Vec<u32>,
        common: &BitSet,
        sets: &[BitSet],
        dims: &mut Vec<SimplexList>,
        max_dim: usize,
    ) {
        let last = *simplex.last().unwrap();
        for next in (last + 1)..sets.len() as u32 {
            let mut meet = common.clone();
            meet.intersect_with(&sets[next as usize]);
            if !meet.any() {
                continue;
            }
            simplex.push(next);
            let d = simplex.len() - 1;
            while dims.len() <= d {
                dims.push(SimplexList::new(dims.len() + 1));
            }
            dims[d].push(simplex);
            if d < max_dim {
                extend(simplex, &meet, sets, dims, max_dim);
            }
            simplex.pop();
        }
    }

    if max_dim >= 1 {
        for i in 0..members.len() as u32 {
            if sets[i as usize].any() {
                let mut simplex = vec![i];
                extend(&mut simplex, &sets[i as usize], &sets, &mut dims, max_dim);
            }
        }
    }
    SimplicialComplex::from_parts(labels, dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn face_closure_and_counts() {
        let k = SimplicialComplex::from_maximal(labels(3), &[vec![0, 1, 2]]);
        assert_eq!(k.simplex_count(0), 3);
        assert_eq!(k.simplex_count(1), 3);
        assert_eq!(k.simplex_count(2), 1);
        assert!(k.contains(&[0, 2]));
        assert!(!k.contains(&[3]));
    }

    #[test]
    fn flag_detection() {
        let filled = SimplicialComplex::from_maximal(labels(3), &[vec![0, 1, 2]]);
        assert!(filled.is_flag());
        let hollow =
            SimplicialComplex::from_maximal(labels(3), &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(!hollow.is_flag());
        let boundary = SimplicialComplex::from_maximal(
            labels(4),
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        );
        assert!(!boundary.is_flag());
        let solid = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1, 2, 3]]);
        assert!(solid.is_flag());
    }

    #[test]
    fn cliques_build_flag_complexes() {
        // 4-cycle: flag, no triangles.
        let square = SimplicialComplex::from_cliques(
            labels(4),
            |i, j| matches!((i, j), (0, 1) | (1, 2) | (2, 3) | (0, 3)),
            3,
        );
        assert_eq!(square.simplex_count(1), 4);
        assert_eq!(square.simplex_count(2), 0);
        assert!(square.is_flag());
    }

    #[test]
    fn full_subcomplex_extraction() {
        let k = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1, 2], vec![2, 3]]);
        let keep = vec![true, false, true, true];
        let (sub, old) = k.full_subcomplex(&keep);
        assert_eq!(old, vec![0, 2, 3]);
        assert_eq!(sub.simplex_count(0), 3);
        assert_eq!(sub.simplex_count(1), 2); // {0,2} and {2,3} relabeled
        assert_eq!(sub.simplex_count(2), 0);
    }

    #[test]
    fn full_subcomplex_check_detects_missing_cells() {
        let ambient = SimplicialComplex::from_maximal(labels(3), &[vec![0, 1, 2]]);
        let hollow =
            SimplicialComplex::from_maximal(labels(3), &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(!SimplicialComplex::full_subcomplex_check(&hollow, &ambient, &[0, 1, 2]).unwrap());
        let single = SimplicialComplex::from_maximal(labels(1), &[vec![0]]);
        assert!(SimplicialComplex::full_subcomplex_check(&single, &ambient, &[1]).unwrap());
    }

    #[test]
    fn neighborhood_of_a_vertex() {
        // Path 0-1-2 plus triangle {1,2,3}.
        let k = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1], vec![1, 2, 3]]);
        let nb = k.simplicial_neighborhood(1, 2).unwrap();
        assert!(nb.contains(&[0]));
        assert!(nb.contains(&[2, 3]));
        assert!(nb.contains(&[1, 2, 3]));
        // {0} yes, but {0,2} is not a simplex at all.
        assert!(!nb.contains(&[0, 2]));
    }

    #[test]
    fn nerve_examples() {
        let a = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1]]);
        let b = SimplicialComplex::from_maximal(labels(4), &[vec![1, 2]]);
        let c = SimplicialComplex::from_maximal(labels(4), &[vec![3]]);
        // a and b share vertex 1; c is disjoint from both.
        let nerve = nerve_of_cover(&[a.clone(), b.clone(), c], 2);
        assert_eq!(nerve.simplex_count(0), 3);
        assert_eq!(nerve.simplex_count(1), 1);
        let nerve2 = nerve_of_cover(&[a, b], 2);
        assert_eq!(nerve2.simplex_count(1), 1);
    }

    #[test]
    fn json_round_trip() {
        let k = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1, 2], vec![2, 3]]);
        let js = k.to_json();
        let back = SimplicialComplex::from_json(&js).unwrap();
        assert_eq!(back, k);
    }
}
