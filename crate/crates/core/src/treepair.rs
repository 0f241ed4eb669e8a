//! Finite binary trees, vertex addresses, and tree pairs.
//!
//! A tree-pair `((T1, sigma, T2), f)` represents a quasi-automorphism: the
//! leaf bijection `sigma` carries whole subtrees, and the interior-node
//! bijection `f` carries the finitely many remaining vertices.

use std::fmt;

use serde_json::{Map, Value};
use thiserror::Error;

/// A vertex of the infinite binary tree: a finite bit sequence. The empty
/// sequence is the root.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub Vec<u8>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn parse(s: &str) -> Result<Address, TreePairError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(TreePairError::BadAddress { text: s.to_string() }),
            }
        }
        Ok(Address(bits))
    }

    pub fn child(&self, bit: u8) -> Address {
        let mut bits = self.0.clone();
        bits.push(bit);
        Address(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Concatenates a suffix onto this address.
    pub fn join(&self, suffix: &[u8]) -> Address {
        let mut bits = self.0.clone();
        bits.extend_from_slice(suffix);
        Address(bits)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TreePairError {
    #[error("address {text:?} contains characters other than 0 and 1")]
    BadAddress { text: String },
    #[error("leaf set is not a complete antichain: {reason}")]
    NotACompleteAntichain { reason: String },
    #[error("trees have different leaf counts ({left} vs {right})")]
    LeafCountMismatch { left: usize, right: usize },
    #[error("{what} is not a bijection on the expected index range")]
    NotABijection { what: &'static str },
    #[error("interior address {address:?} is not an interior node of the tree")]
    UnknownInterior { address: String },
}

/// A finite rooted ordered binary tree, stored as its leaf addresses in
/// lexicographic (left-to-right) order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteBinaryTree {
    leaves: Vec<Address>,
}

impl FiniteBinaryTree {
    /// The tree with a single leaf at the root.
    pub fn trivial() -> Self {
        FiniteBinaryTree { leaves: vec![Address::root()] }
    }

    /// Validates that the addresses form a complete antichain: prefix-free,
    /// and every interior node has both children present in the tree.
    pub fn new(mut leaves: Vec<Address>) -> Result<Self, TreePairError> {
        leaves.sort();
        if leaves.is_empty() {
            return Err(TreePairError::NotACompleteAntichain { reason: "no leaves".into() });
        }
        for pair in leaves.windows(2) {
            if pair[0] == pair[1] {
                return Err(TreePairError::NotACompleteAntichain {
                    reason: format!("duplicate leaf {}", pair[0]),
                });
            }
            if pair[0].is_prefix_of(&pair[1]) {
                return Err(TreePairError::NotACompleteAntichain {
                    reason: format!("leaf {} is a prefix of leaf {}", pair[0], pair[1]),
                });
            }
        }
        let tree = FiniteBinaryTree { leaves };
        // Completeness: walking from the root, every node is a leaf or has
        // both children covered. Equivalent to the leaf count identity
        // (interior count = leaf count - 1) plus prefix-freeness, but checked
        // directly for a precise error.
        let mut stack = vec![Address::root()];
        let mut seen_leaves = 0usize;
        while let Some(node) = stack.pop() {
            if tree.leaves.binary_search(&node).is_ok() {
                seen_leaves += 1;
                continue;
            }
            if !tree.leaves.iter().any(|l| node.is_prefix_of(l)) {
                return Err(TreePairError::NotACompleteAntichain {
                    reason: format!("no leaf below interior node {node}"),
                });
            }
            stack.push(node.child(0));
            stack.push(node.child(1));
        }
        if seen_leaves != tree.leaves.len() {
            return Err(TreePairError::NotACompleteAntichain {
                reason: "unreachable leaves".into(),
            });
        }
        Ok(tree)
    }

    pub fn leaves(&self) -> &[Address] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Interior nodes (proper prefixes of leaves), in lexicographic order,
    /// which coincides with depth-first 0-before-1 order.
    pub fn interiors(&self) -> Vec<Address> {
        let mut out: Vec<Address> = Vec::new();
        for leaf in &self.leaves {
            for cut in 0..leaf.len() {
                out.push(Address(leaf.0[..cut].to_vec()));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_leaf(&self, v: &Address) -> bool {
        self.leaves.binary_search(v).is_ok()
    }

    pub fn leaf_index(&self, v: &Address) -> Option<usize> {
        self.leaves.binary_search(v).ok()
    }

    /// Maximum leaf depth.
    pub fn depth(&self) -> usize {
        self.leaves.iter().map(Address::len).max().unwrap_or(0)
    }
}

/// `((t1, sigma, t2), f)`: `sigma[i]` is the index (in lexicographic order)
/// of the t2-leaf image of the i-th t1-leaf, and `f[j]` likewise for
/// interior nodes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreePair {
    pub t1: FiniteBinaryTree,
    pub t2: FiniteBinaryTree,
    pub sigma: Vec<usize>,
    pub f: Vec<usize>,
}

fn check_permutation(perm: &[usize], n: usize, what: &'static str) -> Result<(), TreePairError> {
    if perm.len() != n {
        return Err(TreePairError::NotABijection { what });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(TreePairError::NotABijection { what });
        }
        seen[p] = true;
    }
    Ok(())
}

impl TreePair {
    pub fn new(
        t1: FiniteBinaryTree,
        t2: FiniteBinaryTree,
        sigma: Vec<usize>,
        f: Vec<usize>,
    ) -> Result<Self, TreePairError> {
        if t1.leaf_count() != t2.leaf_count() {
            return Err(TreePairError::LeafCountMismatch {
                left: t1.leaf_count(),
                right: t2.leaf_count(),
            });
        }
        check_permutation(&sigma, t1.leaf_count(), "sigma")?;
        check_permutation(&f, t1.leaf_count().saturating_sub(1), "f")?;
        Ok(TreePair { t1, t2, sigma, f })
    }

    pub fn trivial() -> Self {
        TreePair {
            t1: FiniteBinaryTree::trivial(),
            t2: FiniteBinaryTree::trivial(),
            sigma: vec![0],
            f: Vec::new(),
        }
    }

    /// The inverse element: trees swapped, both bijections inverted.
    pub fn inverse(&self) -> TreePair {
        let invert = |perm: &[usize]| {
            let mut inv = vec![0usize; perm.len()];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            inv
        };
        TreePair {
            t1: self.t2.clone(),
            t2: self.t1.clone(),
            sigma: invert(&self.sigma),
            f: invert(&self.f),
        }
    }

    /// Applies the represented quasi-automorphism to one vertex: descendants
    /// of t1-leaves travel with their leaf under `sigma`, interior nodes of
    /// t1 map under `f`.
    pub fn apply(&self, v: &Address) -> Address {
        for (i, leaf) in self.t1.leaves().iter().enumerate() {
            if leaf.is_prefix_of(v) {
                return self.t2.leaves()[self.sigma[i]].join(&v.0[leaf.len()..]);
            }
        }
        let interiors = self.t1.interiors();
        let j = interiors
            .binary_search(v)
            .expect("an address is below a leaf or is an interior node");
        let targets = self.t2.interiors();
        targets[self.f[j]].clone()
    }

    /// True iff `sigma` preserves the left-to-right leaf order.
    pub fn sigma_is_order_preserving(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &s)| s == i)
    }

    /// True iff `sigma` is a rotation of the cyclic leaf order.
    pub fn sigma_is_rotation(&self) -> bool {
        let n = self.sigma.len();
        (0..n).any(|r| (0..n).all(|i| self.sigma[i] == (i + r) % n))
    }

    pub fn to_json(&self) -> Value {
        let addr_list = |addrs: &[Address]| {
            Value::Array(addrs.iter().map(|a| Value::String(a.to_string())).collect())
        };
        let interiors1 = self.t1.interiors();
        let interiors2 = self.t2.interiors();
        let mut obj = Map::new();
        obj.insert("t1_leaves".into(), addr_list(self.t1.leaves()));
        obj.insert("t2_leaves".into(), addr_list(self.t2.leaves()));
        obj.insert(
            "sigma".into(),
            Value::Array(self.sigma.iter().map(|&s| Value::from(s as u64)).collect()),
        );
        obj.insert(
            "f".into(),
            Value::Array(
                self.f
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| {
                        Value::Array(vec![
                            Value::String(interiors1[j].to_string()),
                            Value::String(interiors2[t].to_string()),
                        ])
                    })
                    .collect(),
            ),
        );
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<TreePair, String> {
        let obj = v.as_object().ok_or("tree pair must be a JSON object")?;
        let addresses = |key: &str| -> Result<Vec<Address>, String> {
            obj.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("missing {key} array"))?
                .iter()
                .map(|a| {
                    a.as_str()
                        .ok_or_else(|| format!("{key} entries must be strings"))
                        .and_then(|s| Address::parse(s).map_err(|e| e.to_string()))
                })
                .collect()
        };
        let t1 = FiniteBinaryTree::new(addresses("t1_leaves")?).map_err(|e| e.to_string())?;
        let t2 = FiniteBinaryTree::new(addresses("t2_leaves")?).map_err(|e| e.to_string())?;
        let sigma: Vec<usize> = obj
            .get("sigma")
            .and_then(Value::as_array)
            .ok_or("missing sigma array")?
            .iter()
            .map(|s| s.as_u64().map(|v| v as usize).ok_or("sigma entries must be integers"))
            .collect::<Result<_, _>>()?;
        let interiors1 = t1.interiors();
        let interiors2 = t2.interiors();
        let mut f = vec![usize::MAX; interiors1.len()];
        for pair in obj.get("f").and_then(Value::as_array).ok_or("missing f array")? {
            let pair = pair.as_array().filter(|p| p.len() == 2).ok_or("f entries must be pairs")?;
            let from = Address::parse(pair[0].as_str().ok_or("f addresses must be strings")?)
                .map_err(|e| e.to_string())?;
            let to = Address::parse(pair[1].as_str().ok_or("f addresses must be strings")?)
                .map_err(|e| e.to_string())?;
            let j = interiors1
                .binary_search(&from)
                .map_err(|_| format!("{from} is not an interior node of t1"))?;
            let t = interiors2
                .binary_search(&to)
                .map_err(|_| format!("{to} is not an interior node of t2"))?;
            f[j] = t;
        }
        if f.iter().any(|&t| t == usize::MAX) {
            return Err("f does not cover every interior node of t1".into());
        }
        TreePair::new(t1, t2, sigma, f).map_err(|e| e.to_string())
    }
}
