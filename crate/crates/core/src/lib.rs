//! Computation kernel for diagram groups over semigroup presentations,
//! specialized to the quasi-automorphism groups QF, QT, and QV of the
//! infinite binary tree.
//!
//! The crate solves the word problem by confluent dipole rewriting, converts
//! between diagram and tree-pair representations, constructs descending-link
//! simplicial complexes, and verifies their connectivity at desk scale by
//! exact homology.

pub mod canonical;
pub mod diagram;
pub mod links;
pub mod par;
pub mod planarity;
pub mod presentation;
pub mod qv;
pub mod rewriting;
pub mod sampling;
pub mod simplicial;
pub mod treepair;

pub use canonical::{canonical_code, is_equivalent, CanonicalCode, CodeFlavor};
pub use diagram::{Diagram, DiagramViolation, Transistor};
pub use presentation::{Letter, SemigroupPresentation, StandardPresentation, Word};
pub use rewriting::{find_dipoles, is_reduced, reduce, DipoleSite};
