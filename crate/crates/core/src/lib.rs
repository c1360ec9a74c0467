//! Conway-polynomial skein engine and the asymptotic invariant `M` of oriented
//! three-component links.
//!
//! Diagrams are signed crossing data ([`LinkDiagram`]) or braid-like stacks
//! ([`SliceDiagram`]). The skein engine computes Conway polynomials, and the
//! [`invariants`] module assembles the tower `β`, `γ`, `M̃`, `M̃ᵃᵛ` and `M`.

pub mod alexander;
pub mod braid;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod families;
pub mod invariants;
pub mod io;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod skein;
pub mod slices;

pub use braid::BraidWord;
pub use diagram::{Crossing, LinkDiagram, LinkingMatrix, Sign};
pub use error::{DiagramError, InputError, InvariantError};
pub use poly::{extract_coeff, IntPolynomial};
pub use rational::Rational;
pub use slices::{SliceCrossing, SliceDiagram};
