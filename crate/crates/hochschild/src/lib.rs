//! Exact computation of Gerstenhaber brackets on Hochschild cohomology.
//!
//! The library builds truncated free bimodule resolutions (bar, Koszul,
//! cyclic minimal), equips them with diagonals and contracting homotopies,
//! and computes circle products and brackets of cochains at the chain level,
//! entirely in exact arithmetic over ℚ or F_p.
//!
//! The two worked instances are the Koszul complex of a polynomial ring
//! (where the bracket reduces to the Schouten–Nijenhuis bracket on polyvector
//! fields) and the minimal resolution of `k[x]/(x^p)` in characteristic p
//! (where closed-form brackets are known in all degrees).

pub mod algebra;
pub mod bar;
pub mod cochain;
pub mod complex;
pub mod cyclic;
pub mod homotopy;
pub mod koszul;
pub mod linear;
pub mod map;
pub mod scalar;
pub mod text;
pub mod verify;

pub use algebra::{ARef, Algebra, AlgebraElement, AlgebraError, AlgebraKind, Monomial};
pub use bar::{circle_on_word, commutator_sign, BarEval, BarResolution};
pub use cochain::{
    coboundary_witness, cocycle_basis, cohomology_equal, Cochain, CohomologyRelation,
};
pub use complex::{BimoduleElement, CRef, ChainError, Complex, ComplexKind, ComplexOps, Generator};
pub use cyclic::{
    cyclic_diagonal, cyclic_iota, cyclic_phi_explicit, cyclic_pi, CyclicHomotopy, CyclicInstance,
};
pub use homotopy::{
    phi_bracket, phi_bracket_checked, phi_circle, phi_circle_checked, transported_bracket,
    transported_circle, ContractingHomotopy, HypothesisReport, PullbackCochain, ResolutionPackage,
};
pub use koszul::{
    koszul_diagonal, koszul_iota, koszul_phi, koszul_pi, orbit_sum, sn_bracket, KoszulHomotopy,
    KoszulInstance, PolyVectorField,
};
pub use map::{
    apply_at_factor, apply_middle_cochain, augmentation_difference, cup, middle_map, tensor_map,
    BimoduleMap,
};
pub use scalar::{Field, Scalar, ScalarError};
