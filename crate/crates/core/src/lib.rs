//! Distance geometry of kissing spheres.
//!
//! Spheres tangent to a common hyperplane carry a Möbius-invariant distance.
//! Their squared distances embed isometrically into the future lightcone of
//! Minkowski space, which turns realizability questions into eigenvalue
//! counts.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod completion;
pub mod embed;
pub mod io;
pub mod kissing;
pub mod lightcone;
pub mod numkernel;
pub mod spheres;

pub use embed::{
    check_euclidean, check_kissing, construct_embedding, schur_construction, verify_relations7,
    Certificate, Method, SquaredDistanceMatrix, Verdict,
};
pub use kissing::{dist_k, KissingSphere};
pub use lightcone::{lorentz_align, psi, psi_inverse, LorentzMap, MinkowskiVector};
pub use numkernel::{Inertia, SymMatrix, Tolerance};
pub use completion::{complete_chordal, is_chordal, non_chordal_witness, LengthGraph};
pub use spheres::{hyperboloid_embed, separation, EuclideanSphere};
