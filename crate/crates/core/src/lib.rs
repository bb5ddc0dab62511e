//! Construction, certification, and stress-testing of finite-dimensional
//! subspaces of C₀(ℝⁿ) whose nonzero elements attain a unique global
//! maximum.
//!
//! The library ships an explicit n-dimensional subspace with that property
//! (built from coordinate projections composed with a sphere-inversion
//! compactification), a grid certifier that decides uniqueness of maxima
//! numerically, the quantitative machinery of alternating subspaces, and a
//! falsification pipeline that hunts for elements with tied maxima in
//! higher-dimensional candidate subspaces.

pub mod alternating;
pub mod basis;
pub mod certify;
pub mod cone;
pub mod error;
pub mod falsify;
pub mod grid;
pub mod pattern;
pub mod point;
pub mod sampling;
pub mod simplex;
pub mod subspace;
pub mod witness;

pub use alternating::{
    estimate_norm_equivalence, extract_alternating, is_alternating, sign_bounds, tail_radius,
    ExtractionResult, NormEquivalence, SignBounds, TailRadius,
};
pub use basis::{BasisFunction, ComboTerm, Family, SampleTable};
pub use certify::{
    brute_force_argmax, certify_max, compute_min, CertifyParams, MaxCertificate, MinResult,
};
pub use error::{Error, Result};
pub use falsify::{
    conjecture_probe, falsify, family_subspace, restrict_to_ball, reverify_witness,
    ExperimentReport, FalsifyOptions, Verdict, ViolationWitness,
};
pub use grid::{build_grid, build_grid_with_budget, TwoChartGrid};
pub use point::{CoefVector, EuclideanPoint};
pub use subspace::{Element, Subspace};
pub use witness::{analytic_max, witness_basis, AnalyticMaxResult};
