//! Finite categories, arrow-category towers, and internal-symmetry
//! verifiers.
//!
//! The crate models a finite category as explicit object/arrow tables plus
//! a total composition table, then layers on top of it:
//!
//! - arrow categories and iterated towers of them ([`comma`]);
//! - a hierarchy of internal-symmetry structures, from a duality between
//!   arrows and objects up to full invertibility, with checkers and
//!   bounded searchers for each layer ([`symmetry`]);
//! - the endofunctor induced by such a structure together with its
//!   adjunction and the monoid acting through it ([`internal`]);
//! - a concrete model built from finite sets and functions ([`finset`]);
//! - a plain-text file format for categories and their structures
//!   ([`format`]).
//!
//! Every checker is an exhaustive (or explicitly budgeted) scan that either
//! certifies a law or returns a concrete counterexample witness, and every
//! search resolves ties toward the lowest id, so all results are
//! reproducible run to run.

pub mod cat;
pub mod comma;
pub mod finset;
pub mod format;
pub mod functor;
pub mod internal;
pub mod samples;
pub mod symmetry;

pub use cat::{ArrId, CatError, CategoryBuilder, FiniteCategory, ObjId, Side, SkeletonMaps};
pub use comma::{build_arrow_category, ArrowCategory, CommaError, LevelCaps, LevelTower};
pub use finset::{
    build_model, check_set_claims, graph_of, ground_rep, ClaimMode, ClaimResult, Elem, FinSetCaps,
    FinSetError, FinSetModel, SetArr, SetClaimsReport,
};
pub use format::{
    parse_category_file, print_category_file, tokenize_category, CategoryFile, FormatError,
    LowerError, LoweredFile,
};
pub use functor::{
    check_functor, check_natural_iso, check_naturality, compose_functors, invert_natural_iso,
    same_category, vertical_compose, Functor, FunctorError, NatTransf, NaturalityError,
};
pub use internal::{
    act_arr, act_obj, adjunction_counit, adjunction_unit, build_e, check_action_laws,
    check_internal_adjunction, ics_compose, orbit_arr, orbit_obj, transform_diagram, Diagram,
    IcsElement, OrbitReport,
};
pub use symmetry::{
    check_cocc, check_imc, check_psc, check_sec, classify, classify_psc_only, derive_tau,
    derived_arrow, first_non_invertible, lift_categories, search_cocc, search_psc, Budget,
    CoccStructure, HierarchyVerdict, ImcOutcome, LayerVerdict, LiftedCategories, PscStructure,
    SearchOutcome, SymmetryError,
};
