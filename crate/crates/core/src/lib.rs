//! Term clones of finite algebras, variety membership with HSPfin
//! certificates, and orbit analysis of finite permutation actions.

pub mod action;
pub mod algebra;
pub mod alf;
pub mod algebra_file;
pub mod catalog;
pub mod certificate;
pub mod clone;
pub mod closure;
pub mod error;
pub mod group;
pub mod homomorphism;
pub mod natural;
pub mod table;
pub mod term;

pub use action::{oligo_profile, orbits, FunctionSpace, OligoProfile, OrbitPartition, PointEntourage};
pub use alf::{alf_orbit_counts, fg_power_orbit_check, locally_finite_check, oligo_on_fg_subalgebras, unary_group, AlfReport, UnaryGroup};
pub use algebra::{generate_in_product, generate_subalgebra, power, product, Caps, FiniteAlgebra, ProductView, Structure};
pub use certificate::{hspfin_certificate, verify_certificate, CertificateOutcome, HspFinCertificate, VerifyReport};
pub use clone::{clone_generate, free_algebra, CloneLevel, FreeAlgebra};
pub use error::{Error, Result};
pub use group::{parse_group, write_group, Perm, PermGroup};
pub use homomorphism::{check_homomorphism, colimit_of_chain, find_surjective_homomorphism, Homomorphism, SubalgebraChain};
pub use natural::{hsp_membership, hsp_membership_with, natural_hom, uc_witness, Entourage, HspVerdict, NatHomOutcome, NaturalHom};
pub use table::{Elem, OperationTable};
pub use term::{eval_term, parse_term, print_term, term_table, Signature, Term, VarContext};
