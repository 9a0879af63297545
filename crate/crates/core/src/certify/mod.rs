//! Certificates for fatness and thinness of Cantor-type sets.

pub mod examples;
pub mod fat;
pub mod lemmas;
pub mod product;
pub mod thin;
pub mod thm11;

pub use examples::{
    example51_packed, example51_verdict, example54_config, example54_depth,
    example54_enumerated_mass, example54_histogram_mass, example54_limit, example54_mass,
    example54_schedule, example54_tree, Ex54Limit, Ex54Stage, Example51Verdict, Example54,
};
pub use fat::{
    assemble_c3, certify_fat_alpha, certify_fat_thick, certify_fat_thick_with, solve_n0,
    FatConclusion, FatnessCertificate, DEFAULT_FAT_TERMS,
};
pub use lemmas::{lemma41_solve, lemma43_find_m, zeta_tail, Lemma43Result};
pub use product::{factor_product, product_bracket, scaled_product_bracket, ProductBracket};
pub use thin::{certify_thin_porous, ThinnessCertificate};
pub use thm11::{thm11_bound, thm11_terms, Thm11Bound};
