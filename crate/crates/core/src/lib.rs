//! Deck transformation groups of finite coverings of a disc with holes,
//! Galois embedding problems over free fundamental groups, and Weierstrass
//! polynomials whose splitting coverings realize prescribed finite groups.

pub mod permgroup;
pub mod freecover;
pub mod embedding;
pub mod wpoly;
pub mod braid;
pub mod monodromy;
pub mod approx;
pub mod pipeline;
