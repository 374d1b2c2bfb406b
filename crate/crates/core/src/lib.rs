//! Rees algebras of linearly presented height-two perfect ideals and
//! modules of projective dimension one, with a Groebner-basis certificate.

pub mod cli;
pub mod groebner;
pub mod hypotheses;
pub mod ideal_ops;
pub mod polymatrix;
pub mod polyring;
pub mod rees;
