//! Automorphisms of the symmetric domain: the indefinite orthogonal action on
//! the operator-norm ball, the Cayley transform onto the positive cone,
//! homothety and rescaling groups, unipotent translations and boosts.

mod boost;
mod cayley;
mod groups;
mod report;

pub use boost::{boost, boost_degenerate_limit, boost_degenerate_limit_at, DegenerateLimit};
pub use cayley::{cayley, CayleyConvention, CayleyMap};
pub use groups::{ball_transvection, homothety_group, j_form, random_so_pp, rescaling_group, unipotent_translation, IndefiniteGenerator, OneParameterGroup};
pub use report::{verify_ball_preserved, SymmetryReport};
