//! Exact algebra kernel: big rationals, sparse multivariate polynomials with
//! parameters, rational functions, GCDs, resultants and a text parser.

pub mod error;
pub mod gcd;
pub mod mpoly;
pub mod parse;
pub mod rat;
pub mod ratfn;
pub mod resultant;
pub mod ring;
pub mod sqrt;

pub use error::{AlgebraError, Result};
pub use gcd::{
    content_in, gcd, gcd_list, integer_primitive, is_squarefree_in, lcm, prem, primitive_in, squarefree_decomposition,
    squarefree_part,
};
pub use mpoly::{Exp, MPoly, Monomial};
pub use parse::{parse_poly, parse_ratfn};
pub use rat::{rat, rat_frac, reconstruct_rational, to_f64, Rat};
pub use ratfn::{substitute, RatFn};
pub use resultant::{discriminant, resultant, resultant_slot, sylvester_resultant};
pub use ring::VarRing;
pub use sqrt::poly_sqrt;
