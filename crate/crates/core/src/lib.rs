//! Exact computations behind effective actions of Heisenberg `p`-groups on
//! bundles over tori, and the abelian-subgroup bounds that make those
//! groups far from abelian.
//!
//! * [`exterior`]: cup products in `H*(T^{2n})`, powers of `Ω`, and the
//!   symmetrization coefficients `a_{k,j}`.
//! * [`omega`]: the truncated ring `Q[Ω]/(Ω^{n+1})` and bundle descriptors.
//! * [`construction`]: roots of unity mod `p^n`, `M(n)`, the `δ_j` solver,
//!   certificates, prime search and the `λ` bound table.
//! * [`heisenberg`], [`isotropic`], [`olshanskii`], [`brute`]: the groups
//!   `Γ_{n,p}`, isotropic subspaces over `F_p` and product subgroups.
//!
//! Everything is exact; there is no floating point anywhere in the crate.
#![no_std]

extern crate alloc;

pub mod arith;
pub mod brute;
pub mod construction;
mod error;
pub mod exterior;
pub mod fp;
pub mod heisenberg;
pub mod isotropic;
pub mod olshanskii;
pub mod omega;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
