//! Number-theoretic verification core.
//!
//! This crate computes both sides of a family of classical and recent
//! identities about quadratic residues modulo an odd prime `p` — permutation
//! signs, inversion counts, class numbers of the quadratic fields `Q(√±p)`,
//! fundamental units, exact cyclotomic-integer products, and floating-point
//! trigonometric products — and reports whether they agree.
//!
//! Layout:
//!
//! * [`arith`] — Legendre/Jacobi symbols, modular arithmetic, primality,
//!   sieves, and the per-prime context table ([`arith::PrimeCtx`]).
//! * [`perms`] — permutation signs via inversion counting: multiplication
//!   permutations on `Z/nZ`, folded variants on half-ranges, permutations of
//!   units induced by `x ↦ x⁻¹`-style maps, and the square-list statistics
//!   `s(p)`, `t(p)`.
//! * [`classfield`] — class numbers `h(-p)` and `h(p)`, fundamental units of
//!   real quadratic fields, and the factorial criterion linking
//!   `((p-1)/2)! mod p` to `h(-p)`.
//! * [`cyclo`] — exact arithmetic in `Z[ζ_p]` with rational coefficients:
//!   canonical representation, sparse products of `(1 - ζ^e)` factors,
//!   quadratic Gauss sums, and unit powers lifted through the Gauss sum.
//! * [`trigeval`] — sign-exact logarithmic evaluation of large products of
//!   sines, cosines and cotangent combinations ([`trigeval::SignedLog`]).
//! * [`congr`] — character sums, lattice-point counts attached to binary
//!   quadratic forms, and the congruence/count identities built from them.
//! * [`conjectures`] — scanners for open statements: parity laws, product
//!   ratios, power-residue permutation signs, and integer determinant
//!   families (exact Bareiss plus a modular cross-check).
//! * [`report`] — the shared [`report::Verdict`] record produced by every
//!   `verify_*` entry point.

pub mod arith;
pub mod classfield;
pub mod congr;
pub mod conjectures;
pub mod cyclo;
pub mod perms;
pub mod report;
pub mod trigeval;
