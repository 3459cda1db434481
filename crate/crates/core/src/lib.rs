//! Loewy lengths and related invariants of the split local symmetric
//! algebras A(q,n,e) = A[q,n,z].
//!
//! A(q,n,e) is spanned by the monomials of F[x_1,…,x_n]/(x_i^q) whose
//! weighted exponent sum Σ a_i q^(i−1) is divisible by e, where
//! e | q^n − 1. With z = (q^n − 1)/e its basis is b_0,…,b_z, and b_k is the
//! monomial whose exponent vector is the q-adic expansion of k·e.

pub mod algebra;
pub mod arith;
pub mod criteria;
pub mod database;
pub mod error;
pub mod invariants;
pub mod mfunc;

pub use arith::{Digits, Nat, Word};
pub use error::{Error, Result};

pub(crate) mod serde_nat {
    use super::Nat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
