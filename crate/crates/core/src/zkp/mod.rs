//! Fiat-Shamir sigma protocols used at registration (key possession) and at
//! trapdoor request time (request well-formedness plus credential possession).

mod pi1;
mod pi2;

pub use pi1::{pi1_prove, pi1_verify, pi1_verify_encoded, Pi1Proof};
pub use pi2::{
    pi2_check, pi2_prove, pi2_verify, pi2_verify_encoded, Pi2Failure, Pi2Proof, Pi2Statement, Pi2Witness,
};

/// Interactive-mode entry points: provers that take an externally chosen
/// challenge, and verifiers that skip transcript recomputation.
#[cfg(feature = "test-hooks")]
pub mod hooks {
    use rand_core::RngCore;

    use super::*;
    use crate::algebra::{G1Elem, Scalar, SystemParams};
    use crate::error::Result;

    pub fn pi1_prove_with_challenge<R: RngCore + ?Sized>(
        x_u: &Scalar,
        y_u: &G1Elem,
        params: &SystemParams,
        rng: &mut R,
        challenge: Scalar,
    ) -> Pi1Proof {
        pi1::prove_with(x_u, y_u, params, rng, Some(challenge))
    }

    pub fn pi1_response_holds(y_u: &G1Elem, proof: &Pi1Proof, params: &SystemParams) -> bool {
        pi1::response_holds(y_u, proof, params)
    }

    /// Skips the witness self-check, so false statements can be "proven".
    pub fn pi2_prove_unchecked<R: RngCore + ?Sized>(
        stmt: &Pi2Statement,
        wit: &Pi2Witness,
        params: &SystemParams,
        rng: &mut R,
        challenge: Option<Scalar>,
    ) -> Result<Pi2Proof> {
        pi2::prove_unchecked(stmt, wit, params, rng, challenge)
    }

    pub fn pi2_check_equations(
        stmt: &Pi2Statement,
        proof: &Pi2Proof,
        params: &SystemParams,
    ) -> std::result::Result<(), Pi2Failure> {
        let pairings = stmt.credential.pairings(&stmt.ca_pk, params);
        pi2::check_equations(stmt, proof, &pairings, params)
    }
}
