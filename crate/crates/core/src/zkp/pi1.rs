//! Schnorr proof of knowledge of `x_u` with `Y_u = g^{x_u}`.

use rand_core::RngCore;

use crate::algebra::{Decode, Encode, G1Elem, Reader, Scalar, SystemParams, Transcript, Writer};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pi1Proof {
    /// `Y_u' = g^{x_u'}`
    pub commitment: G1Elem,
    /// `c = H1(Y_u || Y_u')`
    pub challenge: Scalar,
    /// `x̂_u = x_u' − c·x_u`
    pub response: Scalar,
}

fn challenge(y_u: &G1Elem, commitment: &G1Elem) -> Scalar {
    Transcript::new().append(y_u).append(commitment).challenge()
}

pub(crate) fn prove_with<R: RngCore + ?Sized>(
    x_u: &Scalar,
    y_u: &G1Elem,
    params: &SystemParams,
    rng: &mut R,
    forced_challenge: Option<Scalar>,
) -> Pi1Proof {
    let nonce = Scalar::random(rng);
    let commitment = params.g.g1.pow(&nonce);
    let c = forced_challenge.unwrap_or_else(|| challenge(y_u, &commitment));
    Pi1Proof {
        commitment,
        challenge: c,
        response: nonce - c * *x_u,
    }
}

pub fn pi1_prove<R: RngCore + ?Sized>(x_u: &Scalar, y_u: &G1Elem, params: &SystemParams, rng: &mut R) -> Pi1Proof {
    prove_with(x_u, y_u, params, rng, None)
}

/// `Y_u' = g^{x̂_u} · Y_u^c`, challenge not recomputed.
pub(crate) fn response_holds(y_u: &G1Elem, proof: &Pi1Proof, params: &SystemParams) -> bool {
    proof.commitment == G1Elem::product_of_powers(&[params.g.g1, *y_u], &[proof.response, proof.challenge])
}

pub fn pi1_verify(y_u: &G1Elem, proof: &Pi1Proof, params: &SystemParams) -> bool {
    proof.challenge == challenge(y_u, &proof.commitment) && response_holds(y_u, proof, params)
}

/// Verifies a serialized proof; malformed bytes verify as `false`.
pub fn pi1_verify_encoded(y_u: &G1Elem, proof: &[u8], params: &SystemParams) -> bool {
    Pi1Proof::decode(proof).is_ok_and(|p| pi1_verify(y_u, &p, params))
}

impl Encode for Pi1Proof {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.commitment).put(&self.challenge).put(&self.response);
        w.into_bytes()
    }
}

impl Decode for Pi1Proof {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let proof = Pi1Proof {
            commitment: r.take()?,
            challenge: r.take()?,
            response: r.take()?,
        };
        r.finish()?;
        Ok(proof)
    }
}
