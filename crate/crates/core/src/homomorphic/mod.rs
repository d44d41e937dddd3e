//! Additively homomorphic encryption and the two-party exchange that
//! computes the TGC's blinded trapdoor exponents.

mod paillier;
mod tpp;

pub use paillier::{
    encrypt, hom_add, hom_keygen, hom_scale, max_exchange_plaintext, HomCiphertext, PaillierKeyPair,
    PaillierPublicKey, MASK_BITS, MIN_MODULUS_BITS,
};
pub use tpp::{
    tpp_round1_user, tpp_round2_tgc, tpp_round3_user, Msg1, Msg2, Msg3, TppTgcState, TppUserSecrets, TppUserState,
};

#[cfg(feature = "test-hooks")]
pub mod hooks {
    use num_bigint::BigUint;
    use rand_core::RngCore;

    use super::*;
    use crate::algebra::Scalar;
    use crate::error::Result;

    /// Round two with caller-chosen masks `m_i`.
    pub fn tpp_round2_with_masks<R: RngCore + ?Sized>(
        m1: &Msg1,
        t: &[Scalar; 5],
        tgc: &TppTgcState,
        masks: &[BigUint; 3],
        rng: &mut R,
    ) -> Result<Msg2> {
        tpp::round2_with_masks(m1, t, tgc, masks, rng)
    }
}

#[cfg(test)]
pub(crate) use paillier::tests::shared_key;
