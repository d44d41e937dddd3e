//! The scheme's algorithms: setup, key generation, registration, blind
//! trapdoor issuance, keyword encryption and test, record validation and
//! tracing.

mod keys;
mod registration;
mod search;
mod tables;
mod trace;
mod trapdoor;

pub use keys::{
    keygen_ca, keygen_tgc, keygen_tr, keygen_user, AuthorityKeys, TgcKeyPair, TgcPublicKey, TracerKeyPair, UserKeyPair,
};
pub use registration::{reg_issue, reg_request, RegRequest};
pub use search::{extract_direct, peks_encrypt, test, Ciphertext, PreparedTrapdoor, Trapdoor};
pub use tables::{setup, IdTable, KeywordEntry, KeywordTable};
pub use trace::trace;
pub use trapdoor::{
    record_check, record_validate, record_validate_encoded, trapdoor_request, trapdoor_respond, BlindedTrapdoor,
    RecordFailure, TgcSession, TrapdoorRecord, TrapdoorSession,
};

/// Entry points with caller-chosen randomness.
#[cfg(feature = "test-hooks")]
pub mod hooks {
    use std::sync::Arc;

    use rand_core::RngCore;

    use super::*;
    use crate::algebra::{keyword_scalar, Scalar, SystemParams};
    use crate::credential::Credential;
    use crate::error::Result;
    use crate::homomorphic::{Msg1, PaillierKeyPair, TppUserSecrets};

    pub fn peks_encrypt_with(
        tgc_pk: &TgcPublicKey,
        keyword: &str,
        s: &Scalar,
        s1: &Scalar,
        s2: &Scalar,
        params: &SystemParams,
    ) -> Ciphertext {
        search::encrypt_with(tgc_pk, &keyword_scalar(keyword), s, s1, s2, params)
    }

    pub fn extract_with(tgc: &TgcKeyPair, keyword: &str, rho1: &Scalar, rho2: &Scalar, params: &SystemParams) -> Trapdoor {
        search::extract_with(tgc, &keyword_scalar(keyword), rho1, rho2, params)
    }

    /// Request with caller-chosen `u0, u1, u2, u3, r1', r2'`.
    #[allow(clippy::too_many_arguments)]
    pub fn trapdoor_request_with_blinding<R: RngCore + ?Sized>(
        user: &UserKeyPair,
        cred: &Credential,
        keyword: &str,
        keys: &AuthorityKeys,
        hom_key: Arc<PaillierKeyPair>,
        params: &SystemParams,
        blinding: TppUserSecrets,
        rng: &mut R,
    ) -> Result<(TrapdoorRecord, TrapdoorSession, Msg1)> {
        trapdoor::request_with(user, cred, keyword, keys, hom_key, params, blinding, rng)
    }
}
