//! Blind trapdoor issuance.
//!
//! The user hides the keyword as `H(ω)' = H(ω)^{u3}`, commits to it and to
//! their key under the tracer's key (`D1, D2, D3`) and under `h1, h2`
//! (`D4, D5`), and proves all of that together with credential possession.
//! The TGC checks the record, ledgers it, and runs the two-party exchange
//! that yields `x0, x1, x2`:
//!
//! ```text
//! d0' = g^{x0}   d1' = g^{x1}·H(ω)'^{−r̂1·t2}   d2' = g^{x2}·H(ω)'^{−r̂1·t1}
//! d3' = H(ω)'^{−r̂2·t4}   d4' = H(ω)'^{−r̂2·t3}
//! ```
//!
//! The user then strips the blinding:
//!
//! ```text
//! d0 = d0'·g^{−u0}   d1 = (d1'·g^{−u1})^{r1'/u3}   d2 = (d2'·g^{−u2})^{r1'/u3}
//! d3 = d3'^{r2'/u3}  d4 = d4'^{r2'/u3}
//! ```

use std::sync::Arc;

use rand_core::RngCore;

use super::keys::{AuthorityKeys, TgcKeyPair, UserKeyPair};
use super::search::Trapdoor;
use crate::algebra::{keyword_scalar, Decode, Encode, G1Elem, G2Elem, Reader, Scalar, SystemParams, Writer};
use crate::credential::{randomize, show_verify, Credential, RandomizedCredential};
use crate::error::{Error, Result};
use crate::homomorphic::{
    tpp_round1_user, tpp_round2_tgc, tpp_round3_user, Msg1, Msg2, Msg3, PaillierKeyPair, TppTgcState, TppUserSecrets,
    TppUserState,
};
use crate::ledger::Ledger;
use crate::zkp::{pi2_check, pi2_prove, Pi2Failure, Pi2Proof, Pi2Statement, Pi2Witness};

/// `R_U = (H(ω)', D1, …, D5, σ̃, Π2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrapdoorRecord {
    pub h_prime: G2Elem,
    pub d: [G1Elem; 5],
    pub credential: RandomizedCredential,
    pub proof: Pi2Proof,
}

impl TrapdoorRecord {
    pub fn statement(&self, keys: &AuthorityKeys) -> Pi2Statement {
        Pi2Statement {
            h_prime: self.h_prime,
            d: self.d,
            credential: self.credential,
            tracer_pk: keys.tracer,
            ca_pk: keys.ca,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFailure {
    Credential,
    Proof(Pi2Failure),
}

impl std::fmt::Display for RecordFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecordFailure::Credential => f.write_str("randomized credential does not verify"),
            RecordFailure::Proof(p) => write!(f, "request proof: {p}"),
        }
    }
}

/// Credential check followed by the request proof; reports the first failure.
pub fn record_check(record: &TrapdoorRecord, keys: &AuthorityKeys, params: &SystemParams) -> std::result::Result<(), RecordFailure> {
    if !show_verify(&record.credential, &keys.ca, params) {
        return Err(RecordFailure::Credential);
    }
    pi2_check(&record.statement(keys), &record.proof, params).map_err(RecordFailure::Proof)
}

pub fn record_validate(record: &TrapdoorRecord, keys: &AuthorityKeys, params: &SystemParams) -> bool {
    record_check(record, keys, params).is_ok()
}

/// Malformed bytes validate as `false`.
pub fn record_validate_encoded(bytes: &[u8], keys: &AuthorityKeys, params: &SystemParams) -> bool {
    TrapdoorRecord::decode(bytes).is_ok_and(|r| record_validate(&r, keys, params))
}

/// `(d0', …, d4')` as released by the TGC.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlindedTrapdoor {
    pub d: [G2Elem; 5],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    AwaitingReply,
    AwaitingTrapdoor,
    Consumed,
}

/// User-side state of one request. Single use.
#[derive(Debug)]
pub struct TrapdoorSession {
    tpp: TppUserState,
    omega: Scalar,
    r0: Scalar,
    r: Scalar,
    r_prime: Scalar,
    g: G2Elem,
    stage: Stage,
}

impl TrapdoorSession {
    /// Decrypts the TGC's reply and produces the clear `x0, x1, x2`.
    pub fn answer(&mut self, m2: &Msg2) -> Result<Msg3> {
        if self.stage != Stage::AwaitingReply {
            return Err(Error::Session("exchange reply already answered"));
        }
        let m3 = tpp_round3_user(m2, &self.tpp)?;
        self.stage = Stage::AwaitingTrapdoor;
        Ok(m3)
    }

    /// Removes the blinding from the TGC's output.
    pub fn finalize(&mut self, blinded: &BlindedTrapdoor) -> Result<Trapdoor> {
        match self.stage {
            Stage::AwaitingReply => return Err(Error::Session("exchange not completed")),
            Stage::Consumed => return Err(Error::Session("session already finalized")),
            Stage::AwaitingTrapdoor => {}
        }
        self.stage = Stage::Consumed;
        let s = self.tpp.secrets();
        let u3_inv = s.u3.inverse().ok_or(Error::Precondition("u3 must be nonzero"))?;
        let (k1, k2) = (s.r1p * u3_inv, s.r2p * u3_inv);
        let [d0, d1, d2, d3, d4] = blinded.d;
        let g = self.g;
        Ok(Trapdoor {
            d: [
                d0 * g.pow(&-s.u0),
                G2Elem::product_of_powers(&[d1, g], &[k1, -(s.u1 * k1)]),
                G2Elem::product_of_powers(&[d2, g], &[k1, -(s.u2 * k1)]),
                d3.pow(&k2),
                d4.pow(&k2),
            ],
        })
    }

    pub fn is_consumed(&self) -> bool {
        self.stage == Stage::Consumed
    }

    /// `u0, u1, u2, u3, r1', r2'`.
    pub fn blinding(&self) -> &TppUserSecrets {
        self.tpp.secrets()
    }

    /// `ω, r0, r, r'`.
    pub fn request_secrets(&self) -> (Scalar, Scalar, Scalar, Scalar) {
        (self.omega, self.r0, self.r, self.r_prime)
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn request_with<R: RngCore + ?Sized>(
    user: &UserKeyPair,
    cred: &Credential,
    keyword: &str,
    keys: &AuthorityKeys,
    hom_key: Arc<PaillierKeyPair>,
    params: &SystemParams,
    blinding: TppUserSecrets,
    rng: &mut R,
) -> Result<(TrapdoorRecord, TrapdoorSession, Msg1)> {
    let omega = keyword_scalar(keyword);
    let r0 = Scalar::random(rng);
    let r = Scalar::random_nonzero(rng);
    let r_prime = Scalar::random_nonzero(rng);
    let tpp = TppUserState::new(blinding, hom_key)?;

    let g = params.g.g1;
    let (y_t, y_u) = (keys.tracer, *user.public());
    let g_omega = g.pow(&omega);
    let d3 = g.pow(&r0);
    let yt_r0 = y_t.pow(&r0);
    let stmt = Pi2Statement {
        h_prime: params.keyword_map_g2(&omega).pow(&blinding.u3),
        d: [
            g_omega * yt_r0,
            y_u * yt_r0,
            d3,
            g_omega * params.h1.pow(&r),
            y_u * params.h2.pow(&r),
        ],
        credential: randomize(cred, &r, &r_prime)?,
        tracer_pk: y_t,
        ca_pk: keys.ca,
    };
    let wit = Pi2Witness { omega, u3: blinding.u3, r0, r, x_u: *user.secret() };
    let proof = pi2_prove(&stmt, &wit, params, rng)?;
    let record = TrapdoorRecord {
        h_prime: stmt.h_prime,
        d: stmt.d,
        credential: stmt.credential,
        proof,
    };
    let m1 = tpp_round1_user(&tpp, rng);
    let session = TrapdoorSession {
        tpp,
        omega,
        r0,
        r,
        r_prime,
        g: params.g.g2,
        stage: Stage::AwaitingReply,
    };
    Ok((record, session, m1))
}

/// Builds the request record, the user's session and the first exchange
/// message. Fails if the credential is not a valid credential on the user's
/// key.
pub fn trapdoor_request<R: RngCore + ?Sized>(
    user: &UserKeyPair,
    cred: &Credential,
    keyword: &str,
    keys: &AuthorityKeys,
    hom_key: Arc<PaillierKeyPair>,
    params: &SystemParams,
    rng: &mut R,
) -> Result<(TrapdoorRecord, TrapdoorSession, Msg1)> {
    let blinding = TppUserSecrets::random(rng);
    request_with(user, cred, keyword, keys, hom_key, params, blinding, rng)
}

/// TGC-side state between its reply and the user's `x0, x1, x2`.
#[derive(Debug)]
pub struct TgcSession {
    h_prime: G2Elem,
    t: [Scalar; 5],
    randomizers: TppTgcState,
    g: G2Elem,
    block_index: u64,
}

impl TgcSession {
    /// Ledger index of the request this session answers.
    pub fn block_index(&self) -> u64 {
        self.block_index
    }

    /// `r̂1, r̂2`.
    pub fn randomizers(&self) -> &TppTgcState {
        &self.randomizers
    }

    pub fn complete(self, m3: &Msg3) -> BlindedTrapdoor {
        let [_, t1, t2, t3, t4] = self.t;
        let TppTgcState { r_hat1, r_hat2 } = self.randomizers;
        let (g, h) = (self.g, self.h_prime);
        BlindedTrapdoor {
            d: [
                g.pow(&m3.x0),
                G2Elem::product_of_powers(&[g, h], &[m3.x1, -(r_hat1 * t2)]),
                G2Elem::product_of_powers(&[g, h], &[m3.x2, -(r_hat1 * t1)]),
                h.pow(&-(r_hat2 * t4)),
                h.pow(&-(r_hat2 * t3)),
            ],
        }
    }
}

/// Checks the record, computes the exchange reply and appends the record to
/// the ledger. The reply is only returned once the record is ledgered; on
/// any error nothing is appended.
#[allow(clippy::too_many_arguments)]
pub fn trapdoor_respond<R: RngCore + ?Sized>(
    tgc: &TgcKeyPair,
    keys: &AuthorityKeys,
    record: &TrapdoorRecord,
    m1: &Msg1,
    ledger: &mut Ledger,
    now: u64,
    params: &SystemParams,
    rng: &mut R,
) -> Result<(TgcSession, Msg2)> {
    record_check(record, keys, params).map_err(|f| Error::RecordRejected(f.to_string()))?;
    let randomizers = TppTgcState {
        r_hat1: Scalar::random_nonzero(rng),
        r_hat2: Scalar::random_nonzero(rng),
    };
    let m2 = tpp_round2_tgc(m1, tgc.secret(), &randomizers, rng)?;
    let block_index = ledger.append(record.encode(), now).index;
    let session = TgcSession {
        h_prime: record.h_prime,
        t: *tgc.secret(),
        randomizers,
        g: params.g.g2,
        block_index,
    };
    Ok((session, m2))
}

impl Encode for TrapdoorRecord {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.h_prime);
        for d in &self.d {
            w.put(d);
        }
        w.put(&self.credential).put(&self.proof);
        w.into_bytes()
    }
}

impl Decode for TrapdoorRecord {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let record = TrapdoorRecord {
            h_prime: r.take()?,
            d: [r.take()?, r.take()?, r.take()?, r.take()?, r.take()?],
            credential: r.take()?,
            proof: r.take()?,
        };
        r.finish()?;
        Ok(record)
    }
}

impl Encode for BlindedTrapdoor {
    fn encode(&self) -> Vec<u8> {
        Trapdoor { d: self.d }.encode()
    }
}

impl Decode for BlindedTrapdoor {
    fn decode(bytes: &[u8]) -> Result<Self> {
        Ok(BlindedTrapdoor { d: Trapdoor::decode(bytes)?.d })
    }
}
