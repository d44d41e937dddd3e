//! Three-message exchange computing the blinded exponents
//!
//! ```text
//! x0 = r̂1·r1'·t1·t2 + r̂2·r2'·t3·t4 + u0
//! x1 = −q·t0·t2 + u1
//! x2 = −q·t0·t1 + u2          (mod p, q = u3/r1')
//! ```
//!
//! The user sends `E(r1'), E(r2'), E(q), E(u0), E(u1), E(u2)` under their own
//! Paillier key. The TGC evaluates the three linear forms homomorphically,
//! adds `E(m_i·p)` with `m_i < 2^σ` so that the integer plaintext hides its
//! secrets while reducing to the right value mod `p`, and replies. The user
//! decrypts, reduces mod `p` and returns `x0, x1, x2` in the clear.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand_core::RngCore;

use super::paillier::{encrypt, hom_add, hom_scale, random_below, HomCiphertext, PaillierKeyPair, PaillierPublicKey, MASK_BITS};
use crate::algebra::{Decode, Encode, Reader, Scalar, Writer};
use crate::error::{Error, Result};

/// The user's blinding values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TppUserSecrets {
    pub u0: Scalar,
    pub u1: Scalar,
    pub u2: Scalar,
    pub u3: Scalar,
    pub r1p: Scalar,
    pub r2p: Scalar,
}

impl TppUserSecrets {
    /// `u0, u1, u2` uniform in `[0, p)`; `u3, r1', r2'` in `[1, p)`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self {
            u0: Scalar::random(rng),
            u1: Scalar::random(rng),
            u2: Scalar::random(rng),
            u3: Scalar::random_nonzero(rng),
            r1p: Scalar::random_nonzero(rng),
            r2p: Scalar::random_nonzero(rng),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TppUserState {
    secrets: TppUserSecrets,
    q: Scalar,
    key: Arc<PaillierKeyPair>,
}

impl TppUserState {
    pub fn new(secrets: TppUserSecrets, key: Arc<PaillierKeyPair>) -> Result<Self> {
        if secrets.u3.is_zero() || secrets.r2p.is_zero() {
            return Err(Error::Precondition("u3 and r2' must be nonzero"));
        }
        let r1p_inv = secrets.r1p.inverse().ok_or(Error::Precondition("r1' must be nonzero"))?;
        Ok(Self {
            q: secrets.u3 * r1p_inv,
            secrets,
            key,
        })
    }

    pub fn secrets(&self) -> &TppUserSecrets {
        &self.secrets
    }

    /// `q = u3 · r1'^{-1}`.
    pub fn q(&self) -> Scalar {
        self.q
    }

    pub fn key(&self) -> &Arc<PaillierKeyPair> {
        &self.key
    }
}

/// The TGC's per-session randomizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TppTgcState {
    pub r_hat1: Scalar,
    pub r_hat2: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Msg1 {
    pub e_r1p: HomCiphertext,
    pub e_r2p: HomCiphertext,
    pub e_q: HomCiphertext,
    pub e_u0: HomCiphertext,
    pub e_u1: HomCiphertext,
    pub e_u2: HomCiphertext,
}

impl Msg1 {
    pub fn public_key(&self) -> &Arc<PaillierPublicKey> {
        self.e_r1p.key()
    }

    fn ciphertexts(&self) -> [&HomCiphertext; 6] {
        [&self.e_r1p, &self.e_r2p, &self.e_q, &self.e_u0, &self.e_u1, &self.e_u2]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Msg2 {
    pub e0: HomCiphertext,
    pub e1: HomCiphertext,
    pub e2: HomCiphertext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Msg3 {
    pub x0: Scalar,
    pub x1: Scalar,
    pub x2: Scalar,
}

pub fn tpp_round1_user<R: RngCore + ?Sized>(state: &TppUserState, rng: &mut R) -> Msg1 {
    let key = &state.key;
    let s = &state.secrets;
    let mut enc = |v: &Scalar| key.encrypt(&v.to_biguint(), rng);
    Msg1 {
        e_r1p: enc(&s.r1p),
        e_r2p: enc(&s.r2p),
        e_q: enc(&state.q),
        e_u0: enc(&s.u0),
        e_u1: enc(&s.u1),
        e_u2: enc(&s.u2),
    }
}

/// Masks `m_i` uniform in `[0, 2^σ)`.
pub(crate) fn random_masks<R: RngCore + ?Sized>(rng: &mut R) -> [BigUint; 3] {
    let bound = BigUint::one() << MASK_BITS;
    [random_below(&bound, rng), random_below(&bound, rng), random_below(&bound, rng)]
}

pub(crate) fn round2_with_masks<R: RngCore + ?Sized>(
    m1: &Msg1,
    t: &[Scalar; 5],
    tgc: &TppTgcState,
    masks: &[BigUint; 3],
    rng: &mut R,
) -> Result<Msg2> {
    let pk = m1.public_key();
    if m1.ciphertexts().iter().any(|c| c.key() != pk) {
        return Err(Error::KeyMismatch);
    }
    let p = Scalar::modulus();
    let [t0, t1, t2, t3, t4] = *t;
    let mut mask = |m: &BigUint| encrypt(pk, &(m * &p), rng);

    let e0 = hom_add(
        &hom_add(
            &hom_scale(&m1.e_r1p, &(tgc.r_hat1 * t1 * t2).to_biguint()),
            &hom_scale(&m1.e_r2p, &(tgc.r_hat2 * t3 * t4).to_biguint()),
        )?,
        &hom_add(&m1.e_u0, &mask(&masks[0]))?,
    )?;
    // p − (t0·t2 mod p) as an integer exponent, i.e. the additive inverse mod p
    let neg = |s: Scalar| (&p - s.to_biguint()) % &p;
    let e1 = hom_add(
        &hom_add(&hom_scale(&m1.e_q, &neg(t0 * t2)), &m1.e_u1)?,
        &mask(&masks[1]),
    )?;
    let e2 = hom_add(
        &hom_add(&hom_scale(&m1.e_q, &neg(t0 * t1)), &m1.e_u2)?,
        &mask(&masks[2]),
    )?;
    Ok(Msg2 { e0, e1, e2 })
}

/// TGC step: evaluates the three blinded linear forms under the user's key.
pub fn tpp_round2_tgc<R: RngCore + ?Sized>(m1: &Msg1, t: &[Scalar; 5], tgc: &TppTgcState, rng: &mut R) -> Result<Msg2> {
    let masks = random_masks(rng);
    round2_with_masks(m1, t, tgc, &masks, rng)
}

pub fn tpp_round3_user(m2: &Msg2, state: &TppUserState) -> Result<Msg3> {
    let dec = |c: &HomCiphertext| state.key.decrypt(c).map(|m| Scalar::from_biguint(&m));
    Ok(Msg3 {
        x0: dec(&m2.e0)?,
        x1: dec(&m2.e1)?,
        x2: dec(&m2.e2)?,
    })
}

impl Encode for Msg1 {
    /// `N` followed by the six ciphertexts, each a big-endian integer.
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_bytes(&self.public_key().n().to_bytes_be());
        for c in self.ciphertexts() {
            w.put_bytes(&c.value().to_bytes_be());
        }
        w.into_bytes()
    }
}

impl Decode for Msg1 {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let pk = Arc::new(PaillierPublicKey::new(BigUint::from_bytes_be(r.take_bytes()?))?);
        let mut next = || -> Result<HomCiphertext> {
            HomCiphertext::from_parts(BigUint::from_bytes_be(r.take_bytes()?), Arc::clone(&pk))
        };
        let msg = Msg1 {
            e_r1p: next()?,
            e_r2p: next()?,
            e_q: next()?,
            e_u0: next()?,
            e_u1: next()?,
            e_u2: next()?,
        };
        r.finish()?;
        Ok(msg)
    }
}

impl Encode for Msg2 {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        for c in [&self.e0, &self.e1, &self.e2] {
            w.put_bytes(&c.value().to_bytes_be());
        }
        w.into_bytes()
    }
}

impl Msg2 {
    /// The reply carries no key; the receiver supplies its own.
    pub fn decode_for(bytes: &[u8], pk: &Arc<PaillierPublicKey>) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let mut next =
            || -> Result<HomCiphertext> { HomCiphertext::from_parts(BigUint::from_bytes_be(r.take_bytes()?), Arc::clone(pk)) };
        let msg = Msg2 {
            e0: next()?,
            e1: next()?,
            e2: next()?,
        };
        r.finish()?;
        Ok(msg)
    }
}

impl Encode for Msg3 {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.x0).put(&self.x1).put(&self.x2);
        w.into_bytes()
    }
}

impl Decode for Msg3 {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let msg = Msg3 {
            x0: r.take()?,
            x1: r.take()?,
            x2: r.take()?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homomorphic::paillier::tests::shared_key;
    use crate::homomorphic::paillier::max_exchange_plaintext;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn key() -> Arc<PaillierKeyPair> {
        Arc::new(shared_key().clone())
    }

    fn random_t(rng: &mut ChaCha20Rng) -> [Scalar; 5] {
        std::array::from_fn(|_| Scalar::random_nonzero(rng))
    }

    #[test]
    fn round1_encrypts_state() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let one = Scalar::one();
        let secrets = TppUserSecrets { u0: one, u1: one, u2: one, u3: one, r1p: one, r2p: one };
        let state = TppUserState::new(secrets, key()).unwrap();
        let m1 = tpp_round1_user(&state, &mut rng);
        for c in m1.ciphertexts() {
            assert_eq!(state.key.decrypt(c).unwrap(), BigUint::one());
        }

        let state = TppUserState::new(TppUserSecrets::random(&mut rng), key()).unwrap();
        let m1 = tpp_round1_user(&state, &mut rng);
        let s = state.secrets();
        let expected = [s.r1p, s.r2p, state.q(), s.u0, s.u1, s.u2];
        let p = Scalar::modulus();
        for (c, v) in m1.ciphertexts().iter().zip(expected) {
            let m = state.key.decrypt(c).unwrap();
            assert!(m < p);
            assert_eq!(m, v.to_biguint());
        }
        assert_eq!(state.q() * s.r1p, s.u3);
    }

    #[test]
    fn unit_secrets_without_masks() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut secrets = TppUserSecrets::random(&mut rng);
        let state = TppUserState::new(secrets, key()).unwrap();
        let one = Scalar::one();
        let tgc = TppTgcState { r_hat1: one, r_hat2: one };
        let zero = [BigUint::ZERO, BigUint::ZERO, BigUint::ZERO];
        let m1 = tpp_round1_user(&state, &mut rng);
        let m2 = round2_with_masks(&m1, &[one; 5], &tgc, &zero, &mut rng).unwrap();
        let m3 = tpp_round3_user(&m2, &state).unwrap();
        secrets = *state.secrets();
        assert_eq!(m3.x0, secrets.r1p + secrets.r2p + secrets.u0);
    }

    #[test]
    fn three_defining_equations_hold() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let key = key();
        for _ in 0..10 {
            let state = TppUserState::new(TppUserSecrets::random(&mut rng), Arc::clone(&key)).unwrap();
            let t = random_t(&mut rng);
            let tgc = TppTgcState { r_hat1: Scalar::random_nonzero(&mut rng), r_hat2: Scalar::random_nonzero(&mut rng) };
            let m1 = tpp_round1_user(&state, &mut rng);
            let m2 = tpp_round2_tgc(&m1, &t, &tgc, &mut rng).unwrap();
            let m3 = tpp_round3_user(&m2, &state).unwrap();

            let s = state.secrets();
            let [t0, t1, t2, t3, t4] = t;
            let q = s.u3 * s.r1p.inverse().unwrap();
            assert_eq!(m3.x0, tgc.r_hat1 * s.r1p * t1 * t2 + tgc.r_hat2 * s.r2p * t3 * t4 + s.u0);
            assert_eq!(m3.x1 + q * t0 * t2 - s.u1, Scalar::zero());
            assert_eq!(m3.x2 + q * t0 * t1 - s.u2, Scalar::zero());
        }
    }

    #[test]
    fn masked_plaintexts_never_wrap() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let key = key();
        let p = Scalar::modulus();
        let n = key.public().n().clone();
        assert!(max_exchange_plaintext() < n);
        for _ in 0..100 {
            let state = TppUserState::new(TppUserSecrets::random(&mut rng), Arc::clone(&key)).unwrap();
            let t = random_t(&mut rng);
            let tgc = TppTgcState { r_hat1: Scalar::random(&mut rng), r_hat2: Scalar::random(&mut rng) };
            let masks = random_masks(&mut rng);
            let m1 = tpp_round1_user(&state, &mut rng);
            let m2 = round2_with_masks(&m1, &t, &tgc, &masks, &mut rng).unwrap();
            let s = state.secrets();
            let [_, t1, t2, t3, t4] = t;
            let integer = s.r1p.to_biguint() * (tgc.r_hat1 * t1 * t2).to_biguint()
                + s.r2p.to_biguint() * (tgc.r_hat2 * t3 * t4).to_biguint()
                + s.u0.to_biguint()
                + &masks[0] * &p;
            assert!(integer < n);
            assert_eq!(key.decrypt(&m2.e0).unwrap(), integer);
        }
    }

    #[test]
    fn reduction_invariance_of_u0() {
        // u0 + p as an integer plaintext yields the same x0
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let key = key();
        let state = TppUserState::new(TppUserSecrets::random(&mut rng), Arc::clone(&key)).unwrap();
        let t = random_t(&mut rng);
        let tgc = TppTgcState { r_hat1: Scalar::one(), r_hat2: Scalar::one() };
        let mut m1 = tpp_round1_user(&state, &mut rng);
        let x0 = tpp_round3_user(&tpp_round2_tgc(&m1, &t, &tgc, &mut rng).unwrap(), &state).unwrap().x0;
        m1.e_u0 = key.encrypt(&(state.secrets().u0.to_biguint() + Scalar::modulus()), &mut rng);
        let shifted = tpp_round3_user(&tpp_round2_tgc(&m1, &t, &tgc, &mut rng).unwrap(), &state).unwrap().x0;
        assert_eq!(x0, shifted);
    }

    #[test]
    fn zero_inverse_secrets_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut s = TppUserSecrets::random(&mut rng);
        s.r1p = Scalar::zero();
        assert!(TppUserState::new(s, key()).is_err());
    }

    #[test]
    fn messages_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let key = key();
        let state = TppUserState::new(TppUserSecrets::random(&mut rng), Arc::clone(&key)).unwrap();
        let m1 = tpp_round1_user(&state, &mut rng);
        let decoded = Msg1::decode(&m1.encode()).unwrap();
        assert_eq!(decoded, m1);
        let tgc = TppTgcState { r_hat1: Scalar::one(), r_hat2: Scalar::one() };
        let m2 = tpp_round2_tgc(&decoded, &[Scalar::one(); 5], &tgc, &mut rng).unwrap();
        assert_eq!(Msg2::decode_for(&m2.encode(), key.public()).unwrap(), m2);
        let m3 = tpp_round3_user(&m2, &state).unwrap();
        assert_eq!(Msg3::decode(&m3.encode()).unwrap(), m3);
    }
}
