//! Paillier encryption with `g = N + 1`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_core::RngCore;

use crate::algebra::Scalar;
use crate::error::{Error, Result};

pub const MIN_MODULUS_BITS: u64 = 2048;

/// Statistical masking parameter σ: TGC masks are drawn from `[0, 2^σ)`.
pub const MASK_BITS: u64 = 80;

/// Uniform in `[0, bound)`; 64 extra bits make the modular bias negligible.
pub(crate) fn random_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let len = (bound.bits() as usize).div_ceil(8) + 8;
    let mut buf = vec![0u8; len];
    rng.fill_bytes(&mut buf);
    BigUint::from_bytes_be(&buf) % bound
}

fn random_unit<R: RngCore + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let r = random_below(n, rng);
        if !r.is_zero() && r.gcd(n).is_one() {
            return r;
        }
    }
}

/// Largest plaintext the blinded-exponent exchange can produce:
/// `2(p−1)² + (p−1) + 2^σ·p`.
pub fn max_exchange_plaintext() -> BigUint {
    let p = Scalar::modulus();
    let pm1 = &p - 1u32;
    BigUint::from(2u32) * &pm1 * &pm1 + &pm1 + (BigUint::one() << MASK_BITS) * &p
}

/// Checks `|N| ≥ 2048`, `N > 3·2^σ·p²` and the exact no-wraparound bound.
fn check_modulus(n: &BigUint) -> Result<()> {
    if n.bits() < MIN_MODULUS_BITS {
        return Err(Error::ModulusTooSmall("fewer than 2048 bits"));
    }
    let p = Scalar::modulus();
    if *n <= BigUint::from(3u32) * (BigUint::one() << MASK_BITS) * &p * &p {
        return Err(Error::ModulusTooSmall("no room for statistical masks"));
    }
    if *n <= max_exchange_plaintext() {
        return Err(Error::ModulusTooSmall("exchange plaintexts would wrap"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaillierPublicKey {
    n: BigUint,
    n_squared: BigUint,
}

impl PaillierPublicKey {
    pub fn new(n: BigUint) -> Result<Self> {
        check_modulus(&n)?;
        let n_squared = &n * &n;
        Ok(Self { n, n_squared })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n_squared
    }

    fn with_randomness(&self, m: &BigUint, r_to_n: &BigUint) -> BigUint {
        // (1+N)^m = 1 + mN mod N²
        let gm = (BigUint::one() + (m % &self.n) * &self.n) % &self.n_squared;
        (gm * r_to_n) % &self.n_squared
    }
}

/// An encryption under a specific public key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCiphertext {
    value: BigUint,
    key: Arc<PaillierPublicKey>,
}

impl HomCiphertext {
    pub fn from_parts(value: BigUint, key: Arc<PaillierPublicKey>) -> Result<Self> {
        if value >= key.n_squared || value.is_zero() {
            return Err(Error::Decode("ciphertext outside Z_{N²}*"));
        }
        Ok(Self { value, key })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn key(&self) -> &Arc<PaillierPublicKey> {
        &self.key
    }
}

/// Encrypts `m mod N` under `pk`.
pub fn encrypt<R: RngCore + ?Sized>(pk: &Arc<PaillierPublicKey>, m: &BigUint, rng: &mut R) -> HomCiphertext {
    let r = random_unit(&pk.n, rng);
    let rn = r.modpow(&pk.n, &pk.n_squared);
    HomCiphertext {
        value: pk.with_randomness(m, &rn),
        key: Arc::clone(pk),
    }
}

/// `E(a) ⊞ E(b) = E(a + b mod N)`.
pub fn hom_add(a: &HomCiphertext, b: &HomCiphertext) -> Result<HomCiphertext> {
    if a.key != b.key {
        return Err(Error::KeyMismatch);
    }
    Ok(HomCiphertext {
        value: (&a.value * &b.value) % &a.key.n_squared,
        key: Arc::clone(&a.key),
    })
}

/// `E(a)^k = E(k·a mod N)`.
pub fn hom_scale(c: &HomCiphertext, k: &BigUint) -> HomCiphertext {
    HomCiphertext {
        value: c.value.modpow(k, &c.key.n_squared),
        key: Arc::clone(&c.key),
    }
}

/// Secret factorization plus CRT constants for decryption and fast
/// owner-side encryption.
#[derive(Clone, Debug)]
pub struct PaillierKeyPair {
    public: Arc<PaillierPublicKey>,
    p: BigUint,
    q: BigUint,
    p_squared: BigUint,
    q_squared: BigUint,
    // (-q)^{-1} mod p and (-p)^{-1} mod q: inverses of L_p(g^{p-1}), L_q(g^{q-1})
    hp: BigUint,
    hq: BigUint,
    q_inv_p: BigUint,
    q_squared_inv: BigUint,
    n_mod_phi_p2: BigUint,
    n_mod_phi_q2: BigUint,
}

/// Generates a keypair with a modulus of exactly `bits` bits.
pub fn hom_keygen<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Result<PaillierKeyPair> {
    if bits < MIN_MODULUS_BITS {
        return Err(Error::ModulusTooSmall("fewer than 2048 bits requested"));
    }
    let half = (bits / 2) as usize;
    loop {
        let p = glass_pumpkin::prime::from_rng(half, rng).map_err(|_| Error::Precondition("prime generation failed"))?;
        let q = glass_pumpkin::prime::from_rng(half, rng).map_err(|_| Error::Precondition("prime generation failed"))?;
        if p == q || (&p * &q).bits() != bits {
            continue;
        }
        return PaillierKeyPair::from_primes(p, q);
    }
}

impl PaillierKeyPair {
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self> {
        let n = &p * &q;
        let public = Arc::new(PaillierPublicKey::new(n)?);
        let p_squared = &p * &p;
        let q_squared = &q * &q;
        let hp = (&p - (&q % &p)).modinv(&p).ok_or(Error::Precondition("p and q not coprime"))?;
        let hq = (&q - (&p % &q)).modinv(&q).ok_or(Error::Precondition("p and q not coprime"))?;
        let q_inv_p = q.modinv(&p).ok_or(Error::Precondition("p and q not coprime"))?;
        let q_squared_inv = q_squared.modinv(&p_squared).ok_or(Error::Precondition("p and q not coprime"))?;
        let n_mod_phi_p2 = public.n() % (&p * (&p - 1u32));
        let n_mod_phi_q2 = public.n() % (&q * (&q - 1u32));
        Ok(Self {
            public,
            p,
            q,
            p_squared,
            q_squared,
            hp,
            hq,
            q_inv_p,
            q_squared_inv,
            n_mod_phi_p2,
            n_mod_phi_q2,
        })
    }

    pub fn public(&self) -> &Arc<PaillierPublicKey> {
        &self.public
    }

    pub fn primes(&self) -> (&BigUint, &BigUint) {
        (&self.p, &self.q)
    }

    /// Same distribution as [`encrypt`]; `r^N mod N²` is computed modulo
    /// `p²` and `q²` separately.
    pub fn encrypt<R: RngCore + ?Sized>(&self, m: &BigUint, rng: &mut R) -> HomCiphertext {
        let n = self.public.n();
        let r = random_unit(n, rng);
        let xp = (&r % &self.p_squared).modpow(&self.n_mod_phi_p2, &self.p_squared);
        let xq = (&r % &self.q_squared).modpow(&self.n_mod_phi_q2, &self.q_squared);
        let rn = crt(&xp, &self.p_squared, &xq, &self.q_squared, &self.q_squared_inv);
        HomCiphertext {
            value: self.public.with_randomness(m, &rn),
            key: Arc::clone(&self.public),
        }
    }

    pub fn decrypt(&self, c: &HomCiphertext) -> Result<BigUint> {
        if *c.key != *self.public {
            return Err(Error::KeyMismatch);
        }
        if c.value.is_zero() || !c.value.gcd(self.public.n()).is_one() {
            return Err(Error::DecryptionFailed);
        }
        let l = |x: BigUint, prime: &BigUint| (x - 1u32) / prime;
        let mp = l(c.value.modpow(&(&self.p - 1u32), &self.p_squared), &self.p) * &self.hp % &self.p;
        let mq = l(c.value.modpow(&(&self.q - 1u32), &self.q_squared), &self.q) * &self.hq % &self.q;
        Ok(crt(&mp, &self.p, &mq, &self.q, &self.q_inv_p))
    }
}

/// `x ≡ a (mod m1)`, `x ≡ b (mod m2)` given `m2^{-1} mod m1`.
fn crt(a: &BigUint, m1: &BigUint, b: &BigUint, m2: &BigUint, m2_inv: &BigUint) -> BigUint {
    let diff = (a + m1 - (b % m1)) % m1;
    b + m2 * ((diff * m2_inv) % m1)
}
