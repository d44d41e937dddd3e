//! Keyword ciphertexts, trapdoors and the search test
//!
//! ```text
//! C' = Ω^s   C0 = H(ω)^s   C1 = ν1^{s−s1}   C2 = ν2^{s1}   C3 = ν3^{s−s2}   C4 = ν4^{s2}
//! Test:  e(C0,d0)·e(C1,d1)·e(C2,d2)·e(C3,d3)·e(C4,d4)·C' = 1
//! ```

use rand_core::RngCore;

use super::keys::{TgcKeyPair, TgcPublicKey};
use crate::algebra::{keyword_scalar, multi_pair, Decode, Encode, G1Elem, G2Elem, GtElem, PreparedG2, Reader, Scalar, SystemParams, Writer};
use crate::error::Result;

/// `T_ω = (d0, …, d4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trapdoor {
    pub d: [G2Elem; 5],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub c_prime: GtElem,
    /// `C0 … C4`
    pub c: [G1Elem; 5],
}

pub(crate) fn encrypt_with(tgc_pk: &TgcPublicKey, omega: &Scalar, s: &Scalar, s1: &Scalar, s2: &Scalar, params: &SystemParams) -> Ciphertext {
    let nu = &tgc_pk.nu;
    Ciphertext {
        c_prime: tgc_pk.omega.pow(s),
        c: [
            params.keyword_map(omega).pow(s),
            nu[0].pow(&(*s - *s1)),
            nu[1].pow(s1),
            nu[2].pow(&(*s - *s2)),
            nu[3].pow(s2),
        ],
    }
}

/// Fresh `s ≠ 0`; `s1, s2` uniform.
pub fn peks_encrypt<R: RngCore + ?Sized>(tgc_pk: &TgcPublicKey, keyword: &str, params: &SystemParams, rng: &mut R) -> Ciphertext {
    let s = Scalar::random_nonzero(rng);
    let (s1, s2) = (Scalar::random(rng), Scalar::random(rng));
    encrypt_with(tgc_pk, &keyword_scalar(keyword), &s, &s1, &s2, params)
}

pub fn test(trapdoor: &Trapdoor, ct: &Ciphertext) -> bool {
    (multi_pair(&ct.c, &trapdoor.d) * ct.c_prime).is_identity()
}

/// A trapdoor with its Miller-loop precomputation, for testing many ciphertexts.
pub struct PreparedTrapdoor(PreparedG2);

impl PreparedTrapdoor {
    pub fn new(trapdoor: &Trapdoor) -> Self {
        Self(PreparedG2::new(&trapdoor.d))
    }

    pub fn test(&self, ct: &Ciphertext) -> bool {
        (self.0.multi_pair(&ct.c) * ct.c_prime).is_identity()
    }
}

pub(crate) fn extract_with(tgc: &TgcKeyPair, omega: &Scalar, rho1: &Scalar, rho2: &Scalar, params: &SystemParams) -> Trapdoor {
    let [t0, t1, t2, t3, t4] = *tgc.secret();
    let g = params.g.g2;
    let h = params.keyword_map_g2(omega);
    Trapdoor {
        d: [
            g.pow(&(*rho1 * t1 * t2 + *rho2 * t3 * t4)),
            G2Elem::product_of_powers(&[g, h], &[-(t0 * t2), -(*rho1 * t2)]),
            G2Elem::product_of_powers(&[g, h], &[-(t0 * t1), -(*rho1 * t1)]),
            h.pow(&-(*rho2 * t4)),
            h.pow(&-(*rho2 * t3)),
        ],
    }
}

/// Trapdoor computed by the TGC directly from the keyword, for fresh `ρ1, ρ2`.
pub fn extract_direct<R: RngCore + ?Sized>(tgc: &TgcKeyPair, keyword: &str, params: &SystemParams, rng: &mut R) -> Trapdoor {
    let (rho1, rho2) = (Scalar::random_nonzero(rng), Scalar::random_nonzero(rng));
    extract_with(tgc, &keyword_scalar(keyword), &rho1, &rho2, params)
}

impl Encode for Trapdoor {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        for d in &self.d {
            w.put(d);
        }
        w.into_bytes()
    }
}

impl Decode for Trapdoor {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let t = Trapdoor { d: [r.take()?, r.take()?, r.take()?, r.take()?, r.take()?] };
        r.finish()?;
        Ok(t)
    }
}

impl Encode for Ciphertext {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.c_prime);
        for c in &self.c {
            w.put(c);
        }
        w.into_bytes()
    }
}

impl Decode for Ciphertext {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let ct = Ciphertext {
            c_prime: r.take()?,
            c: [r.take()?, r.take()?, r.take()?, r.take()?, r.take()?],
        };
        r.finish()?;
        Ok(ct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::keys::keygen_tgc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn fixture(seed: u64) -> (SystemParams, TgcKeyPair, ChaCha20Rng) {
        let pp = SystemParams::derive();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let tgc = keygen_tgc(&pp, &mut rng);
        (pp, tgc, rng)
    }

    #[test]
    fn zero_randomness_ciphertext_is_degenerate() {
        let (pp, tgc, mut rng) = fixture(20);
        let z = Scalar::zero();
        let ct = encrypt_with(tgc.public(), &keyword_scalar("flu"), &z, &z, &z, &pp);
        assert!(ct.c_prime.is_identity());
        assert!(ct.c.iter().all(G1Elem::is_identity));
        // matches every trapdoor, which is why s = 0 is never sampled
        let td = extract_direct(&tgc, "asthma", &pp, &mut rng);
        assert!(test(&td, &ct));
    }

    #[test]
    fn direct_trapdoor_matches_only_its_keyword() {
        let (pp, tgc, mut rng) = fixture(21);
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let tds: Vec<_> = words.iter().map(|w| PreparedTrapdoor::new(&extract_direct(&tgc, w, &pp, &mut rng))).collect();
        let cts: Vec<_> = words.iter().map(|w| peks_encrypt(tgc.public(), w, &pp, &mut rng)).collect();
        for (i, td) in tds.iter().enumerate() {
            for (j, ct) in cts.iter().enumerate() {
                assert_eq!(td.test(ct), i == j, "trapdoor {i} vs ciphertext {j}");
            }
        }
    }

    #[test]
    fn prepared_and_plain_test_agree() {
        let (pp, tgc, mut rng) = fixture(22);
        let td = extract_direct(&tgc, "flu", &pp, &mut rng);
        let prepared = PreparedTrapdoor::new(&td);
        for kw in ["flu", "cold"] {
            let ct = peks_encrypt(tgc.public(), kw, &pp, &mut rng);
            assert_eq!(test(&td, &ct), prepared.test(&ct));
        }
    }

    #[test]
    fn encryptions_are_randomized() {
        let (pp, tgc, mut rng) = fixture(23);
        let a = peks_encrypt(tgc.public(), "flu", &pp, &mut rng);
        let b = peks_encrypt(tgc.public(), "flu", &pp, &mut rng);
        assert_ne!(a.c_prime, b.c_prime);
        for i in 0..5 {
            assert_ne!(a.c[i], b.c[i]);
        }
    }

    #[test]
    fn codecs_round_trip() {
        let (pp, tgc, mut rng) = fixture(24);
        let td = extract_direct(&tgc, "flu", &pp, &mut rng);
        let ct = peks_encrypt(tgc.public(), "flu", &pp, &mut rng);
        assert_eq!(Trapdoor::decode(&td.encode()).unwrap(), td);
        assert_eq!(Ciphertext::decode(&ct.encode()).unwrap(), ct);
        assert!(Ciphertext::decode(&ct.encode()[1..]).is_err());
    }
}
