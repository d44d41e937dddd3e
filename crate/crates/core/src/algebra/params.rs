use ark_bls12_381::{g1, G1Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ff::field_hashers::DefaultFieldHasher;
use sha2::Sha256;

use super::{hash_to_scalar, pair, Decode, Encode, G1Elem, G2Elem, Reader, Scalar, Writer};
use crate::error::{Error, Result};

/// Prefix of every generator-derivation label.
pub const DOMAIN_PREFIX: &str = "BP3KSEST/";

const HASH_TO_G1_DST: &[u8] = b"BP3KSEST-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_";

/// The same abstract element represented in both source groups, with equal
/// discrete logarithm relative to the two canonical generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualElem {
    pub g1: G1Elem,
    pub g2: G2Elem,
}

impl DualElem {
    pub fn from_exponent(e: &Scalar) -> Self {
        Self {
            g1: G1Elem::generator().pow(e),
            g2: G2Elem::generator().pow(e),
        }
    }

    pub fn pow(&self, e: &Scalar) -> Self {
        Self {
            g1: self.g1.pow(e),
            g2: self.g2.pow(e),
        }
    }

    /// `e(self.g1, g2) = e(g1, self.g2)`.
    pub fn is_consistent(&self) -> bool {
        pair(&self.g1, &G2Elem::generator()) == pair(&G1Elem::generator(), &self.g2)
    }
}

/// Public parameters `(g, g0, g1, h1, h2)` together with the maps `H` and `H1`.
///
/// `g` is the canonical generator pair. `g0` and `g1` must exist on both
/// pairing sides (ciphertexts use `H(ω)` in the first group, trapdoors in
/// the second), so they are derived as `g^{H1(label)}`. `h1` and `h2` only
/// appear in the first group and are hashed to the curve directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParams {
    pub g: DualElem,
    pub g0: DualElem,
    pub g1: DualElem,
    pub h1: G1Elem,
    pub h2: G1Elem,
}

fn label(name: &str) -> String {
    format!("{DOMAIN_PREFIX}{name}")
}

fn hash_to_g1(msg: &[u8]) -> G1Elem {
    let hasher = MapToCurveBasedHasher::<G1Projective, DefaultFieldHasher<Sha256, 128>, WBMap<g1::Config>>::new(
        HASH_TO_G1_DST,
    )
    .expect("valid hash-to-curve configuration");
    G1Elem(hasher.hash(msg).expect("hash to curve is total").into())
}

impl SystemParams {
    /// Deterministically derives the parameters from their labels.
    pub fn derive() -> Self {
        let g = DualElem {
            g1: G1Elem::generator(),
            g2: G2Elem::generator(),
        };
        let g0 = DualElem::from_exponent(&hash_to_scalar(label("g0").as_bytes()));
        let g1 = DualElem::from_exponent(&hash_to_scalar(label("g1").as_bytes()));
        let h1 = hash_to_g1(label("h1").as_bytes());
        let h2 = hash_to_g1(label("h2").as_bytes());
        Self { g, g0, g1, h1, h2 }
    }

    /// `H(ω) = g0 · g1^ω` in the first group.
    pub fn keyword_map(&self, omega: &Scalar) -> G1Elem {
        self.g0.g1 * self.g1.g1.pow(omega)
    }

    /// `H(ω)` in the second group.
    pub fn keyword_map_g2(&self, omega: &Scalar) -> G2Elem {
        self.g0.g2 * self.g1.g2.pow(omega)
    }

    /// All five generators non-identity, dual pairs consistent, and `g`
    /// canonical.
    pub fn validate(&self) -> Result<()> {
        let duals = [self.g, self.g0, self.g1];
        if duals.iter().any(|d| d.g1.is_identity() || d.g2.is_identity())
            || self.h1.is_identity()
            || self.h2.is_identity()
        {
            return Err(Error::Decode("identity generator"));
        }
        if self.g.g1 != G1Elem::generator() || self.g.g2 != G2Elem::generator() {
            return Err(Error::Decode("g must be the canonical generator"));
        }
        if !self.g0.is_consistent() || !self.g1.is_consistent() {
            return Err(Error::Decode("dual generator halves disagree"));
        }
        Ok(())
    }
}

impl Encode for SystemParams {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.g.g1)
            .put(&self.g.g2)
            .put(&self.g0.g1)
            .put(&self.g0.g2)
            .put(&self.g1.g1)
            .put(&self.g1.g2)
            .put(&self.h1)
            .put(&self.h2);
        w.into_bytes()
    }
}

impl Decode for SystemParams {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let params = SystemParams {
            g: DualElem { g1: r.take()?, g2: r.take()? },
            g0: DualElem { g1: r.take()?, g2: r.take()? },
            g1: DualElem { g1: r.take()?, g2: r.take()? },
            h1: r.take()?,
            h2: r.take()?,
        };
        r.finish()?;
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    /// Left-to-right square-and-multiply over the group operation, independent
    /// of the backend's scalar multiplication.
    fn pow_oracle(base: G1Elem, e: &Scalar) -> G1Elem {
        let bits = e.to_biguint();
        let mut acc = G1Elem::identity();
        for i in (0..bits.bits()).rev() {
            acc = acc * acc;
            if bits.bit(i) {
                acc = acc * base;
            }
        }
        acc
    }

    #[test]
    fn derivation_is_reproducible_and_valid() {
        let a = SystemParams::derive();
        assert_eq!(a, SystemParams::derive());
        a.validate().unwrap();
        let gens = [a.g.g1, a.g0.g1, a.g1.g1, a.h1, a.h2];
        let distinct: HashSet<Vec<u8>> = gens.iter().map(|g| g.encode()).collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn keyword_map_edge_exponents() {
        let pp = SystemParams::derive();
        assert_eq!(pp.keyword_map(&Scalar::zero()), pp.g0.g1);
        assert_eq!(pp.keyword_map(&Scalar::one()), pp.g0.g1 * pp.g1.g1);
        assert_eq!(pp.keyword_map_g2(&Scalar::zero()), pp.g0.g2);
    }

    #[test]
    fn keyword_map_matches_square_and_multiply() {
        let pp = SystemParams::derive();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..5 {
            let w = Scalar::random(&mut rng);
            assert_eq!(pp.keyword_map(&w), pp.g0.g1 * pow_oracle(pp.g1.g1, &w));
        }
    }

    #[test]
    fn keyword_map_is_injective_in_sample() {
        let pp = SystemParams::derive();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut seen = HashSet::new();
        for _ in 0..100 {
            assert!(seen.insert(pp.keyword_map(&Scalar::random(&mut rng)).encode()));
        }
    }

    #[test]
    fn both_keyword_maps_agree_under_pairing() {
        let pp = SystemParams::derive();
        let w = Scalar::from_u64(99);
        assert_eq!(
            pair(&pp.keyword_map(&w), &pp.g.g2),
            pair(&pp.g.g1, &pp.keyword_map_g2(&w))
        );
    }

    #[test]
    fn params_round_trip_and_tamper_rejected() {
        let pp = SystemParams::derive();
        let bytes = pp.encode();
        assert_eq!(SystemParams::decode(&bytes).unwrap(), pp);

        let mut forged = pp.clone();
        forged.g0.g2 = forged.g1.g2;
        assert!(SystemParams::decode(&forged.encode()).is_err());
    }
}
