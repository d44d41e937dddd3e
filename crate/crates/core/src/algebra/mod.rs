//! Bilinear-group layer over BLS12-381.
//!
//! The protocol is written for a symmetric pairing `e: G × G → G_T`. The
//! backend is asymmetric (`e: G1 × G2 → G_T`), so every protocol element is
//! assigned to the side it is paired on. Elements that must appear on both
//! sides with the same discrete logarithm (the generators `g`, `g0`, `g1`)
//! are carried as a [`DualElem`].
//!
//! Scalars and group elements use multiplicative notation to match the
//! protocol equations: `a * b` is the group operation and `a.pow(&x)` is
//! exponentiation.

mod encoding;
mod params;

pub use encoding::{Decode, Encode, Reader, Writer};
pub use params::{DualElem, SystemParams, DOMAIN_PREFIX};

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_bigint::BigUint;
use rand_core::RngCore;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCALAR_LEN: usize = 32;
pub const G1_LEN: usize = 48;
pub const G2_LEN: usize = 96;
pub const GT_LEN: usize = 576;

/// Element of `Z_p`, `p` the prime order of the pairing groups.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Scalar(pub(crate) Fr);

impl Scalar {
    pub fn zero() -> Self {
        Self(Fr::zero())
    }

    pub fn one() -> Self {
        Self(Fr::one())
    }

    pub fn from_u64(v: u64) -> Self {
        Self(Fr::from(v))
    }

    /// Uniform in `[0, p)`; 512 random bits reduced mod `p`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        Self(Fr::from_le_bytes_mod_order(&wide))
    }

    /// Uniform in `[1, p)`.
    pub fn random_nonzero<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        loop {
            let s = Self::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.inverse().map(Self)
    }

    /// The group order `p`.
    pub fn modulus() -> BigUint {
        BigUint::from_bytes_le(&Fr::MODULUS.to_bytes_le())
    }

    pub fn to_biguint(&self) -> BigUint {
        BigUint::from_bytes_le(&self.0.into_bigint().to_bytes_le())
    }

    /// Reduces an arbitrary non-negative integer mod `p`.
    pub fn from_biguint(v: &BigUint) -> Self {
        Self(Fr::from_le_bytes_mod_order(&v.to_bytes_le()))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.encode()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Encode for Scalar {
    /// 32-byte big-endian.
    fn encode(&self) -> Vec<u8> {
        self.0.into_bigint().to_bytes_be()
    }
}

impl Decode for Scalar {
    fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != SCALAR_LEN {
            return Err(Error::Decode("scalar must be 32 bytes"));
        }
        let v = BigUint::from_bytes_be(bytes);
        if v >= Scalar::modulus() {
            return Err(Error::Decode("scalar not reduced mod p"));
        }
        Ok(Scalar::from_biguint(&v))
    }
}

macro_rules! curve_group {
    ($(#[$meta:meta])* $name:ident, $proj:ty, $affine:ty, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq)]
        pub struct $name(pub(crate) $proj);

        impl $name {
            pub fn generator() -> Self {
                Self(<$proj>::generator())
            }

            pub fn identity() -> Self {
                Self(<$proj>::zero())
            }

            pub fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            pub fn pow(&self, e: &Scalar) -> Self {
                Self(self.0 * e.0)
            }

            pub fn inverse(&self) -> Self {
                Self(-self.0)
            }

            /// `∏ bases[i]^exps[i]` by multi-scalar multiplication.
            pub fn product_of_powers(bases: &[Self], exps: &[Scalar]) -> Self {
                assert_eq!(bases.len(), exps.len());
                let proj: Vec<$proj> = bases.iter().map(|b| b.0).collect();
                let affine = <$proj>::normalize_batch(&proj);
                let scalars: Vec<Fr> = exps.iter().map(|e| e.0).collect();
                Self(<$proj>::msm(&affine, &scalars).expect("length checked"))
            }

            pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
                Self::generator().pow(&Scalar::random_nonzero(rng))
            }
        }

        // groups are written multiplicatively; arkworks stores them additively
        #[allow(clippy::suspicious_arithmetic_impl)]
        impl Mul for $name {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                $name(self.0 + rhs.0)
            }
        }

        #[allow(clippy::suspicious_arithmetic_impl)]
        impl Div for $name {
            type Output = $name;
            fn div(self, rhs: $name) -> $name {
                $name(self.0 - rhs.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), hex::encode(self.encode()))
            }
        }

        impl Encode for $name {
            /// Compressed point encoding.
            fn encode(&self) -> Vec<u8> {
                let mut out = Vec::with_capacity($len);
                self.0
                    .into_affine()
                    .serialize_compressed(&mut out)
                    .expect("writing to a Vec cannot fail");
                out
            }
        }

        impl Decode for $name {
            /// Rejects wrong lengths, off-curve and out-of-subgroup points.
            fn decode(bytes: &[u8]) -> Result<Self> {
                if bytes.len() != $len {
                    return Err(Error::Decode(concat!(stringify!($name), " has wrong length")));
                }
                let affine = <$affine>::deserialize_compressed(bytes)
                    .map_err(|_| Error::Decode(concat!("invalid ", stringify!($name), " encoding")))?;
                Ok(Self(affine.into()))
            }
        }
    };
}

curve_group!(
    /// Element of the first source group.
    G1Elem, G1Projective, G1Affine, G1_LEN
);
curve_group!(
    /// Element of the second source group.
    G2Elem, G2Projective, G2Affine, G2_LEN
);

/// Element of the target group `G_T`.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GtElem(pub(crate) PairingOutput<Bls12_381>);

impl GtElem {
    pub fn identity() -> Self {
        Self(PairingOutput::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn pow(&self, e: &Scalar) -> Self {
        Self(self.0 * e.0)
    }

    pub fn inverse(&self) -> Self {
        Self(-self.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for GtElem {
    type Output = GtElem;
    fn mul(self, rhs: GtElem) -> GtElem {
        GtElem(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for GtElem {
    type Output = GtElem;
    fn div(self, rhs: GtElem) -> GtElem {
        GtElem(self.0 - rhs.0)
    }
}

impl fmt::Debug for GtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.encode();
        write!(f, "GtElem({}…)", hex::encode(&bytes[..16]))
    }
}

impl Encode for GtElem {
    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(GT_LEN);
        self.0
            .serialize_compressed(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }
}

impl Decode for GtElem {
    /// Rejects elements outside the order-`p` subgroup (including zero).
    fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != GT_LEN {
            return Err(Error::Decode("GtElem has wrong length"));
        }
        PairingOutput::<Bls12_381>::deserialize_compressed(bytes)
            .map(Self)
            .map_err(|_| Error::Decode("invalid GtElem encoding"))
    }
}

/// `e(a, b)`.
pub fn pair(a: &G1Elem, b: &G2Elem) -> GtElem {
    GtElem(Bls12_381::pairing(a.0, b.0))
}

/// `∏ e(a[i], b[i])` with a single final exponentiation.
pub fn multi_pair(a: &[G1Elem], b: &[G2Elem]) -> GtElem {
    assert_eq!(a.len(), b.len());
    GtElem(Bls12_381::multi_pairing(
        a.iter().map(|x| x.0.into_affine()),
        b.iter().map(|x| x.0.into_affine()),
    ))
}

/// Second-group points with precomputed Miller-loop lines, for repeated
/// pairings against the same right-hand side.
#[derive(Clone, Debug)]
pub struct PreparedG2(Vec<<Bls12_381 as Pairing>::G2Prepared>);

impl PreparedG2 {
    pub fn new(points: &[G2Elem]) -> Self {
        Self(points.iter().map(|p| p.0.into()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `∏ e(a[i], prepared[i])`.
    pub fn multi_pair(&self, a: &[G1Elem]) -> GtElem {
        assert_eq!(a.len(), self.0.len());
        let mlo = Bls12_381::multi_miller_loop(a.iter().map(|x| x.0.into_affine()), self.0.iter().cloned());
        GtElem(Bls12_381::final_exponentiation(mlo).expect("final exponentiation of a Miller loop output"))
    }
}

/// `H1`: SHA-256 digest read as a big-endian integer, reduced mod `p`.
pub fn hash_to_scalar(data: &[u8]) -> Scalar {
    let digest = Sha256::digest(data);
    Scalar(Fr::from_be_bytes_mod_order(&digest))
}

/// Maps a keyword string to its exponent `ω`.
pub fn keyword_scalar(keyword: &str) -> Scalar {
    hash_to_scalar(keyword.as_bytes())
}

/// Fiat-Shamir transcript: length-prefixed canonical encodings, hashed with `H1`.
#[derive(Default, Debug, Clone)]
pub struct Transcript {
    writer: Writer,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append<E: Encode + ?Sized>(&mut self, value: &E) -> &mut Self {
        self.writer.put(value);
        self
    }

    pub fn challenge(&self) -> Scalar {
        hash_to_scalar(self.writer.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(0xA1)
    }

    #[test]
    fn pairing_is_bilinear() {
        let g1 = G1Elem::generator();
        let g2 = G2Elem::generator();
        let base = pair(&g1, &g2);
        assert_eq!(pair(&g1.pow(&Scalar::from_u64(2)), &g2.pow(&Scalar::from_u64(3))), base.pow(&Scalar::from_u64(6)));

        let mut rng = rng();
        for _ in 0..10 {
            let a = Scalar::random(&mut rng);
            let b = Scalar::random(&mut rng);
            assert_eq!(pair(&g1.pow(&a), &g2.pow(&b)), base.pow(&(a * b)));
        }
    }

    #[test]
    fn pairing_is_non_degenerate() {
        assert!(!pair(&G1Elem::generator(), &G2Elem::generator()).is_identity());
    }

    #[test]
    fn exponent_order_does_not_matter() {
        let mut rng = rng();
        let (g1, g2) = (G1Elem::generator(), G2Elem::generator());
        for _ in 0..100 {
            let a = Scalar::random(&mut rng);
            let b = Scalar::random(&mut rng);
            assert_eq!(pair(&g1.pow(&a), &g2.pow(&b)), pair(&g1.pow(&b), &g2.pow(&a)));
        }
    }

    #[test]
    fn multi_pair_matches_product() {
        let mut rng = rng();
        let a: Vec<G1Elem> = (0..5).map(|_| G1Elem::random(&mut rng)).collect();
        let b: Vec<G2Elem> = (0..5).map(|_| G2Elem::random(&mut rng)).collect();
        let product = a.iter().zip(&b).fold(GtElem::identity(), |acc, (x, y)| acc * pair(x, y));
        assert_eq!(multi_pair(&a, &b), product);
        assert_eq!(PreparedG2::new(&b).multi_pair(&a), product);
    }

    #[test]
    fn hash_to_scalar_matches_digest_oracle() {
        let p = Scalar::modulus();
        for input in [&b""[..], b"flu", &[0xffu8; 100]] {
            // independent path: digest → big integer → mod p
            let digest = Sha256::digest(input);
            let expected = BigUint::from_bytes_be(&digest).mod_floor(&p);
            assert_eq!(hash_to_scalar(input).to_biguint(), expected);
        }
        assert_eq!(hash_to_scalar(b"x"), hash_to_scalar(b"x"));
    }

    #[test]
    fn hash_to_scalar_no_collisions_in_sample() {
        let mut rng = rng();
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let mut buf = [0u8; 32];
            rng.fill_bytes(&mut buf);
            assert!(seen.insert(hash_to_scalar(&buf).encode()));
        }
    }

    #[test]
    fn scalar_field_against_bigint_oracle() {
        let p = Scalar::modulus();
        let mut rng = rng();
        for _ in 0..200 {
            let a = Scalar::random(&mut rng);
            let b = Scalar::random(&mut rng);
            let (ai, bi) = (a.to_biguint(), b.to_biguint());
            assert_eq!((a + b).to_biguint(), (&ai + &bi).mod_floor(&p));
            assert_eq!((a * b).to_biguint(), (&ai * &bi).mod_floor(&p));
            assert_eq!((a - b).to_biguint(), (&ai + &p - &bi).mod_floor(&p));
            if !a.is_zero() {
                assert_eq!(a * a.inverse().unwrap(), Scalar::one());
            }
        }
        assert!(Scalar::zero().inverse().is_none());
        assert!(p.bits() >= 160);
    }

    #[test]
    fn encodings_round_trip_and_are_fixed_length() {
        let mut rng = rng();
        let s = Scalar::random(&mut rng);
        let a = G1Elem::random(&mut rng);
        let b = G2Elem::random(&mut rng);
        let t = pair(&a, &b);
        assert_eq!(Scalar::decode(&s.encode()).unwrap(), s);
        assert_eq!(G1Elem::decode(&a.encode()).unwrap(), a);
        assert_eq!(G2Elem::decode(&b.encode()).unwrap(), b);
        assert_eq!(GtElem::decode(&t.encode()).unwrap(), t);
        assert_eq!(s.encode().len(), SCALAR_LEN);
        assert_eq!(a.encode().len(), G1_LEN);
        assert_eq!(b.encode().len(), G2_LEN);
        assert_eq!(t.encode().len(), GT_LEN);
        assert_eq!(G1Elem::decode(&G1Elem::generator().encode()).unwrap(), G1Elem::generator());
    }

    #[test]
    fn all_zero_bytes_are_rejected() {
        assert!(G1Elem::decode(&[0u8; G1_LEN]).is_err());
        assert!(G2Elem::decode(&[0u8; G2_LEN]).is_err());
        assert!(GtElem::decode(&[0u8; GT_LEN]).is_err());
    }

    #[test]
    fn non_canonical_scalar_rejected() {
        let mut bytes = vec![0u8; 32];
        let p = Scalar::modulus().to_bytes_be();
        bytes[32 - p.len()..].copy_from_slice(&p);
        assert!(Scalar::decode(&bytes).is_err());
        assert!(Scalar::decode(&[0u8; 31]).is_err());
    }

    #[test]
    fn off_curve_point_rejected() {
        let mut bytes = G1Elem::generator().encode();
        bytes[G1_LEN - 1] ^= 1;
        bytes[G1_LEN - 2] ^= 0x40;
        // a random x has ~1/2 chance to be on curve; scan for an off-curve one
        let mut rejected = false;
        for i in 0..16u8 {
            bytes[G1_LEN - 1] = i;
            if G1Elem::decode(&bytes).is_err() {
                rejected = true;
                break;
            }
        }
        assert!(rejected);
    }

    #[test]
    fn target_element_outside_subgroup_rejected() {
        let t = pair(&G1Elem::generator(), &G2Elem::generator());
        let mut bytes = t.encode();
        bytes[0] ^= 1;
        assert!(GtElem::decode(&bytes).is_err());
    }

    #[test]
    fn encodings_are_injective_in_sample() {
        let mut rng = rng();
        let mut seen = HashSet::new();
        for _ in 0..100 {
            assert!(seen.insert(G1Elem::random(&mut rng).encode()));
        }
    }

    #[test]
    fn product_of_powers_matches_naive() {
        let mut rng = rng();
        let bases: Vec<G1Elem> = (0..4).map(|_| G1Elem::random(&mut rng)).collect();
        let exps: Vec<Scalar> = (0..4).map(|_| Scalar::random(&mut rng)).collect();
        let naive = bases.iter().zip(&exps).fold(G1Elem::identity(), |acc, (b, e)| acc * b.pow(e));
        assert_eq!(G1Elem::product_of_powers(&bases, &exps), naive);
    }

    #[test]
    fn transcript_depends_on_field_boundaries() {
        let mut a = Transcript::new();
        a.append(&b"ab"[..]).append(&b"c"[..]);
        let mut b = Transcript::new();
        b.append(&b"a"[..]).append(&b"bc"[..]);
        assert_ne!(a.challenge(), b.challenge());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scalar_encoding_is_canonical(bytes in proptest::collection::vec(any::<u8>(), 64)) {
                let s = Scalar(Fr::from_le_bytes_mod_order(&bytes));
                let enc = s.encode();
                prop_assert_eq!(Scalar::decode(&enc).unwrap().encode(), enc);
            }

            #[test]
            fn scalar_distributes(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
                let (a, b, c) = (Scalar::from_u64(a), Scalar::from_u64(b), Scalar::from_u64(c));
                prop_assert_eq!(a * (b + c), a * b + a * c);
                prop_assert_eq!(a + (-a), Scalar::zero());
            }
        }
    }
}
