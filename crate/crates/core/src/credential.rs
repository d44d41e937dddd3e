//! CL-style credential on a user's secret key: issuance, re-randomization
//! for unlinkable presentation, and the pairing half of verification.
//!
//! Credential components live in the first group and the issuer's public
//! key in the second, so every pairing below is `e(credential part, key part)`.

use rand_core::RngCore;

use crate::algebra::{pair, Decode, Encode, G1Elem, G2Elem, GtElem, Reader, Scalar, SystemParams, Writer};
use crate::error::{Error, Result};

/// `(X, Y) = (g^x, g^y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaPublicKey {
    pub x: G2Elem,
    pub y: G2Elem,
}

#[derive(Clone, Debug)]
pub struct CaKeyPair {
    x: Scalar,
    y: Scalar,
    public: CaPublicKey,
}

impl CaKeyPair {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self::from_secret(Scalar::random_nonzero(rng), Scalar::random_nonzero(rng))
    }

    pub fn from_secret(x: Scalar, y: Scalar) -> Self {
        let g = G2Elem::generator();
        let public = CaPublicKey { x: g.pow(&x), y: g.pow(&y) };
        Self { x, y, public }
    }

    pub fn public(&self) -> &CaPublicKey {
        &self.public
    }

    pub fn secret(&self) -> (Scalar, Scalar) {
        (self.x, self.y)
    }
}

/// `σ = (a, b, c)` with `a = g^{r_u}`, `b = a^y`, `c = a^x · Y_u^{r_u·x·y}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Credential {
    pub a: G1Elem,
    pub b: G1Elem,
    pub c: G1Elem,
}

/// `σ̃ = (a^{r'}, b^{r'}, c^{r'·r})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomizedCredential {
    pub a_tilde: G1Elem,
    pub b_tilde: G1Elem,
    pub c_hat: G1Elem,
}

/// The three target-group values the possession proof speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShowPairings {
    /// `e(ĉ, g)`
    pub v_s: GtElem,
    /// `e(ã, X)`
    pub v_x: GtElem,
    /// `e(b̃, X)`
    pub v_xy: GtElem,
}

/// Signs the user key `Y_u`. Callers must have verified the user's proof of
/// key possession first.
pub fn issue<R: RngCore + ?Sized>(ca: &CaKeyPair, y_u: &G1Elem, rng: &mut R) -> Result<Credential> {
    if y_u.is_identity() {
        return Err(Error::Precondition("user key is the identity"));
    }
    let r_u = Scalar::random_nonzero(rng);
    let a = G1Elem::generator().pow(&r_u);
    let b = a.pow(&ca.y);
    let c = a.pow(&ca.x) * y_u.pow(&(r_u * ca.x * ca.y));
    Ok(Credential { a, b, c })
}

pub fn randomize(cred: &Credential, r: &Scalar, r_prime: &Scalar) -> Result<RandomizedCredential> {
    if r.is_zero() || r_prime.is_zero() {
        return Err(Error::Precondition("credential randomizers must be nonzero"));
    }
    Ok(RandomizedCredential {
        a_tilde: cred.a.pow(r_prime),
        b_tilde: cred.b.pow(r_prime),
        c_hat: cred.c.pow(&(*r_prime * *r)),
    })
}

/// `e(ã, Y) = e(b̃, g)` with `ã` not the identity.
pub fn show_verify(rc: &RandomizedCredential, pk: &CaPublicKey, params: &SystemParams) -> bool {
    if rc.a_tilde.is_identity() {
        return false;
    }
    pair(&rc.a_tilde, &pk.y) == pair(&rc.b_tilde, &params.g.g2)
}

impl RandomizedCredential {
    pub fn pairings(&self, pk: &CaPublicKey, params: &SystemParams) -> ShowPairings {
        ShowPairings {
            v_s: pair(&self.c_hat, &params.g.g2),
            v_x: pair(&self.a_tilde, &pk.x),
            v_xy: pair(&self.b_tilde, &pk.x),
        }
    }
}

impl Encode for CaPublicKey {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.x).put(&self.y);
        w.into_bytes()
    }
}

impl Decode for CaPublicKey {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let pk = CaPublicKey { x: r.take()?, y: r.take()? };
        r.finish()?;
        Ok(pk)
    }
}

impl Encode for CaKeyPair {
    /// Secret exponents only; the public half is recomputed on decode.
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.x).put(&self.y);
        w.into_bytes()
    }
}

impl Decode for CaKeyPair {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let (x, y) = (r.take()?, r.take()?);
        r.finish()?;
        Ok(CaKeyPair::from_secret(x, y))
    }
}

macro_rules! triple_codec {
    ($ty:ident, $a:ident, $b:ident, $c:ident) => {
        impl Encode for $ty {
            fn encode(&self) -> Vec<u8> {
                let mut w = Writer::new();
                w.put(&self.$a).put(&self.$b).put(&self.$c);
                w.into_bytes()
            }
        }

        impl Decode for $ty {
            fn decode(bytes: &[u8]) -> Result<Self> {
                let mut r = Reader::new(bytes);
                let v = $ty { $a: r.take()?, $b: r.take()?, $c: r.take()? };
                r.finish()?;
                Ok(v)
            }
        }
    };
}

triple_codec!(Credential, a, b, c);
triple_codec!(RandomizedCredential, a_tilde, b_tilde, c_hat);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Fixture {
        params: SystemParams,
        ca: CaKeyPair,
        x_u: Scalar,
        y_u: G1Elem,
        rng: ChaCha20Rng,
    }

    fn fixture(seed: u64) -> Fixture {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ca = CaKeyPair::generate(&mut rng);
        let x_u = Scalar::random_nonzero(&mut rng);
        Fixture {
            params: SystemParams::derive(),
            ca,
            x_u,
            y_u: G1Elem::generator().pow(&x_u),
            rng,
        }
    }

    #[test]
    fn issued_credential_satisfies_both_relations() {
        let mut f = fixture(1);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        let pk = f.ca.public();
        let g2 = f.params.g.g2;
        assert_eq!(pair(&cred.a, &pk.y), pair(&cred.b, &g2));
        assert_eq!(pair(&cred.c, &g2), pair(&cred.a, &pk.x) * pair(&cred.b, &pk.x).pow(&f.x_u));
    }

    #[test]
    fn reissue_is_fresh() {
        let mut f = fixture(2);
        let c1 = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        let c2 = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        assert_ne!(c1.a, c2.a);
        assert_ne!(c1.b, c2.b);
        assert_ne!(c1.c, c2.c);
    }

    #[test]
    fn identity_user_key_is_refused() {
        let mut f = fixture(3);
        assert!(issue(&f.ca, &G1Elem::identity(), &mut f.rng).is_err());
    }

    #[test]
    fn unit_randomizers_are_identity() {
        let mut f = fixture(4);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        let rc = randomize(&cred, &Scalar::one(), &Scalar::one()).unwrap();
        assert_eq!((rc.a_tilde, rc.b_tilde, rc.c_hat), (cred.a, cred.b, cred.c));
    }

    #[test]
    fn zero_randomizer_rejected() {
        let mut f = fixture(5);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        assert!(randomize(&cred, &Scalar::zero(), &Scalar::one()).is_err());
        assert!(randomize(&cred, &Scalar::one(), &Scalar::zero()).is_err());
    }

    #[test]
    fn randomized_credential_verifies_and_satisfies_show_relation() {
        let mut f = fixture(6);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        for _ in 0..5 {
            let r = Scalar::random_nonzero(&mut f.rng);
            let rp = Scalar::random_nonzero(&mut f.rng);
            let rc = randomize(&cred, &r, &rp).unwrap();
            assert!(show_verify(&rc, f.ca.public(), &f.params));
            let v = rc.pairings(f.ca.public(), &f.params);
            assert_eq!(v.v_s.pow(&r.inverse().unwrap()), v.v_x * v.v_xy.pow(&f.x_u));
        }
    }

    #[test]
    fn independent_randomizations_differ_everywhere() {
        let mut f = fixture(7);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        let mut fresh = || {
            let r = Scalar::random_nonzero(&mut f.rng);
            let rp = Scalar::random_nonzero(&mut f.rng);
            randomize(&cred, &r, &rp).unwrap()
        };
        let (x, y) = (fresh(), fresh());
        assert_ne!(x.a_tilde.encode(), y.a_tilde.encode());
        assert_ne!(x.b_tilde.encode(), y.b_tilde.encode());
        assert_ne!(x.c_hat.encode(), y.c_hat.encode());
    }

    #[test]
    fn mutated_or_degenerate_presentations_fail() {
        let mut f = fixture(8);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        let rc = randomize(&cred, &Scalar::from_u64(3), &Scalar::from_u64(5)).unwrap();

        let mut swapped = rc;
        swapped.a_tilde = G1Elem::generator();
        assert!(!show_verify(&swapped, f.ca.public(), &f.params));

        let degenerate = RandomizedCredential {
            a_tilde: G1Elem::identity(),
            b_tilde: G1Elem::identity(),
            c_hat: G1Elem::identity(),
        };
        assert!(!show_verify(&degenerate, f.ca.public(), &f.params));
    }

    #[test]
    fn codec_round_trip() {
        let mut f = fixture(9);
        let cred = issue(&f.ca, &f.y_u, &mut f.rng).unwrap();
        assert_eq!(Credential::decode(&cred.encode()).unwrap(), cred);
        let ca = CaKeyPair::decode(&f.ca.encode()).unwrap();
        assert_eq!(ca.public(), f.ca.public());
        assert_eq!(CaPublicKey::decode(&f.ca.public().encode()).unwrap(), *f.ca.public());
    }
}
