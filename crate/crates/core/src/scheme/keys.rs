use rand_core::RngCore;

use crate::algebra::{pair, Decode, Encode, G1Elem, GtElem, Reader, Scalar, SystemParams, Writer};
use crate::credential::{CaKeyPair, CaPublicKey};
use crate::error::{Error, Result};

/// `(Ω, ν1, ν2, ν3, ν4) = (e(g,g)^{t0·t1·t2}, g^{t1}, g^{t2}, g^{t3}, g^{t4})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TgcPublicKey {
    pub omega: GtElem,
    pub nu: [G1Elem; 4],
}

#[derive(Clone, Debug)]
pub struct TgcKeyPair {
    t: [Scalar; 5],
    public: TgcPublicKey,
}

impl TgcKeyPair {
    pub fn from_secret(t: [Scalar; 5], params: &SystemParams) -> Result<Self> {
        if t.iter().any(Scalar::is_zero) {
            return Err(Error::Precondition("TGC exponents must be nonzero"));
        }
        let g = params.g.g1;
        let public = TgcPublicKey {
            omega: pair(&g, &params.g.g2).pow(&(t[0] * t[1] * t[2])),
            nu: [g.pow(&t[1]), g.pow(&t[2]), g.pow(&t[3]), g.pow(&t[4])],
        };
        Ok(Self { t, public })
    }

    /// `(t0, …, t4)`.
    pub fn secret(&self) -> &[Scalar; 5] {
        &self.t
    }

    pub fn public(&self) -> &TgcPublicKey {
        &self.public
    }
}

#[derive(Clone, Debug)]
pub struct TracerKeyPair {
    x_t: Scalar,
    public: G1Elem,
}

impl TracerKeyPair {
    pub fn from_secret(x_t: Scalar, params: &SystemParams) -> Self {
        Self { x_t, public: params.g.g1.pow(&x_t) }
    }

    pub fn secret(&self) -> &Scalar {
        &self.x_t
    }

    /// `Y_t`.
    pub fn public(&self) -> &G1Elem {
        &self.public
    }
}

#[derive(Clone, Debug)]
pub struct UserKeyPair {
    id: String,
    x_u: Scalar,
    public: G1Elem,
}

impl UserKeyPair {
    pub fn from_secret(id: impl Into<String>, x_u: Scalar, params: &SystemParams) -> Result<Self> {
        if x_u.is_zero() {
            return Err(Error::Precondition("user secret key must be nonzero"));
        }
        Ok(Self { id: id.into(), x_u, public: params.g.g1.pow(&x_u) })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn secret(&self) -> &Scalar {
        &self.x_u
    }

    /// `Y_u`.
    pub fn public(&self) -> &G1Elem {
        &self.public
    }
}

/// Public keys every party needs to check trapdoor records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuthorityKeys {
    pub ca: CaPublicKey,
    /// `Y_t`
    pub tracer: G1Elem,
}

pub fn keygen_ca<R: RngCore + ?Sized>(rng: &mut R) -> CaKeyPair {
    CaKeyPair::generate(rng)
}

pub fn keygen_tgc<R: RngCore + ?Sized>(params: &SystemParams, rng: &mut R) -> TgcKeyPair {
    let t = std::array::from_fn(|_| Scalar::random_nonzero(rng));
    TgcKeyPair::from_secret(t, params).expect("sampled exponents are nonzero")
}

pub fn keygen_tr<R: RngCore + ?Sized>(params: &SystemParams, rng: &mut R) -> TracerKeyPair {
    TracerKeyPair::from_secret(Scalar::random_nonzero(rng), params)
}

pub fn keygen_user<R: RngCore + ?Sized>(id: impl Into<String>, params: &SystemParams, rng: &mut R) -> UserKeyPair {
    UserKeyPair::from_secret(id, Scalar::random_nonzero(rng), params).expect("sampled key is nonzero")
}

impl Encode for TgcPublicKey {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.omega);
        for nu in &self.nu {
            w.put(nu);
        }
        w.into_bytes()
    }
}

impl Decode for TgcPublicKey {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let pk = TgcPublicKey {
            omega: r.take()?,
            nu: [r.take()?, r.take()?, r.take()?, r.take()?],
        };
        r.finish()?;
        Ok(pk)
    }
}

impl Encode for TgcKeyPair {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        for t in &self.t {
            w.put(t);
        }
        w.into_bytes()
    }
}

impl TgcKeyPair {
    pub fn decode(bytes: &[u8], params: &SystemParams) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let t = [r.take()?, r.take()?, r.take()?, r.take()?, r.take()?];
        r.finish()?;
        Self::from_secret(t, params)
    }
}

impl Encode for TracerKeyPair {
    fn encode(&self) -> Vec<u8> {
        self.x_t.encode()
    }
}

impl TracerKeyPair {
    pub fn decode(bytes: &[u8], params: &SystemParams) -> Result<Self> {
        Ok(Self::from_secret(Scalar::decode(bytes)?, params))
    }
}

impl Encode for UserKeyPair {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_str(&self.id).put(&self.x_u);
        w.into_bytes()
    }
}

impl UserKeyPair {
    pub fn decode(bytes: &[u8], params: &SystemParams) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let id = r.take_string()?;
        let x_u = r.take()?;
        r.finish()?;
        Self::from_secret(id, x_u, params)
    }
}

impl Encode for AuthorityKeys {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.ca).put(&self.tracer);
        w.into_bytes()
    }
}

impl Decode for AuthorityKeys {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let keys = AuthorityKeys { ca: r.take()?, tracer: r.take()? };
        r.finish()?;
        Ok(keys)
    }
}
