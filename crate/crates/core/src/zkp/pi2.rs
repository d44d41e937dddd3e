//! Proof that a trapdoor request is well formed and that the requester holds
//! a credential on the key hidden inside it:
//!
//! ```text
//! PoK{(ω, u3, r0, r, x_u):
//!     H(ω)' = (g0·g1^ω)^{u3}
//!   ∧ D1 = g^ω·Y_t^{r0} ∧ D2 = g^{x_u}·Y_t^{r0} ∧ D3 = g^{r0}
//!   ∧ D4 = g^ω·h1^r     ∧ D5 = g^{x_u}·h2^r
//!   ∧ v_s^{r⁻¹} = v_x·v_xy^{x_u}}
//! ```
//!
//! The challenge hashes `H(ω)', H(ω)'', D1, D1', …, D5, D5', v_x, v_x'` in
//! that order and nothing else; `σ̃` enters only through `v_x`.

use rand_core::RngCore;

use crate::algebra::{Decode, Encode, G1Elem, G2Elem, GtElem, Reader, Scalar, SystemParams, Transcript, Writer};
use crate::credential::{CaPublicKey, RandomizedCredential, ShowPairings};
use crate::error::{Error, Result};

/// Public statement. `ca_pk` and `tracer_pk` are context, not hashed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pi2Statement {
    pub h_prime: G2Elem,
    pub d: [G1Elem; 5],
    pub credential: RandomizedCredential,
    pub tracer_pk: G1Elem,
    pub ca_pk: CaPublicKey,
}

#[derive(Clone, Copy, Debug)]
pub struct Pi2Witness {
    pub omega: Scalar,
    pub u3: Scalar,
    pub r0: Scalar,
    pub r: Scalar,
    pub x_u: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pi2Proof {
    /// `H(ω)''`
    pub h_commit: G2Elem,
    /// `D1' … D5'`
    pub d_commit: [G1Elem; 5],
    /// `v_x'`
    pub vx_commit: GtElem,
    pub challenge: Scalar,
    pub t_hat: Scalar,
    pub omega_hat: Scalar,
    pub u3_hat: Scalar,
    pub r0_hat: Scalar,
    pub r_hat: Scalar,
    pub xu_hat: Scalar,
    pub k_hat: Scalar,
}

/// Which verification check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pi2Failure {
    Challenge,
    KeywordBlinding,
    D1,
    D2,
    D3,
    D4,
    D5,
    CredentialRelation,
}

impl std::fmt::Display for Pi2Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pi2Failure::Challenge => "challenge does not match transcript",
            Pi2Failure::KeywordBlinding => "H(ω)'' ≠ g0^û3·g1^t̂·H(ω)'^c",
            Pi2Failure::D1 => "D1' ≠ g^ω̂·Y_t^r̂0·D1^c",
            Pi2Failure::D2 => "D2' ≠ g^x̂u·Y_t^r̂0·D2^c",
            Pi2Failure::D3 => "D3' ≠ g^r̂0·D3^c",
            Pi2Failure::D4 => "D4' ≠ g^ω̂·h1^r̂·D4^c",
            Pi2Failure::D5 => "D5' ≠ g^x̂u·h2^r̂·D5^c",
            Pi2Failure::CredentialRelation => "v_x' ≠ v_s^k̂·v_xy^−x̂u·v_x^c",
        };
        f.write_str(s)
    }
}

fn challenge(stmt: &Pi2Statement, h_commit: &G2Elem, d_commit: &[G1Elem; 5], v_x: &GtElem, vx_commit: &GtElem) -> Scalar {
    let mut t = Transcript::new();
    t.append(&stmt.h_prime).append(h_commit);
    for (d, dc) in stmt.d.iter().zip(d_commit) {
        t.append(d).append(dc);
    }
    t.append(v_x).append(vx_commit);
    t.challenge()
}

impl Pi2Witness {
    /// Checks every relation of the statement; names the first that fails.
    pub fn check(&self, stmt: &Pi2Statement, params: &SystemParams) -> Result<()> {
        let g = params.g.g1;
        let yt = stmt.tracer_pk;
        let y_u = g.pow(&self.x_u);
        let fail = Error::Precondition;
        if self.u3.is_zero() {
            return Err(fail("u3 must be nonzero"));
        }
        let k = self.r.inverse().ok_or(fail("r must be nonzero"))?;
        if stmt.h_prime != params.keyword_map_g2(&self.omega).pow(&self.u3) {
            return Err(fail("H(ω)' relation"));
        }
        let expected = [
            g.pow(&self.omega) * yt.pow(&self.r0),
            y_u * yt.pow(&self.r0),
            g.pow(&self.r0),
            g.pow(&self.omega) * params.h1.pow(&self.r),
            y_u * params.h2.pow(&self.r),
        ];
        const NAMES: [&str; 5] = ["D1 relation", "D2 relation", "D3 relation", "D4 relation", "D5 relation"];
        for i in 0..5 {
            if stmt.d[i] != expected[i] {
                return Err(fail(NAMES[i]));
            }
        }
        let v = stmt.credential.pairings(&stmt.ca_pk, params);
        if v.v_s.pow(&k) != v.v_x * v.v_xy.pow(&self.x_u) {
            return Err(fail("credential relation"));
        }
        Ok(())
    }
}

pub(crate) fn prove_unchecked<R: RngCore + ?Sized>(
    stmt: &Pi2Statement,
    wit: &Pi2Witness,
    params: &SystemParams,
    rng: &mut R,
    forced_challenge: Option<Scalar>,
) -> Result<Pi2Proof> {
    let k = wit.r.inverse().ok_or(Error::Precondition("r must be nonzero"))?;
    if wit.u3.is_zero() {
        return Err(Error::Precondition("u3 must be nonzero"));
    }
    let g = params.g.g1;
    let yt = stmt.tracer_pk;

    let omega_n = Scalar::random(rng);
    let u3_n = Scalar::random(rng);
    let r0_n = Scalar::random(rng);
    let r_n = Scalar::random(rng);
    let xu_n = Scalar::random(rng);
    let k_n = Scalar::random(rng);

    let h_commit = G2Elem::product_of_powers(&[params.g0.g2, params.g1.g2], &[u3_n, omega_n * u3_n]);
    let d_commit = [
        G1Elem::product_of_powers(&[g, yt], &[omega_n, r0_n]),
        G1Elem::product_of_powers(&[g, yt], &[xu_n, r0_n]),
        g.pow(&r0_n),
        G1Elem::product_of_powers(&[g, params.h1], &[omega_n, r_n]),
        G1Elem::product_of_powers(&[g, params.h2], &[xu_n, r_n]),
    ];
    let ShowPairings { v_s, v_x, v_xy } = stmt.credential.pairings(&stmt.ca_pk, params);
    let vx_commit = v_s.pow(&k_n) * v_xy.pow(&-xu_n);

    let c = forced_challenge.unwrap_or_else(|| challenge(stmt, &h_commit, &d_commit, &v_x, &vx_commit));
    Ok(Pi2Proof {
        h_commit,
        d_commit,
        vx_commit,
        challenge: c,
        t_hat: omega_n * u3_n - c * (wit.omega * wit.u3),
        omega_hat: omega_n - c * wit.omega,
        u3_hat: u3_n - c * wit.u3,
        r0_hat: r0_n - c * wit.r0,
        r_hat: r_n - c * wit.r,
        xu_hat: xu_n - c * wit.x_u,
        k_hat: k_n - c * k,
    })
}

/// Fails with a precondition error unless the witness satisfies the statement.
pub fn pi2_prove<R: RngCore + ?Sized>(
    stmt: &Pi2Statement,
    wit: &Pi2Witness,
    params: &SystemParams,
    rng: &mut R,
) -> Result<Pi2Proof> {
    wit.check(stmt, params)?;
    prove_unchecked(stmt, wit, params, rng, None)
}

/// The seven response equations, challenge taken from the proof as is.
pub(crate) fn check_equations(
    stmt: &Pi2Statement,
    proof: &Pi2Proof,
    pairings: &ShowPairings,
    params: &SystemParams,
) -> std::result::Result<(), Pi2Failure> {
    let g = params.g.g1;
    let yt = stmt.tracer_pk;
    let c = proof.challenge;
    let [d1, d2, d3, d4, d5] = stmt.d;

    let h = G2Elem::product_of_powers(
        &[params.g0.g2, params.g1.g2, stmt.h_prime],
        &[proof.u3_hat, proof.t_hat, c],
    );
    if h != proof.h_commit {
        return Err(Pi2Failure::KeywordBlinding);
    }
    let expected = [
        (G1Elem::product_of_powers(&[g, yt, d1], &[proof.omega_hat, proof.r0_hat, c]), Pi2Failure::D1),
        (G1Elem::product_of_powers(&[g, yt, d2], &[proof.xu_hat, proof.r0_hat, c]), Pi2Failure::D2),
        (G1Elem::product_of_powers(&[g, d3], &[proof.r0_hat, c]), Pi2Failure::D3),
        (G1Elem::product_of_powers(&[g, params.h1, d4], &[proof.omega_hat, proof.r_hat, c]), Pi2Failure::D4),
        (G1Elem::product_of_powers(&[g, params.h2, d5], &[proof.xu_hat, proof.r_hat, c]), Pi2Failure::D5),
    ];
    for ((value, failure), commit) in expected.iter().zip(&proof.d_commit) {
        if value != commit {
            return Err(*failure);
        }
    }
    let ShowPairings { v_s, v_x, v_xy } = *pairings;
    if v_s.pow(&proof.k_hat) * v_xy.pow(&-proof.xu_hat) * v_x.pow(&c) != proof.vx_commit {
        return Err(Pi2Failure::CredentialRelation);
    }
    Ok(())
}

/// Full verification, reporting the first failing check.
pub fn pi2_check(stmt: &Pi2Statement, proof: &Pi2Proof, params: &SystemParams) -> std::result::Result<(), Pi2Failure> {
    let pairings = stmt.credential.pairings(&stmt.ca_pk, params);
    let c = challenge(stmt, &proof.h_commit, &proof.d_commit, &pairings.v_x, &proof.vx_commit);
    if c != proof.challenge {
        return Err(Pi2Failure::Challenge);
    }
    check_equations(stmt, proof, &pairings, params)
}

pub fn pi2_verify(stmt: &Pi2Statement, proof: &Pi2Proof, params: &SystemParams) -> bool {
    pi2_check(stmt, proof, params).is_ok()
}

/// Verifies a serialized proof; malformed bytes verify as `false`.
pub fn pi2_verify_encoded(stmt: &Pi2Statement, proof: &[u8], params: &SystemParams) -> bool {
    Pi2Proof::decode(proof).is_ok_and(|p| pi2_verify(stmt, &p, params))
}

impl Encode for Pi2Proof {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put(&self.h_commit);
        for d in &self.d_commit {
            w.put(d);
        }
        w.put(&self.vx_commit)
            .put(&self.challenge)
            .put(&self.t_hat)
            .put(&self.omega_hat)
            .put(&self.u3_hat)
            .put(&self.r0_hat)
            .put(&self.r_hat)
            .put(&self.xu_hat)
            .put(&self.k_hat);
        w.into_bytes()
    }
}

impl Decode for Pi2Proof {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let proof = Pi2Proof {
            h_commit: r.take()?,
            d_commit: [r.take()?, r.take()?, r.take()?, r.take()?, r.take()?],
            vx_commit: r.take()?,
            challenge: r.take()?,
            t_hat: r.take()?,
            omega_hat: r.take()?,
            u3_hat: r.take()?,
            r0_hat: r.take()?,
            r_hat: r.take()?,
            xu_hat: r.take()?,
            k_hat: r.take()?,
        };
        r.finish()?;
        Ok(proof)
    }
}
