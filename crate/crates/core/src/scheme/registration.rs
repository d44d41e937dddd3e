use rand_core::RngCore;

use super::keys::UserKeyPair;
use super::tables::IdTable;
use crate::algebra::{Decode, Encode, G1Elem, Reader, SystemParams, Writer};
use crate::credential::{issue, CaKeyPair, Credential};
use crate::error::{Error, Result};
use crate::zkp::{pi1_prove, pi1_verify, Pi1Proof};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegRequest {
    pub id: String,
    pub y_u: G1Elem,
    pub proof: Pi1Proof,
}

pub fn reg_request<R: RngCore + ?Sized>(user: &UserKeyPair, params: &SystemParams, rng: &mut R) -> RegRequest {
    RegRequest {
        id: user.id().to_owned(),
        y_u: *user.public(),
        proof: pi1_prove(user.secret(), user.public(), params, rng),
    }
}

/// Verifies the key-possession proof, records `(ID_U, Y_u)` and signs `Y_u`.
/// On any error the table is left untouched.
pub fn reg_issue<R: RngCore + ?Sized>(
    ca: &CaKeyPair,
    req: &RegRequest,
    table: &mut IdTable,
    params: &SystemParams,
    rng: &mut R,
) -> Result<Credential> {
    if !pi1_verify(&req.y_u, &req.proof, params) {
        return Err(Error::KeyProofRejected);
    }
    table.check_insert(&req.id, &req.y_u)?;
    let cred = issue(ca, &req.y_u, rng)?;
    table.insert(&req.id, &req.y_u)?;
    Ok(cred)
}

impl Encode for RegRequest {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_str(&self.id).put(&self.y_u).put(&self.proof);
        w.into_bytes()
    }
}

impl Decode for RegRequest {
    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let req = RegRequest {
            id: r.take_string()?,
            y_u: r.take()?,
            proof: r.take()?,
        };
        r.finish()?;
        Ok(req)
    }
}
