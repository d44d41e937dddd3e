use super::tables::{IdTable, KeywordTable};
use super::trapdoor::TrapdoorRecord;
use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Opens a record: `g^ω = D1 / D3^{x_t}`, `Y_u = D2 / D3^{x_t}`, then looks
/// both up. Returns `(ID_U, keyword)`.
pub fn trace(record: &TrapdoorRecord, x_t: &Scalar, keywords: &KeywordTable, ids: &IdTable) -> Result<(String, String)> {
    let [d1, d2, d3, _, _] = record.d;
    let mask = d3.pow(x_t);
    let keyword = keywords.lookup(&(d1 / mask));
    let id = ids.lookup(&(d2 / mask));
    match (id, keyword) {
        (Some(id), Some(kw)) => Ok((id.to_owned(), kw.to_owned())),
        (Some(_), None) => Err(Error::UnknownKeyword),
        (None, Some(_)) => Err(Error::UnknownUser),
        (None, None) => Err(Error::UnknownKeywordAndUser),
    }
}
