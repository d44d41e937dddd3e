//! Keyword and identity tables with reverse indices for tracing.
//!
//! Both persist as newline-delimited `hex(key) hex(value)` lines.

use std::collections::HashMap;

use crate::algebra::{keyword_scalar, Decode, Encode, G1Elem, Scalar, SystemParams};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordEntry {
    pub keyword: String,
    /// `ω = H1(keyword)`
    pub omega: Scalar,
    /// `g^ω`
    pub element: G1Elem,
}

/// `(keyword, ω, g^ω)` for every keyword in the vocabulary.
#[derive(Clone, Debug, Default)]
pub struct KeywordTable {
    entries: Vec<KeywordEntry>,
    by_element: HashMap<Vec<u8>, usize>,
}

impl KeywordTable {
    pub fn build<S: AsRef<str>>(keywords: &[S], params: &SystemParams) -> Result<Self> {
        if keywords.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut table = KeywordTable::default();
        for kw in keywords {
            let keyword = kw.as_ref().to_owned();
            let omega = keyword_scalar(&keyword);
            let element = params.g.g1.pow(&omega);
            table.insert(KeywordEntry { keyword, omega, element })?;
        }
        Ok(table)
    }

    fn insert(&mut self, entry: KeywordEntry) -> Result<()> {
        let key = entry.element.encode();
        if self.by_element.contains_key(&key) {
            return Err(Error::DuplicateKeyword(entry.keyword));
        }
        self.by_element.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[KeywordEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.keyword.as_str())
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.entries.iter().any(|e| e.keyword == keyword)
    }

    /// Reverse lookup `g^ω → keyword`.
    pub fn lookup(&self, element: &G1Elem) -> Option<&str> {
        self.by_element
            .get(&element.encode())
            .map(|&i| self.entries[i].keyword.as_str())
    }

    pub fn to_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{} {}\n", hex::encode(e.keyword.as_bytes()), hex::encode(e.element.encode())))
            .collect()
    }

    /// Parses persisted lines, recomputing `g^ω` and rejecting mismatches.
    pub fn from_lines(text: &str, params: &SystemParams) -> Result<Self> {
        let mut table = KeywordTable::default();
        for (key, value) in parse_lines(text)? {
            let keyword = String::from_utf8(key).map_err(|_| Error::Decode("keyword is not UTF-8"))?;
            let element = G1Elem::decode(&value)?;
            let omega = keyword_scalar(&keyword);
            if params.g.g1.pow(&omega) != element {
                return Err(Error::Decode("keyword table entry does not match its keyword"));
            }
            table.insert(KeywordEntry { keyword, omega, element })?;
        }
        if table.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(table)
    }
}

/// `(ID_U, Y_u)` pairs recorded at registration.
#[derive(Clone, Debug, Default)]
pub struct IdTable {
    entries: Vec<(String, G1Elem)>,
    by_id: HashMap<String, usize>,
    by_key: HashMap<Vec<u8>, usize>,
}

impl IdTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Re-inserting the same pair is a no-op. An identity may not change
    /// key, and a key may not move to another identity.
    pub fn insert(&mut self, id: &str, y_u: &G1Elem) -> Result<()> {
        self.check_insert(id, y_u)?;
        if self.by_id.contains_key(id) {
            return Ok(());
        }
        let idx = self.entries.len();
        self.by_id.insert(id.to_owned(), idx);
        self.by_key.insert(y_u.encode(), idx);
        self.entries.push((id.to_owned(), *y_u));
        Ok(())
    }

    /// What [`IdTable::insert`] would return, without modifying the table.
    pub fn check_insert(&self, id: &str, y_u: &G1Elem) -> Result<()> {
        if let Some(&i) = self.by_id.get(id) {
            if self.entries[i].1 != *y_u {
                return Err(Error::IdentityConflict(id.to_owned()));
            }
        } else if let Some(&i) = self.by_key.get(&y_u.encode()) {
            return Err(Error::KeyConflict(self.entries[i].0.clone()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&G1Elem> {
        self.by_id.get(id).map(|&i| &self.entries[i].1)
    }

    /// Reverse lookup `Y_u → ID_U`.
    pub fn lookup(&self, y_u: &G1Elem) -> Option<&str> {
        self.by_key.get(&y_u.encode()).map(|&i| self.entries[i].0.as_str())
    }

    pub fn to_lines(&self) -> String {
        self.entries
            .iter()
            .map(|(id, y)| format!("{} {}\n", hex::encode(id.as_bytes()), hex::encode(y.encode())))
            .collect()
    }

    pub fn from_lines(text: &str) -> Result<Self> {
        let mut table = IdTable::new();
        for (key, value) in parse_lines(text)? {
            let id = String::from_utf8(key).map_err(|_| Error::Decode("identity is not UTF-8"))?;
            table.insert(&id, &G1Elem::decode(&value)?)?;
        }
        Ok(table)
    }
}

fn parse_lines(text: &str) -> Result<Vec<(Vec<u8>, Vec<u8>)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let (k, v) = line.trim().split_once(' ').ok_or(Error::Decode("table line needs two fields"))?;
            let k = hex::decode(k).map_err(|_| Error::Decode("table key is not hex"))?;
            let v = hex::decode(v.trim()).map_err(|_| Error::Decode("table value is not hex"))?;
            Ok((k, v))
        })
        .collect()
}

/// Derives the public parameters and builds the keyword table.
pub fn setup<S: AsRef<str>>(keywords: &[S]) -> Result<(SystemParams, KeywordTable)> {
    let params = SystemParams::derive();
    let table = KeywordTable::build(keywords, &params)?;
    Ok((params, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::hash_to_scalar;

    #[test]
    fn single_keyword_entry() {
        let (pp, table) = setup(&["flu"]).unwrap();
        let e = &table.entries()[0];
        let omega = hash_to_scalar(b"flu");
        assert_eq!(e.omega, omega);
        assert_eq!(e.element, pp.g.g1.pow(&omega));
    }

    #[test]
    fn duplicates_and_empty_rejected() {
        assert!(matches!(setup(&["a", "a"]), Err(Error::DuplicateKeyword(k)) if k == "a"));
        assert!(matches!(setup::<&str>(&[]), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn reverse_index_is_exact_inverse() {
        let words: Vec<String> = (0..50).map(|i| format!("kw{i}")).collect();
        let (pp, table) = setup(&words).unwrap();
        assert_eq!(table.len(), 50);
        for w in &words {
            let elem = pp.g.g1.pow(&hash_to_scalar(w.as_bytes()));
            assert_eq!(table.lookup(&elem), Some(w.as_str()));
        }
        assert_eq!(table.lookup(&pp.g.g1), None);
    }

    #[test]
    fn keyword_table_persistence() {
        let (pp, table) = setup(&["flu", "diabetes", "asthma"]).unwrap();
        let back = KeywordTable::from_lines(&table.to_lines(), &pp).unwrap();
        assert_eq!(back.entries(), table.entries());

        let corrupted = table.to_lines().replacen(&hex::encode("flu"), &hex::encode("flv"), 1);
        assert!(KeywordTable::from_lines(&corrupted, &pp).is_err());
    }

    #[test]
    fn id_table_duplicate_policy() {
        let pp = SystemParams::derive();
        let (ya, yb) = (pp.g.g1.pow(&Scalar::from_u64(5)), pp.g.g1.pow(&Scalar::from_u64(6)));
        let mut t = IdTable::new();
        t.insert("alice", &ya).unwrap();
        t.insert("alice", &ya).unwrap();
        assert_eq!(t.len(), 1);
        assert!(matches!(t.insert("alice", &yb), Err(Error::IdentityConflict(_))));
        assert!(matches!(t.insert("bob", &ya), Err(Error::KeyConflict(_))));
        t.insert("bob", &yb).unwrap();
        assert_eq!(t.lookup(&yb), Some("bob"));
        assert_eq!(t.get("alice"), Some(&ya));

        let back = IdTable::from_lines(&t.to_lines()).unwrap();
        assert_eq!(back.lookup(&ya), Some("alice"));
        assert_eq!(back.len(), 2);
    }
}
