use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed encoding: {0}")]
    Decode(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("keyword list is empty")]
    EmptyVocabulary,

    #[error("duplicate keyword {0:?}")]
    DuplicateKeyword(String),

    #[error("proof of key possession rejected")]
    KeyProofRejected,

    #[error("identity {0:?} is already registered under a different key")]
    IdentityConflict(String),

    #[error("public key is already registered to identity {0:?}")]
    KeyConflict(String),

    #[error("trapdoor record rejected: {0}")]
    RecordRejected(String),

    #[error("ciphertexts belong to different homomorphic keys")]
    KeyMismatch,

    #[error("homomorphic modulus too small: {0}")]
    ModulusTooSmall(&'static str),

    #[error("homomorphic decryption failed")]
    DecryptionFailed,

    #[error("protocol session misuse: {0}")]
    Session(&'static str),

    #[error("decrypted keyword element is not in the keyword table")]
    UnknownKeyword,

    #[error("decrypted user key is not in the identity table")]
    UnknownUser,

    #[error("neither the keyword nor the user key is in the tables")]
    UnknownKeywordAndUser,

    #[error("block index {index} out of range (ledger length {len})")]
    BlockOutOfRange { index: usize, len: usize },

    #[error("ledger chain verification failed")]
    LedgerCorrupt,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
