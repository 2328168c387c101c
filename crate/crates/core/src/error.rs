use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("root enumeration passed {0} roots; the Weyl group is not finite")]
    RootCap(usize),
    #[error("galois action is not a diagram automorphism: {0}")]
    InvalidGalois(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("vector is not a root")]
    NotARoot,
    #[error("simple root index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("matrix is not an element of the Weyl group")]
    NotInWeylGroup,
    #[error("bracket notation requires a type B or C preset")]
    BracketUnsupported,
    #[error("malformed label `{0}`")]
    BadLabel(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("exponent must be at least 1")]
    BadExponent,
    #[error("cocharacter is not anti-dominant: pairing with simple root {index} is {value}")]
    NotAntiDominant { index: usize, value: i64 },
    #[error("subset {sub} is not contained in {sup}")]
    NotSubset { sub: String, sup: String },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("label {label} is not in {set}")]
    LabelOutside { label: String, set: String },
    #[error("character is outside the sublattice: pairing with the coroot of simple root {index} is {value}")]
    CharacterOutsideLattice { index: usize, value: i64 },
    #[error("root {0} is not in E_w")]
    RootNotInEw(String),
    #[error("stratum {label} is neither minimal nor cominimal at this level; candidate image strata: {}", candidates.join(", "))]
    NotMinimal {
        label: String,
        candidates: Vec<String>,
    },
    #[error("convention check failed: {0}")]
    Convention(String),
}
