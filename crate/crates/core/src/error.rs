use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hopping overlap only couples adjacent manifolds, got n = {n}, m = {m}")]
    NonAdjacentManifolds { n: u32, m: u32 },

    #[error("interaction distance must be at least one site, got {0}")]
    DistanceTooShort(u32),

    #[error("series did not converge after {terms} terms")]
    NonConvergent { terms: usize },

    #[error("stability windows of {first} and {second} overlap by {overlap:e}")]
    OverlappingWindows {
        first: String,
        second: String,
        overlap: f64,
    },

    #[error("resonant regime required (delta = 0), got delta = {0}")]
    NotResonant(f64),

    #[error("photon truncation n_max = {n_max} cannot describe mu = {mu} (needs {required})")]
    Truncation { n_max: u32, mu: f64, required: String },

    #[error("lattice too large: {what} (limit {limit})")]
    TooLarge { what: String, limit: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("frequency convention flag missing: declare `ordinary` or `angular`")]
    MissingUnitFlag,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
