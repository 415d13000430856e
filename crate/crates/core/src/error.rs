use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("basis index k = {k} out of range for degree n = {n}")]
    IndexOutOfRange { n: u32, k: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{0}` is already registered")]
    DuplicateName(String),
    #[error("rate fit needs at least {needed} records with n >= {n_min}, found {got}")]
    InsufficientRecords { needed: usize, got: usize, n_min: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            domain: "[0, 1]",
        })
    }
}

pub(crate) fn check_cube(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    x.iter().try_for_each(|&xi| check_unit("coordinate", xi))
}
