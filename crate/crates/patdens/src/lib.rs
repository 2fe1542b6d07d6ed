//! Pattern-encounter densities in free words.
//!
//! A word `W` is an *instance* of a pattern `V` if some nonerasing
//! homomorphism maps `V` onto `W` exactly (e.g. `banana` is an instance of
//! `cool` via `c -> b`, `o -> an`, `l -> a`). The *density* of `V` in `W` is
//! the fraction of the `(|W|+1 choose 2)` substrings of `W` that are
//! instances of `V`.
//!
//! The crate provides:
//! - [`words`]: value types for patterns and concrete words, classifiers and
//!   generators (Zimin words, doubled/nondoubled, anagram tests);
//! - [`matcher`]: exact instance detection, witness search, encounter
//!   enumeration and exact density computation;
//! - [`exact`]: exact big-rational oracles (instance probabilities, expected
//!   densities and encounter counts, composition counts, explicit bounds,
//!   the closed-form limit for the `aba` pattern);
//! - [`montecarlo`]: seeded, reproducible Monte Carlo estimation of density
//!   moments and instance probabilities, with experiment drivers for the
//!   doubled/nondoubled dichotomy and concentration behavior.
//!
//! All randomized estimators derive an independent substream per sample
//! index from a master seed, so results are bit-identical across runs and
//! across worker counts.

pub mod cli;
pub mod exact;
mod fastcount;
pub mod matcher;
pub mod montecarlo;
pub mod words;
mod zfn;

pub use words::{LetterStats, Pattern, Word};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("pattern text is empty")]
    EmptyPattern,
    #[error("pattern contains non-letter character {0:?}")]
    InvalidPatternChar(char),
    #[error("word text contains invalid character {0:?}")]
    InvalidWordChar(char),
    #[error("word symbol {symbol} out of range for alphabet size {q}")]
    SymbolOutOfRange { symbol: usize, q: usize },
    #[error("alphabet size must be at least 1 (got {0})")]
    InvalidAlphabetSize(usize),
    #[error("alphabet size {0} exceeds the supported maximum of 256")]
    AlphabetTooLarge(usize),
    #[error("operation requires a nonempty word")]
    EmptyWord,
    #[error("operation requires a doubled pattern (every variable occurring at least twice)")]
    NondoubledPattern,
    #[error("zimin index must be at least 1")]
    ZiminIndexZero,
    #[error("word length {len} exceeds the enumeration guard of {guard} symbols")]
    GuardExceeded { len: usize, guard: usize },
    #[error("computation requires {required} work units but the budget allows {limit}")]
    BudgetExceeded { required: u64, limit: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Work-unit guard for enumeration and sampling operations.
///
/// Exhaustive word-space enumerations cost `q^n * n` work units; Monte Carlo
/// density estimation costs `samples * n^2`. Exceeding the budget is an
/// error, never silent truncation. The default limit is `10^10` units and
/// can be overridden by the `PATDENS_BUDGET` environment variable or
/// explicitly per call site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_work: u64,
}

impl Budget {
    pub const DEFAULT_MAX_WORK: u64 = 10_000_000_000;

    pub fn new(max_work: u64) -> Self {
        Budget { max_work }
    }

    /// Effectively no limit; used by test harnesses that pin their own scale.
    pub fn unlimited() -> Self {
        Budget { max_work: u64::MAX }
    }

    /// Default budget, honoring a `PATDENS_BUDGET` override when set.
    pub fn from_env() -> Self {
        match std::env::var("PATDENS_BUDGET") {
            Ok(s) => match s.trim().parse::<u64>() {
                Ok(v) => Budget { max_work: v },
                Err(_) => Budget::default(),
            },
            Err(_) => Budget::default(),
        }
    }

    /// Errors with [`Error::BudgetExceeded`] when `required` exceeds the limit.
    pub fn check(&self, required: u64) -> Result<()> {
        if required > self.max_work {
            Err(Error::BudgetExceeded { required, limit: self.max_work })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_work: Self::DEFAULT_MAX_WORK }
    }
}
