use crate::error::{Error, Result};

/// Environment variable overriding [`Limits::max_enum`].
pub const MAX_ENUM_ENV: &str = "STONEWORK_MAX_ENUM";

pub const DEFAULT_MAX_ENUM: u128 = 10_000_000;
pub const DEFAULT_MAX_SUPPORT: usize = 8;

/// Size bounds for exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of candidates any single enumeration may visit.
    pub max_enum: u128,
    /// Maximum support size for Kantorovich norm pairing search.
    pub max_support: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: DEFAULT_MAX_ENUM,
            max_support: DEFAULT_MAX_SUPPORT,
        }
    }
}

impl Limits {
    /// Defaults, with `max_enum` taken from `STONEWORK_MAX_ENUM` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(MAX_ENUM_ENV) {
            limits.max_enum = raw
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{MAX_ENUM_ENV}={raw:?} is not a count")))?;
        }
        Ok(limits)
    }

    pub fn with_max_enum(mut self, max_enum: u128) -> Self {
        self.max_enum = max_enum;
        self
    }

    pub(crate) fn check(&self, requested: u128) -> Result<()> {
        if requested > self.max_enum {
            Err(Error::ResourceLimit {
                requested,
                limit: self.max_enum,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}
