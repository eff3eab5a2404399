use std::fmt;

use ctreserve_core::Error as CoreError;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Data,
    Numeric,
    Output,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Data => 3,
            Category::Numeric => 4,
            Category::Output => 1,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            category: Category::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            category: Category::Data,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            category: Category::Numeric,
            message: message.into(),
        }
    }

    pub fn output(message: impl Into<String>) -> Self {
        Self {
            category: Category::Output,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.category.exit_code()
    }

    /// Prefixes the message with some context, keeping the category.
    pub fn context(self, what: impl fmt::Display) -> Self {
        Self {
            category: self.category,
            message: format!("{what}: {}", self.message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let category = match &e {
            CoreError::SizeMismatch(_)
            | CoreError::Unpopulated { .. }
            | CoreError::OutOfRange { .. }
            | CoreError::NonZeroFirstDevelopment { .. }
            | CoreError::NegativeCumulative { .. }
            | CoreError::NonPositiveExposure { .. }
            | CoreError::ZeroDenominator { .. } => Category::Data,
            CoreError::InvalidParameter(_) => Category::Config,
            CoreError::DeltaNotBelowOne { .. }
            | CoreError::InfeasibleJumpLaw { .. }
            | CoreError::Regression(_)
            | CoreError::TooFewValues { .. }
            | CoreError::ResampleLimit { .. } => Category::Numeric,
        };
        Self {
            category,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
