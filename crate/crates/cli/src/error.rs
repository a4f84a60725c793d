//! CLI failure type carrying the process exit code contract.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 configuration or
//! input problems, 3 singular representation or caustic, 4 numeric
//! resolution refusals.

use lct_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files, expressions, or data files.
    Config(String),
    /// The run completed but a check it was asked to enforce did not pass.
    CheckFailed(String),
    /// Library-level failure, mapped onto the public exit codes by variant.
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::CheckFailed(_) => 1,
            CliError::Core(e) => match e {
                CoreError::SingularRepresentation { .. } | CoreError::SingularTime { .. } => 3,
                CoreError::Undersampled { .. }
                | CoreError::SupportSpill { .. }
                | CoreError::ResolutionGuard { .. } => 4,
                CoreError::HjIncompatible { .. } => 1,
                _ => 2,
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(s) | CliError::CheckFailed(s) => s.clone(),
            CliError::Core(e) if self.exit_code() == 3 => format!("caustic: {e}"),
            CliError::Core(e) => e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::CheckFailed("x".into()).exit_code(), 1);
        let singular = CliError::Core(CoreError::SingularRepresentation {
            coefficient: "b",
            representation: "qQ",
            value: 0.0,
            floor: 1e-10,
        });
        assert_eq!(singular.exit_code(), 3);
        assert!(singular.message().starts_with("caustic:"));
        let undersampled =
            CliError::Core(CoreError::Undersampled { achieved: 3.0, required: 8.0 });
        assert_eq!(undersampled.exit_code(), 4);
        let bad_det = CliError::Core(CoreError::NotSymplectic { det_error: 1.0, tol: 1e-12 });
        assert_eq!(bad_det.exit_code(), 2);
    }
}
