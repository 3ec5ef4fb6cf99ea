use punctual::binary_lift::LiftError;
use punctual::copies::CopyError;
use punctual::cycles::LengthParseError;
use punctual::foundations::GapError;
use punctual::island::IslandError;
use punctual::levitz::LevitzError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error(transparent)]
    Copy(#[from] CopyError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Levitz(#[from] LevitzError),
    #[error(transparent)]
    Island(#[from] IslandError),
    #[error(transparent)]
    Lengths(#[from] LengthParseError),
}

impl CliError {
    /// `module.kind`, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "cli.usage",
            CliError::Mismatch(_) => "cli.oracle_mismatch",
            CliError::Io(_) => "cli.io",
            CliError::Gap(_) => "foundations.gap",
            CliError::Copy(_) => "copies.copy",
            CliError::Lift(_) => "binary_lift.lift",
            CliError::Levitz(LevitzError::Parse { .. }) => "levitz.parse",
            CliError::Levitz(LevitzError::ComparisonContractViolated { .. }) => "levitz.contract",
            CliError::Levitz(_) => "levitz.term",
            CliError::Island(IslandError::ConstructionViolated(_)) => "island.construction",
            CliError::Island(IslandError::FamilyContractViolated(_)) => "island.family_contract",
            CliError::Island(_) => "island.input",
            CliError::Lengths(_) => "cycles.lengths",
        }
    }

    /// 2 for broken contracts, 1 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_)
            | CliError::Levitz(LevitzError::ComparisonContractViolated { .. })
            | CliError::Island(IslandError::ConstructionViolated(_))
            | CliError::Island(IslandError::FamilyContractViolated(_)) => 2,
            _ => 1,
        }
    }
}
