use calogero::collisionsearch::CollisionError;
use calogero::exactmath::ExactError;
use calogero::indicator::IndicatorError;
use calogero::lax::LaxError;
use calogero::matching::MatchError;
use calogero::reconstruct::ReconstructError;
use calogero::rootsys::RootSystemError;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Failed,
    Invalid,
    Ambiguous,
    Capacity,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Failed => 1,
            Kind::Invalid => 2,
            Kind::Ambiguous => 3,
            Kind::Capacity => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Failed => "failed",
            Kind::Invalid => "invalid_input",
            Kind::Ambiguous => "ambiguous",
            Kind::Capacity => "capacity",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(Kind::Invalid, message)
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": self.kind.name(),
            "exit_code": self.kind.exit_code(),
            "message": self.message,
        })
        .to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(Kind::Failed, format!("i/o: {e}"))
    }
}

impl From<RootSystemError> for CliError {
    fn from(e: RootSystemError) -> Self {
        Self::invalid(e.to_string())
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        let kind = match e {
            ExactError::Capacity { .. } => Kind::Capacity,
            ExactError::Parse(_) | ExactError::ZeroDenominator(_) => Kind::Invalid,
            _ => Kind::Failed,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<LaxError> for CliError {
    fn from(e: LaxError) -> Self {
        match e {
            LaxError::RootSystem(e) => e.into(),
            LaxError::Capacity { .. } => Self::new(Kind::Capacity, e.to_string()),
        }
    }
}

impl From<MatchError> for CliError {
    fn from(e: MatchError) -> Self {
        let kind = match e {
            MatchError::RankCap(_) => Kind::Capacity,
            MatchError::SizeMismatch { .. } | MatchError::NotSymmetric | MatchError::ZeroValue => Kind::Invalid,
            MatchError::NoMatching { .. } | MatchError::Degenerate => Kind::Failed,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<ReconstructError> for CliError {
    fn from(e: ReconstructError) -> Self {
        match e {
            ReconstructError::Match(e) => e.into(),
            ReconstructError::Window(_) | ReconstructError::CoincidentPositions => Self::invalid(e.to_string()),
            _ => Self::new(Kind::Failed, e.to_string()),
        }
    }
}

impl From<IndicatorError> for CliError {
    fn from(e: IndicatorError) -> Self {
        match e {
            IndicatorError::Lax(e) => e.into(),
            IndicatorError::Exact(e) => e.into(),
            IndicatorError::Reconstruct(e) => e.into(),
            IndicatorError::Unsupported(_) | IndicatorError::WindowTooSmall { .. } => Self::invalid(e.to_string()),
            _ => Self::new(Kind::Failed, e.to_string()),
        }
    }
}

impl From<CollisionError> for CliError {
    fn from(e: CollisionError) -> Self {
        match e {
            CollisionError::RootSystem(e) => e.into(),
            CollisionError::NotIntegral(_) => Self::invalid(e.to_string()),
            CollisionError::Checkpoint { .. } => Self::new(Kind::Failed, e.to_string()),
        }
    }
}
