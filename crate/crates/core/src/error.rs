use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite loss: {0}")]
    NonFiniteLoss(f64),

    #[error("diverged expert {expert}: update produced a non-finite state")]
    DivergedExpert { expert: usize },

    #[error("untrained expert {expert} queried for advice")]
    UntrainedExpert { expert: usize },

    #[error("no observations: confidence terms need n >= 1")]
    NoObservations,

    #[error("untrained expert has no bounds")]
    NoBounds,

    #[error("config error: {0}")]
    Config(String),

    #[error("weights collapsed")]
    WeightsCollapsed,

    #[error("oracle baseline requires analytic environment")]
    OracleUnavailable,

    #[error("missing oracle optimum for expert {0}")]
    MissingOracle(usize),

    #[error("regret not yet positive at t = {0}")]
    RegretNotPositive(f64),

    #[error("oracle search did not converge: {0}")]
    Search(String),

    #[error("advice {advice} is not understood by environment {environment}")]
    AdviceMismatch {
        advice: String,
        environment: &'static str,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("round {round}: {source}")]
    Round {
        round: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn at_round(self, round: u64) -> Self {
        match self {
            e @ Error::Round { .. } => e,
            other => Error::Round {
                round,
                source: Box::new(other),
            },
        }
    }
}
