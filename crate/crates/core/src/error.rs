use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid material: {0}")]
    Material(String),

    #[error("invalid stretching: {0}")]
    Stretching(String),

    #[error("function space: {0}")]
    Space(String),

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("singular matrix near dof {dof} ({block})")]
    Singular { dof: usize, block: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error("metrics: {0}")]
    Metrics(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by the run inputs rather than by the numerics.
    pub fn is_input(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_input(),
            Error::MeshParse { .. } | Error::Mesh(_) | Error::Material(_) | Error::Stretching(_) | Error::Config(_) => true,
            _ => false,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::MeshParse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e.into() {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}
