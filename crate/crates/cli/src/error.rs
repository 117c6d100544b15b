use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("solve failed in realization {realization}: {source}")]
    Solve {
        realization: u64,
        #[source]
        source: irs_apg::Error,
    },
    #[error(transparent)]
    Core(#[from] irs_apg::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;
