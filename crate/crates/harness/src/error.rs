use std::path::PathBuf;

use thiserror::Error;

/// Failures of a harness command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: fairres_core::Error },

    #[error(transparent)]
    Core(#[from] fairres_core::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Verification(_) => 1,
            HarnessError::Usage(_) | HarnessError::Input { .. } | HarnessError::Core(_) => 2,
            HarnessError::Io { .. } => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        HarnessError::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
