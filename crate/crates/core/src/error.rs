use std::path::PathBuf;

/// Operational failures: anything that is not an in-article diagnostic.
///
/// In-article diagnostics (lexing, structure, formula, ND, inference codes)
/// travel as [`crate::language::ErrorRecord`] values inside `.err` files;
/// the variants here abort an operation instead and surface through the CLI
/// as exit code 3. Variants that correspond to a numbered tool code carry it
/// in their message.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("error 92: revision mismatch between parse tree and semantic article: {0}")]
    RevisionMismatch(String),

    #[error("error 93: missing fragment for proof id {0}")]
    MissingFragment(usize),

    #[error("error 94: conflicting duplicate fragment for proof id {0}")]
    DuplicateFragment(usize),

    #[error("error 95: malformed error file {file} at line {line}")]
    MalformedErrFile { file: PathBuf, line: usize },

    #[error("error 96: missing article {0}")]
    MissingArticle(String),

    #[error("error 97: dependency cycle: {}", cycle.join(" -> "))]
    DependencyCycle { cycle: Vec<String> },

    #[error("malformed {kind} file {path}: {detail}")]
    MalformedFile {
        kind: &'static str,
        path: PathBuf,
        detail: String,
    },

    #[error("worker for group {group} failed: {detail}")]
    WorkerFailed { group: usize, detail: String },

    #[error("task {task} failed: {detail}")]
    TaskFailed { task: String, detail: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
