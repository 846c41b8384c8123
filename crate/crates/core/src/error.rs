use thiserror::Error;

/// Errors produced anywhere in the extraction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input document")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    InvalidEncoding,
    #[error("unsupported structural xpath: {0}")]
    XPathParse(String),
    #[error("invalid field path: {0}")]
    FieldPathParse(String),
    #[error("invalid tag-hash serialization: {0}")]
    TagHashParse(String),
    #[error("invalid wrapper: {0}")]
    WrapperParse(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid generator spec: {0}")]
    GeneratorSpec(String),
    #[error("missing annotation: {0}")]
    MissingAnnotation(String),
    #[error("invalid fixture: {0}")]
    Fixture(String),
    #[error("driver error: {0}")]
    Driver(String),
    #[error("unsupported driver capability: {0}")]
    Unsupported(String),
    #[error("type map does not satisfy the UGC filter")]
    NotUgc,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
