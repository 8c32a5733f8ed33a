//! Error type shared across the crate, mapped onto CLI exit codes in `main`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Chain length the requested integer width cannot hold.
    #[error("chain length {m} exceeds the overflow-safe limit {max} for 32-bit values")]
    DepthLimit { m: u32, max: u32 },

    /// 1-based pair index outside the built chain.
    #[error("pair index {index} out of range 1..={m}")]
    IndexOutOfRange { index: u32, m: u32 },

    /// Reduction depth outside the usable range for the chain.
    #[error("reduction depth {k} out of range {min}..={max}")]
    DepthOutOfRange { k: u32, min: u32, max: u32 },

    /// Value outside what an operation accepts.
    #[error("value {value} out of range: {what}")]
    ValueOutOfRange { value: i64, what: &'static str },

    /// 32-bit overflow while evaluating or synthesizing an expression.
    #[error("32-bit overflow in {what}")]
    Overflow { what: &'static str },

    /// Remainder by zero in an expression tree.
    #[error("remainder by zero while evaluating expression")]
    RemainderByZero,

    /// Malformed source that the lexer cannot tokenize.
    #[error("{path}:{line}:{col}: {msg}")]
    Lex { path: String, line: u32, col: u32, msg: String },

    /// Expression text that does not parse back into a hidden-expression tree.
    #[error("{path}:{line}:{col}: unparseable expression: {msg}")]
    Parse { path: String, line: u32, col: u32, msg: String },

    /// Rewritten expression whose value differs from the literal it replaced.
    #[error("{path}:{line}:{col}: verification failed: expected {expected}, expression evaluates to {actual}")]
    Verify { path: String, line: u32, col: u32, expected: i64, actual: i64 },

    /// Structural mismatch between an original and its obfuscated counterpart.
    #[error("{path}: {msg}")]
    Structural { path: String, msg: String },

    /// Differential execution observed diverging behavior.
    #[error("{path}: differential execution failed: {detail}")]
    Differential { path: String, detail: String },

    /// Class declaration that already extends an unrelated type.
    #[error("{path}: class {class} already extends {existing}; cannot attach runtime superclass")]
    ExtendsConflict { path: String, class: String, existing: String },

    /// Missing or broken external toolchain (javac / java).
    #[error("toolchain failure: {msg}")]
    Toolchain { msg: String },

    /// Bad command line or configuration file.
    #[error("configuration error: {msg}")]
    Config { msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage/config, 2 lex/structural,
    /// 3 verification, 4 toolchain.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 1,
            Error::Lex { .. }
            | Error::Parse { .. }
            | Error::Structural { .. }
            | Error::ExtendsConflict { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Verify { .. } | Error::Differential { .. } => 3,
            Error::Toolchain { .. } => 4,
            Error::DepthLimit { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DepthOutOfRange { .. }
            | Error::ValueOutOfRange { .. }
            | Error::Overflow { .. }
            | Error::RemainderByZero => 1,
        }
    }
}
