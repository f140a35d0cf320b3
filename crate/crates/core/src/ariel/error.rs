use thiserror::Error;

/// Compile-stage diagnostics. Line and column are 1-based; the CLI
/// prefixes the file path.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArielError {
    #[error("{line}:{col}: unrecognized input `{what}`")]
    Lex { line: u32, col: u32, what: String },

    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },

    #[error("{line}:{col}: undefined macro `{name}`")]
    UndefinedMacro { line: u32, col: u32, name: String },

    #[error("{line}:{col}: duplicate task id {id}")]
    DuplicateTask { line: u32, col: u32, id: u32 },

    #[error("{line}:{col}: node {node} already hosts local task id {local_taskid}")]
    DuplicatePlacement {
        line: u32,
        col: u32,
        node: u32,
        local_taskid: u32,
    },

    #[error("{line}:{col}: duplicate logical id {id}")]
    DuplicateLogical { line: u32, col: u32, id: u32 },

    #[error("{line}:{col}: duplicate member {id} in logical")]
    DuplicateMember { line: u32, col: u32, id: u32 },

    #[error("{line}:{col}: {context} references undeclared task {id}")]
    UnknownTask {
        line: u32,
        col: u32,
        context: String,
        id: u32,
    },

    #[error("{line}:{col}: {context} references undeclared logical {id}")]
    UnknownLogical {
        line: u32,
        col: u32,
        context: String,
        id: u32,
    },

    #[error("{line}:{col}: heartbeat period must be positive")]
    ZeroPeriod { line: u32, col: u32 },

    #[error("definitions, line {line}: {message}")]
    Definitions { line: usize, message: String },
}
