//! Compiler for the Ariel subset: task/watchdog configuration, logical
//! composition, and guarded recovery actions.
//!
//! Source programs reference integer constants through `{MACRO}` names
//! bound by an external definitions file (`NAME=INTEGER` lines); plain
//! integer literals are accepted everywhere a macro is. Compilation
//! yields two artifacts: an r-code instruction list executed by the
//! Backbone on error notifications, and a deployment configuration
//! consumed by the runtime simulator.

mod ast;
mod config;
mod defs;
mod error;
mod parser;
mod rcode;
mod token;

pub use ast::{
    Action, ArielProgram, EntityRef, Guard, GuardedClause, LogicalDecl, OnError, TaskDecl,
    WatchdogDecl,
};
pub use config::{emit_config, DeploymentConfig, LogicalGroup, TaskPlacement, WatchdogBinding};
pub use defs::Definitions;
pub use error::ArielError;
pub use parser::parse_program;
pub use rcode::{
    compile_recovery, interpret, parse_rcode, validate_rcode, write_rcode, Instr, RCode,
    RecoveryHost,
};
pub use token::{tokenize, Keyword, Token, TokenKind};
