//! Compiler for Purl, a small language for writing knitting patterns that
//! can be verified and rendered in standard notation.
//!
//! The pipeline is three passes over one syntax tree:
//!
//! ```text
//! source text
//!     | lexer (lexer.rs)        keyword / stitch / ident classification
//!     v
//! pass 1: parser.rs             recursive descent, panic-mode recovery
//!     v
//! pass 2: expand.rs             sample calls, branches, variables removed
//!     v
//! pass 3: verify.rs             side / width / row-index annotation,
//!     |                         stitch-count checks
//!     v
//! codegen.rs                    HTML fragment or plain text
//! ```
//!
//! Diagnostics collect on a [`diag::CompileContext`] in discovery order and
//! never abort a pass; every pass runs on whatever the previous one built.
//! [`oracle`] holds a brute-force row interpreter used by tests as an
//! independent check on the verifier.

pub mod ast;
pub mod codegen;
pub mod diag;
pub mod expand;
pub mod lexer;
pub mod oracle;
pub mod parser;
pub mod token;
pub mod verify;

use ast::AstNode;
use diag::CompileContext;

/// A finished compilation: the verified tree plus the context holding the
/// diagnostics.
pub struct Compilation {
    pub root: AstNode,
    pub ctx: CompileContext,
}

/// Run all three passes over `source`.
pub fn compile(source: &str) -> Compilation {
    let mut ctx = CompileContext::new();
    let mut root = parser::parse_program(source, &mut ctx);
    expand::expand(&mut root, &mut ctx);
    verify::verify(&mut root, &mut ctx);
    Compilation { root, ctx }
}

/// Per-pass snapshots of the tree, for debug dumps.
pub struct PassTrace {
    pub pass1: AstNode,
    pub pass2: AstNode,
    pub pass3: AstNode,
    pub ctx: CompileContext,
}

/// Like [`compile`] but keeping a copy of the tree after each pass.
pub fn compile_traced(source: &str) -> PassTrace {
    let mut ctx = CompileContext::new();
    let mut root = parser::parse_program(source, &mut ctx);
    let pass1 = root.clone();
    expand::expand(&mut root, &mut ctx);
    let pass2 = root.clone();
    verify::verify(&mut root, &mut ctx);
    PassTrace { pass1, pass2, pass3: root, ctx }
}
