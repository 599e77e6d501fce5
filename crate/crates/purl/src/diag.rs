//! Diagnostics and the per-compilation context threaded through all passes.

use crate::ast::{AstNode, SideType};
use crate::token::SourcePos;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
    Verification,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Verification => "verification",
        }
    }
}

/// One compiler message, with the section / row / source position that were
/// current when it was raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub section_name: Option<String>,
    pub row_index: Option<u32>,
    pub pos: Option<SourcePos>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    /// `severity: [Section: 'name', ][Row: i, ][Line: l:c, ]message`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.severity.as_str())?;
        if let Some(section) = self.section_name.as_deref() {
            if !section.is_empty() {
                write!(f, "Section: '{}', ", section)?;
            }
        }
        if let Some(row) = self.row_index {
            write!(f, "Row: {}, ", row)?;
        }
        if let Some(pos) = self.pos {
            write!(f, "Line: {}, ", pos)?;
        }
        f.write_str(&self.message)
    }
}

/// Render the whole message list, one line per diagnostic, in discovery
/// order.
pub fn render_diagnostics(messages: &[Diagnostic]) -> String {
    let mut out = String::new();
    for msg in messages {
        out.push_str(&msg.to_string());
        out.push('\n');
    }
    out
}

/// Default number of sample expansions allowed before pass 2 gives up.
pub const DEFAULT_EXPANSION_BUDGET: u32 = 10_000;

/// Mutable state for one compilation: the sample table, the message list,
/// and the verification cursor (side, width, row index).
#[derive(Debug, Clone)]
pub struct CompileContext {
    pub section_name: Option<String>,
    pub samples: HashMap<String, AstNode>,
    pub messages: Vec<Diagnostic>,
    pub side: SideType,
    pub width: u32,
    /// 1-based once the first cast-on or pick-up has been verified; 0 means
    /// "not in a row yet" and suppresses the Row field on diagnostics.
    pub row_index: u32,
    pub pos: Option<SourcePos>,
    pub expansion_budget: u32,
}

impl Default for CompileContext {
    fn default() -> Self {
        Self::new()
    }
}

impl CompileContext {
    pub fn new() -> Self {
        CompileContext {
            section_name: None,
            samples: HashMap::new(),
            messages: Vec::new(),
            side: SideType::Rs,
            width: 0,
            row_index: 0,
            pos: None,
            expansion_budget: DEFAULT_EXPANSION_BUDGET,
        }
    }

    /// Append a diagnostic snapshotting the current section, row, and
    /// position, and mark the corresponding flag on `node`.
    pub fn add_message(&mut self, severity: Severity, node: &mut AstNode, message: impl Into<String>) {
        self.push_message(severity, message.into());
        match severity {
            Severity::Error => node.flags.error = true,
            Severity::Warning => node.flags.warning = true,
            Severity::Verification => node.flags.verification = true,
        }
    }

    /// Same as [`add_message`](Self::add_message) but with no node to flag
    /// (e.g. the empty-input warning).
    pub fn add_message_unanchored(&mut self, severity: Severity, message: impl Into<String>) {
        self.push_message(severity, message.into());
    }

    fn push_message(&mut self, severity: Severity, message: String) {
        self.messages.push(Diagnostic {
            severity,
            section_name: self.section_name.clone(),
            row_index: if self.row_index > 0 { Some(self.row_index) } else { None },
            pos: self.pos,
            message,
        });
    }

    pub fn has_errors(&self) -> bool {
        self.messages.iter().any(|m| m.severity == Severity::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{AstNode, NodeKind};

    #[test]
    fn message_sets_flag_and_snapshots_state() {
        let mut ctx = CompileContext::new();
        let mut node = AstNode::new(NodeKind::CastOn);
        ctx.add_message(Severity::Error, &mut node, "Missing cast-on count.");
        assert!(node.flags.error);
        assert!(!node.flags.warning);
        assert_eq!(ctx.messages.len(), 1);
        assert_eq!(ctx.messages[0].message, "Missing cast-on count.");
        assert_eq!(ctx.messages[0].row_index, None);
    }

    #[test]
    fn verification_message_marks_row() {
        let mut ctx = CompileContext::new();
        ctx.row_index = 2;
        ctx.section_name = Some("Body".into());
        let mut row = AstNode::new(NodeKind::Row);
        ctx.add_message(Severity::Verification, &mut row, "19 sts worked over 20 sts.");
        assert!(row.flags.verification);
        let d = &ctx.messages[0];
        assert_eq!(d.row_index, Some(2));
        assert_eq!(d.to_string(), "verification: Section: 'Body', Row: 2, 19 sts worked over 20 sts.");
    }

    #[test]
    fn empty_message_stored_verbatim() {
        let mut ctx = CompileContext::new();
        let mut node = AstNode::new(NodeKind::Row);
        ctx.add_message(Severity::Warning, &mut node, "");
        assert!(node.flags.warning);
        assert_eq!(ctx.messages[0].message, "");
    }
}
