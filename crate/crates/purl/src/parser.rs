//! Pass 1 — recursive-descent construction of the syntax tree.
//!
//! Error handling follows a likely-typo ledger: where a character symbol is
//! expected, its usual typo (`:`/`;`, `.`/`,`, `**`/`*`) produces a warning
//! and parsing continues; an identifier in keyword position is treated as a
//! misspelled keyword. Anything else produces an error and the parser scans
//! to a recovery symbol (usually the terminator of the production or of its
//! parent) before resuming at the next sibling.

use crate::ast::{AstNode, ColorType, CompareType, Condition, CoType, Expression, ExprAtom, NodeKind, RowType};
use crate::diag::{CompileContext, Severity};
use crate::lexer::Lexer;
use crate::token::{stitch_param, Symbol, SymbolKind};

/// Parse a whole program: zero or more sample definitions (registered into
/// `ctx.samples`, not attached to the tree) followed by one pattern. Empty
/// input yields an empty root and a warning.
pub fn parse_program(source: &str, ctx: &mut CompileContext) -> AstNode {
    let mut parser = Parser::new(source, ctx);
    parser.program()
}

fn parse_nat(text: &str) -> u32 {
    let mut v: u64 = 0;
    for c in text.chars() {
        if let Some(d) = c.to_digit(10) {
            v = v.saturating_mul(10).saturating_add(u64::from(d));
        }
    }
    v.min(u64::from(u32::MAX)) as u32
}

fn stitch_node_kind(kind: SymbolKind) -> Option<NodeKind> {
    use SymbolKind::*;
    Some(match kind {
        StKnit => NodeKind::Knit,
        StPurl => NodeKind::Purl,
        StKnitTbl => NodeKind::KnitTbl,
        StPurlTbl => NodeKind::PurlTbl,
        StKnitBelow => NodeKind::KnitBelow,
        StPurlBelow => NodeKind::PurlBelow,
        StSlip => NodeKind::Slip,
        StSlipKw => NodeKind::SlipKw,
        StSlipPw => NodeKind::SlipPw,
        StYarnOver => NodeKind::YarnOver,
        StKnitFb => NodeKind::KnitFb,
        StPurlFb => NodeKind::PurlFb,
        StMake => NodeKind::Make,
        StMakeL => NodeKind::MakeL,
        StMakeR => NodeKind::MakeR,
        StKnitTog => NodeKind::KnitTog,
        StPurlTog => NodeKind::PurlTog,
        StSsk => NodeKind::Ssk,
        StSsp => NodeKind::Ssp,
        StPsso => NodeKind::Psso,
        _ => return None,
    })
}

struct Parser<'a> {
    lexer: Lexer,
    sym: Symbol,
    ctx: &'a mut CompileContext,
}

impl<'a> Parser<'a> {
    fn new(source: &str, ctx: &'a mut CompileContext) -> Self {
        let lexer = Lexer::new(source);
        let sym = Symbol {
            kind: SymbolKind::Eof,
            text: String::new(),
            pos: crate::token::SourcePos { line: 1, col: 0, offset: 0 },
        };
        Parser { lexer, sym, ctx }
    }

    fn next_sym(&mut self) {
        self.sym = self.lexer.next_symbol();
        self.ctx.pos = if self.sym.kind == SymbolKind::Eof { None } else { Some(self.sym.pos) };
    }

    fn at(&self, kind: SymbolKind) -> bool {
        self.sym.kind == kind
    }

    /// Skip symbols until the first of `targets` (or EOF). The target symbol
    /// itself is left current.
    fn scan_to(&mut self, targets: &[SymbolKind]) {
        while self.sym.kind != SymbolKind::Eof && !targets.contains(&self.sym.kind) {
            self.next_sym();
        }
    }

    fn classify_unexpected(&self) -> Option<String> {
        let kind = self.sym.kind;
        if kind == SymbolKind::Ident {
            Some(format!("Invalid use of ident {}.", self.sym.text))
        } else if kind.is_keyword() {
            Some(format!("Invalid use of keyword {}.", self.sym.text))
        } else if kind.is_punctuation() {
            Some(format!("Invalid use of '{}' character.", self.sym.text))
        } else {
            None
        }
    }

    fn unexpected_symbol(&mut self, node: &mut AstNode) {
        if let Some(msg) = self.classify_unexpected() {
            self.ctx.add_message(Severity::Error, node, msg);
        }
    }

    fn unexpected_symbol_unanchored(&mut self) {
        if let Some(msg) = self.classify_unexpected() {
            self.ctx.add_message_unanchored(Severity::Error, msg);
        }
    }

    fn period_terminator(&mut self, node: &mut AstNode) {
        if self.at(SymbolKind::Period) {
            self.next_sym();
        } else if self.at(SymbolKind::Comma) {
            let msg = format!("Use '.' symbol at end of {}.", node.kind.type_label());
            self.ctx.add_message(Severity::Warning, node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(node);
            let msg = format!("Missing '.' symbol at end of {}.", node.kind.type_label());
            self.ctx.add_message(Severity::Error, node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
        }
    }

    fn colon_separator(&mut self, node: &mut AstNode) {
        if self.at(SymbolKind::Colon) {
            self.next_sym();
        } else if self.at(SymbolKind::Semicolon) {
            let msg = format!("Use ':' symbol before listing {} elements.", node.kind.type_label());
            self.ctx.add_message(Severity::Warning, node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(node);
            let msg = format!("Missing ':' symbol before listing {} elements.", node.kind.type_label());
            self.ctx.add_message(Severity::Error, node, msg);
            self.scan_to(&[SymbolKind::Period]);
        }
    }

    fn program(&mut self) -> AstNode {
        self.next_sym();
        let mut root = AstNode::new(NodeKind::Root);
        if self.at(SymbolKind::Eof) {
            self.ctx.add_message_unanchored(Severity::Warning, "No pattern to compile :(");
            return root;
        }
        root.pos = Some(self.sym.pos);
        while self.at(SymbolKind::KwSample) {
            self.sample_def();
        }
        let pattern = self.pattern();
        root.children.push(pattern);
        root
    }

    fn pattern(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::Pattern);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwPattern) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A pattern declaration must start with 'pattern'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Expecting 'pattern' to start pattern declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Colon]);
        }

        if self.at(SymbolKind::Str) {
            node.name = self.sym.text.clone();
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            node.name = self.sym.text.clone();
            let msg = "Remember to use double quotes around the name of your pattern.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "The pattern name is not specified.");
            self.scan_to(&[SymbolKind::Colon]);
        }

        self.colon_separator(&mut node);

        if self.at(SymbolKind::KwCastOn) {
            // Simple pattern: cast-on, body, bind-off.
            node.start = Some(Box::new(self.cast_on()));
            node.children = self.body();
            node.finish = Some(Box::new(self.bind_off()));
        } else {
            // Composite pattern: zero or more sections.
            while self.at(SymbolKind::KwSection) {
                let section = self.section();
                node.children.push(section);
            }
        }
        node
    }

    fn cast_on(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::CastOn);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwCastOn) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A cast-on declaration must start with 'CO'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'CO' at start of cast-on declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Nat) {
            node.value = parse_nat(&self.sym.text);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Missing cast-on count.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::KwCircular) {
            node.co_type = CoType::Circular;
            self.next_sym();
        } else if self.at(SymbolKind::KwProvisional) {
            node.co_type = CoType::Provisional;
            self.next_sym();
        } else {
            node.co_type = CoType::Flat;
        }

        self.period_terminator(&mut node);
        node
    }

    fn pick_up(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::PickUp);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwPickUp) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A pick-up declaration must start with 'PU'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'PU' at start of pick-up declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Nat) {
            node.value = parse_nat(&self.sym.text);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Missing pick-up count.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::KwFrom) {
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Str) {
            node.origin = Some(self.sym.text.clone());
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Missing pick-up origin.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        self.period_terminator(&mut node);
        node
    }

    fn body(&mut self) -> Vec<AstNode> {
        let mut elems = Vec::new();
        while !self.at(SymbolKind::Eof) {
            match self.sym.kind {
                SymbolKind::KwRow | SymbolKind::KwRnd => elems.push(self.row_def()),
                // A lone asterisk here can only be a row-repeat typo; route
                // it in so the likely-typo warning fires.
                SymbolKind::RowRep | SymbolKind::Asterisk => elems.push(self.row_repeat()),
                SymbolKind::Ident => elems.push(self.sample_call()),
                _ => return elems,
            }
        }
        elems
    }

    fn row_def(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::Row);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwRow) {
            node.row_type = RowType::Row;
            self.next_sym();
        } else if self.at(SymbolKind::KwRnd) {
            node.row_type = RowType::Rnd;
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Invalid row type specified.");
            node.row_type = RowType::Rnd;
            self.next_sym();
        }

        if self.at(SymbolKind::KwMainColor) {
            node.color = Some(ColorType::Main);
            self.next_sym();
        } else if self.at(SymbolKind::KwContrastColor) {
            node.color = Some(ColorType::Contrast);
            self.next_sym();
        }

        self.colon_separator(&mut node);

        node.children.push(self.row_elem());
        while self.at(SymbolKind::Comma) {
            self.next_sym();
            node.children.push(self.row_elem());
        }

        self.period_terminator(&mut node);
        node
    }

    fn row_elem(&mut self) -> AstNode {
        if self.sym.kind.is_stitch()
            || self.at(SymbolKind::OpenAngle)
            || self.at(SymbolKind::OpenBracket)
            || self.at(SymbolKind::OpenParen)
        {
            self.stitch_op()
        } else if self.at(SymbolKind::Asterisk) {
            self.undetermined_rep()
        } else {
            let mut node = AstNode::new(NodeKind::Invalid);
            node.pos = Some(self.sym.pos);
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Invalid row element.");
            self.scan_to(&[SymbolKind::Period]);
            node
        }
    }

    fn stitch_op(&mut self) -> AstNode {
        if self.at(SymbolKind::OpenBracket) {
            self.fixed_rep()
        } else if self.at(SymbolKind::OpenAngle) || self.at(SymbolKind::OpenParen) {
            // Parentheses are the output notation for compound stitches, so
            // a stray one is taken as that typo.
            self.compound_stitch()
        } else if self.sym.kind.is_stitch() {
            self.basic_stitch()
        } else {
            let mut node = AstNode::new(NodeKind::Invalid);
            node.pos = Some(self.sym.pos);
            self.unexpected_symbol(&mut node);
            let msg = format!(
                "{} is not a known stitch, start of stitch repeat or compound stitch.",
                self.sym.text
            );
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            node
        }
    }

    fn basic_stitch(&mut self) -> AstNode {
        // The lexer classified the stitch; the embedded parameter (the 2 in
        // K2T) is split out of the lexeme here.
        let mut node = match stitch_node_kind(self.sym.kind) {
            Some(kind) => AstNode::stitch(kind, stitch_param(&self.sym.text)),
            None => AstNode::new(NodeKind::Invalid),
        };
        node.pos = Some(self.sym.pos);
        self.next_sym();
        if self.at(SymbolKind::Ident) || self.at(SymbolKind::Nat) {
            node.rep_count = Some(self.expression(&[SymbolKind::Comma, SymbolKind::Period]));
        }
        node
    }

    fn compound_stitch(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::CompSt);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::OpenAngle) {
            self.next_sym();
        } else if self.at(SymbolKind::OpenParen) || self.at(SymbolKind::OpenBracket) {
            let msg = "Use '<' symbol at start of compound stitch.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing '<' symbol at start of compound stitch.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            // No comma or period reliably delimits a sibling here; scan to
            // the terminator of the parent production and leave it current.
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        node.children.push(self.basic_stitch());
        while self.at(SymbolKind::Comma) {
            self.next_sym();
            node.children.push(self.basic_stitch());
        }

        if self.at(SymbolKind::CloseAngle) {
            self.next_sym();
        } else if self.at(SymbolKind::CloseParen) || self.at(SymbolKind::CloseBracket) {
            let msg = "Use '>' symbol at end of compound stitch.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing '>' symbol at end of compound stitch.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        if self.at(SymbolKind::Ident) || self.at(SymbolKind::Nat) {
            node.rep_count = Some(self.expression(&[SymbolKind::Comma, SymbolKind::Period]));
        }
        node
    }

    fn fixed_rep(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::FixedStRep);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::OpenBracket) {
            self.next_sym();
        } else if self.at(SymbolKind::OpenAngle) || self.at(SymbolKind::OpenParen) {
            let msg = "Use '[' symbol to start fixed stitch repeat.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing '[' symbol to start fixed stitch repeat.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        node.children.push(self.stitch_op());
        while self.at(SymbolKind::Comma) {
            self.next_sym();
            node.children.push(self.stitch_op());
        }

        if self.at(SymbolKind::CloseBracket) {
            self.next_sym();
        } else if self.at(SymbolKind::CloseAngle) || self.at(SymbolKind::CloseParen) {
            let msg = "Use ']' symbol to end fixed stitch repeat stitches.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing ']' symbol to end fixed stitch repeat stitches.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        node.rep_count = Some(self.expression(&[SymbolKind::Period]));
        node
    }

    fn undetermined_rep(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::UStRep);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::Asterisk) {
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing '*' symbol at start of undetermined stitch repeat.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        node.children.push(self.stitch_op());
        while self.at(SymbolKind::Comma) {
            self.next_sym();
            node.children.push(self.stitch_op());
        }

        if self.at(SymbolKind::Semicolon) {
            self.next_sym();
        } else if self.at(SymbolKind::Colon) {
            let msg = "Use ';' symbol at the end of undetermined stitch repeat stitches.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing ';' symbol at the end of undetermined stitch repeat stitches.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            return node;
        }

        // Past the stitches, the next comma delimits a sibling and the next
        // period terminates the parent row.
        if self.at(SymbolKind::KwTo) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "Use 'to' after ';' for undetermined stitch repeat.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'to' after ';' for undetermined stitch repeat.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Comma, SymbolKind::Period]);
        }

        if self.at(SymbolKind::KwLast) {
            self.next_sym();
            node.num = Some(self.expression(&[SymbolKind::Comma, SymbolKind::Period]));
        } else if self.at(SymbolKind::KwEnd) {
            node.num = Some(Expression::literal(0));
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing repeat instructions. Expecting 'last' or 'end'.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Comma, SymbolKind::Period]);
        }
        node
    }

    fn bind_off(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::BindOff);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwBindOff) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A bind-off declaration must start with 'BO'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'BO' at start of bind-off declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Nat) {
            node.value = parse_nat(&self.sym.text);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Bind-off count not specified.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        self.period_terminator(&mut node);
        node
    }

    fn join(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::Join);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwJoin) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A join declaration must start with 'Join'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'Join' at start of join declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Nat) {
            node.value = parse_nat(&self.sym.text);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Join count not specified.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::KwTo) {
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        if self.at(SymbolKind::Str) {
            node.destination = Some(self.sym.text.clone());
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Missing join destination.");
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
            return node;
        }

        self.period_terminator(&mut node);
        node
    }

    fn row_repeat(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::RowRep);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::RowRep) {
            self.next_sym();
        } else if self.at(SymbolKind::Asterisk) {
            let msg = "Row repeat must begin with '**'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing '**' at start of row repeat.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
        }

        node.children = self.body();

        if self.at(SymbolKind::KwRepeat) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "Row repeat body must be followed by 'repeat'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'repeat' after row repeat body.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
        }

        node.rep_count = Some(self.expression(&[SymbolKind::Period]));
        node
    }

    fn section(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::Section);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwSection) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A section declaration must start with 'section'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'section' at start of section declaration.".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Colon]);
        }

        if self.at(SymbolKind::Str) {
            node.name = self.sym.text.clone();
            self.ctx.section_name = Some(node.name.clone());
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            node.name = self.sym.text.clone();
            let msg = "Remember to use double quotes around the name of a section.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "The section name is not specified.");
            self.scan_to(&[SymbolKind::Colon]);
        }

        self.colon_separator(&mut node);

        if self.at(SymbolKind::KwCastOn) {
            node.start = Some(Box::new(self.cast_on()));
        } else if self.at(SymbolKind::KwPickUp) {
            node.start = Some(Box::new(self.pick_up()));
        } else {
            self.unexpected_symbol(&mut node);
            node.start = Some(Box::new(AstNode::new(NodeKind::Invalid)));
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
        }

        node.children = self.body();

        if self.at(SymbolKind::KwBindOff) {
            node.finish = Some(Box::new(self.bind_off()));
        } else if self.at(SymbolKind::KwJoin) {
            node.finish = Some(Box::new(self.join()));
        } else {
            self.unexpected_symbol(&mut node);
            node.finish = Some(Box::new(AstNode::new(NodeKind::Invalid)));
            self.scan_to(&[SymbolKind::Period]);
            self.next_sym();
        }
        node
    }

    fn sample_def(&mut self) {
        let mut node = AstNode::new(NodeKind::SampleDef);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::KwSample) {
            self.next_sym();
        } else if self.at(SymbolKind::Ident) {
            let msg = "A sample definition must start with 'sample'.".to_string();
            self.ctx.add_message(Severity::Warning, &mut node, msg);
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            let msg = "Missing 'sample' at start of sample definition".to_string();
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::Ident]);
        }

        if self.at(SymbolKind::Ident) {
            node.name = self.sym.text.clone();
            self.next_sym();
        } else if self.sym.kind.is_keyword() {
            let msg = format!("{} is a reserved keyword and not a valid sample identifier.", self.sym.text);
            self.ctx.add_message(Severity::Error, &mut node, msg);
            self.scan_to(&[SymbolKind::KwWith, SymbolKind::Colon]);
        } else {
            self.ctx.add_message(Severity::Error, &mut node, "Missing or invalid sample identifier.");
            self.scan_to(&[SymbolKind::KwWith, SymbolKind::Colon]);
        }

        if self.at(SymbolKind::KwWith) {
            self.next_sym();
            if self.at(SymbolKind::Ident) {
                node.param_names.push(self.sym.text.clone());
                self.next_sym();
            } else {
                self.unexpected_symbol(&mut node);
            }
            while self.at(SymbolKind::Comma) {
                self.next_sym();
                if self.at(SymbolKind::Ident) {
                    node.param_names.push(self.sym.text.clone());
                    self.next_sym();
                } else {
                    self.unexpected_symbol(&mut node);
                }
            }
        }

        if self.ctx.samples.contains_key(&node.name) {
            let msg = format!("Sample '{}' is already defined; the last definition is used.", node.name);
            self.ctx.add_message(Severity::Warning, &mut node, msg);
        }
        // Register name and parameters before parsing the body so that a
        // sample may be used in its own definition.
        self.ctx.samples.insert(node.name.clone(), node.clone());

        if self.at(SymbolKind::VerticalBar) {
            while self.at(SymbolKind::VerticalBar) {
                self.next_sym();
                let mut branch = AstNode::new(NodeKind::Branch);
                branch.pos = Some(self.sym.pos);
                branch.condition = Some(self.condition());
                self.colon_separator(&mut node);
                branch.children = self.body();
                node.children.push(branch);
            }
        } else {
            self.colon_separator(&mut node);
            node.children = self.body();
        }

        self.ctx.samples.insert(node.name.clone(), node);
    }

    fn sample_call(&mut self) -> AstNode {
        let mut node = AstNode::new(NodeKind::SampleCall);
        node.pos = Some(self.sym.pos);

        if self.at(SymbolKind::Ident) {
            node.name = self.sym.text.clone();
            self.next_sym();
        } else {
            self.unexpected_symbol(&mut node);
            self.ctx.add_message(Severity::Error, &mut node, "Missing sample call identifier.");
            self.scan_to(&[SymbolKind::Period]);
        }

        let required = self.ctx.samples.get(&node.name).map(|def| def.param_names.len());
        if required.is_none() && !node.name.is_empty() {
            let msg = format!("Unknown sample '{}'.", node.name);
            self.ctx.add_message(Severity::Error, &mut node, msg);
        }

        if self.at(SymbolKind::KwWith) {
            self.next_sym();
            node.args.push(self.expression(&[SymbolKind::Comma, SymbolKind::Period]));
            while self.at(SymbolKind::Comma) {
                self.next_sym();
                node.args.push(self.expression(&[SymbolKind::Comma, SymbolKind::Period]));
            }
            if let Some(required) = required {
                if node.args.len() != required {
                    let msg = format!(
                        "{} parameters required: {}, passed: {}.",
                        node.name,
                        required,
                        node.args.len()
                    );
                    self.ctx.add_message(Severity::Error, &mut node, msg);
                    self.scan_to(&[SymbolKind::Period]);
                }
            }
        }

        self.period_terminator(&mut node);
        node
    }

    /// `<expr> ::= (<Ident> | <Nat>) ('+' (<Ident> | <Nat>))*`. When the
    /// current symbol cannot start an expression the result is empty (it
    /// evaluates to zero) and an error is recorded, but nothing is consumed
    /// so the caller's grammar resumes at the current symbol.
    fn expression(&mut self, terminators: &[SymbolKind]) -> Expression {
        let mut expr = Expression::default();
        if self.at(SymbolKind::Nat) || self.at(SymbolKind::Ident) {
            if let Some(atom) = self.nat_atom(terminators) {
                expr.atoms.push(atom);
            }
            while self.at(SymbolKind::Plus) {
                self.next_sym();
                if let Some(atom) = self.nat_atom(terminators) {
                    expr.atoms.push(atom);
                }
            }
        } else {
            self.unexpected_symbol_unanchored();
            self.ctx.add_message_unanchored(Severity::Error, "Missing expression.");
        }
        expr
    }

    fn nat_atom(&mut self, terminators: &[SymbolKind]) -> Option<ExprAtom> {
        if self.at(SymbolKind::Nat) {
            let value = parse_nat(&self.sym.text);
            self.next_sym();
            Some(ExprAtom::Lit(value))
        } else if self.at(SymbolKind::Ident) {
            let name = self.sym.text.clone();
            self.next_sym();
            Some(ExprAtom::Var(name))
        } else {
            self.unexpected_symbol_unanchored();
            self.scan_to(terminators);
            None
        }
    }

    fn condition(&mut self) -> Condition {
        let mut cond = Condition::default();
        if self.at(SymbolKind::Nat) || self.at(SymbolKind::Ident) {
            cond.left = Some(self.expression(&[SymbolKind::Colon]));
        }
        cond.compare = match self.sym.kind {
            SymbolKind::Equal => Some(CompareType::Eq),
            SymbolKind::OpenAngle => Some(CompareType::Lt),
            SymbolKind::CloseAngle => Some(CompareType::Gt),
            SymbolKind::LessEq => Some(CompareType::Leq),
            SymbolKind::GreaterEq => Some(CompareType::Geq),
            _ => None,
        };
        if cond.compare.is_some() {
            self.next_sym();
        }
        if self.at(SymbolKind::Nat) || self.at(SymbolKind::Ident) {
            cond.right = Some(self.expression(&[SymbolKind::Colon]));
        }
        if cond.left.is_none() || cond.right.is_none() || cond.compare.is_none() {
            self.ctx.add_message_unanchored(Severity::Error, "Incomplete branch condition.");
        }
        cond
    }
}
