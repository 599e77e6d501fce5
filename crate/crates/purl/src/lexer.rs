//! Hand-written lexer: turns source text into a stream of [`Symbol`]s.
//!
//! Alphanumeric runs are classified keyword first, then stitch (anchored
//! patterns), then identifier. `**`, `<=`, and `>=` are two-character
//! symbols. Unrecognized characters each produce one `Unknown` symbol.

use crate::token::{classify_word, punctuation_kind, SourcePos, Symbol, SymbolKind};

pub struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    last_sym_pos: SourcePos,
}

impl Lexer {
    pub fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 0,
            last_sym_pos: SourcePos { line: 1, col: 0, offset: 0 },
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn advance(&mut self) {
        let Some(c) = self.peek() else { return };
        self.pos += 1;
        match c {
            '\n' => {
                self.line += 1;
                self.col = 0;
            }
            // A CR starts a new line unless it is half of a CRLF pair,
            // which the following LF accounts for.
            '\r' if self.peek() != Some('\n') => {
                self.line += 1;
                self.col = 0;
            }
            _ => self.col += 1,
        }
    }

    fn here(&self) -> SourcePos {
        SourcePos { line: self.line, col: self.col, offset: self.pos }
    }

    /// Position of the first character of the most recently produced symbol.
    pub fn current_pos(&self) -> SourcePos {
        self.last_sym_pos
    }

    /// Produce the next symbol, skipping whitespace. At end of input this
    /// returns EOF forever.
    pub fn next_symbol(&mut self) -> Symbol {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.advance();
        }
        let pos = self.here();
        self.last_sym_pos = pos;

        let symbol = |kind: SymbolKind, text: String| Symbol { kind, text, pos };

        let Some(c) = self.peek() else {
            return symbol(SymbolKind::Eof, String::new());
        };

        if c == '"' {
            self.advance();
            let mut text = String::new();
            while let Some(ch) = self.peek() {
                if ch == '"' {
                    break;
                }
                text.push(ch);
                self.advance();
            }
            if self.peek() == Some('"') {
                self.advance();
            }
            return symbol(SymbolKind::Str, text);
        }

        if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(ch) = self.peek() {
                if !ch.is_ascii_digit() {
                    break;
                }
                text.push(ch);
                self.advance();
            }
            return symbol(SymbolKind::Nat, text);
        }

        if c.is_ascii_alphabetic() {
            let mut text = String::new();
            while let Some(ch) = self.peek() {
                if !ch.is_ascii_alphanumeric() {
                    break;
                }
                text.push(ch);
                self.advance();
            }
            return symbol(classify_word(&text), text);
        }

        if let Some(kind) = punctuation_kind(c) {
            // Two-character symbols: ** row repeat, <= and >=.
            if kind == SymbolKind::Asterisk && self.peek_at(1) == Some('*') {
                self.advance();
                self.advance();
                return symbol(SymbolKind::RowRep, "**".into());
            }
            if kind == SymbolKind::OpenAngle && self.peek_at(1) == Some('=') {
                self.advance();
                self.advance();
                return symbol(SymbolKind::LessEq, "<=".into());
            }
            if kind == SymbolKind::CloseAngle && self.peek_at(1) == Some('=') {
                self.advance();
                self.advance();
                return symbol(SymbolKind::GreaterEq, ">=".into());
            }
            self.advance();
            return symbol(kind, c.to_string());
        }

        // Unrecognized character: consume it so lexing always makes progress.
        self.advance();
        symbol(SymbolKind::Unknown, c.to_string())
    }
}
