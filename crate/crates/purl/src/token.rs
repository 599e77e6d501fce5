//! Lexical vocabulary: source positions, symbol kinds, and the keyword,
//! punctuation, and stitch classification tables.

use serde::Serialize;
use std::fmt;

/// Position of a character in the source text.
///
/// `line` is 1-based, `col` is the 0-based column on that line, and
/// `offset` is the 0-based character offset into the whole input. A line
/// starts at the character after a newline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourcePos {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
}

/// Every distinct token the lexer can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SymbolKind {
    Nat,
    Ident,
    Str,
    RowRep,
    LessEq,
    GreaterEq,
    Eof,
    Unknown,

    // Reserved keywords.
    KwPattern,
    KwCastOn,
    KwPickUp,
    KwBindOff,
    KwJoin,
    KwCircular,
    KwProvisional,
    KwSection,
    KwSample,
    KwFrom,
    KwTo,
    KwLast,
    KwEnd,
    KwRow,
    KwRnd,
    KwRepeat,
    KwWith,
    KwWyif,
    KwWyib,
    KwMainColor,
    KwContrastColor,

    // Single-character punctuation.
    Comma,
    Period,
    Colon,
    Asterisk,
    Plus,
    Minus,
    Semicolon,
    OpenParen,
    CloseParen,
    OpenBracket,
    CloseBracket,
    OpenAngle,
    CloseAngle,
    VerticalBar,
    Equal,

    // Stitch classes.
    StKnit,
    StPurl,
    StKnitTbl,
    StPurlTbl,
    StKnitBelow,
    StPurlBelow,
    StSlip,
    StSlipKw,
    StSlipPw,
    StYarnOver,
    StKnitFb,
    StPurlFb,
    StMake,
    StMakeL,
    StMakeR,
    StKnitTog,
    StPurlTog,
    StSsk,
    StSsp,
    StPsso,
}

pub const KEYWORDS: &[(&str, SymbolKind)] = &[
    ("pattern", SymbolKind::KwPattern),
    ("CO", SymbolKind::KwCastOn),
    ("PU", SymbolKind::KwPickUp),
    ("BO", SymbolKind::KwBindOff),
    ("Join", SymbolKind::KwJoin),
    ("circular", SymbolKind::KwCircular),
    ("provisional", SymbolKind::KwProvisional),
    ("section", SymbolKind::KwSection),
    ("sample", SymbolKind::KwSample),
    ("from", SymbolKind::KwFrom),
    ("to", SymbolKind::KwTo),
    ("last", SymbolKind::KwLast),
    ("end", SymbolKind::KwEnd),
    ("row", SymbolKind::KwRow),
    ("rnd", SymbolKind::KwRnd),
    ("repeat", SymbolKind::KwRepeat),
    ("with", SymbolKind::KwWith),
    ("wyif", SymbolKind::KwWyif),
    ("wyib", SymbolKind::KwWyib),
    ("MC", SymbolKind::KwMainColor),
    ("CC", SymbolKind::KwContrastColor),
];

pub const PUNCTUATION: &[(char, SymbolKind)] = &[
    (',', SymbolKind::Comma),
    ('.', SymbolKind::Period),
    (':', SymbolKind::Colon),
    ('*', SymbolKind::Asterisk),
    ('+', SymbolKind::Plus),
    ('-', SymbolKind::Minus),
    (';', SymbolKind::Semicolon),
    ('(', SymbolKind::OpenParen),
    (')', SymbolKind::CloseParen),
    ('[', SymbolKind::OpenBracket),
    (']', SymbolKind::CloseBracket),
    ('<', SymbolKind::OpenAngle),
    ('>', SymbolKind::CloseAngle),
    ('|', SymbolKind::VerticalBar),
    ('=', SymbolKind::Equal),
];

impl SymbolKind {
    pub fn is_keyword(self) -> bool {
        KEYWORDS.iter().any(|&(_, k)| k == self)
    }

    pub fn is_punctuation(self) -> bool {
        PUNCTUATION.iter().any(|&(_, k)| k == self)
    }

    pub fn is_stitch(self) -> bool {
        use SymbolKind::*;
        matches!(
            self,
            StKnit
                | StPurl
                | StKnitTbl
                | StPurlTbl
                | StKnitBelow
                | StPurlBelow
                | StSlip
                | StSlipKw
                | StSlipPw
                | StYarnOver
                | StKnitFb
                | StPurlFb
                | StMake
                | StMakeL
                | StMakeR
                | StKnitTog
                | StPurlTog
                | StSsk
                | StSsp
                | StPsso
        )
    }
}

pub fn keyword_kind(word: &str) -> Option<SymbolKind> {
    KEYWORDS
        .iter()
        .find(|&&(text, _)| text == word)
        .map(|&(_, kind)| kind)
}

pub fn punctuation_kind(ch: char) -> Option<SymbolKind> {
    PUNCTUATION
        .iter()
        .find(|&&(c, _)| c == ch)
        .map(|&(_, kind)| kind)
}

// Returns Some(rest) when `s` starts with a natural number with no leading
// zero, where `rest` is everything after the digit run.
fn strip_embedded_nat(s: &str) -> Option<&str> {
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, c)) if ('1'..='9').contains(&c) => {}
        _ => return None,
    }
    for (i, c) in chars {
        if !c.is_ascii_digit() {
            return Some(&s[i..]);
        }
    }
    Some("")
}

/// Classify an alphanumeric word as a stitch, mirroring the anchored stitch
/// patterns (`^K$`, `^K[1-9][0-9]*T$`, ...). Returns `None` when the word is
/// not a stitch.
pub fn stitch_kind(word: &str) -> Option<SymbolKind> {
    use SymbolKind::*;
    match word {
        "K" => return Some(StKnit),
        "P" => return Some(StPurl),
        "KB" => return Some(StKnitTbl),
        "PB" => return Some(StPurlTbl),
        "S" => return Some(StSlip),
        "SK" => return Some(StSlipKw),
        "SP" => return Some(StSlipPw),
        "YO" => return Some(StYarnOver),
        "KFB" => return Some(StKnitFb),
        "PFB" => return Some(StPurlFb),
        "SSK" => return Some(StSsk),
        "SSP" => return Some(StSsp),
        "PSSO" => return Some(StPsso),
        _ => {}
    }
    let head = word.chars().next()?;
    let rest = &word[head.len_utf8()..];
    let tail = strip_embedded_nat(rest)?;
    match (head, tail) {
        ('K', "B") => Some(StKnitBelow),
        ('P', "B") => Some(StPurlBelow),
        ('K', "T") => Some(StKnitTog),
        ('P', "T") => Some(StPurlTog),
        ('M', "") => Some(StMake),
        ('M', "L") => Some(StMakeL),
        ('M', "R") => Some(StMakeR),
        _ => None,
    }
}

/// Extract the embedded numeric parameter of a stitch lexeme (the 2 in K2T).
pub fn stitch_param(word: &str) -> Option<u32> {
    let digits: String = word.chars().filter(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        None
    } else {
        Some(digits.parse::<u32>().unwrap_or(u32::MAX))
    }
}

/// Classify a full alphanumeric run: keyword first, then stitch, then ident.
pub fn classify_word(word: &str) -> SymbolKind {
    if let Some(kind) = keyword_kind(word) {
        kind
    } else if let Some(kind) = stitch_kind(word) {
        kind
    } else {
        SymbolKind::Ident
    }
}

/// One lexical token: its kind, the matched lexeme (string contents for
/// `Str` symbols), and the position of its first character.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub text: String,
    pub pos: SourcePos,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_classify() {
        assert_eq!(classify_word("CO"), SymbolKind::KwCastOn);
        assert_eq!(classify_word("pattern"), SymbolKind::KwPattern);
        assert_eq!(classify_word("MC"), SymbolKind::KwMainColor);
    }

    #[test]
    fn stitches_classify() {
        assert_eq!(classify_word("K"), SymbolKind::StKnit);
        assert_eq!(classify_word("K2T"), SymbolKind::StKnitTog);
        assert_eq!(classify_word("K10B"), SymbolKind::StKnitBelow);
        assert_eq!(classify_word("M1L"), SymbolKind::StMakeL);
        assert_eq!(classify_word("PSSO"), SymbolKind::StPsso);
    }

    #[test]
    fn idents_fall_through() {
        // K1abc is an acceptable identifier.
        assert_eq!(classify_word("K1abc"), SymbolKind::Ident);
        assert_eq!(classify_word("K0T"), SymbolKind::Ident); // leading zero in param
        assert_eq!(classify_word("shawlBody"), SymbolKind::Ident);
        assert_eq!(classify_word("KT"), SymbolKind::Ident); // param digits required
    }

    #[test]
    fn stitch_params_extract() {
        assert_eq!(stitch_param("K2T"), Some(2));
        assert_eq!(stitch_param("M13R"), Some(13));
        assert_eq!(stitch_param("SSK"), None);
    }

    #[test]
    fn keywords_and_stitches_disjoint() {
        for &(word, _) in KEYWORDS {
            assert!(stitch_kind(word).is_none(), "{word} is both keyword and stitch");
        }
    }
}
