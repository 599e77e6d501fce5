//! Back end: renders a verified tree as standard knitting notation, either
//! as an HTML fragment (div/span structure with a fixed set of class names)
//! or as plain text with the same content.
//!
//! Stripping the tags from the HTML output yields the text output modulo
//! whitespace; both emitters share the same content strings.

use crate::ast::{AstNode, ColorType, CoType, Expression, NodeKind, RowType, SideType};

/// The class names the HTML emitter is allowed to use, byte-for-byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CssClass {
    Pattern,
    PatternName,
    Section,
    SectionName,
    CastOn,
    PickUp,
    Body,
    Row,
    RowRepeat,
    StitchCount,
    Stitch,
    BindOff,
    Join,
    Error,
    Warning,
    Verification,
}

impl CssClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CssClass::Pattern => "pattern",
            CssClass::PatternName => "patternname",
            CssClass::Section => "section",
            CssClass::SectionName => "sectionname",
            CssClass::CastOn => "caston",
            CssClass::PickUp => "pickup",
            CssClass::Body => "body",
            CssClass::Row => "row",
            CssClass::RowRepeat => "rowrepeat",
            CssClass::StitchCount => "stitchcount",
            CssClass::Stitch => "stitch",
            CssClass::BindOff => "bindoff",
            CssClass::Join => "join",
            CssClass::Error => "error",
            CssClass::Warning => "warning",
            CssClass::Verification => "verification",
        }
    }
}

pub fn escape_html(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

fn div(class: CssClass, inner: &str) -> String {
    format!("<div class=\"{}\">{}</div>", class.as_str(), inner)
}

fn span(class: CssClass, inner: &str) -> String {
    format!("<span class=\"{}\">{}</span>", class.as_str(), inner)
}

// When a node carries several message flags the most recently assigned one
// wins: verification over warning over error.
fn marker_class(node: &AstNode) -> Option<CssClass> {
    if node.flags.verification {
        Some(CssClass::Verification)
    } else if node.flags.warning {
        Some(CssClass::Warning)
    } else if node.flags.error {
        Some(CssClass::Error)
    } else {
        None
    }
}

fn expr_value(expr: &Option<Expression>) -> u32 {
    expr.as_ref().map(Expression::value).unwrap_or(0)
}

/// Repeat suffix for a stitch: present only when the count exceeds one.
fn rep_of(node: &AstNode) -> Option<u32> {
    node.rep_count.as_ref().map(Expression::value).filter(|&v| v > 1)
}

fn num_of(node: &AstNode) -> String {
    match node.num.as_ref().map(Expression::value) {
        Some(v) if v > 0 => v.to_string(),
        _ => String::new(),
    }
}

/// The figure a basic stitch prints: the span text plus, for the stitch
/// families that write their repeat separately, a trailing count.
fn basic_stitch_text(node: &AstNode) -> (String, Option<u32>) {
    let rep = rep_of(node);
    let rep_str = rep.map(|v| v.to_string()).unwrap_or_default();
    let num = num_of(node);
    match node.kind {
        NodeKind::Knit => (format!("K{rep_str}"), None),
        NodeKind::Purl => (format!("P{rep_str}"), None),
        NodeKind::KnitTbl => (format!("K{rep_str} tbl"), None),
        NodeKind::PurlTbl => (format!("P{rep_str} tbl"), None),
        NodeKind::KnitBelow => (format!("K{num}B{rep_str}"), None),
        NodeKind::PurlBelow => (format!("P{num}B{rep_str}"), None),
        NodeKind::Slip => (format!("sl{rep_str}"), None),
        NodeKind::SlipKw => (format!("sl{rep_str}k"), None),
        NodeKind::SlipPw => (format!("sl{rep_str}p"), None),
        NodeKind::YarnOver => (format!("yo{rep_str}"), None),
        NodeKind::KnitFb => ("KFB".into(), rep),
        NodeKind::PurlFb => ("PFB".into(), rep),
        NodeKind::Make => (format!("M{num}"), rep),
        NodeKind::MakeL => (format!("M{num}L"), rep),
        NodeKind::MakeR => (format!("M{num}R"), rep),
        NodeKind::KnitTog => (format!("k{num}tog"), rep),
        NodeKind::PurlTog => (format!("p{num}tog"), rep),
        NodeKind::Ssk => ("ssk".into(), rep),
        NodeKind::Ssp => ("ssp".into(), rep),
        NodeKind::Psso => ("psso".into(), rep),
        _ => (String::new(), None),
    }
}

fn cast_on_text(node: &AstNode) -> String {
    let co_type = match node.co_type {
        CoType::Flat => String::new(),
        other => format!(" {}", other.as_str()),
    };
    format!("Cast-on {} sts{}.", node.value, co_type)
}

fn pick_up_text(node: &AstNode, escape: bool) -> String {
    let origin = node.origin.as_deref().unwrap_or("");
    let origin = if escape { escape_html(origin) } else { origin.to_string() };
    format!("Pick-up {} sts from {}.", node.value, origin)
}

fn bind_off_text(node: &AstNode) -> String {
    format!("Bind-off  {} sts.", node.value)
}

fn join_text(node: &AstNode, escape: bool) -> String {
    let dest = node.destination.as_deref().unwrap_or("");
    let dest = if escape { escape_html(dest) } else { dest.to_string() };
    format!("Join  {} sts to {}.", node.value, dest)
}

/// `Row`/`Rnd`, index, optional color, side-plus-colon: the tokens that
/// precede a row's stitches, space-joined by the caller.
fn row_head_tokens(node: &AstNode) -> Vec<String> {
    let mut tokens = Vec::new();
    tokens.push(
        match node.row_type {
            RowType::Row => "Row",
            RowType::Rnd => "Rnd",
        }
        .to_string(),
    );
    tokens.push(node.index.to_string());
    match node.color {
        Some(ColorType::Main) => tokens.push("(MC)".into()),
        Some(ColorType::Contrast) => tokens.push("(CC)".into()),
        None => {}
    }
    let side = node.side.unwrap_or(SideType::Rs);
    tokens.push(format!("({}):", side.as_str()));
    tokens
}

fn ustrep_tail(node: &AstNode) -> String {
    match node.num.as_ref().map(Expression::value) {
        Some(0) => "end".into(),
        Some(1) => "last 1 st".into(),
        Some(n) => format!("last {} sts", n),
        None => "invalid value".into(),
    }
}

/// Render the verified tree as an HTML fragment.
pub fn write_html(root: &AstNode) -> String {
    html::write_node(root)
}

/// Render the verified tree as plain text, one line per pattern element.
pub fn write_text(root: &AstNode) -> String {
    text::write_node(root)
}

mod html {
    use super::*;

    pub fn write_node(node: &AstNode) -> String {
        let mut result = String::new();
        if let Some(class) = marker_class(node) {
            result.push_str(&span(class, "!"));
        }
        match node.kind {
            NodeKind::Root => {
                if let Some(pattern) = node.children.first() {
                    result.push_str(&write_node(pattern));
                }
            }
            NodeKind::Pattern => result.push_str(&write_pattern(node)),
            NodeKind::Section => result.push_str(&write_section(node)),
            NodeKind::CastOn => result.push_str(&div(CssClass::CastOn, &cast_on_text(node))),
            NodeKind::PickUp => result.push_str(&div(CssClass::CastOn, &pick_up_text(node, true))),
            NodeKind::BindOff => result.push_str(&div(CssClass::BindOff, &bind_off_text(node))),
            NodeKind::Join => result.push_str(&div(CssClass::Join, &join_text(node, true))),
            NodeKind::Row => result.push_str(&write_row(node)),
            NodeKind::RowRep => result.push_str(&write_row_rep(node)),
            NodeKind::FixedStRep => result.push_str(&write_fixed_rep(node)),
            NodeKind::UStRep => result.push_str(&write_ustrep(node)),
            NodeKind::CompSt => result.push_str(&write_compound(node)),
            kind if kind.is_stitch() => result.push_str(&write_basic_stitch(node)),
            _ => {}
        }
        result
    }

    fn write_children_joined(node: &AstNode) -> String {
        node.children.iter().map(write_node).collect::<Vec<_>>().join(", ")
    }

    fn write_body(node: &AstNode) -> String {
        let inner: String = node.children.iter().map(write_node).collect();
        div(CssClass::Body, &inner)
    }

    fn write_pattern(node: &AstNode) -> String {
        let mut inner = div(CssClass::PatternName, &escape_html(&node.name));
        if let Some(start) = node.start.as_deref() {
            inner.push_str(&write_node(start));
            inner.push_str(&write_body(node));
            if let Some(finish) = node.finish.as_deref() {
                inner.push_str(&write_node(finish));
            }
        } else {
            for child in &node.children {
                inner.push_str(&write_node(child));
            }
        }
        div(CssClass::Pattern, &inner)
    }

    fn write_section(node: &AstNode) -> String {
        let mut inner = div(CssClass::SectionName, &escape_html(&node.name));
        if let Some(start) = node.start.as_deref() {
            inner.push_str(&write_node(start));
        }
        inner.push_str(&write_body(node));
        if let Some(finish) = node.finish.as_deref() {
            inner.push_str(&write_node(finish));
        }
        div(CssClass::Section, &inner)
    }

    fn write_row(node: &AstNode) -> String {
        let mut tokens = row_head_tokens(node);
        tokens.push(format!("{}.", write_children_joined(node)));
        tokens.push(span(CssClass::StitchCount, &format!("({} sts)", node.width)));
        div(CssClass::Row, &tokens.join(" "))
    }

    fn write_row_rep(node: &AstNode) -> String {
        let rep = expr_value(&node.rep_count);
        let inner = format!("**{}rep from ** {} times", write_body(node), rep);
        div(CssClass::RowRepeat, &inner)
    }

    fn write_fixed_rep(node: &AstNode) -> String {
        format!("[{}] {} times", write_children_joined(node), expr_value(&node.rep_count))
    }

    fn write_ustrep(node: &AstNode) -> String {
        format!("*{}; rep from * to {}", write_children_joined(node), ustrep_tail(node))
    }

    fn write_compound(node: &AstNode) -> String {
        let mut parts = vec![format!("({})", write_children_joined(node))];
        if let Some(rep) = rep_of(node) {
            parts.push(format!("{} times ", rep));
        }
        parts.push("in next st".into());
        parts.join(" ")
    }

    fn write_basic_stitch(node: &AstNode) -> String {
        let (text, trailing_rep) = basic_stitch_text(node);
        let mut parts = vec![span(CssClass::Stitch, &text)];
        if let Some(rep) = trailing_rep {
            parts.push(rep.to_string());
        }
        parts.join(" ")
    }
}

mod text {
    use super::*;

    pub fn write_node(node: &AstNode) -> String {
        // Block nodes prefix "! ", inline nodes a bare "!", so that the
        // text output matches the tag-stripped HTML.
        let block_marker = if marker_class(node).is_some() { "! " } else { "" };
        let inline_marker = if marker_class(node).is_some() { "!" } else { "" };
        match node.kind {
            NodeKind::Root => node.children.first().map(write_node).unwrap_or_default(),
            NodeKind::Pattern => {
                let mut out = format!("{}{}\n", block_marker, node.name);
                if let Some(start) = node.start.as_deref() {
                    out.push_str(&write_node(start));
                    for child in &node.children {
                        out.push_str(&write_node(child));
                    }
                    if let Some(finish) = node.finish.as_deref() {
                        out.push_str(&write_node(finish));
                    }
                } else {
                    for child in &node.children {
                        out.push_str(&write_node(child));
                    }
                }
                out
            }
            NodeKind::Section => {
                let mut out = format!("{}{}\n", block_marker, node.name);
                if let Some(start) = node.start.as_deref() {
                    out.push_str(&write_node(start));
                }
                for child in &node.children {
                    out.push_str(&write_node(child));
                }
                if let Some(finish) = node.finish.as_deref() {
                    out.push_str(&write_node(finish));
                }
                out
            }
            NodeKind::CastOn => format!("{}{}\n", block_marker, cast_on_text(node)),
            NodeKind::PickUp => format!("{}{}\n", block_marker, pick_up_text(node, false)),
            NodeKind::BindOff => format!("{}{}\n", block_marker, bind_off_text(node)),
            NodeKind::Join => format!("{}{}\n", block_marker, join_text(node, false)),
            NodeKind::Row => {
                let mut tokens = row_head_tokens(node);
                tokens.push(format!("{}.", write_children_joined(node)));
                tokens.push(format!("({} sts)", node.width));
                format!("{}{}\n", block_marker, tokens.join(" "))
            }
            NodeKind::RowRep => {
                let mut out = format!("{}**\n", block_marker);
                for child in &node.children {
                    out.push_str(&write_node(child));
                }
                out.push_str(&format!("rep from ** {} times\n", expr_value(&node.rep_count)));
                out
            }
            NodeKind::FixedStRep => format!(
                "{}[{}] {} times",
                inline_marker,
                write_children_joined(node),
                expr_value(&node.rep_count)
            ),
            NodeKind::UStRep => format!(
                "{}*{}; rep from * to {}",
                inline_marker,
                write_children_joined(node),
                ustrep_tail(node)
            ),
            NodeKind::CompSt => {
                let mut parts = vec![format!("({})", write_children_joined(node))];
                if let Some(rep) = rep_of(node) {
                    parts.push(format!("{} times ", rep));
                }
                parts.push("in next st".into());
                format!("{}{}", inline_marker, parts.join(" "))
            }
            kind if kind.is_stitch() => {
                let (text, trailing_rep) = basic_stitch_text(node);
                let mut parts = vec![text];
                if let Some(rep) = trailing_rep {
                    parts.push(rep.to_string());
                }
                format!("{}{}", inline_marker, parts.join(" "))
            }
            // Nothing to render, but a flagged node still shows its marker.
            _ => inline_marker.to_string(),
        }
    }

    fn write_children_joined(node: &AstNode) -> String {
        node.children.iter().map(write_node).collect::<Vec<_>>().join(", ")
    }
}
