//! Syntax tree types shared by all compiler passes.
//!
//! A single [`AstNode`] struct carries every node kind; fields that do not
//! apply to a kind are left at their defaults. Numeric expressions and branch
//! conditions are separate value types so that parameter substitution can
//! splice atoms in place.

use crate::token::SourcePos;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodeKind {
    Root,
    Pattern,
    Section,
    CastOn,
    PickUp,
    BindOff,
    Join,
    Row,
    RowRep,
    SampleDef,
    SampleCall,
    FixedStRep,
    UStRep,
    CompSt,
    Knit,
    Purl,
    KnitTbl,
    PurlTbl,
    KnitBelow,
    PurlBelow,
    Slip,
    SlipKw,
    SlipPw,
    YarnOver,
    KnitFb,
    PurlFb,
    Make,
    MakeL,
    MakeR,
    KnitTog,
    PurlTog,
    Ssk,
    Ssp,
    Psso,
    Branch,
    /// Placeholder produced by error recovery; skipped by later passes.
    Invalid,
}

impl NodeKind {
    pub fn is_stitch(self) -> bool {
        use NodeKind::*;
        matches!(
            self,
            Knit | Purl
                | KnitTbl
                | PurlTbl
                | KnitBelow
                | PurlBelow
                | Slip
                | SlipKw
                | SlipPw
                | YarnOver
                | KnitFb
                | PurlFb
                | Make
                | MakeL
                | MakeR
                | KnitTog
                | PurlTog
                | Ssk
                | Ssp
                | Psso
        )
    }

    /// Short name used when a diagnostic interpolates the node type, e.g.
    /// "Missing '.' symbol at end of CO.".
    pub fn type_label(self) -> &'static str {
        use NodeKind::*;
        match self {
            Root => "Root",
            Pattern => "Pattern",
            Section => "Section",
            CastOn => "CO",
            PickUp => "PU",
            BindOff => "BO",
            Join => "Join",
            Row => "Row",
            RowRep => "RowRepeat",
            SampleDef => "SampleDef",
            SampleCall => "SampleCall",
            FixedStRep => "FixedStRep",
            UStRep => "UndeterminedStRep",
            CompSt => "CompSt",
            Knit => "K",
            Purl => "P",
            KnitTbl => "KB",
            PurlTbl => "PB",
            KnitBelow => "KBelow",
            PurlBelow => "PBelow",
            Slip => "S",
            SlipKw => "SK",
            SlipPw => "SP",
            YarnOver => "YO",
            KnitFb => "KFB",
            PurlFb => "PFB",
            Make => "M",
            MakeL => "ML",
            MakeR => "MR",
            KnitTog => "KT",
            PurlTog => "PT",
            Ssk => "SSK",
            Ssp => "SSP",
            Psso => "PSSO",
            Branch => "Branch",
            Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SideType {
    Rs,
    Ws,
}

impl SideType {
    pub fn as_str(self) -> &'static str {
        match self {
            SideType::Rs => "RS",
            SideType::Ws => "WS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CoType {
    #[default]
    Flat,
    Circular,
    Provisional,
}

impl CoType {
    pub fn as_str(self) -> &'static str {
        match self {
            CoType::Flat => "flat",
            CoType::Circular => "circular",
            CoType::Provisional => "provisional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RowType {
    Row,
    #[default]
    Rnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ColorType {
    Main,
    Contrast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompareType {
    Eq,
    Lt,
    Leq,
    Gt,
    Geq,
}

/// How a basic stitch affects the row: how many active stitches it consumes
/// from the previous row and the signed net change to the row width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StitchEffect {
    pub worked_st: u32,
    pub st_change: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprAtom {
    Lit(u32),
    Var(String),
}

/// A natural-number expression: a sum of literals and variables.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Expression {
    pub atoms: Vec<ExprAtom>,
}

impl Expression {
    pub fn literal(value: u32) -> Self {
        Expression { atoms: vec![ExprAtom::Lit(value)] }
    }

    pub fn has_vars(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, ExprAtom::Var(_)))
    }

    /// Sum of the literal atoms; unresolved variables count as zero. An
    /// empty expression evaluates to zero.
    pub fn value(&self) -> u32 {
        self.atoms
            .iter()
            .map(|a| match a {
                ExprAtom::Lit(v) => *v,
                ExprAtom::Var(_) => 0,
            })
            .fold(0u32, u32::saturating_add)
    }
}

/// A branch guard: left and right expressions joined by a comparator.
/// Missing pieces (error recovery) make the condition evaluate false.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Condition {
    pub left: Option<Expression>,
    pub right: Option<Expression>,
    pub compare: Option<CompareType>,
    pub do_branch: bool,
}

/// Which message severities have been attached to a node; drives the
/// marker spans in generated output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MsgFlags {
    pub error: bool,
    pub warning: bool,
    pub verification: bool,
}

impl MsgFlags {
    pub fn any(self) -> bool {
        self.error || self.warning || self.verification
    }
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

/// One syntax tree node. See [`NodeKind`] for the variants; unused fields
/// keep their defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AstNode {
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<AstNode>,
    /// Count for cast-on / pick-up / bind-off / join.
    #[serde(skip_serializing_if = "is_zero_u32")]
    pub value: u32,
    /// Title or identifier for pattern / section / sample nodes.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
    pub co_type: CoType,
    pub row_type: RowType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<ColorType>,
    /// Side annotation written by the verification pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<SideType>,
    /// Embedded stitch parameter (the 2 in K2T), or the distance-from-end
    /// expression of an undetermined stitch repeat.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num: Option<Expression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rep_count: Option<Expression>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub param_names: Vec<String>,
    /// Sample call arguments, positional; bound to parameter names during
    /// expansion.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<Expression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect: Option<StitchEffect>,
    /// Row index annotation written by the verification pass (1-based).
    #[serde(skip_serializing_if = "is_zero_u32")]
    pub index: u32,
    /// Row width annotation written by the verification pass.
    #[serde(skip_serializing_if = "is_zero_u32")]
    pub width: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<Box<AstNode>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finish: Option<Box<AstNode>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos: Option<SourcePos>,
    #[serde(skip_serializing_if = "flags_clear")]
    pub flags: MsgFlags,
}

fn flags_clear(f: &MsgFlags) -> bool {
    !f.any()
}

impl AstNode {
    pub fn new(kind: NodeKind) -> Self {
        AstNode {
            kind,
            children: Vec::new(),
            value: 0,
            name: String::new(),
            origin: None,
            destination: None,
            co_type: CoType::Flat,
            row_type: RowType::Rnd,
            color: None,
            side: None,
            num: None,
            rep_count: None,
            param_names: Vec::new(),
            args: Vec::new(),
            condition: None,
            effect: None,
            index: 0,
            width: 0,
            start: None,
            finish: None,
            pos: None,
            flags: MsgFlags::default(),
        }
    }

    /// Build a basic stitch node with its effect per the stitch table.
    /// `num` is the embedded parameter for the parameterized stitches.
    pub fn stitch(kind: NodeKind, num: Option<u32>) -> Self {
        let mut node = AstNode::new(kind);
        let n = num.unwrap_or(1);
        let effect = match kind {
            NodeKind::Knit
            | NodeKind::Purl
            | NodeKind::KnitTbl
            | NodeKind::PurlTbl
            | NodeKind::KnitBelow
            | NodeKind::PurlBelow
            | NodeKind::Slip
            | NodeKind::SlipKw
            | NodeKind::SlipPw => StitchEffect { worked_st: 1, st_change: 0 },
            NodeKind::YarnOver => StitchEffect { worked_st: 0, st_change: 1 },
            NodeKind::KnitFb | NodeKind::PurlFb => StitchEffect { worked_st: 1, st_change: 1 },
            NodeKind::Make | NodeKind::MakeL | NodeKind::MakeR => {
                StitchEffect { worked_st: 0, st_change: 1 }
            }
            NodeKind::KnitTog | NodeKind::PurlTog => {
                StitchEffect { worked_st: n, st_change: -(i64::from(n) - 1) }
            }
            NodeKind::Ssk | NodeKind::Ssp => StitchEffect { worked_st: 2, st_change: -1 },
            NodeKind::Psso => StitchEffect { worked_st: 0, st_change: -1 },
            _ => StitchEffect { worked_st: 0, st_change: 0 },
        };
        node.effect = Some(effect);
        node.num = num.map(Expression::literal);
        node
    }
}
