//! Brute-force row interpreter used as an independent oracle in tests.
//!
//! A row without undetermined repeats is unrolled into a flat sequence of
//! atomic stitches (fixed repeats and per-stitch repeat counts expanded
//! positionally, compound groups kept together), and the worked/change
//! totals are computed by direct summation from this module's own effect
//! table. It shares no arithmetic with the verification pass it checks.

use crate::ast::{AstNode, Expression, NodeKind};

/// One atomic stitch with its embedded parameter; repetition fully unrolled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatStitch {
    pub kind: NodeKind,
    pub num: Option<u32>,
}

/// A flattened row item: a lone stitch, or the stitches of one compound
/// group, which together consume a single active stitch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatItem {
    Single(FlatStitch),
    Compound(Vec<FlatStitch>),
}

/// Worked/change totals as the oracle computes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RowTotals {
    pub worked_st: i64,
    pub st_change: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The row contains an undetermined repeat; its resolution is exactly
    /// the verifier logic under test, so the oracle refuses it.
    UndeterminedRepeat,
}

fn rep_count(node: &AstNode) -> u32 {
    match node.rep_count.as_ref().map(Expression::value) {
        Some(v) if v > 1 => v,
        _ => 1,
    }
}

fn num_value(node: &AstNode) -> Option<u32> {
    node.num.as_ref().map(Expression::value).filter(|&v| v > 0)
}

/// Unroll a row into flat items. Fails if an undetermined repeat is present.
pub fn flatten_row(row: &AstNode) -> Result<Vec<FlatItem>, OracleError> {
    let mut items = Vec::new();
    for child in &row.children {
        flatten_elem(child, &mut items)?;
    }
    Ok(items)
}

fn flatten_elem(node: &AstNode, items: &mut Vec<FlatItem>) -> Result<(), OracleError> {
    match node.kind {
        NodeKind::UStRep => Err(OracleError::UndeterminedRepeat),
        NodeKind::FixedStRep => {
            for _ in 0..rep_count(node) {
                for child in &node.children {
                    flatten_elem(child, items)?;
                }
            }
            Ok(())
        }
        NodeKind::CompSt => {
            // Children of a compound may carry their own repeat counts;
            // each group instance shares one consumed active stitch.
            let mut group = Vec::new();
            for child in &node.children {
                if child.kind.is_stitch() {
                    for _ in 0..rep_count(child) {
                        group.push(FlatStitch { kind: child.kind, num: num_value(child) });
                    }
                }
            }
            for _ in 0..rep_count(node) {
                items.push(FlatItem::Compound(group.clone()));
            }
            Ok(())
        }
        kind if kind.is_stitch() => {
            for _ in 0..rep_count(node) {
                items.push(FlatItem::Single(FlatStitch { kind, num: num_value(node) }));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

// The oracle's own copy of the per-stitch effects: (worked, created loops).
// Width change for a lone stitch is loops created minus stitches consumed.
fn loops_created(stitch: &FlatStitch) -> i64 {
    match stitch.kind {
        NodeKind::Knit
        | NodeKind::Purl
        | NodeKind::KnitTbl
        | NodeKind::PurlTbl
        | NodeKind::KnitBelow
        | NodeKind::PurlBelow
        | NodeKind::Slip
        | NodeKind::SlipKw
        | NodeKind::SlipPw => 1,
        NodeKind::YarnOver => 1,
        NodeKind::KnitFb | NodeKind::PurlFb => 2,
        NodeKind::Make | NodeKind::MakeL | NodeKind::MakeR => 1,
        NodeKind::KnitTog | NodeKind::PurlTog => 1, // one loop through n stitches
        NodeKind::Ssk | NodeKind::Ssp => 1,
        NodeKind::Psso => -1, // removes a loop, creates none
        _ => 0,
    }
}

fn worked(stitch: &FlatStitch) -> i64 {
    let n = i64::from(stitch.num.unwrap_or(1));
    match stitch.kind {
        NodeKind::Knit
        | NodeKind::Purl
        | NodeKind::KnitTbl
        | NodeKind::PurlTbl
        | NodeKind::KnitBelow
        | NodeKind::PurlBelow
        | NodeKind::Slip
        | NodeKind::SlipKw
        | NodeKind::SlipPw
        | NodeKind::KnitFb
        | NodeKind::PurlFb => 1,
        NodeKind::YarnOver | NodeKind::Make | NodeKind::MakeL | NodeKind::MakeR => 0,
        NodeKind::KnitTog | NodeKind::PurlTog => n,
        NodeKind::Ssk | NodeKind::Ssp => 2,
        NodeKind::Psso => 0,
        _ => 0,
    }
}

/// Direct summation over flat items. A lone stitch contributes its worked
/// count and (loops created - worked). A compound group consumes one stitch
/// and contributes every loop its stitches create beyond that one.
pub fn sum_effects(items: &[FlatItem]) -> RowTotals {
    let mut totals = RowTotals::default();
    for item in items {
        match item {
            FlatItem::Single(stitch) => {
                let w = worked(stitch);
                totals.worked_st += w;
                totals.st_change += loops_created(stitch) - w;
            }
            FlatItem::Compound(group) => {
                let created: i64 = group.iter().map(loops_created).sum();
                totals.worked_st += 1;
                totals.st_change += created - 1;
            }
        }
    }
    totals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Expression;

    fn knit_row(reps: &[(NodeKind, Option<u32>, Option<u32>)]) -> AstNode {
        let mut row = AstNode::new(NodeKind::Row);
        for &(kind, num, rep) in reps {
            let mut stitch = AstNode::stitch(kind, num);
            stitch.rep_count = rep.map(Expression::literal);
            row.children.push(stitch);
        }
        row
    }

    #[test]
    fn fixed_repeat_unrolls_positionally() {
        let mut row = AstNode::new(NodeKind::Row);
        let mut fixed = AstNode::new(NodeKind::FixedStRep);
        fixed.children.push(AstNode::stitch(NodeKind::Knit, None));
        fixed.children.push(AstNode::stitch(NodeKind::Purl, None));
        fixed.rep_count = Some(Expression::literal(3));
        row.children.push(fixed);
        let flat = flatten_row(&row).unwrap();
        let kinds: Vec<NodeKind> = flat
            .iter()
            .map(|item| match item {
                FlatItem::Single(s) => s.kind,
                FlatItem::Compound(_) => NodeKind::CompSt,
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                NodeKind::Knit,
                NodeKind::Purl,
                NodeKind::Knit,
                NodeKind::Purl,
                NodeKind::Knit,
                NodeKind::Purl
            ]
        );
    }

    #[test]
    fn stitch_rep_counts_unroll() {
        let row = knit_row(&[(NodeKind::Knit, None, Some(2)), (NodeKind::KnitTog, Some(2), None)]);
        let flat = flatten_row(&row).unwrap();
        assert_eq!(flat.len(), 3);
        assert_eq!(sum_effects(&flat), RowTotals { worked_st: 4, st_change: -1 });
    }

    #[test]
    fn compound_consumes_one_stitch() {
        let mut row = AstNode::new(NodeKind::Row);
        let mut comp = AstNode::new(NodeKind::CompSt);
        for kind in [NodeKind::Knit, NodeKind::Purl, NodeKind::Knit] {
            comp.children.push(AstNode::stitch(kind, None));
        }
        row.children.push(comp);
        let flat = flatten_row(&row).unwrap();
        assert_eq!(flat.len(), 1);
        match &flat[0] {
            FlatItem::Compound(group) => assert_eq!(group.len(), 3),
            other => panic!("expected compound, got {other:?}"),
        }
        // Three loops created from one consumed stitch.
        assert_eq!(sum_effects(&flat), RowTotals { worked_st: 1, st_change: 2 });
    }

    #[test]
    fn plain_sums() {
        let row = knit_row(&[(NodeKind::Knit, None, Some(8))]);
        assert_eq!(sum_effects(&flatten_row(&row).unwrap()), RowTotals { worked_st: 8, st_change: 0 });

        let row = knit_row(&[(NodeKind::KnitTog, Some(2), None), (NodeKind::YarnOver, None, None)]);
        assert_eq!(sum_effects(&flatten_row(&row).unwrap()), RowTotals { worked_st: 2, st_change: 0 });

        let row = knit_row(&[]);
        assert_eq!(sum_effects(&flatten_row(&row).unwrap()), RowTotals::default());
    }

    #[test]
    fn undetermined_repeat_is_refused() {
        let mut row = AstNode::new(NodeKind::Row);
        let mut rep = AstNode::new(NodeKind::UStRep);
        rep.children.push(AstNode::stitch(NodeKind::Knit, None));
        rep.num = Some(Expression::literal(0));
        row.children.push(rep);
        assert_eq!(flatten_row(&row), Err(OracleError::UndeterminedRepeat));
    }
}
