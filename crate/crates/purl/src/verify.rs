//! Pass 3 — stitch-count verification.
//!
//! Walks the expanded tree threading side, width, and row index through the
//! context, annotates each row with its index, side, and resulting width,
//! and raises verification messages where a row works a different number of
//! stitches than the previous row provides, where an undetermined repeat
//! leaves a remainder, and where a bind-off or join count disagrees with the
//! final width.

use crate::ast::{AstNode, Expression, NodeKind, RowType, SideType, StitchEffect};
use crate::diag::{CompileContext, Severity};

/// Per-row accumulator: the width the row started with, the active stitches
/// consumed so far, and the signed width change so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowState {
    pub initial_width: u32,
    pub worked_st: i64,
    pub st_change: i64,
}

impl RowState {
    pub fn new(initial_width: u32) -> Self {
        RowState { initial_width, worked_st: 0, st_change: 0 }
    }
}

/// Run the verification pass over the whole tree.
pub fn verify(root: &mut AstNode, ctx: &mut CompileContext) {
    verify_node(root, ctx);
}

/// Evaluate an expression to a natural. By this pass every variable has been
/// substituted; a residual one is reported and counts as zero.
pub fn evaluate_expression(expr: &Expression, ctx: &mut CompileContext) -> u32 {
    if expr.has_vars() {
        ctx.add_message_unanchored(Severity::Error, "Unevaluated variable in expression.");
    }
    expr.value()
}

fn verify_node(node: &mut AstNode, ctx: &mut CompileContext) {
    ctx.pos = node.pos;
    match node.kind {
        NodeKind::Root => {
            if let Some(pattern) = node.children.first_mut() {
                verify_node(pattern, ctx);
            }
        }
        NodeKind::Pattern => {
            if node.start.is_some() {
                let mut start = node.start.take().unwrap();
                verify_node(&mut start, ctx);
                node.start = Some(start);
                verify_children(node, ctx);
                let mut finish = node.finish.take().unwrap_or_else(|| Box::new(AstNode::new(NodeKind::Invalid)));
                verify_node(&mut finish, ctx);
                node.finish = Some(finish);
            } else {
                verify_children(node, ctx);
            }
        }
        NodeKind::Section => {
            ctx.section_name = Some(node.name.clone());
            if let Some(mut start) = node.start.take() {
                verify_node(&mut start, ctx);
                node.start = Some(start);
            }
            verify_children(node, ctx);
            if let Some(mut finish) = node.finish.take() {
                verify_node(&mut finish, ctx);
                node.finish = Some(finish);
            }
        }
        NodeKind::CastOn | NodeKind::PickUp => {
            ctx.side = SideType::Rs;
            ctx.width = node.value;
            ctx.row_index = 1;
        }
        NodeKind::BindOff => {
            if node.value != ctx.width {
                let msg = format!("Binding off {} sts over {} sts.", node.value, ctx.width);
                ctx.add_message(Severity::Verification, node, msg);
            }
        }
        NodeKind::Join => {
            if node.value != ctx.width {
                let msg = format!("Joining {} sts of {} sts.", node.value, ctx.width);
                ctx.add_message(Severity::Verification, node, msg);
            }
        }
        NodeKind::Row => verify_row(node, ctx),
        NodeKind::RowRep => {
            let rep = node
                .rep_count
                .as_ref()
                .map(|e| evaluate_expression(e, ctx))
                .unwrap_or(0);
            // The knitter works the block repCount times, so its rows are
            // verified that many times; a width-neutral body behaves as if
            // verified once, a non-neutral one surfaces a mismatch on the
            // second repetition.
            let times = if rep > 1 { rep } else { 1 };
            for _ in 0..times {
                verify_children(node, ctx);
            }
        }
        _ => {}
    }
}

fn verify_children(node: &mut AstNode, ctx: &mut CompileContext) {
    for child in &mut node.children {
        verify_node(child, ctx);
    }
}

fn verify_row(node: &mut AstNode, ctx: &mut CompileContext) {
    node.index = ctx.row_index;
    node.side = Some(ctx.side);

    let mut state = RowState::new(ctx.width);
    for child in &mut node.children {
        verify_row_elem(child, &mut state, ctx);
    }

    if state.worked_st != i64::from(ctx.width) {
        let msg = format!("{} sts worked over {} sts.", state.worked_st, ctx.width);
        ctx.add_message(Severity::Verification, node, msg);
    }

    let width = state.worked_st.saturating_add(state.st_change);
    if width < 0 {
        ctx.add_message(Severity::Verification, node, "Row width becomes negative.");
    }
    node.width = width.clamp(0, i64::from(u32::MAX)) as u32;
    ctx.width = node.width;

    // Flat rows flip the work; rounds do not.
    if node.row_type == RowType::Row {
        ctx.side = match ctx.side {
            SideType::Rs => SideType::Ws,
            SideType::Ws => SideType::Rs,
        };
    }

    ctx.row_index += 1;
}

/// Fold one row element into the parent accumulator. `parent.worked_st` must
/// hold only the stitches consumed by the element's preceding siblings; an
/// undetermined repeat sizes itself from that running total.
pub fn verify_row_elem(node: &mut AstNode, parent: &mut RowState, ctx: &mut CompileContext) {
    let mut rep: i64 = 1;
    if let Some(expr) = node.rep_count.as_ref() {
        let v = evaluate_expression(expr, ctx);
        if v > 1 {
            rep = i64::from(v);
        }
    }
    let mut num: i64 = 0;
    if let Some(expr) = node.num.as_ref() {
        let v = evaluate_expression(expr, ctx);
        if v > 0 {
            num = i64::from(v);
        }
    }

    let mut child_state = RowState::new(parent.initial_width);

    match node.kind {
        NodeKind::FixedStRep => {
            for child in &mut node.children {
                verify_row_elem(child, &mut child_state, ctx);
            }
            parent.worked_st += child_state.worked_st.saturating_mul(rep);
            parent.st_change += child_state.st_change.saturating_mul(rep);
        }
        NodeKind::UStRep => {
            for child in &mut node.children {
                verify_row_elem(child, &mut child_state, ctx);
            }
            let per_rep = child_state.worked_st;
            let st_to_work = i64::from(parent.initial_width) - parent.worked_st - num;
            if per_rep == 0 {
                if st_to_work > 0 {
                    ctx.add_message(Severity::Verification, node, "Repeat works no stitches.");
                }
            } else if st_to_work < 0 {
                ctx.add_message(Severity::Verification, node, "Repeat begins past the end of the row.");
            } else {
                let remainder = st_to_work % per_rep;
                if remainder != 0 {
                    let msg = format!("{} st will remain after the last possible repeat.", remainder);
                    ctx.add_message(Severity::Verification, node, msg);
                } else {
                    rep = st_to_work / per_rep;
                }
            }
            parent.worked_st += child_state.worked_st.saturating_mul(rep);
            parent.st_change += child_state.st_change.saturating_mul(rep);
        }
        NodeKind::CompSt => {
            for child in &mut node.children {
                verify_row_elem(child, &mut child_state, ctx);
            }
            // The whole group is worked into a single active stitch: it
            // consumes one per repeat and adds every loop its stitches
            // create beyond that one.
            let group_change = child_state.worked_st + child_state.st_change - 1;
            parent.worked_st += rep;
            parent.st_change += group_change.saturating_mul(rep);
        }
        kind if kind.is_stitch() => {
            let effect = node.effect.unwrap_or(StitchEffect { worked_st: 0, st_change: 0 });
            parent.worked_st += i64::from(effect.worked_st).saturating_mul(rep);
            parent.st_change += effect.st_change.saturating_mul(rep);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expand::expand;
    use crate::parser::parse_program;

    fn compile(src: &str) -> (AstNode, CompileContext) {
        let mut ctx = CompileContext::new();
        let mut root = parse_program(src, &mut ctx);
        expand(&mut root, &mut ctx);
        verify(&mut root, &mut ctx);
        (root, ctx)
    }

    fn verification_messages(ctx: &CompileContext) -> Vec<&str> {
        ctx.messages
            .iter()
            .filter(|m| m.severity == Severity::Verification)
            .map(|m| m.message.as_str())
            .collect()
    }

    fn rows(node: &AstNode) -> Vec<&AstNode> {
        let mut out = Vec::new();
        fn walk<'a>(node: &'a AstNode, out: &mut Vec<&'a AstNode>) {
            if node.kind == NodeKind::Row {
                out.push(node);
            }
            for child in &node.children {
                walk(child, out);
            }
        }
        walk(node, &mut out);
        out
    }

    #[test]
    fn cast_on_sets_state() {
        let (root, ctx) = compile("pattern \"X\": CO 8 circular. BO 8.");
        assert!(verification_messages(&ctx).is_empty());
        assert_eq!(root.children[0].start.as_ref().unwrap().value, 8);
    }

    #[test]
    fn zero_cast_on_is_legal() {
        let (_, ctx) = compile("pattern \"X\": CO 0. BO 0.");
        assert!(verification_messages(&ctx).is_empty());
    }

    #[test]
    fn yarn_over_round_grows_width() {
        let (root, ctx) = compile("pattern \"X\": CO 8 circular. rnd : *K, YO, K; to end. BO 12.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        let row = &root.children[0].children[0];
        assert_eq!(row.index, 1);
        assert_eq!(row.width, 12);
        assert_eq!(row.side, Some(SideType::Rs));
    }

    #[test]
    fn worked_stitch_mismatch_message() {
        let (_, ctx) = compile("pattern \"X\": CO 20. row CC : P 19. BO 19.");
        assert_eq!(verification_messages(&ctx), vec!["19 sts worked over 20 sts."]);
    }

    #[test]
    fn remainder_message_exact_text() {
        let (_, ctx) = compile("pattern \"X\": CO 10. rnd : *K2T; to last 1. BO 9.");
        let msgs = verification_messages(&ctx);
        assert!(msgs.contains(&"1 st will remain after the last possible repeat."), "{msgs:?}");
    }

    #[test]
    fn undetermined_repeat_is_order_sensitive() {
        let (_, ctx) = compile("pattern \"X\": CO 100. row : K, *P; to last 1, K. BO 100.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
    }

    #[test]
    fn undetermined_repeat_with_k2t_yo_is_neutral() {
        // Per-repeat effect is (2, 0), so 100 sts give 50 repeats.
        let (root, ctx) = compile("pattern \"X\": CO 100. rnd : *K2T, YO; to end. BO 100.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        assert_eq!(root.children[0].children[0].width, 100);
    }

    #[test]
    fn compound_stitch_counts_loops_minus_one() {
        // <K, P, K> consumes one stitch and creates three loops: +2.
        let (root, ctx) = compile("pattern \"X\": CO 20. row : <K, P, K>, K 19. BO 22.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        assert_eq!(root.children[0].children[0].width, 22);
    }

    #[test]
    fn fixed_repeat_multiplies_children() {
        // [K, YO, K 3, YO, K] x4 works 20 and adds 8.
        let (root, ctx) = compile("pattern \"X\": CO 20. rnd : [K, YO, K 3, YO, K] 4. BO 28.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        assert_eq!(root.children[0].children[0].width, 28);
    }

    #[test]
    fn bind_off_and_join_mismatches() {
        let (_, ctx) = compile("pattern \"X\": CO 10. BO 9.");
        assert_eq!(verification_messages(&ctx), vec!["Binding off 9 sts over 10 sts."]);

        let (_, ctx) =
            compile("pattern \"X\": section \"S\": PU 10 from \"A\". Join 9 to \"A\".");
        assert_eq!(verification_messages(&ctx), vec!["Joining 9 sts of 10 sts."]);
    }

    #[test]
    fn side_flips_only_for_flat_rows() {
        let (root, _) = compile("pattern \"X\": CO 20. rnd : K 20. row : P 20. row : K 20. BO 20.");
        let rows = rows(&root);
        assert_eq!(rows[0].side, Some(SideType::Rs)); // rnd keeps RS
        assert_eq!(rows[1].side, Some(SideType::Rs)); // first flat row still RS
        assert_eq!(rows[2].side, Some(SideType::Ws)); // flipped by the row before
    }

    #[test]
    fn row_repeat_children_verified_per_repetition() {
        // A width-neutral repeat verifies clean and advances the row index
        // once per repetition.
        let (root, ctx) = compile("pattern \"X\": CO 10. ** row : *K; to end. repeat 2 BO 10.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        let row = &root.children[0].children[0].children[0];
        assert_eq!(row.index, 2); // annotation from the final repetition

        // A non-neutral repeat surfaces the mismatch on the second pass.
        let (_, ctx) = compile("pattern \"X\": CO 10. ** row : K 8, K2T. repeat 2 BO 9.");
        let msgs = verification_messages(&ctx);
        assert!(msgs.contains(&"10 sts worked over 9 sts."), "{msgs:?}");
    }

    #[test]
    fn nested_row_repeats_multiply() {
        // The inner block runs twice per outer repetition: six rows total.
        let (root, ctx) =
            compile("pattern \"X\": CO 5. ** ** row : K 5. repeat 2 repeat 3 BO 5.");
        assert!(verification_messages(&ctx).is_empty(), "{:?}", ctx.messages);
        let row = &root.children[0].children[0].children[0].children[0];
        assert_eq!(row.kind, NodeKind::Row);
        assert_eq!(row.index, 6);
    }

    #[test]
    fn negative_width_is_flagged_and_clamped() {
        // PSSO works nothing and removes a loop: over an empty row the
        // computed width would be -1.
        let (root, ctx) = compile("pattern \"X\": CO 0. row : PSSO. BO 0.");
        let msgs = verification_messages(&ctx);
        assert!(msgs.contains(&"Row width becomes negative."), "{msgs:?}");
        assert_eq!(root.children[0].children[0].width, 0);
    }

    #[test]
    fn repeat_with_no_worked_stitches() {
        let (_, ctx) = compile("pattern \"X\": CO 4. row : *YO; to end. BO 4.");
        let msgs = verification_messages(&ctx);
        assert!(msgs.contains(&"Repeat works no stitches."), "{msgs:?}");
    }

    #[test]
    fn repeat_past_end_of_row() {
        let (_, ctx) = compile("pattern \"X\": CO 2. row : K 2, *K; to last 1. BO 2.");
        let msgs = verification_messages(&ctx);
        assert!(msgs.contains(&"Repeat begins past the end of the row."), "{msgs:?}");
    }

    #[test]
    fn expression_sums_children() {
        let mut ctx = CompileContext::new();
        let e = Expression { atoms: vec![crate::ast::ExprAtom::Lit(1), crate::ast::ExprAtom::Lit(2)] };
        assert_eq!(evaluate_expression(&e, &mut ctx), 3);
        assert_eq!(evaluate_expression(&Expression::default(), &mut ctx), 0);
        assert!(ctx.messages.is_empty());
    }

    #[test]
    fn row_indices_run_consecutively_within_sections() {
        let (root, _) = compile(
            "pattern \"X\": section \"A\": CO 2. row : K 2. row : P 2. BO 2. section \"B\": CO 3. rnd : K 3. BO 3.",
        );
        let rows = rows(&root);
        assert_eq!(rows[0].index, 1);
        assert_eq!(rows[1].index, 2);
        assert_eq!(rows[2].index, 1); // new section restarts at the cast-on
    }

    #[test]
    fn verification_message_carries_section_and_row() {
        let (_, ctx) = compile("pattern \"X\": section \"Body\": CO 20. row : P 19. BO 19.");
        let msg = ctx
            .messages
            .iter()
            .find(|m| m.severity == Severity::Verification)
            .unwrap();
        assert_eq!(msg.section_name.as_deref(), Some("Body"));
        assert_eq!(msg.row_index, Some(1));
        assert_eq!(msg.message, "19 sts worked over 20 sts.");
    }
}
