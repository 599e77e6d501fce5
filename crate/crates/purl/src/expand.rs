//! Pass 2 — sample substitution.
//!
//! Every sample call is replaced, in place in its parent's child list, by a
//! structurally independent copy of the definition's body. Argument
//! expressions are substituted under the caller's scope and bound to the
//! parameter names one at a time; branch guards are evaluated and the first
//! true branch's body replaces the node's children. After this pass no
//! sample call, branch, or variable reference remains in the tree.
//!
//! Each child list is rebuilt through one shared accumulator, so a deep
//! chain of recursive calls appends every expanded node once instead of
//! re-splicing the growing tail at every level.

use crate::ast::{AstNode, CompareType, Condition, Expression, ExprAtom, NodeKind};
use crate::diag::{CompileContext, Severity};
use crate::token::SourcePos;
use std::collections::HashMap;
use std::rc::Rc;

pub type ParamMap = HashMap<String, Expression>;

/// Run the substitution pass over the whole tree.
pub fn expand(root: &mut AstNode, ctx: &mut CompileContext) {
    if root.kind != NodeKind::Root {
        return;
    }
    let param_map = ParamMap::new();
    if let Some(pattern) = root.children.first_mut() {
        traverse_children(pattern, &param_map, ctx);
    }
}

// The traversal runs on an explicit task stack: recursion depth equals the
// sample recursion depth (bounded only by the expansion budget), which must
// not be able to exhaust the native stack.
enum Task {
    /// Append the processed children to the top output list. `base` is the
    /// truncation point for a taken branch within this list.
    Walk {
        iter: std::vec::IntoIter<AstNode>,
        param_map: Rc<ParamMap>,
        base: usize,
    },
    /// A sample call's body walk finished: run the branch fall-through
    /// check over everything it appended.
    FinishCall {
        name: String,
        pos: Option<SourcePos>,
        start: usize,
    },
    /// A container's child walk finished: pop its output list, attach it,
    /// and hand the container to the enclosing list.
    FinishOwner { owner: Box<AstNode> },
}

/// Rebuild one node's ordered child list: sample expansions and selected
/// branch bodies are appended where the call or branch stood, expression
/// variables are substituted, and traversal continues after appended
/// children (they were processed while being produced).
pub fn traverse_children(node: &mut AstNode, param_map: &ParamMap, ctx: &mut CompileContext) {
    let children = std::mem::take(&mut node.children);
    // One output list per container being rebuilt, with a running count of
    // failed-branch nodes currently inside it so the common fall-through
    // check is constant time.
    let mut outs = OutputStack::new(children.len());
    let mut tasks = vec![Task::Walk {
        iter: children.into_iter(),
        param_map: Rc::new(param_map.clone()),
        base: 0,
    }];

    while let Some(task) = tasks.last_mut() {
        match task {
            Task::Walk { iter, param_map, base } => {
                let Some(mut child) = iter.next() else {
                    tasks.pop();
                    continue;
                };
                let param_map = Rc::clone(param_map);
                let base = *base;
                match child.kind {
                    NodeKind::Section => {
                        ctx.section_name = Some(child.name.clone());
                        descend(&mut outs, &mut tasks, child, param_map);
                    }
                    NodeKind::SampleCall => {
                        ctx.pos = child.pos;
                        start_sample_call(child, &param_map, ctx, &mut outs, &mut tasks);
                    }
                    NodeKind::Branch => {
                        let mut condition = child.condition.take().unwrap_or_default();
                        let taken = evaluate_condition(&mut condition, &param_map, ctx);
                        child.condition = Some(condition);
                        if taken {
                            // The first true branch's body becomes the whole
                            // child list; remaining siblings are dropped.
                            outs.truncate_top(base);
                            let body = std::mem::take(&mut child.children);
                            if let Some(Task::Walk { iter, .. }) = tasks.last_mut() {
                                *iter = body.into_iter();
                            }
                        } else {
                            // A failed branch stays for the fall-through
                            // check.
                            outs.push_node(child);
                        }
                    }
                    NodeKind::Row
                    | NodeKind::RowRep
                    | NodeKind::FixedStRep
                    | NodeKind::UStRep
                    | NodeKind::CompSt => {
                        update_expressions(&mut child, &param_map, ctx);
                        descend(&mut outs, &mut tasks, child, param_map);
                    }
                    kind if kind.is_stitch() => {
                        update_expressions(&mut child, &param_map, ctx);
                        outs.push_node(child);
                    }
                    _ => outs.push_node(child),
                }
            }
            Task::FinishCall { name, pos, start } => {
                // A branched sample whose guards all failed expands to
                // nothing.
                if outs.has_branches_from(*start) {
                    outs.truncate_top(*start);
                    ctx.pos = *pos;
                    let msg = format!("No branch of sample '{}' matched.", name);
                    ctx.add_message_unanchored(Severity::Warning, msg);
                }
                tasks.pop();
            }
            Task::FinishOwner { owner } => {
                let children = outs.pop_list();
                let mut owner = std::mem::replace(owner, Box::new(AstNode::new(NodeKind::Invalid)));
                owner.children = children;
                tasks.pop();
                outs.push_node(*owner);
            }
        }
    }

    node.children = outs.into_single_list();
}

struct OutputStack {
    lists: Vec<Vec<AstNode>>,
    branch_counts: Vec<usize>,
}

impl OutputStack {
    fn new(capacity: usize) -> Self {
        OutputStack { lists: vec![Vec::with_capacity(capacity)], branch_counts: vec![0] }
    }

    fn top_len(&self) -> usize {
        self.lists.last().expect("empty output stack").len()
    }

    fn push_node(&mut self, node: AstNode) {
        if node.kind == NodeKind::Branch {
            *self.branch_counts.last_mut().unwrap() += 1;
        }
        self.lists.last_mut().expect("empty output stack").push(node);
    }

    fn push_list(&mut self, capacity: usize) {
        self.lists.push(Vec::with_capacity(capacity));
        self.branch_counts.push(0);
    }

    fn pop_list(&mut self) -> Vec<AstNode> {
        self.branch_counts.pop();
        self.lists.pop().expect("empty output stack")
    }

    fn has_branches_from(&self, start: usize) -> bool {
        if *self.branch_counts.last().unwrap() == 0 {
            return false;
        }
        self.lists.last().unwrap()[start..].iter().any(|c| c.kind == NodeKind::Branch)
    }

    fn truncate_top(&mut self, at: usize) {
        let list = self.lists.last_mut().unwrap();
        let count = self.branch_counts.last_mut().unwrap();
        if *count > 0 {
            *count -= list[at..].iter().filter(|c| c.kind == NodeKind::Branch).count();
        }
        list.truncate(at);
    }

    fn into_single_list(mut self) -> Vec<AstNode> {
        let list = self.lists.pop().expect("empty output stack");
        debug_assert!(self.lists.is_empty(), "unbalanced output stack");
        list
    }
}

fn descend(
    outs: &mut OutputStack,
    tasks: &mut Vec<Task>,
    mut owner: AstNode,
    param_map: Rc<ParamMap>,
) {
    let children = std::mem::take(&mut owner.children);
    tasks.push(Task::FinishOwner { owner: Box::new(owner) });
    outs.push_list(children.len());
    tasks.push(Task::Walk { iter: children.into_iter(), param_map, base: 0 });
}

/// Queue one call's expansion: duplicate the caller scope, substitute and
/// bind the arguments in order, deep-copy the definition body, and walk it
/// under the new scope straight into the enclosing list.
fn start_sample_call(
    mut call: AstNode,
    param_map: &ParamMap,
    ctx: &mut CompileContext,
    outs: &mut OutputStack,
    tasks: &mut Vec<Task>,
) {
    let Some(def) = ctx.samples.get(&call.name) else {
        let msg = format!("Unknown sample '{}'.", call.name);
        ctx.add_message(Severity::Error, &mut call, msg);
        return;
    };
    let param_names = def.param_names.clone();
    let def_children = def.children.clone();

    if ctx.expansion_budget == 0 {
        let msg = format!("Sample expansion limit exceeded at '{}'.", call.name);
        ctx.add_message(Severity::Error, &mut call, msg);
        return;
    }
    ctx.expansion_budget -= 1;

    // Bindings are applied one argument at a time, so a later argument sees
    // the earlier parameters' new values. A fully substituted binding holds
    // only literals, so it is stored as its sum; otherwise a recursive
    // argument like `n + 1` would grow by one atom per expansion level.
    let mut local_map = param_map.clone();
    for (name, arg) in param_names.iter().zip(call.args.iter()) {
        let mut expr = arg.clone();
        substitute_expression(&mut expr, &local_map, ctx);
        if !expr.has_vars() {
            expr = Expression::literal(expr.value());
        }
        local_map.insert(name.clone(), expr);
    }

    let start = outs.top_len();
    tasks.push(Task::FinishCall { name: call.name.clone(), pos: call.pos, start });
    tasks.push(Task::Walk {
        iter: def_children.into_iter(),
        param_map: Rc::new(local_map),
        base: start,
    });
}

/// Substitute variables in the `num` and `repCount` expressions of a node.
fn update_expressions(node: &mut AstNode, param_map: &ParamMap, ctx: &mut CompileContext) {
    if let Some(expr) = node.rep_count.as_mut() {
        substitute_expression(expr, param_map, ctx);
    }
    if let Some(expr) = node.num.as_mut() {
        substitute_expression(expr, param_map, ctx);
    }
}

/// Replace every variable atom with the bound expression's atoms, splicing
/// them in place (substituting `n -> a + b` into `n + 2` yields `a + b + 2`).
/// An unbound variable becomes literal zero with an error.
fn substitute_expression(expr: &mut Expression, param_map: &ParamMap, ctx: &mut CompileContext) {
    let mut i = 0;
    while i < expr.atoms.len() {
        if let ExprAtom::Var(name) = &expr.atoms[i] {
            match param_map.get(name) {
                Some(bound) => {
                    let replacement = bound.atoms.clone();
                    let count = replacement.len();
                    expr.atoms.splice(i..=i, replacement);
                    i += count;
                }
                None => {
                    let msg = format!("Unbound variable '{}'.", name);
                    ctx.add_message_unanchored(Severity::Error, msg);
                    expr.atoms[i] = ExprAtom::Lit(0);
                    i += 1;
                }
            }
        } else {
            i += 1;
        }
    }
}

/// Substitute both sides of a guard, sum them, and compare. The result is
/// recorded on the condition and returned; a condition left incomplete by
/// error recovery is false.
pub fn evaluate_condition(cond: &mut Condition, param_map: &ParamMap, ctx: &mut CompileContext) -> bool {
    let (Some(left), Some(right)) = (cond.left.as_mut(), cond.right.as_mut()) else {
        cond.do_branch = false;
        return false;
    };
    substitute_expression(left, param_map, ctx);
    substitute_expression(right, param_map, ctx);
    let lhs = left.value();
    let rhs = right.value();
    cond.do_branch = match cond.compare {
        Some(CompareType::Eq) => lhs == rhs,
        Some(CompareType::Lt) => lhs < rhs,
        Some(CompareType::Leq) => lhs <= rhs,
        Some(CompareType::Gt) => lhs > rhs,
        Some(CompareType::Geq) => lhs >= rhs,
        None => false,
    };
    cond.do_branch
}

/// True when no sample call, branch, or variable reference remains anywhere
/// under `node`. The tree must satisfy this after [`expand`].
pub fn is_fully_expanded(node: &AstNode) -> bool {
    if matches!(node.kind, NodeKind::SampleCall | NodeKind::Branch) {
        return false;
    }
    if node.num.as_ref().is_some_and(Expression::has_vars)
        || node.rep_count.as_ref().is_some_and(Expression::has_vars)
    {
        return false;
    }
    node.start.as_deref().is_none_or(is_fully_expanded)
        && node.finish.as_deref().is_none_or(is_fully_expanded)
        && node.children.iter().all(is_fully_expanded)
}
