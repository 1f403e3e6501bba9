//! Structural rewrites: variants that change where statements belong rather
//! than how a construct executes. Each rule is applied at every site in one
//! pre-order pass over all statement lists.

use crate::lang::{complementary, BinaryOp, Body, Expr, Program, Stmt, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    /// The `k` statements after an `if` join its final arm.
    AbsorbIntoLastArm(usize),
    /// The last statement of every arm moves to just after the `if`.
    HoistLastOfArms,
    /// The statement after an else-less `if` becomes its else arm.
    NextIsElse,
    /// Consecutive plain ifs with complementary conditions become if/else.
    FuseComplementary,
    /// Ifs directly inside an arm move to just after the enclosing `if`.
    LiftNestedIfs,
    /// The second of two consecutive ifs moves into the first's then-body.
    NestConsecutive,
    /// A loop is replaced by its body.
    InlineLoopBody,
    /// The last body statement moves to just after the loop.
    HoistLastOfLoop,
    /// The `k` statements after a loop join its body.
    AbsorbIntoLoop(usize),
    /// A loop and the first loop in its body become one loop with both
    /// headers.
    FuseNestedLoops,
    /// The inner loop moves out to just after the outer loop.
    SequenceNestedLoops,
    /// Outer and inner loop exchange headers.
    SwapLoopHeaders,
    /// The outer header is dropped except for its initializers; the inner
    /// header drives the merged body.
    InnerHeaderWins,
}

enum Step {
    /// The site is done; descend into it and move on.
    Advance,
    /// The site was replaced; examine the same position again.
    Retry,
}

pub fn apply(program: &Program, rules: &[Rewrite]) -> Program {
    let mut out = program.clone();
    for rule in rules {
        rewrite_list(&mut out.statements, *rule);
    }
    out
}

fn rewrite_list(list: &mut Vec<Stmt>, rule: Rewrite) {
    let mut i = 0;
    while i < list.len() {
        match apply_at(list, i, rule) {
            Step::Retry => continue,
            Step::Advance => {
                for child in child_lists_mut(&mut list[i]) {
                    rewrite_list(child, rule);
                }
                i += 1;
            }
        }
    }
}

fn child_lists_mut(s: &mut Stmt) -> Vec<&mut Vec<Stmt>> {
    match &mut s.kind {
        StmtKind::If {
            branches,
            else_body,
        } => branches
            .iter_mut()
            .map(|b| &mut b.body.stmts)
            .chain(else_body.iter_mut().map(|b| &mut b.stmts))
            .collect(),
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::For { body, .. } => {
            vec![&mut body.stmts]
        }
        StmtKind::Block(stmts) => vec![stmts],
        _ => Vec::new(),
    }
}

/// Keeps the one-statement invariant of unbraced bodies.
fn touched(body: &mut Body) {
    if body.stmts.len() != 1 {
        body.braced = true;
    }
}

fn is_if(s: &Stmt) -> bool {
    matches!(s.kind, StmtKind::If { .. })
}

fn is_plain_if(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::If { branches, else_body: None } if branches.len() == 1)
}

fn insert_after(list: &mut Vec<Stmt>, i: usize, moved: Vec<Stmt>) {
    let tail = list.split_off(i + 1);
    list.extend(moved);
    list.extend(tail);
}

fn apply_at(list: &mut Vec<Stmt>, i: usize, rule: Rewrite) -> Step {
    match rule {
        Rewrite::AbsorbIntoLastArm(k) => {
            if is_if(&list[i]) && i + 1 < list.len() {
                let end = (i + 1 + k).min(list.len());
                let moved: Vec<Stmt> = list.drain(i + 1..end).collect();
                if let StmtKind::If {
                    branches,
                    else_body,
                } = &mut list[i].kind
                {
                    let body = match else_body {
                        Some(e) => e,
                        None => &mut branches.last_mut().expect("if has a branch").body,
                    };
                    body.stmts.extend(moved);
                    touched(body);
                }
            }
        }
        Rewrite::HoistLastOfArms => {
            let mut moved = Vec::new();
            if let StmtKind::If {
                branches,
                else_body,
            } = &mut list[i].kind
            {
                let arms = branches.iter_mut().map(|b| &mut b.body).chain(else_body.iter_mut());
                for body in arms {
                    if let Some(last) = body.stmts.pop() {
                        moved.push(last);
                        touched(body);
                    }
                }
            }
            insert_after(list, i, moved);
        }
        Rewrite::NextIsElse => {
            if matches!(list[i].kind, StmtKind::If { else_body: None, .. }) && i + 1 < list.len() {
                let next = list.remove(i + 1);
                if let StmtKind::If { else_body, .. } = &mut list[i].kind {
                    *else_body = Some(Body::braced(vec![next]));
                }
            }
        }
        Rewrite::FuseComplementary => {
            if i + 1 < list.len() && is_plain_if(&list[i]) && is_plain_if(&list[i + 1]) {
                let cond = |s: &Stmt| match &s.kind {
                    StmtKind::If { branches, .. } => branches[0].cond.clone(),
                    _ => unreachable!(),
                };
                if complementary(&cond(&list[i]), &cond(&list[i + 1])) {
                    let second = list.remove(i + 1);
                    let StmtKind::If { mut branches, .. } = second.kind else {
                        unreachable!()
                    };
                    if let StmtKind::If { else_body, .. } = &mut list[i].kind {
                        *else_body = Some(branches.remove(0).body);
                    }
                }
            }
        }
        Rewrite::LiftNestedIfs => {
            let mut moved = Vec::new();
            if let StmtKind::If {
                branches,
                else_body,
            } = &mut list[i].kind
            {
                let arms = branches.iter_mut().map(|b| &mut b.body).chain(else_body.iter_mut());
                for body in arms {
                    let (ifs, rest): (Vec<Stmt>, Vec<Stmt>) = body.stmts.drain(..).partition(is_if);
                    body.stmts = rest;
                    if !ifs.is_empty() {
                        touched(body);
                    }
                    moved.extend(ifs);
                }
            }
            insert_after(list, i, moved);
        }
        Rewrite::NestConsecutive => {
            if i + 1 < list.len() && is_if(&list[i]) && is_if(&list[i + 1]) {
                let second = list.remove(i + 1);
                if let StmtKind::If { branches, .. } = &mut list[i].kind {
                    let body = &mut branches[0].body;
                    body.stmts.push(second);
                    touched(body);
                }
            }
        }
        Rewrite::InlineLoopBody => {
            if list[i].kind.is_loop() {
                let s = list.remove(i);
                let body = loop_body(s.kind);
                let tail = list.split_off(i);
                list.extend(body.stmts);
                list.extend(tail);
                return Step::Retry;
            }
        }
        Rewrite::HoistLastOfLoop => {
            if let Some(body) = list[i].kind.loop_body_mut() {
                if let Some(last) = body.stmts.pop() {
                    touched(body);
                    insert_after(list, i, vec![last]);
                }
            }
        }
        Rewrite::AbsorbIntoLoop(k) => {
            if list[i].kind.is_loop() && i + 1 < list.len() {
                let end = (i + 1 + k).min(list.len());
                let moved: Vec<Stmt> = list.drain(i + 1..end).collect();
                let body = list[i].kind.loop_body_mut().expect("loop");
                body.stmts.extend(moved);
                touched(body);
            }
        }
        Rewrite::FuseNestedLoops
        | Rewrite::SequenceNestedLoops
        | Rewrite::SwapLoopHeaders
        | Rewrite::InnerHeaderWins => nested_loops(list, i, rule),
    }
    Step::Advance
}

/// Header of a loop, i.e. the loop with its body taken out.
enum Header {
    While(Expr),
    DoWhile(Expr),
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Stmt>,
    },
}

fn split_loop(kind: StmtKind) -> (Header, Body) {
    match kind {
        StmtKind::While { cond, body } => (Header::While(cond), body),
        StmtKind::DoWhile { body, cond } => (Header::DoWhile(cond), body),
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => (Header::For { init, cond, update }, body),
        _ => unreachable!("not a loop"),
    }
}

fn join_loop(header: Header, body: Body) -> StmtKind {
    match header {
        Header::While(cond) => StmtKind::While { cond, body },
        Header::DoWhile(cond) => StmtKind::DoWhile { body, cond },
        Header::For { init, cond, update } => StmtKind::For {
            init,
            cond,
            update,
            body,
        },
    }
}

fn loop_body(kind: StmtKind) -> Body {
    split_loop(kind).1
}

impl Header {
    fn into_parts(self) -> (Vec<Stmt>, Option<Expr>, Vec<Stmt>) {
        match self {
            Header::While(c) | Header::DoWhile(c) => (Vec::new(), Some(c), Vec::new()),
            Header::For { init, cond, update } => (init, cond, update),
        }
    }
}

fn conjoin(a: Option<Expr>, b: Option<Expr>) -> Option<Expr> {
    match (a, b) {
        (Some(a), Some(b)) => Some(Expr::binary(BinaryOp::And, a, b)),
        (a, b) => a.or(b),
    }
}

fn nested_loops(list: &mut Vec<Stmt>, i: usize, rule: Rewrite) {
    let Some(body) = list[i].kind.loop_body_mut() else { return };
    let Some(j) = body.stmts.iter().position(|s| s.kind.is_loop()) else { return };
    let outer = list.remove(i);
    let (outer_header, mut outer_body) = split_loop(outer.kind);
    let inner = outer_body.stmts.remove(j);
    let (inner_header, inner_body) = split_loop(inner.kind);
    let mut emitted = Vec::new();
    match rule {
        Rewrite::FuseNestedLoops => {
            let (mut init, c1, mut update) = outer_header.into_parts();
            let (init2, c2, update2) = inner_header.into_parts();
            init.extend(init2);
            update.extend(update2);
            splice(&mut outer_body, j, inner_body.stmts);
            emitted.push(Stmt {
                id: outer.id,
                loc: outer.loc,
                kind: StmtKind::For {
                    init,
                    cond: conjoin(c1, c2),
                    update,
                    body: outer_body,
                },
            });
        }
        Rewrite::SequenceNestedLoops => {
            touched(&mut outer_body);
            emitted.push(Stmt {
                id: outer.id,
                loc: outer.loc,
                kind: join_loop(outer_header, outer_body),
            });
            emitted.push(Stmt {
                id: inner.id,
                loc: inner.loc,
                kind: join_loop(inner_header, inner_body),
            });
        }
        Rewrite::SwapLoopHeaders => {
            let swapped_inner = Stmt {
                id: inner.id,
                loc: inner.loc,
                kind: join_loop(outer_header, inner_body),
            };
            outer_body.stmts.insert(j, swapped_inner);
            emitted.push(Stmt {
                id: outer.id,
                loc: outer.loc,
                kind: join_loop(inner_header, outer_body),
            });
        }
        Rewrite::InnerHeaderWins => {
            let (init, _, _) = outer_header.into_parts();
            emitted.extend(init);
            splice(&mut outer_body, j, inner_body.stmts);
            emitted.push(Stmt {
                id: inner.id,
                loc: inner.loc,
                kind: join_loop(inner_header, outer_body),
            });
        }
        _ => unreachable!("not a nesting rewrite"),
    }
    let tail = list.split_off(i);
    list.extend(emitted);
    list.extend(tail);
}

fn splice(body: &mut Body, at: usize, stmts: Vec<Stmt>) {
    let tail = body.stmts.split_off(at);
    body.stmts.extend(stmts);
    body.stmts.extend(tail);
    touched(body);
}
