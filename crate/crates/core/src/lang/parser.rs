use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

/// Parses a complete minilang source file.
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        next_id: 0,
    };
    let mut statements = Vec::new();
    while !p.at_end() {
        statements.push(p.stmt()?);
    }
    Ok(Program {
        statements,
        next_id: p.next_id,
    })
}

/// Parses a single expression, e.g. for tools that accept a condition.
pub fn parse_expr(source: &str) -> Result<Expr, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        next_id: 0,
    };
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + n).map(|t| &t.tok)
    }

    fn loc(&self) -> SourceLoc {
        match self.tokens.get(self.pos) {
            Some(t) => t.loc,
            None => self.tokens.last().map_or(SourceLoc { line: 1, col: 1 }, |t| {
                SourceLoc {
                    line: t.loc.line,
                    col: t.loc.col + 1,
                }
            }),
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => SyntaxError::new(self.loc(), format!("expected {wanted}, found {t}")),
            None => SyntaxError::new(self.loc(), format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let loc = self.loc();
        let id = self.fresh_id();
        let kind = match self.peek() {
            Some(Tok::If) => self.if_stmt()?,
            Some(Tok::While) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.body()?;
                StmtKind::While { cond, body }
            }
            Some(Tok::Do) => {
                self.pos += 1;
                let body = self.body()?;
                self.expect(Tok::While)?;
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                StmtKind::DoWhile { body, cond }
            }
            Some(Tok::For) => self.for_stmt()?,
            Some(Tok::Break) => {
                self.pos += 1;
                self.expect(Tok::Semi)?;
                StmtKind::Break
            }
            Some(Tok::Continue) => {
                self.pos += 1;
                self.expect(Tok::Semi)?;
                StmtKind::Continue
            }
            Some(Tok::LBrace) => StmtKind::Block(self.block()?),
            Some(Tok::Print) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let mut args = vec![self.print_arg()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.print_arg()?);
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                StmtKind::Print(args)
            }
            _ => {
                let kind = self.simple_kind()?;
                self.expect(Tok::Semi)?;
                kind
            }
        };
        Ok(Stmt { id, loc, kind })
    }

    fn print_arg(&mut self) -> Result<PrintArg, SyntaxError> {
        if let Some(Tok::Str(s)) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            return Ok(PrintArg::Str(s));
        }
        Ok(PrintArg::Expr(self.expr()?))
    }

    /// assign | incdec, without the terminating `;`.
    fn simple_kind(&mut self) -> Result<StmtKind, SyntaxError> {
        match self.peek() {
            Some(Tok::PlusPlus) | Some(Tok::MinusMinus) => {
                let inc = self.peek() == Some(&Tok::PlusPlus);
                self.pos += 1;
                let target = self.ident()?;
                Ok(StmtKind::IncDec {
                    target,
                    form: if inc { IncDecForm::PreInc } else { IncDecForm::PreDec },
                })
            }
            Some(Tok::Ident(_)) => {
                let target = self.ident()?;
                let op = match self.peek() {
                    Some(Tok::PlusPlus) => {
                        self.pos += 1;
                        return Ok(StmtKind::IncDec {
                            target,
                            form: IncDecForm::PostInc,
                        });
                    }
                    Some(Tok::MinusMinus) => {
                        self.pos += 1;
                        return Ok(StmtKind::IncDec {
                            target,
                            form: IncDecForm::PostDec,
                        });
                    }
                    Some(Tok::Assign) => AssignOp::Set,
                    Some(Tok::PlusEq) => AssignOp::Add,
                    Some(Tok::MinusEq) => AssignOp::Sub,
                    Some(Tok::StarEq) => AssignOp::Mul,
                    _ => return Err(self.unexpected("assignment operator or `++`/`--`")),
                };
                self.pos += 1;
                let value = self.expr()?;
                Ok(StmtKind::Assign { target, op, value })
            }
            _ => Err(self.unexpected("statement")),
        }
    }

    fn simple_list(&mut self, terminator: &Tok) -> Result<Vec<Stmt>, SyntaxError> {
        let mut list = Vec::new();
        if self.peek() == Some(terminator) {
            return Ok(list);
        }
        loop {
            let loc = self.loc();
            let id = self.fresh_id();
            let kind = self.simple_kind()?;
            list.push(Stmt { id, loc, kind });
            if !self.eat(&Tok::Comma) {
                return Ok(list);
            }
        }
    }

    fn for_stmt(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect(Tok::For)?;
        self.expect(Tok::LParen)?;
        let init = self.simple_list(&Tok::Semi)?;
        self.expect(Tok::Semi)?;
        let cond = if self.peek() == Some(&Tok::Semi) {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect(Tok::Semi)?;
        let update = self.simple_list(&Tok::RParen)?;
        self.expect(Tok::RParen)?;
        let body = self.body()?;
        Ok(StmtKind::For {
            init,
            cond,
            update,
            body,
        })
    }

    fn if_stmt(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect(Tok::If)?;
        let mut branches = vec![self.branch()?];
        let mut else_body = None;
        while self.peek() == Some(&Tok::Else) {
            if self.peek_at(1) == Some(&Tok::If) {
                self.pos += 2;
                branches.push(self.branch()?);
            } else {
                self.pos += 1;
                else_body = Some(self.body()?);
                break;
            }
        }
        Ok(StmtKind::If {
            branches,
            else_body,
        })
    }

    fn branch(&mut self) -> Result<Branch, SyntaxError> {
        self.expect(Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(Tok::RParen)?;
        let body = self.body()?;
        Ok(Branch { cond, body })
    }

    fn body(&mut self) -> Result<Body, SyntaxError> {
        if self.peek() == Some(&Tok::LBrace) {
            Ok(Body::braced(self.block()?))
        } else {
            Ok(Body::single(self.stmt()?))
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            if self.at_end() {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.pos += 1;
        Ok(stmts)
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.binary(1)
    }

    fn binary_op(tok: &Tok) -> Option<BinaryOp> {
        Some(match tok {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::EqEq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing; every binary operator is left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().and_then(Self::binary_op) {
            if op.precedence() < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let e = match self.peek() {
            Some(Tok::Int(v)) => Expr::Int(*v),
            Some(Tok::True) => Expr::Bool(true),
            Some(Tok::False) => Expr::Bool(false),
            Some(Tok::Ident(n)) => Expr::Var(n.clone()),
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            _ => return Err(self.unexpected("expression")),
        };
        self.pos += 1;
        Ok(e)
    }
}
