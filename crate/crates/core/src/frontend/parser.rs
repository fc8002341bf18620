//! Recursive-descent parser over the token stream from [`super::lexer`].
//!
//! The first error aborts the parse. Constructs outside the supported subset
//! are reported as a [`ParseError`] whose `found` names the construct.

use thiserror::Error;

use super::ast::*;
use super::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

type PResult<T> = Result<T, ParseError>;

/// Keywords and identifiers that start constructs outside the supported grammar.
const UNSUPPORTED: &[&str] = &[
    "while", "def", "defcal", "defcalgrammar", "cal", "box", "delay", "duration", "stretch",
    "angle", "uint", "bool", "complex", "let", "switch", "return", "break", "continue", "extern",
    "output", "opaque", "creg", "qreg", "gphase", "durationof", "end",
];

const STDGATES: &str = "stdgates.inc";

pub fn parse(tokens: &[Token]) -> PResult<ProgramAst> {
    Parser { tokens, pos: 0 }.program()
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    TopLevel,
    Block,
    GateBody,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn span(&self) -> Span {
        match self.peek().or_else(|| self.tokens.last()) {
            Some(t) => Span::new(t.line, t.col),
            None => Span::new(1, 1),
        }
    }

    fn error_here(&self, expected: impl Into<String>) -> ParseError {
        let span = self.span();
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        ParseError { line: span.line, col: span.col, expected: expected.into(), found }
    }

    fn unsupported(&self, tok: &Token, what: &str) -> ParseError {
        ParseError {
            line: tok.line,
            col: tok.col,
            expected: "a supported construct".into(),
            found: format!("{what} (construct not supported)"),
        }
    }

    fn check(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn check_punct(&self, p: &str) -> bool {
        self.check(TokenKind::Punctuation, p)
    }

    fn check_op(&self, op: &str) -> bool {
        self.check(TokenKind::Operator, op)
    }

    fn check_kw(&self, kw: &str) -> bool {
        self.check(TokenKind::Keyword, kw)
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        if self.check(kind, lexeme) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> PResult<&'t Token> {
        if self.check(kind, lexeme) {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("`{lexeme}`")))
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<&'t Token> {
        self.expect(TokenKind::Punctuation, p)
    }

    fn expect_ident(&mut self) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                if UNSUPPORTED.contains(&t.lexeme.as_str()) {
                    return Err(self.unsupported(t, &format!("`{}`", t.lexeme)));
                }
                Ok(self.bump())
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn expect_uint(&mut self) -> PResult<(u64, &'t Token)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::IntLiteral => {
                let v = t.lexeme.parse::<u64>().map_err(|_| self.error_here("integer that fits in 64 bits"))?;
                self.pos += 1;
                Ok((v, t))
            }
            _ => Err(self.error_here("integer literal")),
        }
    }

    fn program(&mut self) -> PResult<ProgramAst> {
        let version = self.header()?;
        let mut includes = Vec::new();
        while self.check_kw("include") {
            self.bump();
            let tok = match self.peek() {
                Some(t) if t.kind == TokenKind::StringLiteral => self.bump(),
                _ => return Err(self.error_here("include file name string")),
            };
            let name = tok.lexeme.trim_matches('"').to_string();
            if name != STDGATES {
                return Err(ParseError {
                    line: tok.line,
                    col: tok.col,
                    expected: format!("\"{STDGATES}\""),
                    found: format!("{} (only the standard gate library can be included)", tok.lexeme),
                });
            }
            self.expect_punct(";")?;
            includes.push(name);
        }
        let mut statements = Vec::new();
        while self.peek().is_some() {
            statements.push(self.statement(Context::TopLevel)?);
        }
        Ok(ProgramAst { version, includes, statements })
    }

    fn header(&mut self) -> PResult<(u32, u32)> {
        self.expect(TokenKind::Keyword, "OPENQASM")?;
        let tok = match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::IntLiteral | TokenKind::FloatLiteral) => t,
            _ => return Err(self.error_here("version number")),
        };
        let version = match tok.lexeme.as_str() {
            "3" | "3.0" => (3, 0),
            _ => return Err(self.error_here("OpenQASM version 3.0")),
        };
        self.bump();
        self.expect_punct(";")?;
        Ok(version)
    }

    fn statement(&mut self, ctx: Context) -> PResult<Statement> {
        let span = self.span();
        let Some(tok) = self.peek() else {
            return Err(self.error_here("statement"));
        };

        let is_decl = tok.kind == TokenKind::Keyword
            && matches!(tok.lexeme.as_str(), "qubit" | "bit" | "input" | "const" | "gate");
        if is_decl && ctx != Context::TopLevel {
            return Err(ParseError {
                line: tok.line,
                col: tok.col,
                expected: "statement".into(),
                found: format!("`{}` declaration (declarations are only allowed at top level)", tok.lexeme),
            });
        }
        if ctx == Context::GateBody
            && tok.kind == TokenKind::Keyword
            && matches!(tok.lexeme.as_str(), "measure" | "reset" | "if" | "for" | "barrier")
        {
            return Err(ParseError {
                line: tok.line,
                col: tok.col,
                expected: "gate call".into(),
                found: format!("`{}` (only gate calls are allowed inside a gate body)", tok.lexeme),
            });
        }

        let kind = match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Keyword, "qubit") => {
                self.bump();
                let size = self.opt_size()?;
                let name = self.expect_ident()?.lexeme.clone();
                self.expect_punct(";")?;
                StatementKind::QubitDecl { name, size }
            }
            (TokenKind::Keyword, "bit") => {
                self.bump();
                let size = self.opt_size()?;
                let name = self.expect_ident()?.lexeme.clone();
                self.expect_punct(";")?;
                StatementKind::BitDecl { name, size }
            }
            (TokenKind::Keyword, "input") => self.input_decl()?,
            (TokenKind::Keyword, "const") => self.const_decl()?,
            (TokenKind::Keyword, "gate") => self.gate_def()?,
            (TokenKind::Keyword, "reset") => {
                self.bump();
                let r = self.reg_ref()?;
                self.expect_punct(";")?;
                StatementKind::Reset(r)
            }
            (TokenKind::Keyword, "barrier") => {
                self.bump();
                let mut refs = vec![self.reg_ref()?];
                while self.eat(TokenKind::Punctuation, ",") {
                    refs.push(self.reg_ref()?);
                }
                self.expect_punct(";")?;
                StatementKind::Barrier(refs)
            }
            (TokenKind::Keyword, "measure") => {
                self.bump();
                let source = self.reg_ref()?;
                if !self.eat(TokenKind::Operator, "->") {
                    return Err(self.error_here("`->` (bare `measure` without a target is not supported)"));
                }
                let target = self.reg_ref()?;
                self.expect_punct(";")?;
                StatementKind::MeasureAssign { target, source }
            }
            (TokenKind::Keyword, "if") => self.if_stmt()?,
            (TokenKind::Keyword, "for") => self.for_stmt()?,
            (TokenKind::Keyword, "ctrl" | "negctrl" | "inv" | "pow") => {
                StatementKind::GateCall(self.gate_call()?)
            }
            (TokenKind::Identifier, _) => {
                if UNSUPPORTED.contains(&tok.lexeme.as_str()) {
                    return Err(self.unsupported(tok, &format!("`{}`", tok.lexeme)));
                }
                let next = self.peek_at(1);
                let is_assign = next.is_some_and(|t| t.is(TokenKind::Operator, "="))
                    || (next.is_some_and(|t| t.is(TokenKind::Punctuation, "["))
                        && self.assignment_after_index());
                if is_assign {
                    if ctx == Context::GateBody {
                        return Err(ParseError {
                            line: tok.line,
                            col: tok.col,
                            expected: "gate call".into(),
                            found: "measurement (only gate calls are allowed inside a gate body)".into(),
                        });
                    }
                    let target = self.reg_ref()?;
                    self.expect(TokenKind::Operator, "=")?;
                    if !self.check_kw("measure") {
                        return Err(self.error_here("`measure` (classical assignment is not supported)"));
                    }
                    self.bump();
                    let source = self.reg_ref()?;
                    self.expect_punct(";")?;
                    StatementKind::MeasureAssign { target, source }
                } else {
                    StatementKind::GateCall(self.gate_call()?)
                }
            }
            (TokenKind::Keyword, "else") => {
                return Err(self.error_here("statement (`else` without a preceding `if`)"))
            }
            _ => return Err(self.error_here("statement")),
        };
        Ok(Statement { kind, span })
    }

    /// Looks past `name[ ... ]` for an `=` to tell `c[0] = measure q[0];` from a gate call.
    fn assignment_after_index(&self) -> bool {
        let mut depth = 0usize;
        let mut i = self.pos + 1;
        while let Some(t) = self.tokens.get(i) {
            if t.is(TokenKind::Punctuation, "[") {
                depth += 1;
            } else if t.is(TokenKind::Punctuation, "]") {
                depth -= 1;
                if depth == 0 {
                    return self.tokens.get(i + 1).is_some_and(|t| t.is(TokenKind::Operator, "="));
                }
            } else if t.is(TokenKind::Punctuation, ";") {
                return false;
            }
            i += 1;
        }
        false
    }

    fn opt_size(&mut self) -> PResult<Option<u64>> {
        if self.eat(TokenKind::Punctuation, "[") {
            let (n, tok) = self.expect_uint()?;
            if n == 0 {
                return Err(ParseError {
                    line: tok.line,
                    col: tok.col,
                    expected: "positive register size".into(),
                    found: "`0`".into(),
                });
            }
            self.expect_punct("]")?;
            Ok(Some(n))
        } else {
            Ok(None)
        }
    }

    fn float_width(&mut self) -> PResult<u32> {
        self.expect(TokenKind::Keyword, "float")?;
        self.expect_punct("[")?;
        let (w, tok) = self.expect_uint()?;
        if w != 32 && w != 64 {
            let hint = if w < 32 {
                format!(
                    "`float[{w}]`; float widths are 32 or 64. For a {w}-element parameter vector write `input array[float[64], {w}] name;`"
                )
            } else {
                format!("`float[{w}]`")
            };
            return Err(ParseError {
                line: tok.line,
                col: tok.col,
                expected: "float width 32 or 64".into(),
                found: hint,
            });
        }
        self.expect_punct("]")?;
        Ok(w as u32)
    }

    fn input_decl(&mut self) -> PResult<StatementKind> {
        self.expect(TokenKind::Keyword, "input")?;
        if self.eat(TokenKind::Keyword, "array") {
            self.expect_punct("[")?;
            let width = self.float_width()?;
            self.expect_punct(",")?;
            let (count, tok) = self.expect_uint()?;
            if count == 0 {
                return Err(ParseError {
                    line: tok.line,
                    col: tok.col,
                    expected: "positive array length".into(),
                    found: "`0`".into(),
                });
            }
            self.expect_punct("]")?;
            let name = self.expect_ident()?.lexeme.clone();
            self.expect_punct(";")?;
            return Ok(StatementKind::InputDecl { name, width, count: Some(count) });
        }
        if !self.check_kw("float") {
            return match self.peek() {
                Some(t) if t.kind == TokenKind::Keyword || t.kind == TokenKind::Identifier => {
                    let t = self.bump();
                    Err(self.unsupported(t, &format!("`input {}` (only float inputs are supported)", t.lexeme)))
                }
                _ => Err(self.error_here("`float` or `array`")),
            };
        }
        let width = self.float_width()?;
        let name = self.expect_ident()?.lexeme.clone();
        self.expect_punct(";")?;
        Ok(StatementKind::InputDecl { name, width, count: None })
    }

    fn const_decl(&mut self) -> PResult<StatementKind> {
        self.expect(TokenKind::Keyword, "const")?;
        let ty = if self.eat(TokenKind::Keyword, "int") {
            ConstType::Int
        } else if self.eat(TokenKind::Keyword, "float") {
            ConstType::Float
        } else {
            return Err(self.error_here("`int` or `float`"));
        };
        // Optional width designator, e.g. `const float[64] x = ...;`.
        if self.eat(TokenKind::Punctuation, "[") {
            self.expect_uint()?;
            self.expect_punct("]")?;
        }
        let name = self.expect_ident()?.lexeme.clone();
        self.expect(TokenKind::Operator, "=")?;
        let value = self.expr()?;
        self.expect_punct(";")?;
        Ok(StatementKind::ConstDecl { name, ty, value })
    }

    fn gate_def(&mut self) -> PResult<StatementKind> {
        self.expect(TokenKind::Keyword, "gate")?;
        let name = self.expect_ident()?.lexeme.clone();
        let mut params = Vec::new();
        if self.eat(TokenKind::Punctuation, "(") {
            if !self.check_punct(")") {
                params.push(self.expect_ident()?.lexeme.clone());
                while self.eat(TokenKind::Punctuation, ",") {
                    params.push(self.expect_ident()?.lexeme.clone());
                }
            }
            self.expect_punct(")")?;
        }
        let mut qubits = vec![self.expect_ident()?.lexeme.clone()];
        while self.eat(TokenKind::Punctuation, ",") {
            qubits.push(self.expect_ident()?.lexeme.clone());
        }
        let body = self.block(Context::GateBody)?;
        Ok(StatementKind::GateDef { name, params, qubits, body })
    }

    fn block(&mut self, ctx: Context) -> PResult<Vec<Statement>> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.check_punct("}") {
            if self.peek().is_none() {
                return Err(self.error_here("`}`"));
            }
            body.push(self.statement(ctx)?);
        }
        self.bump();
        Ok(body)
    }

    /// A braced block or a single statement.
    fn body(&mut self) -> PResult<Vec<Statement>> {
        if self.check_punct("{") {
            self.block(Context::Block)
        } else {
            Ok(vec![self.statement(Context::Block)?])
        }
    }

    fn if_stmt(&mut self) -> PResult<StatementKind> {
        self.expect(TokenKind::Keyword, "if")?;
        self.expect_punct("(")?;
        let cond_span = self.span();
        let subject = self.named_ref()?;
        let condition = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator && CompareOp::from_symbol(&t.lexeme).is_some() => {
                let op = CompareOp::from_symbol(&t.lexeme).unwrap_or(CompareOp::Eq);
                self.bump();
                let rhs = self.additive()?;
                Expr::new(
                    ExprKind::Comparison { op, lhs: Box::new(subject), rhs: Box::new(rhs) },
                    cond_span,
                )
            }
            _ => subject,
        };
        if !self.check_punct(")") {
            return Err(self.error_here("`)` or comparison operator"));
        }
        self.bump();
        let then_body = self.body()?;
        let else_body = if self.eat(TokenKind::Keyword, "else") {
            if self.check_kw("if") {
                let span = self.span();
                vec![Statement { kind: self.if_stmt()?, span }]
            } else {
                self.body()?
            }
        } else {
            Vec::new()
        };
        Ok(StatementKind::If { condition, then_body, else_body })
    }

    fn for_stmt(&mut self) -> PResult<StatementKind> {
        self.expect(TokenKind::Keyword, "for")?;
        self.expect(TokenKind::Keyword, "int")?;
        let var = self.expect_ident()?.lexeme.clone();
        self.expect(TokenKind::Keyword, "in")?;
        if !self.check_punct("[") {
            return match self.peek() {
                Some(t) if t.is(TokenKind::Punctuation, "{") => {
                    Err(self.unsupported(t, "set-valued loop range"))
                }
                _ => Err(self.error_here("`[`")),
            };
        }
        self.bump();
        let start = self.expr()?;
        self.expect_punct(":")?;
        let second = self.expr()?;
        let range = if self.eat(TokenKind::Punctuation, ":") {
            let stop = self.expr()?;
            Range { start, step: Some(second), stop }
        } else {
            Range { start, step: None, stop: second }
        };
        self.expect_punct("]")?;
        let body = self.body()?;
        Ok(StatementKind::For { var, range, body })
    }

    fn gate_call(&mut self) -> PResult<GateCall> {
        let mut modifiers = Vec::new();
        loop {
            let m = if self.eat(TokenKind::Keyword, "ctrl") {
                Modifier::Ctrl
            } else if self.eat(TokenKind::Keyword, "negctrl") {
                Modifier::NegCtrl
            } else if self.eat(TokenKind::Keyword, "inv") {
                Modifier::Inv
            } else if self.eat(TokenKind::Keyword, "pow") {
                self.expect_punct("(")?;
                let e = self.expr()?;
                self.expect_punct(")")?;
                Modifier::Pow(e)
            } else {
                break;
            };
            if self.check_punct("(") {
                let t = self.peek().expect("checked");
                return Err(self.unsupported(t, "modifier argument (e.g. `ctrl(2)`)"));
            }
            self.expect(TokenKind::Operator, "@")?;
            modifiers.push(m);
        }
        let name = self.expect_ident()?.lexeme.clone();
        let mut args = Vec::new();
        if self.eat(TokenKind::Punctuation, "(") {
            if !self.check_punct(")") {
                args.push(self.expr()?);
                while self.eat(TokenKind::Punctuation, ",") {
                    args.push(self.expr()?);
                }
            }
            self.expect_punct(")")?;
        }
        let mut qubits = vec![self.reg_ref()?];
        while self.eat(TokenKind::Punctuation, ",") {
            qubits.push(self.reg_ref()?);
        }
        self.expect_punct(";")?;
        Ok(GateCall { modifiers, name, args, qubits })
    }

    fn reg_ref(&mut self) -> PResult<RegRef> {
        let span = self.span();
        let name = self.expect_ident()?.lexeme.clone();
        let index = if self.eat(TokenKind::Punctuation, "[") {
            let e = self.expr()?;
            if self.check_punct(",") || self.check_punct(":") {
                let t = self.peek().expect("checked");
                return Err(self.unsupported(t, "multi-index or slice"));
            }
            self.expect_punct("]")?;
            Some(e)
        } else {
            None
        };
        Ok(RegRef { name, index, span })
    }

    fn named_ref(&mut self) -> PResult<Expr> {
        let r = self.reg_ref()?;
        Ok(Expr::new(ExprKind::NamedRef { name: r.name, index: r.index.map(Box::new) }, r.span))
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.additive()
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.check_op("+") {
                BinaryOp::Add
            } else if self.check_op("-") {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.multiplicative()?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.check_op("*") {
                BinaryOp::Mul
            } else if self.check_op("/") {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat(TokenKind::Operator, "-") {
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        if self.eat(TokenKind::Operator, "+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let Some(tok) = self.peek() else {
            return Err(self.error_here("expression"));
        };
        match tok.kind {
            TokenKind::IntLiteral => {
                let (v, _) = self.expect_uint()?;
                Ok(Expr::new(ExprKind::IntLit(v), span))
            }
            TokenKind::FloatLiteral => {
                let v: f64 = tok.lexeme.parse().map_err(|_| self.error_here("float literal"))?;
                self.bump();
                Ok(Expr::new(ExprKind::FloatLit(v), span))
            }
            TokenKind::Punctuation if tok.lexeme == "(" => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            TokenKind::Identifier if tok.lexeme == "pi" => {
                self.bump();
                Ok(Expr::new(ExprKind::Pi, span))
            }
            TokenKind::Identifier => {
                if self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punctuation, "(")) {
                    return Err(self.unsupported(tok, &format!("function call `{}(...)`", tok.lexeme)));
                }
                self.named_ref()
            }
            _ => Err(self.error_here("expression")),
        }
    }
}
