//! Loop source language: parsing and the program representation.
//!
//! Grammar:
//!
//! ```text
//! program := "while true do" body "end"
//! body    := (assign ";")*
//! assign  := ident ":=" expr
//! expr    := rational | ident | expr (+|-|*|/) expr | "(" expr ")" | "-" expr
//! ```
//!
//! Branching or nesting constructs are recognized and rejected with an
//! out-of-model diagnostic rather than a generic syntax error. The loop
//! guard is fixed to `true`: invariants are computed for the
//! non-deterministic closure of the loop, so guards carry no information.

use std::fmt;

use crate::rational::Rational;
use crate::vars::{SymbolTable, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Var(VarId),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct Assignment {
    pub target: VarId,
    pub rhs: Expr,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct LoopProgram {
    /// Body statements in source order (a counter increment, when written
    /// explicitly, appears here like any other assignment).
    pub body: Vec<Assignment>,
    pub counter: VarId,
    /// Program variables other than the counter, in first-occurrence order.
    pub variables: Vec<VarId>,
    /// True when the body assigns the counter itself.
    pub explicit_increment: bool,
}

impl LoopProgram {
    pub fn assigned_vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        for a in &self.body {
            if a.target != self.counter && !out.contains(&a.target) {
                out.push(a.target.clone());
            }
        }
        out
    }

    /// Variables never assigned: symbolic loop constants.
    pub fn constants(&self) -> Vec<VarId> {
        let assigned = self.assigned_vars();
        self.variables
            .iter()
            .filter(|v| !assigned.contains(v))
            .cloned()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// Branches, nested loops and similar constructs outside the model.
    OutOfModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::OutOfModel => "out of model",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.col, tag, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(Rational),
    Assign,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn err(kind: ParseErrorKind, line: u32, col: u32, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        line,
        col,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let (l, c) = (line, col);
        let ch = chars[i];
        let mut push = |tok: Tok, len: u32| {
            out.push(Spanned { tok, line: l, col: c });
            len
        };
        let advance = match ch {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            ';' => push(Tok::Semi, 1),
            '+' => push(Tok::Plus, 1),
            '-' => push(Tok::Minus, 1),
            '*' => push(Tok::Star, 1),
            '/' => push(Tok::Slash, 1),
            '(' => push(Tok::LParen, 1),
            ')' => push(Tok::RParen, 1),
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Assign, 2)
                } else {
                    return Err(err(ParseErrorKind::Syntax, l, c, "expected ':='"));
                }
            }
            '0'..='9' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                let n: num_bigint::BigInt = text.parse().map_err(|_| {
                    err(ParseErrorKind::Syntax, l, c, "invalid integer literal")
                })?;
                push(Tok::Int(Rational::from_integer(n)), (j - start) as u32)
            }
            ch if ch.is_ascii_alphabetic() || ch == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                push(Tok::Ident(text), (j - start) as u32)
            }
            other => {
                return Err(err(
                    ParseErrorKind::Syntax,
                    l,
                    c,
                    format!("unexpected character '{}'", other),
                ))
            }
        };
        i += advance as usize;
        col += advance;
    }
    Ok(out)
}

/// Raw statement before variable resolution.
#[derive(Debug, Clone)]
struct RawAssign {
    target: String,
    rhs: RawExpr,
    line: u32,
    col: u32,
}

#[derive(Debug, Clone)]
enum RawExpr {
    Const(Rational),
    Var(String),
    Neg(Box<RawExpr>),
    Bin(char, Box<RawExpr>, Box<RawExpr>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const BRANCH_KEYWORDS: [&str; 8] = ["if", "then", "else", "elif", "for", "repeat", "switch", "case"];

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        self.peek()
            .map(|t| (t.line, t.col))
            .or_else(|| self.toks.last().map(|t| (t.line, t.col)))
            .unwrap_or((1, 1))
    }

    fn expect_ident(&mut self, word: &str) -> Result<(), ParseError> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Ident(w), .. }) if w == word => Ok(()),
            _ => Err(err(
                ParseErrorKind::Syntax,
                l,
                c,
                format!("expected '{}'", word),
            )),
        }
    }

    fn parse_program(&mut self) -> Result<Vec<RawAssign>, ParseError> {
        self.expect_ident("while")?;
        self.expect_ident("true")?;
        self.expect_ident("do")?;
        let mut body = Vec::new();
        loop {
            let (l, c) = self.here();
            match self.peek() {
                Some(Spanned { tok: Tok::Ident(w), .. }) if w == "end" => {
                    self.next();
                    break;
                }
                Some(Spanned { tok: Tok::Ident(w), .. }) if BRANCH_KEYWORDS.contains(&w.as_str()) => {
                    return Err(err(
                        ParseErrorKind::OutOfModel,
                        l,
                        c,
                        format!(
                            "'{}' is outside the model: only single-path loop bodies are supported",
                            w
                        ),
                    ));
                }
                Some(Spanned { tok: Tok::Ident(w), .. }) if w == "while" => {
                    return Err(err(
                        ParseErrorKind::OutOfModel,
                        l,
                        c,
                        "nested loops are outside the model",
                    ));
                }
                Some(Spanned { tok: Tok::Ident(_), .. }) => {
                    body.push(self.parse_assign()?);
                }
                Some(_) => {
                    return Err(err(ParseErrorKind::Syntax, l, c, "expected an assignment"));
                }
                None => {
                    return Err(err(ParseErrorKind::Syntax, l, c, "missing 'end'"));
                }
            }
        }
        if let Some(t) = self.peek() {
            return Err(err(
                ParseErrorKind::Syntax,
                t.line,
                t.col,
                "trailing input after 'end'",
            ));
        }
        Ok(body)
    }

    fn parse_assign(&mut self) -> Result<RawAssign, ParseError> {
        let (l, c) = self.here();
        let Some(Spanned { tok: Tok::Ident(name), .. }) = self.next() else {
            return Err(err(ParseErrorKind::Syntax, l, c, "expected an identifier"));
        };
        let (al, ac) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Assign, .. }) => {}
            _ => return Err(err(ParseErrorKind::Syntax, al, ac, "expected ':='")),
        }
        let rhs = self.parse_sum()?;
        let (sl, sc) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Semi, .. }) => {}
            _ => return Err(err(ParseErrorKind::Syntax, sl, sc, "expected ';'")),
        }
        Ok(RawAssign {
            target: name,
            rhs,
            line: l,
            col: c,
        })
    }

    fn parse_sum(&mut self) -> Result<RawExpr, ParseError> {
        let mut acc = self.parse_product()?;
        while let Some(t) = self.peek() {
            let op = match t.tok {
                Tok::Plus => '+',
                Tok::Minus => '-',
                _ => break,
            };
            self.next();
            let rhs = self.parse_product()?;
            acc = RawExpr::Bin(op, Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<RawExpr, ParseError> {
        let mut acc = self.parse_unary()?;
        while let Some(t) = self.peek() {
            let op = match t.tok {
                Tok::Star => '*',
                Tok::Slash => '/',
                _ => break,
            };
            self.next();
            let rhs = self.parse_unary()?;
            acc = RawExpr::Bin(op, Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<RawExpr, ParseError> {
        if matches!(self.peek(), Some(Spanned { tok: Tok::Minus, .. })) {
            self.next();
            let inner = self.parse_unary()?;
            return Ok(RawExpr::Neg(Box::new(inner)));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<RawExpr, ParseError> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Int(n), .. }) => Ok(RawExpr::Const(n)),
            Some(Spanned { tok: Tok::Ident(w), .. }) => {
                if BRANCH_KEYWORDS.contains(&w.as_str())
                    || w == "while"
                    || w == "do"
                    || w == "end"
                    || w == "true"
                {
                    Err(err(
                        ParseErrorKind::Syntax,
                        l,
                        c,
                        format!("keyword '{}' cannot be used as a variable", w),
                    ))
                } else {
                    Ok(RawExpr::Var(w))
                }
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.parse_sum()?;
                let (rl, rc) = self.here();
                match self.next() {
                    Some(Spanned { tok: Tok::RParen, .. }) => Ok(inner),
                    _ => Err(err(ParseErrorKind::Syntax, rl, rc, "expected ')'")),
                }
            }
            _ => Err(err(ParseErrorKind::Syntax, l, c, "expected an expression")),
        }
    }
}

/// Parse loop source into a resolved program. Fresh variables are allocated
/// in the given table; the counter is identified by name (and allocated even
/// when the body never mentions it).
pub fn parse_loop(
    src: &str,
    counter_name: &str,
    table: &mut SymbolTable,
) -> Result<LoopProgram, ParseError> {
    let toks = tokenize(src)?;
    let mut parser = Parser { toks, pos: 0 };
    let raw = parser.parse_program()?;

    let counter = table.fresh(VarKind::LoopCounter, counter_name);
    let mut variables: Vec<VarId> = Vec::new();
    // assignment targets rank before read-only constants in the ring order
    for ra in &raw {
        if ra.target != counter_name && !variables.iter().any(|v| v.name() == ra.target) {
            variables.push(table.fresh(VarKind::ProgramVar, &ra.target));
        }
    }
    let resolve = |name: &str, table: &mut SymbolTable, variables: &mut Vec<VarId>| -> VarId {
        if name == counter_name {
            return counter.clone();
        }
        if let Some(v) = variables.iter().find(|v| v.name() == name) {
            return v.clone();
        }
        let v = table.fresh(VarKind::ProgramVar, name);
        variables.push(v.clone());
        v
    };

    fn resolve_expr(
        e: &RawExpr,
        f: &mut dyn FnMut(&str) -> VarId,
    ) -> Expr {
        match e {
            RawExpr::Const(c) => Expr::Const(c.clone()),
            RawExpr::Var(name) => Expr::Var(f(name)),
            RawExpr::Neg(inner) => Expr::Neg(Box::new(resolve_expr(inner, f))),
            RawExpr::Bin(op, a, b) => {
                let a = Box::new(resolve_expr(a, f));
                let b = Box::new(resolve_expr(b, f));
                match op {
                    '+' => Expr::Add(a, b),
                    '-' => Expr::Sub(a, b),
                    '*' => Expr::Mul(a, b),
                    _ => Expr::Div(a, b),
                }
            }
        }
    }

    let mut body = Vec::new();
    let mut explicit_increment = false;
    for ra in &raw {
        let target = resolve(&ra.target, table, &mut variables);
        if target == counter {
            explicit_increment = true;
        }
        let mut closure = |n: &str| resolve(n, table, &mut variables);
        let rhs = resolve_expr(&ra.rhs, &mut closure);
        body.push(Assignment {
            target,
            rhs,
            line: ra.line,
            col: ra.col,
        });
    }
    Ok(LoopProgram {
        body,
        counter,
        variables,
        explicit_increment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parse_euclid_body() {
        let mut t = SymbolTable::new();
        let p = parse_loop(
            "while true do rem := rem - y; quo := quo + 1; end",
            "n",
            &mut t,
        )
        .unwrap();
        assert_eq!(p.body.len(), 2);
        assert_eq!(p.variables.len(), 3); // rem, y, quo
        assert_eq!(p.constants().iter().map(|v| v.name().to_string()).collect::<Vec<_>>(), vec!["y"]);
        assert!(!p.explicit_increment);
    }

    #[test]
    fn parse_empty_body() {
        let mut t = SymbolTable::new();
        let p = parse_loop("while true do end", "n", &mut t).unwrap();
        assert!(p.body.is_empty());
        assert!(p.variables.is_empty());
    }

    #[test]
    fn parse_temporaries_as_ordinary_variables() {
        let mut t = SymbolTable::new();
        let src = "while true do t1 := t2; t2 := a; \
                   a := 5*(n+2)*t2 + 6*(n*n + 3*n + 2)*t1; b := 2*b; \
                   c := 3*(n+2)*c; d := (n+2)*d; n := n + 1; end";
        let p = parse_loop(src, "n", &mut t).unwrap();
        assert_eq!(p.body.len(), 7);
        assert!(p.explicit_increment);
        let names: Vec<_> = p.variables.iter().map(|v| v.name().to_string()).collect();
        assert_eq!(names, vec!["t1", "t2", "a", "b", "c", "d"]);
    }

    #[test]
    fn branch_is_out_of_model() {
        let mut t = SymbolTable::new();
        let e = parse_loop(
            "while true do if x then y := 1; end",
            "n",
            &mut t,
        )
        .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::OutOfModel);
        let e = parse_loop(
            "while true do while true do x := 1; end end",
            "n",
            &mut t,
        )
        .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::OutOfModel);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let mut t = SymbolTable::new();
        let e = parse_loop("while true do x := ; end", "n", &mut t).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.line, 1);
        assert!(e.col > 1);
    }

    #[test]
    fn rational_constants_via_division() {
        let mut t = SymbolTable::new();
        let p = parse_loop("while true do a := 3/2 * a; end", "n", &mut t).unwrap();
        match &p.body[0].rhs {
            Expr::Mul(lhs, _) => match lhs.as_ref() {
                Expr::Div(a, b) => {
                    assert_eq!(**a, Expr::Const(rat(3)));
                    assert_eq!(**b, Expr::Const(rat(2)));
                }
                other => panic!("expected division, got {:?}", other),
            },
            other => panic!("unexpected shape {:?}", other),
        }
    }
}
