//! Tiny arithmetic expression language used for custom weights, sampled
//! functions, and kernels in scenario files.
//!
//! Grammar (no implicit multiplication):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?          // right-associative
//! atom   := number | name | name "(" args ")" | "(" expr ")"
//! ```
//!
//! Precedence is `^` > unary minus > `*` `/` > `+` `-`, so `-x^2` is `-(x^2)`.
//! Both ASCII `-` and U+2212 minus are accepted. Errors carry byte offsets.

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Min,
    Max,
    Tanh,
    Sin,
    Cos,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "tanh" => Func::Tanh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Tanh => "tanh",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Pow => "pow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    /// Index into the declared-variable list.
    Var(usize),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Vec<Ast>),
}

/// A parsed expression over a fixed set of declared variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    ast: Ast,
    vars: Vec<String>,
    source: String,
}

// ---------------------------------------------------------------- lexer --

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some((off, tok)) = lx.next_token()? {
            out.push((off, tok));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let rest = &self.src[start..];
        let c = rest.chars().next().unwrap();
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            self.pos += c.len_utf8();
            return Ok(Some((start, tok)));
        }
        if c.is_ascii_digit() {
            let mut end = start;
            let mut seen_dot = false;
            let mut seen_exp = false;
            while end < bytes.len() {
                let b = bytes[end] as char;
                if b.is_ascii_digit() {
                    end += 1;
                } else if b == '.' && !seen_dot && !seen_exp {
                    seen_dot = true;
                    end += 1;
                } else if (b == 'e' || b == 'E')
                    && !seen_exp
                    && end + 1 < bytes.len()
                    && ((bytes[end + 1] as char).is_ascii_digit()
                        || ((bytes[end + 1] == b'+' || bytes[end + 1] == b'-')
                            && end + 2 < bytes.len()
                            && (bytes[end + 2] as char).is_ascii_digit()))
                {
                    seen_exp = true;
                    end += if bytes[end + 1] == b'+' || bytes[end + 1] == b'-' { 2 } else { 1 };
                } else {
                    break;
                }
            }
            let text = &self.src[start..end];
            let val: f64 = text.parse().map_err(|_| Error::Parse {
                offset: start,
                msg: format!("invalid number literal `{text}`"),
            })?;
            if !val.is_finite() {
                return Err(Error::Parse {
                    offset: start,
                    msg: format!("number literal `{text}` out of range"),
                });
            }
            self.pos = end;
            return Ok(Some((start, Tok::Num(val))));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while end < bytes.len() {
                let b = bytes[end] as char;
                if b.is_ascii_alphanumeric() || b == '_' {
                    end += 1;
                } else {
                    break;
                }
            }
            let name = self.src[start..end].to_string();
            self.pos = end;
            return Ok(Some((start, Tok::Name(name))));
        }
        Err(Error::Parse {
            offset: start,
            msg: format!("unexpected character `{c}`"),
        })
    }
}

// --------------------------------------------------------------- parser --

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    vars: Vec<String>,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map(|(o, _)| *o).unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let off = self.offset();
        match self.bump() {
            Some((_, t)) if t == want => Ok(()),
            _ => Err(Error::Parse {
                offset: off,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Ast> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exp = self.factor()?;
            return Ok(Ast::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let off = self.offset();
        match self.bump() {
            Some((_, Tok::Num(v))) => Ok(Ast::Num(v)),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(inner)
            }
            Some((_, Tok::Name(name))) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    let func = Func::lookup(&name).ok_or_else(|| Error::Parse {
                        offset: off,
                        msg: format!("unknown function `{name}`"),
                    })?;
                    self.bump(); // (
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "closing `)`")?;
                    if args.len() != func.arity() {
                        return Err(Error::Parse {
                            offset: off,
                            msg: format!(
                                "`{}` takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    return Ok(Ast::Call(func, args));
                }
                match name.as_str() {
                    "pi" => Ok(Ast::Num(std::f64::consts::PI)),
                    "e" => Ok(Ast::Num(std::f64::consts::E)),
                    _ => {
                        if let Some(idx) = self.vars.iter().position(|v| v == &name) {
                            Ok(Ast::Var(idx))
                        } else {
                            Err(Error::Parse {
                                offset: off,
                                msg: format!("unknown variable `{name}`"),
                            })
                        }
                    }
                }
            }
            Some((o, t)) => Err(Error::Parse {
                offset: o,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(Error::Parse {
                offset: off,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

impl Expr {
    /// Parses `source` over the declared variable names.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr> {
        let toks = Lexer::tokens(source)?;
        let mut p = Parser {
            toks,
            at: 0,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            src_len: source.len(),
        };
        let ast = p.expr()?;
        if p.at != p.toks.len() {
            return Err(Error::Parse {
                offset: p.offset(),
                msg: "trailing input after expression".into(),
            });
        }
        Ok(Expr {
            ast,
            vars: p.vars,
            source: source.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Evaluates with `vals` aligned to the declared variable list.
    pub fn eval(&self, vals: &[f64]) -> Result<f64> {
        if vals.len() != self.vars.len() {
            return Err(Error::input(format!(
                "expected {} binding(s) for {:?}, got {}",
                self.vars.len(),
                self.vars,
                vals.len()
            )));
        }
        eval_node(&self.ast, vals, &self.vars)
    }

    /// Canonical text form; `parse(print(e))` recovers the same tree.
    pub fn print(&self) -> String {
        print_prec(&self.ast, 0, &self.vars)
    }

    #[cfg(test)]
    pub(crate) fn ast(&self) -> &Ast {
        &self.ast
    }
}

fn eval_err(node: &Ast, vars: &[String], msg: &str) -> Error {
    Error::Eval {
        subtree: print_prec(node, 0, vars),
        msg: msg.to_string(),
    }
}

fn eval_node(node: &Ast, vals: &[f64], vars: &[String]) -> Result<f64> {
    let v = match node {
        Ast::Num(v) => *v,
        Ast::Var(i) => vals[*i],
        Ast::Neg(inner) => -eval_node(inner, vals, vars)?,
        Ast::Bin(op, a, b) => {
            let x = eval_node(a, vals, vars)?;
            let y = eval_node(b, vals, vars)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(eval_err(node, vars, "division by zero"));
                    }
                    x / y
                }
                BinOp::Pow => x.powf(y),
            }
        }
        Ast::Call(f, args) => {
            let x = eval_node(&args[0], vals, vars)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(eval_err(node, vars, "ln of nonpositive value"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(eval_err(node, vars, "sqrt of negative value"));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
                Func::Tanh => x.tanh(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Min => x.min(eval_node(&args[1], vals, vars)?),
                Func::Max => x.max(eval_node(&args[1], vals, vars)?),
                Func::Pow => x.powf(eval_node(&args[1], vals, vars)?),
            }
        }
    };
    if !v.is_finite() {
        return Err(eval_err(node, vars, "non-finite result"));
    }
    Ok(v)
}

// Precedence levels used by both the parser shape and the printer:
// 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
fn print_prec(node: &Ast, min_prec: u8, vars: &[String]) -> String {
    let (text, prec) = match node {
        Ast::Num(v) => (format!("{v}"), 5),
        Ast::Var(i) => (vars[*i].clone(), 5),
        Ast::Neg(inner) => (format!("-{}", print_prec(inner, 3, vars)), 3),
        Ast::Bin(op, a, b) => match op {
            BinOp::Add => (
                format!("{}+{}", print_prec(a, 1, vars), print_prec(b, 2, vars)),
                1,
            ),
            BinOp::Sub => (
                format!("{}-{}", print_prec(a, 1, vars), print_prec(b, 2, vars)),
                1,
            ),
            BinOp::Mul => (
                format!("{}*{}", print_prec(a, 2, vars), print_prec(b, 3, vars)),
                2,
            ),
            BinOp::Div => (
                format!("{}/{}", print_prec(a, 2, vars), print_prec(b, 3, vars)),
                2,
            ),
            // `^` binds tighter than unary minus, so a `Neg` base needs parens;
            // the exponent re-enters at factor level (allows `x^-2`).
            BinOp::Pow => (
                format!("{}^{}", print_prec(a, 5, vars), print_prec(b, 3, vars)),
                4,
            ),
        },
        Ast::Call(f, args) => {
            let inner: Vec<String> = args.iter().map(|a| print_prec(a, 0, vars)).collect();
            (format!("{}({})", f.name(), inner.join(",")), 5)
        }
    };
    if prec < min_prec {
        format!("({text})")
    } else {
        text
    }
}
