//! Real-valued expression language for symbols over tau1, tau2.
//!
//! Grammar: + - * / ^ (right-assoc), unary minus, parentheses, abs, sin, cos,
//! exp, min, max, theta, vartheta, and cone(c) with a constant argument. The
//! cone built-in is the catalog single-cone symbol truncated to the grid's
//! scale range.

use crate::error::CoreError;
use crate::grid::Geometry;
use crate::operators::{cone_value, TwistedSymbol};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CoreError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, i));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| {
                CoreError::Parse(format!("bad number '{}' at byte {}", text, start))
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        return Err(CoreError::Parse(format!("unexpected character '{}' at byte {}", c, i)));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
enum Bin {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug)]
enum Fun1 {
    Abs,
    Sin,
    Cos,
    Exp,
    Theta,
    Vartheta,
}

#[derive(Clone, Copy, Debug)]
enum Fun2 {
    Min,
    Max,
}

#[derive(Clone, Debug)]
enum Expr {
    Num(f64),
    Tau1,
    Tau2,
    Neg(Box<Expr>),
    Bin(Bin, Box<Expr>, Box<Expr>),
    Fun1(Fun1, Box<Expr>),
    Fun2(Fun2, Box<Expr>, Box<Expr>),
    Cone(f64),
}

fn uses_tau(e: &Expr) -> bool {
    match e {
        Expr::Tau1 | Expr::Tau2 => true,
        Expr::Num(_) | Expr::Cone(_) => false,
        Expr::Neg(a) | Expr::Fun1(_, a) => uses_tau(a),
        Expr::Bin(_, a, b) | Expr::Fun2(_, a, b) => uses_tau(a) || uses_tau(b),
    }
}

fn eval(e: &Expr, t1: f64, t2: f64, k_range: (i32, i32)) -> f64 {
    match e {
        Expr::Num(v) => *v,
        Expr::Tau1 => t1,
        Expr::Tau2 => t2,
        Expr::Neg(a) => -eval(a, t1, t2, k_range),
        Expr::Bin(op, a, b) => {
            let x = eval(a, t1, t2, k_range);
            let y = eval(b, t1, t2, k_range);
            match op {
                Bin::Add => x + y,
                Bin::Sub => x - y,
                Bin::Mul => x * y,
                Bin::Div => x / y,
                Bin::Pow => x.powf(y),
            }
        }
        Expr::Fun1(f, a) => {
            let x = eval(a, t1, t2, k_range);
            match f {
                Fun1::Abs => x.abs(),
                Fun1::Sin => x.sin(),
                Fun1::Cos => x.cos(),
                Fun1::Exp => x.exp(),
                Fun1::Theta => crate::cutoffs::theta(x),
                Fun1::Vartheta => crate::cutoffs::vartheta(x),
            }
        }
        Expr::Fun2(f, a, b) => {
            let x = eval(a, t1, t2, k_range);
            let y = eval(b, t1, t2, k_range);
            match f {
                Fun2::Min => x.min(y),
                Fun2::Max => x.max(y),
            }
        }
        Expr::Cone(c) => cone_value(*c, k_range, t1, t2),
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), CoreError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CoreError::Parse(format!("expected {} at byte {}", what, self.here())))
        }
    }

    fn expr(&mut self) -> Result<Expr, CoreError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => Bin::Add,
                Some(Tok::Minus) => Bin::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, CoreError> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => Bin::Mul,
                Some(Tok::Slash) => Bin::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.power()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn power(&mut self) -> Result<Expr, CoreError> {
        let base = self.unary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.power()?; // right-assoc
            return Ok(Expr::Bin(Bin::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, CoreError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, CoreError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name, at),
            _ => Err(CoreError::Parse(format!("expected a value at byte {}", at))),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, CoreError> {
        match name.as_str() {
            "tau1" => return Ok(Expr::Tau1),
            "tau2" => return Ok(Expr::Tau2),
            _ => {}
        }
        let fun1 = match name.as_str() {
            "abs" => Some(Fun1::Abs),
            "sin" => Some(Fun1::Sin),
            "cos" => Some(Fun1::Cos),
            "exp" => Some(Fun1::Exp),
            "theta" => Some(Fun1::Theta),
            "vartheta" => Some(Fun1::Vartheta),
            _ => None,
        };
        if let Some(f) = fun1 {
            self.expect(Tok::LParen, "'(' after function name")?;
            let a = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(Expr::Fun1(f, Box::new(a)));
        }
        let fun2 = match name.as_str() {
            "min" => Some(Fun2::Min),
            "max" => Some(Fun2::Max),
            _ => None,
        };
        if let Some(f) = fun2 {
            self.expect(Tok::LParen, "'(' after function name")?;
            let a = self.expr()?;
            self.expect(Tok::Comma, "','")?;
            let b = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(Expr::Fun2(f, Box::new(a), Box::new(b)));
        }
        if name == "cone" {
            self.expect(Tok::LParen, "'(' after cone")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            if uses_tau(&arg) {
                return Err(CoreError::Parse(format!(
                    "cone argument at byte {} must be constant",
                    at
                )));
            }
            let c = eval(&arg, 0.0, 0.0, (0, 0));
            if !(c > 0.0) || !c.is_finite() {
                return Err(CoreError::Parse(format!(
                    "cone constant must be positive, got {} at byte {}",
                    c, at
                )));
            }
            return Ok(Expr::Cone(c));
        }
        Err(CoreError::Parse(format!("unknown identifier '{}' at byte {}", name, at)))
    }
}

/// Parse an expression into a symbol. A bare cone(c) keeps its support
/// constant and homogeneity; composite expressions are unrestricted.
pub fn parse_symbol_expression(src: &str, geo: Geometry) -> Result<TwistedSymbol, CoreError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(CoreError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let ast = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(CoreError::Parse(format!("trailing input at byte {}", p.here())));
    }
    let (support, homogeneous) = match &ast {
        Expr::Cone(c) => (Some(*c), true),
        _ => (None, false),
    };
    let k_range = geo.scale_range();
    Ok(TwistedSymbol::new(src.trim(), support, homogeneous, move |t1, t2| {
        Complex64::new(eval(&ast, t1, t2, k_range), 0.0)
    }))
}
