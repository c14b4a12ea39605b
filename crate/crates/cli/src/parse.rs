//! Line-oriented manifest parser.
//!
//! One statement per line; a statement continues onto the following lines
//! while a bracket is open. `#` starts a comment.

use separator_core::scheme::Chart;
use thiserror::Error;

use crate::manifest::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{at}: {message}")]
pub struct SyntaxError {
    pub at: Pos,
    pub message: String,
}

fn err<T>(at: Pos, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError { at, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(char),
    Arrow,
    /// End of a statement: a newline outside brackets.
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out: Vec<(Tok, Pos)> = Vec::new();
    let mut open: Vec<(char, Pos)> = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let at = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                if open.is_empty() && !matches!(out.last(), None | Some((Tok::Newline, _))) {
                    out.push((Tok::Newline, at));
                }
                line += 1;
                col = 1;
                continue;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                col += s.chars().count();
                out.push((Tok::Ident(s), at));
                continue;
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                    s.push(c);
                    chars.next();
                }
                col += s.len();
                out.push((Tok::Num(s), at));
                continue;
            }
            _ => {}
        }
        chars.next();
        col += 1;
        let tok = match c {
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                col += 1;
                Tok::Arrow
            }
            '(' | '[' | '{' => {
                open.push((c, at));
                Tok::Sym(c)
            }
            ')' | ']' | '}' => {
                let want = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                match open.pop() {
                    Some((o, _)) if o == want => Tok::Sym(c),
                    Some((o, p)) => return err(at, format!("`{c}` does not match `{o}` opened at {p}")),
                    None => return err(at, format!("unmatched `{c}`")),
                }
            }
            '=' | ',' | ':' | '+' | '-' | '*' | '/' | '^' | '.' => Tok::Sym(c),
            other => return err(at, format!("unexpected character `{other}`")),
        };
        out.push((tok, at));
    }
    if let Some((c, at)) = open.pop() {
        return err(at, format!("unclosed `{c}`"));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

pub fn parse(text: &str) -> Result<Manifest, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, i: 0 };
    let mut m = Manifest::default();
    loop {
        match p.peek().clone() {
            Tok::Eof => return Ok(m),
            Tok::Newline => {
                p.i += 1;
            }
            _ => {
                let at = p.pos();
                let kw = p.ident()?;
                if kw == "query" {
                    m.queries.push(Item { at, node: p.query()? });
                } else {
                    m.decls.push(Item { at, node: p.decl(&kw, at)? });
                }
                match p.peek() {
                    Tok::Newline | Tok::Eof => {}
                    other => return err(p.pos(), format!("expected end of line, found {}", other.describe())),
                }
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if t.0 != Tok::Eof {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            err(self.pos(), format!("expected `{c}`, found {}", self.peek().describe()))
        }
    }

    fn expect_arrow(&mut self) -> Result<(), SyntaxError> {
        match self.next() {
            (Tok::Arrow, _) => Ok(()),
            (t, at) => err(at, format!("expected `->`, found {}", t.describe())),
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.next() {
            (Tok::Ident(s), _) => Ok(s),
            (t, at) => err(at, format!("expected a name, found {}", t.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        let at = self.pos();
        let got = self.ident()?;
        if got == kw {
            Ok(())
        } else {
            err(at, format!("expected `{kw}`, found `{got}`"))
        }
    }

    /// `key = ` inside an argument list.
    fn key(&mut self, kw: &str) -> Result<(), SyntaxError> {
        self.keyword(kw)?;
        self.expect('=')
    }

    fn number(&mut self) -> Result<u32, SyntaxError> {
        match self.next() {
            (Tok::Num(n), at) => n.parse().or_else(|_| err(at, format!("{n} is too large"))),
            (t, at) => err(at, format!("expected a number, found {}", t.describe())),
        }
    }

    fn decl(&mut self, kw: &str, at: Pos) -> Result<Decl, SyntaxError> {
        match kw {
            "ring" => self.ring(),
            "map" => self.map(),
            "twist" => self.twist(),
            "scheme" => self.scheme(),
            "point" => self.point(),
            "assert" => self.assertion(),
            other => err(at, format!("unknown statement `{other}`")),
        }
    }

    fn ring(&mut self) -> Result<Decl, SyntaxError> {
        let name = self.ident()?;
        self.expect('=')?;
        let at = self.pos();
        let field = match self.ident()?.as_str() {
            "QQ" => FieldSpec::Rationals,
            "GF" => {
                self.expect('(')?;
                let p = self.number()?;
                self.expect(')')?;
                FieldSpec::Prime(p)
            }
            other => return err(at, format!("unknown coefficient field `{other}`; use QQ or GF(p)")),
        };
        self.expect('[')?;
        let mut vars = Vec::new();
        if !self.eat(']') {
            loop {
                vars.push(self.ident()?);
                if self.eat(']') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let mut relations = Vec::new();
        if self.eat('/') {
            self.expect('(')?;
            relations = self.exprs(')')?;
        }
        Ok(Decl::Ring(RingDecl { name, field, vars, relations }))
    }

    /// Comma-separated expressions up to `close`, which is consumed.
    fn exprs(&mut self, close: char) -> Result<Vec<Expr>, SyntaxError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn bindings(&mut self) -> Result<Vec<Binding>, SyntaxError> {
        self.expect('{')?;
        let mut out = Vec::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            let at = self.pos();
            let var = self.ident()?;
            self.expect_arrow()?;
            out.push(Binding { var, at, value: self.expr()? });
            if self.eat('}') {
                return Ok(out);
            }
            self.expect(',')?;
            // trailing comma
            if self.eat('}') {
                return Ok(out);
            }
        }
    }

    fn map(&mut self) -> Result<Decl, SyntaxError> {
        let name = self.ident()?;
        self.expect(':')?;
        let source = self.ident()?;
        self.expect_arrow()?;
        let target = self.ident()?;
        let images = self.bindings()?;
        Ok(Decl::Map(MapDecl { name, source, target, images }))
    }

    fn twist(&mut self) -> Result<Decl, SyntaxError> {
        let name = self.ident()?;
        self.expect('=')?;
        self.keyword("double")?;
        self.expect('(')?;
        self.key("U")?;
        let chart = self.ident()?;
        self.expect(',')?;
        self.key("invert")?;
        self.expect('[')?;
        let invert = self.exprs(']')?;
        self.expect(',')?;
        self.key("tau")?;
        let tau = self.bindings()?;
        let inverse = if self.eat(',') {
            self.key("inverse")?;
            Some(self.bindings()?)
        } else {
            None
        };
        self.expect(')')?;
        Ok(Decl::Twist(TwistDecl { name, chart, invert, tau, inverse }))
    }

    fn scheme(&mut self) -> Result<Decl, SyntaxError> {
        let name = self.ident()?;
        self.expect('=')?;
        self.keyword("glue")?;
        self.expect('(')?;
        let mut fields = Vec::new();
        for (i, kw) in ["U", "V", "along", "rhoU", "rhoV"].into_iter().enumerate() {
            if i > 0 {
                self.expect(',')?;
            }
            self.key(kw)?;
            fields.push(self.ident()?);
        }
        self.expect(')')?;
        let [u, v, along, rho_u, rho_v] = <[String; 5]>::try_from(fields).expect("five fields");
        Ok(Decl::Scheme(GlueDecl { name, u, v, along, rho_u, rho_v }))
    }

    fn chart(&mut self) -> Result<Chart, SyntaxError> {
        let at = self.pos();
        match self.ident()?.as_str() {
            "U" => Ok(Chart::U),
            "V" => Ok(Chart::V),
            other => err(at, format!("expected chart `U` or `V`, found `{other}`")),
        }
    }

    fn point(&mut self) -> Result<Decl, SyntaxError> {
        let name = self.ident()?;
        self.expect('=')?;
        self.expect('(')?;
        let (scheme, chart) = if matches!(self.toks.get(self.i + 1), Some((Tok::Sym('.'), _))) {
            let s = self.ident()?;
            self.expect('.')?;
            (Some(s), self.chart()?)
        } else {
            (None, self.chart()?)
        };
        self.expect(',')?;
        self.keyword("ideal")?;
        self.expect('(')?;
        let ideal = self.exprs(')')?;
        self.expect(')')?;
        Ok(Decl::Point(PointDecl { name, scheme, chart, ideal }))
    }

    fn assertion(&mut self) -> Result<Decl, SyntaxError> {
        let at = self.pos();
        let property = match self.ident()?.as_str() {
            "integral" => Property::Integral,
            "dominant" => Property::Dominant,
            "connected" => Property::Connected,
            other => return err(at, format!("unknown property `{other}`; use integral, dominant or connected")),
        };
        Ok(Decl::Assert(AssertDecl { property, subject: self.ident()? }))
    }

    fn query(&mut self) -> Result<Query, SyntaxError> {
        let at = self.pos();
        let kw = self.ident()?;
        Ok(match kw.as_str() {
            "separated" => Query::Separated(self.ident()?),
            "separator" => Query::Separator(self.ident()?),
            "check" => {
                self.expect('-')?;
                match self.ident()?.as_str() {
                    "separated" => Query::Separated(self.ident()?),
                    "separator" => Query::Separator(self.ident()?),
                    other => return err(at, format!("unknown query `check-{other}`")),
                }
            }
            "build" => {
                self.expect('-')?;
                self.keyword("separator")?;
                Query::BuildSeparator(self.ident()?)
            }
            "flat" => Query::Flat(self.ident()?),
            "etale" => Query::Etale(self.ident()?),
            "kernel" => Query::Kernel(self.ident()?),
            "image" => Query::Image(self.ident()?),
            "apparented" => Query::Apparented(self.ident()?, self.ident()?),
            "identified" => Query::Identified(self.ident()?, self.ident()?),
            other => return err(at, format!("unknown query `{other}`")),
        })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = if self.eat('-') {
            Expr::Neg(Box::new(self.product()?))
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
            } else if *self.peek() == Tok::Sym('/') {
                let at = self.pos();
                self.i += 1;
                acc = Expr::Div(Box::new(acc), Box::new(self.power()?), at);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), self.number()?))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.next() {
            (Tok::Num(n), _) => Ok(Expr::Num(n)),
            (Tok::Ident(s), at) if s == "inv" && *self.peek() == Tok::Sym('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Inv(Box::new(e), at))
            }
            (Tok::Ident(s), at) => Ok(Expr::Var(s, at)),
            (Tok::Sym('('), _) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            (t, at) => err(at, format!("expected an expression, found {}", t.describe())),
        }
    }
}
