//! Syntax tree of a manifest, and a printer whose output parses back to the
//! same tree.

use std::fmt;

use separator_core::scheme::Chart;

/// Source position, 1-based. Positions never take part in equality, so a
/// printed and re-parsed manifest compares equal to the original.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Unsigned integer literal, kept as written.
    Num(String),
    Var(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by a nonzero constant.
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32),
    /// Inverse of an element inverted on the common open of a twist.
    Inv(Box<Expr>, Pos),
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Var(..) | Expr::Inv(..) => ATOM,
            Expr::Pow(..) => POWER,
            Expr::Mul(..) | Expr::Div(..) => PRODUCT,
            Expr::Neg(_) | Expr::Add(..) | Expr::Sub(..) => SUM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v, _) => write!(f, "{v}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, PRODUCT)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, SUM)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.write_at(f, PRODUCT)
            }
            Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                a.write_at(f, PRODUCT)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { '*' } else { '/' })?;
                b.write_at(f, POWER)
            }
            Expr::Pow(a, k) => {
                a.write_at(f, ATOM)?;
                write!(f, "^{k}")
            }
            Expr::Inv(e, _) => {
                write!(f, "inv(")?;
                e.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// `var -> value` inside a map or twist body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub var: String,
    pub at: Pos,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingDecl {
    pub name: String,
    pub field: FieldSpec,
    pub vars: Vec<String>,
    pub relations: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<Binding>,
}

/// Two copies of one chart glued along an automorphism of the open where
/// `invert` is inverted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistDecl {
    pub name: String,
    pub chart: String,
    pub invert: Vec<Expr>,
    /// Generators left out are fixed.
    pub tau: Vec<Binding>,
    pub inverse: Option<Vec<Binding>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueDecl {
    pub name: String,
    pub u: String,
    pub v: String,
    pub along: String,
    pub rho_u: String,
    pub rho_v: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointDecl {
    pub name: String,
    /// Scheme the chart belongs to; the last declared scheme when absent.
    pub scheme: Option<String>,
    pub chart: Chart,
    pub ideal: Vec<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Integral,
    Dominant,
    Connected,
}

impl Property {
    pub fn keyword(self) -> &'static str {
        match self {
            Property::Integral => "integral",
            Property::Dominant => "dominant",
            Property::Connected => "connected",
        }
    }
}

/// `assert <property> <name>`, on a scheme or on a ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertDecl {
    pub property: Property,
    pub subject: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Ring(RingDecl),
    Map(MapDecl),
    Twist(TwistDecl),
    Scheme(GlueDecl),
    Point(PointDecl),
    Assert(AssertDecl),
}

impl Decl {
    /// Name introduced by the declaration.
    pub fn name(&self) -> Option<&str> {
        match self {
            Decl::Ring(r) => Some(&r.name),
            Decl::Map(m) => Some(&m.name),
            Decl::Twist(t) => Some(&t.name),
            Decl::Scheme(s) => Some(&s.name),
            Decl::Point(p) => Some(&p.name),
            Decl::Assert(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Separated(String),
    Separator(String),
    BuildSeparator(String),
    Flat(String),
    Etale(String),
    Kernel(String),
    Image(String),
    Apparented(String, String),
    Identified(String, String),
}

impl Query {
    pub fn keyword(&self) -> &'static str {
        match self {
            Query::Separated(_) => "separated",
            Query::Separator(_) => "separator",
            Query::BuildSeparator(_) => "build-separator",
            Query::Flat(_) => "flat",
            Query::Etale(_) => "etale",
            Query::Kernel(_) => "kernel",
            Query::Image(_) => "image",
            Query::Apparented(..) => "apparented",
            Query::Identified(..) => "identified",
        }
    }

    pub fn subjects(&self) -> Vec<&str> {
        match self {
            Query::Separated(s)
            | Query::Separator(s)
            | Query::BuildSeparator(s)
            | Query::Flat(s)
            | Query::Etale(s)
            | Query::Kernel(s)
            | Query::Image(s) => vec![s],
            Query::Apparented(a, b) | Query::Identified(a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.keyword(), self.subjects().join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item<T> {
    pub at: Pos,
    pub node: T,
}

/// Declarations in source order, and the queries, which run after all
/// declarations have been elaborated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub decls: Vec<Item<Decl>>,
    pub queries: Vec<Item<Query>>,
}

impl Manifest {
    pub fn is_empty(&self) -> bool {
        self.decls.is_empty() && self.queries.is_empty()
    }
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn body(bindings: &[Binding]) -> String {
    let parts: Vec<String> = bindings.iter().map(|b| format!("{} -> {}", b.var, b.value)).collect();
    format!("{{ {} }}", parts.join(", "))
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Ring(r) => {
                write!(f, "ring {} = {}[{}]", r.name, r.field, r.vars.join(", "))?;
                if !r.relations.is_empty() {
                    write!(f, " / ({})", list(&r.relations))?;
                }
                Ok(())
            }
            Decl::Map(m) => write!(f, "map {} : {} -> {} {}", m.name, m.source, m.target, body(&m.images)),
            Decl::Twist(t) => {
                write!(f, "twist {} = double(U = {}, invert = [{}], tau = {}", t.name, t.chart, list(&t.invert), body(&t.tau))?;
                if let Some(inv) = &t.inverse {
                    write!(f, ", inverse = {}", body(inv))?;
                }
                write!(f, ")")
            }
            Decl::Scheme(s) => write!(
                f,
                "scheme {} = glue(U = {}, V = {}, along = {}, rhoU = {}, rhoV = {})",
                s.name, s.u, s.v, s.along, s.rho_u, s.rho_v
            ),
            Decl::Point(p) => {
                write!(f, "point {} = (", p.name)?;
                if let Some(s) = &p.scheme {
                    write!(f, "{s}.")?;
                }
                write!(f, "{}, ideal({}))", p.chart, list(&p.ideal))
            }
            Decl::Assert(a) => write!(f, "assert {} {}", a.property.keyword(), a.subject),
        }
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{}", d.node)?;
        }
        for q in &self.queries {
            writeln!(f, "query {}", q.node)?;
        }
        Ok(())
    }
}
