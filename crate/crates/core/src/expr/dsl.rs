//! S-expression syntax.
//!
//! ```text
//! EXPR   := RATIONAL | SYMBOL | "(" OP EXPR+ ")"
//! OP     := "+" | "*" | "pow" | "d" | extern name
//! SYMBOL := field name | x<k> | A<k> | eps | lam
//! ```
//!
//! `(d q 0)` is the first jet derivative of field `q` along `x0`,
//! `(d q 0 1)` the second. `(F x0)` applies extern `F`. `(d A1 0)` is
//! `d_0 A_1`. Rationals are written `p/q` or as integers.

use std::fmt::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Expr, FieldSystem, MultiIndex, Symbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push((start, Tok::Atom(&text[start..i])));
            }
        }
    }
    out
}

struct Parser<'a, 's> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
    sys: &'s FieldSystem,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p).ok()?;
    let q = BigInt::from_str(q).ok()?;
    if q.is_zero() || s.starts_with('+') || q.sign() == num_bigint::Sign::Minus {
        return None;
    }
    Some(BigRational::new(p, q))
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.starts_with(|c: char| c.is_ascii_digit())
}

fn indexed(s: &str, prefix: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl<'a, 's> Parser<'a, 's> {
    fn peek(&self) -> Option<&(usize, Tok<'a>)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<(usize, Tok<'a>)> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(self.end, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn check_index(&self, index: usize) -> Result<usize> {
        if index >= self.sys.dim() {
            Err(Error::IndexOutOfRange {
                index,
                dim: self.sys.dim(),
            })
        } else {
            Ok(index)
        }
    }

    fn index_atom(&mut self) -> Result<usize> {
        match self.next()? {
            (p, Tok::Atom(a)) => {
                let i: usize = a
                    .parse()
                    .map_err(|_| syntax(p, format!("expected index, found `{a}`")))?;
                self.check_index(i)
            }
            (p, _) => Err(syntax(p, "expected index")),
        }
    }

    fn symbol(&self, pos: usize, a: &str) -> Result<Expr> {
        if let Some(alpha) = self.sys.field_index(a) {
            return Ok(Expr::field(alpha));
        }
        if let Some(mu) = indexed(a, "x") {
            return Ok(Expr::coord(self.check_index(mu)?));
        }
        if let Some(mu) = indexed(a, "A") {
            return Ok(Expr::gauge(self.check_index(mu)?));
        }
        match a {
            "eps" => Ok(Expr::eps()),
            "lam" => Ok(Expr::lambda()),
            _ if self.sys.extern_decl(a).is_some() => Err(syntax(
                pos,
                format!("extern `{a}` must be applied to a coordinate, e.g. ({a} x0)"),
            )),
            _ => Err(Error::UnknownSymbol(a.to_string())),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            (_, Tok::Close) => Ok(()),
            (p, _) => Err(syntax(p, "expected `)`")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.next()? {
            (p, Tok::Atom(a)) if looks_numeric(a) => parse_rational(a)
                .map(Expr::Num)
                .ok_or_else(|| syntax(p, format!("malformed rational `{a}`"))),
            (p, Tok::Atom(a)) => self.symbol(p, a),
            (p, Tok::Close) => Err(syntax(p, "unexpected `)`")),
            (p, Tok::Open) => {
                let (hp, head) = match self.next()? {
                    (hp, Tok::Atom(h)) => (hp, h),
                    (hp, _) => return Err(syntax(hp, "expected operator")),
                };
                let e = match head {
                    "+" | "*" => {
                        let mut args = Vec::new();
                        while !matches!(self.peek(), Some((_, Tok::Close)) | None) {
                            args.push(self.expr()?);
                        }
                        if args.is_empty() {
                            return Err(syntax(p, format!("`{head}` needs at least one argument")));
                        }
                        if head == "+" {
                            Expr::Add(args)
                        } else {
                            Expr::Mul(args)
                        }
                    }
                    "pow" => {
                        let base = self.expr()?;
                        let e = match self.next()? {
                            (ep, Tok::Atom(a)) => a.parse::<u32>().map_err(|_| {
                                syntax(ep, "exponent must be a non-negative integer")
                            })?,
                            (ep, _) => return Err(syntax(ep, "expected exponent")),
                        };
                        base.pow(e)
                    }
                    "d" => {
                        let (np, name) = match self.next()? {
                            (np, Tok::Atom(n)) => (np, n),
                            (np, _) => return Err(syntax(np, "expected symbol name after `d`")),
                        };
                        let mut idx = vec![self.index_atom()?];
                        while matches!(self.peek(), Some((_, Tok::Atom(_)))) {
                            idx.push(self.index_atom()?);
                        }
                        let derivs = MultiIndex::new(idx);
                        let sym = if let Some(field) = self.sys.field_index(name) {
                            Symbol::Jet { field, derivs }
                        } else if let Some(comp) = indexed(name, "A") {
                            Symbol::Gauge {
                                comp: self.check_index(comp)?,
                                derivs,
                            }
                        } else if name == "eps" {
                            Symbol::Eps { derivs }
                        } else {
                            return Err(syntax(np, format!("`{name}` cannot be differentiated")));
                        };
                        Expr::Sym(sym)
                    }
                    name => {
                        let decl = self
                            .sys
                            .extern_decl(name)
                            .ok_or_else(|| Error::UndeclaredExtern(name.to_string()))?;
                        let arg = match self.next()? {
                            (ap, Tok::Atom(a)) => match indexed(a, "x") {
                                Some(mu) => self.check_index(mu)?,
                                None => {
                                    return Err(Error::Unsupported(format!(
                                        "extern `{name}` applied to `{a}` at byte {ap}; externs take one base coordinate"
                                    )))
                                }
                            },
                            _ => {
                                return Err(Error::Unsupported(format!(
                                    "extern `{name}` applied to a compound argument at byte {hp}"
                                )))
                            }
                        };
                        if arg != decl.arg {
                            return Err(syntax(hp, format!("extern `{name}` takes x{}", decl.arg)));
                        }
                        Expr::apply(name, arg)
                    }
                };
                self.close()?;
                Ok(e)
            }
        }
    }
}

/// Parses DSL text against a field system.
pub fn parse(text: &str, sys: &FieldSystem) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
        end: text.len(),
        sys,
    };
    let e = p.expr()?;
    if let Some((pos, _)) = p.peek() {
        return Err(syntax(*pos, "trailing input"));
    }
    Ok(e)
}

fn print_symbol(out: &mut String, s: &Symbol, sys: &FieldSystem) {
    let with_derivs = |out: &mut String, base: &str, d: &MultiIndex| {
        if d.order() == 0 {
            out.push_str(base);
        } else {
            out.push_str("(d ");
            out.push_str(base);
            for i in d.indices() {
                let _ = write!(out, " {i}");
            }
            out.push(')');
        }
    };
    match s {
        Symbol::Jet { field, derivs } => {
            let name = sys
                .field_names()
                .get(*field)
                .cloned()
                .unwrap_or_else(|| format!("phi{field}"));
            with_derivs(out, &name, derivs)
        }
        Symbol::Gauge { comp, derivs } => with_derivs(out, &format!("A{comp}"), derivs),
        Symbol::Eps { derivs } => with_derivs(out, "eps", derivs),
        other => {
            let _ = write!(out, "{other}");
        }
    }
}

fn print_into(out: &mut String, e: &Expr, sys: &FieldSystem) {
    let list = |out: &mut String, head: &str, xs: &[Expr]| {
        out.push('(');
        out.push_str(head);
        for x in xs {
            out.push(' ');
            print_into(out, x, sys);
        }
        out.push(')');
    };
    match e {
        Expr::Num(c) => {
            let _ = write!(out, "{c}");
        }
        Expr::Sym(s) => print_symbol(out, s, sys),
        Expr::Apply(name, arg) => {
            let _ = write!(out, "({name} ");
            print_into(out, arg, sys);
            out.push(')');
        }
        Expr::Add(xs) => list(out, "+", xs),
        Expr::Mul(xs) => list(out, "*", xs),
        Expr::Pow(b, k) => {
            out.push_str("(pow ");
            print_into(out, b, sys);
            let _ = write!(out, " {k})");
        }
    }
}

/// Prints a tree in DSL syntax. Inverse of [`parse`] on trees the parser produces.
pub fn print(e: &Expr, sys: &FieldSystem) -> String {
    let mut out = String::new();
    print_into(&mut out, e, sys);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{ExternDecl, ExternDef};

    fn sys() -> FieldSystem {
        let mut s = FieldSystem::new(1, ["q"]).unwrap();
        s.declare_family(
            "F",
            0,
            ExternDef::Sin {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
            &[],
            &["Fint"],
        )
        .unwrap();
        s
    }

    #[test]
    fn parses_forced_particle_lagrangian() {
        let s = sys();
        let e = parse("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))", &s).unwrap();
        let expected =
            Expr::rational(1, 2) * Expr::jet(0, &[0]).pow(2) + Expr::field(0) * Expr::apply("F", 0);
        assert!(e.equiv(&expected).unwrap());
    }

    #[test]
    fn zero_and_negative_rationals() {
        let s = sys();
        assert!(parse("0", &s).unwrap().is_zero().unwrap());
        assert_eq!(parse("-3/6", &s).unwrap(), Expr::rational(-1, 2));
        assert!(parse("1/0", &s).is_err());
    }

    #[test]
    fn error_paths() {
        let s = sys();
        assert_eq!(
            parse("(d q 1)", &s),
            Err(Error::IndexOutOfRange { index: 1, dim: 1 })
        );
        assert_eq!(
            parse("x3", &s),
            Err(Error::IndexOutOfRange { index: 3, dim: 1 })
        );
        assert_eq!(
            parse("(G x0)", &s),
            Err(Error::UndeclaredExtern("G".into()))
        );
        assert_eq!(parse("p", &s), Err(Error::UnknownSymbol("p".into())));
        assert!(matches!(parse("(F q)", &s), Err(Error::Unsupported(_))));
        assert!(matches!(
            parse("(+ q", &s),
            Err(Error::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse("(+ q))", &s),
            Err(Error::Syntax { pos: 5, .. })
        ));
        assert!(matches!(parse("(pow q -1)", &s), Err(Error::Syntax { .. })));
        assert!(matches!(parse("()", &s), Err(Error::Syntax { pos: 1, .. })));
    }

    #[test]
    fn extern_argument_must_match_declaration() {
        let mut s = FieldSystem::new(2, ["u"]).unwrap();
        s.declare_extern(
            "G",
            ExternDecl {
                arg: 1,
                derivative: None,
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        assert!(parse("(G x1)", &s).is_ok());
        assert!(matches!(parse("(G x0)", &s), Err(Error::Syntax { .. })));
    }

    #[test]
    fn canonical_round_trip() {
        let s = sys();
        let e = parse("(* (+ (d q 0) (* -1 (Fint x0))) (+ q 1/3 (d q 0 0)))", &s).unwrap();
        let c = e.canonicalize().unwrap();
        let text = print(&c, &s);
        assert_eq!(parse(&text, &s).unwrap(), c);
        assert_eq!(print(&parse(&text, &s).unwrap(), &s), text);
    }

    #[test]
    fn gauge_and_eps_symbols() {
        let s = FieldSystem::new(2, ["u"]).unwrap();
        let e = parse("(+ (d A1 0) (* eps (d eps 1 0)) lam A0)", &s).unwrap();
        let text = print(&e, &s);
        assert_eq!(text, "(+ (d A1 0) (* eps (d eps 0 1)) lam A0)");
    }
}
