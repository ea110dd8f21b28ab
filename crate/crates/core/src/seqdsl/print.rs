use std::fmt::{self, Write};

use super::{Expr, SequenceDef};

// Binding levels, loosest first. An operand printed at a lower level than its
// slot requires gets parentheses.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => POWER,
        // a negative literal can only come back as `-(k)`, so wrap it
        Expr::Int(v) if v.sign() == num_bigint::Sign::Minus => UNARY,
        _ => ATOM,
    }
}

fn is_bare(e: &Expr) -> bool {
    matches!(e, Expr::Int(_) | Expr::N | Expr::Index)
}

struct Printer<'a> {
    index: &'a str,
}

impl Printer<'_> {
    fn slot(&self, out: &mut String, e: &Expr, min: u8) {
        if level(e) < min {
            out.push('(');
            self.expr(out, e);
            out.push(')');
        } else {
            self.expr(out, e);
        }
    }

    fn binary(&self, out: &mut String, a: &Expr, op: &str, b: &Expr, lhs: u8, rhs: u8) {
        self.slot(out, a, lhs);
        out.push_str(op);
        self.slot(out, b, rhs);
    }

    fn expr(&self, out: &mut String, e: &Expr) {
        match e {
            Expr::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::N => out.push('n'),
            Expr::Index => out.push_str(self.index),
            Expr::Neg(inner) => {
                out.push('-');
                self.slot(out, inner, POWER);
            }
            Expr::Add(a, b) => self.binary(out, a, " + ", b, SUM, PRODUCT),
            Expr::Sub(a, b) => self.binary(out, a, " - ", b, SUM, PRODUCT),
            // a product of two bare atoms is written tight: `3*k`
            Expr::Mul(a, b) if is_bare(a) && is_bare(b) => {
                self.binary(out, a, "*", b, PRODUCT, UNARY)
            }
            Expr::Mul(a, b) => self.binary(out, a, " * ", b, PRODUCT, UNARY),
            Expr::Div(a, b) => self.binary(out, a, " / ", b, PRODUCT, UNARY),
            Expr::Pow(a, b) => self.binary(out, a, "^", b, ATOM, UNARY),
            Expr::Binom(a, b) => {
                out.push_str("binom(");
                self.expr(out, a);
                out.push_str(", ");
                self.expr(out, b);
                out.push(')');
            }
            Expr::Fact(a) => {
                out.push_str("fact(");
                self.expr(out, a);
                out.push(')');
            }
        }
    }
}

pub(super) fn write_def(f: &mut fmt::Formatter<'_>, def: &SequenceDef) -> fmt::Result {
    let p = Printer { index: &def.index };
    let mut lower = String::new();
    let mut upper = String::new();
    let mut body = String::new();
    p.expr(&mut lower, &def.lower);
    p.expr(&mut upper, &def.upper);
    p.expr(&mut body, &def.body);
    write!(
        f,
        "seq {}(n) = sum({} = {lower} .. {upper}) {body}",
        def.name, def.index
    )
}

/// Renders a lone expression, with `index` naming the summation variable.
pub fn expr_to_string(e: &Expr, index: &str) -> String {
    let mut out = String::new();
    Printer { index }.expr(&mut out, e);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn body(src: &str) -> String {
        let d = parse(&format!("seq a(n) = sum(k = 0 .. n) {src}")).unwrap();
        expr_to_string(&d.body, "k")
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(body("((n + 1)) * (k)"), "(n + 1) * k");
        assert_eq!(body("n - (k - 1)"), "n - (k - 1)");
        assert_eq!(body("(n - k) - 1"), "n - k - 1");
        assert_eq!(body("2^(3^k)"), "2^3^k");
        assert_eq!(body("(2^3)^k"), "(2^3)^k");
        assert_eq!(body("(-1)^k"), "(-1)^k");
        assert_eq!(body("-(1^k)"), "-1^k");
        assert_eq!(body("-(-k)"), "-(-k)");
        assert_eq!(body("n / (k * 2)"), "n / (k*2)");
        assert_eq!(body("2^(-k)"), "2^-k");
        assert_eq!(body("-(n * k)"), "-(n*k)");
    }
}
