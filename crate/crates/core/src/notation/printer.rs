use crate::catalog::{Constraint, Domain, Expr, Identity};
use crate::series::{Entry, FWEntry, ParamExpr, Rational, SeriesKind, SeriesSpec};
use num_traits::Signed;

fn rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) | Expr::NegOnePow(_) => 4,
        _ => 5,
    }
}

fn child(e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        expr(e, out);
        out.push(')');
    } else {
        expr(e, out);
    }
}

pub fn expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(r) if r.is_negative() => {
            out.push_str(&format!("({})", rational(*r)));
        }
        Expr::Const(r) => out.push_str(&rational(*r)),
        Expr::Sym(s) => out.push_str(s),
        Expr::Gamma(p) => out.push_str(&format!("gamma({p})")),
        Expr::Poch(x, n) => out.push_str(&format!("poch({x}, {n})")),
        Expr::Pow(base, p) => {
            child(base, 5, out);
            out.push_str(&format!("^({p})"));
        }
        Expr::NegOnePow(p) => out.push_str(&format!("(-1)^({p})")),
        Expr::Sum { var, upper, body } => {
            out.push_str(&format!("sum({var}, 0, {upper}, "));
            expr(body, out);
            out.push(')');
        }
        Expr::Series(spec) => series(spec, out),
        Expr::Neg(x) => {
            out.push('-');
            if matches!(**x, Expr::Const(_)) {
                out.push('(');
                expr(x, out);
                out.push(')');
            } else {
                child(x, 4, out);
            }
        }
        Expr::Add(x, y) | Expr::Sub(x, y) => {
            child(x, 1, out);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            child(y, 2, out);
        }
        Expr::Mul(x, y) | Expr::Div(x, y) => {
            child(x, 2, out);
            out.push_str(if matches!(e, Expr::Mul(..)) { " * " } else { " / " });
            child(y, 3, out);
        }
    }
}

fn series(spec: &SeriesSpec, out: &mut String) {
    let fw = spec.kind == SeriesKind::FoxWright;
    out.push_str(if fw { "Psi[" } else { "F[" });
    entries(&spec.numerator, fw, out);
    out.push_str(" | ");
    entries(&spec.denominator, fw, out);
    out.push_str(&format!("]({})", spec.argument));
}

fn entries(list: &[Entry], fw: bool, out: &mut String) {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < list.len() {
        match &list[i] {
            Entry::Family {
                var,
                lower,
                upper,
                entry,
            } => {
                let body = if fw {
                    format!("({}; {})", entry.offset, entry.coeff)
                } else {
                    entry.offset.to_string()
                };
                parts.push(format!("{{{body} : {var} = {lower} .. {upper}}}"));
                i += 1;
            }
            Entry::Single(e) if fw => {
                let mut group: Vec<&FWEntry> = vec![e];
                let mut j = i + 1;
                while let Some(Entry::Single(next)) = list.get(j) {
                    if next.coeff != e.coeff {
                        break;
                    }
                    group.push(next);
                    j += 1;
                }
                let offsets: Vec<String> = group.iter().map(|g| g.offset.to_string()).collect();
                parts.push(format!("({}; {})", offsets.join(", "), e.coeff));
                i = j;
            }
            Entry::Single(e) => {
                parts.push(e.offset.to_string());
                i += 1;
            }
        }
    }
    out.push_str(&parts.join(", "));
}

pub fn constraint(c: &Constraint) -> String {
    match c {
        Constraint::NonZero(e) => {
            let mut s = String::from("nonzero(");
            expr(e, &mut s);
            s.push(')');
            s
        }
        Constraint::AtMost { symbol, bound } => format!("{symbol} <= {bound}"),
        Constraint::RePositive(p) => format!("re({p}) > 0"),
    }
}

fn quoted(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

pub fn identity(id: &Identity) -> String {
    let mut out = format!("identity {} {{\n", quoted(&id.name));
    if !id.provenance.is_empty() {
        out.push_str(&format!("  source: {};\n", quoted(&id.provenance)));
    }
    let params: Vec<String> = id
        .symbols
        .iter()
        .map(|(k, d)| {
            format!(
                "{k} in {}",
                match d {
                    Domain::Complex => "C",
                    Domain::NonnegInt => "N",
                }
            )
        })
        .collect();
    out.push_str(&format!("  params: {};\n", params.join(", ")));
    if !id.pins.is_empty() {
        let pins: Vec<String> = id
            .pins
            .iter()
            .map(|p| format!("{} = {}", p.symbol, affine(&p.value)))
            .collect();
        out.push_str(&format!("  pin: {};\n", pins.join(", ")));
    }
    if !id.constraints.is_empty() {
        let cs: Vec<String> = id.constraints.iter().map(constraint).collect();
        out.push_str(&format!("  constraints: {};\n", cs.join(", ")));
    }
    let mut lhs = String::new();
    expr(&id.lhs, &mut lhs);
    let mut rhs = String::new();
    expr(&id.rhs, &mut rhs);
    out.push_str(&format!("  lhs: {lhs};\n  rhs: {rhs};\n}}\n"));
    out
}

fn affine(p: &ParamExpr) -> String {
    p.to_string()
}
