//! Printers that emit the parser's surface syntax.
//!
//! Everything printed here parses back to an equal value, up to canonical
//! form. Printing is deterministic.

use std::fmt;

use crate::logic::Sequent;
use crate::syntax::{BTExpr, Interface, OpDecl, PosFormula, Signature};

impl fmt::Display for PosFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosFormula::One => write!(f, "1"),
            PosFormula::Atom(a) => write!(f, "{a}"),
            PosFormula::Tensor(l, r) => write!(f, "{l} * {r}"),
        }
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interface::Pos(s) => write!(f, "{s}"),
            // `-o` is right-associative and has the lowest precedence, so the
            // body never needs parentheses.
            Interface::Lolli(s, n) => write!(f, "{s} -o {n}"),
            Interface::Tensor(s, n) => {
                write!(f, "{s} * ")?;
                match n.as_ref() {
                    Interface::Lolli(..) | Interface::With(..) => write!(f, "({n})"),
                    _ => write!(f, "{n}"),
                }
            }
            Interface::With(a, b) => {
                match a.as_ref() {
                    Interface::Lolli(..) | Interface::With(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " & ")?;
                match b.as_ref() {
                    Interface::Lolli(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Interface::Top => write!(f, "top"),
        }
    }
}

impl fmt::Display for BTExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BTExpr::Op(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            BTExpr::Cond(s, body) => write!(f, "?{s}. {body}"),
            BTExpr::Seq(cs) if cs.is_empty() => write!(f, "Skip"),
            BTExpr::Sel(cs) if cs.is_empty() => write!(f, "Abort"),
            BTExpr::Seq(cs) => {
                write!(f, "Seq{{")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "}}")
            }
            BTExpr::Sel(cs) => {
                write!(f, "Sel{{")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "}}")
            }
            BTExpr::Rep(b) => write!(f, "Rep{{{b}}}"),
        }
    }
}

impl fmt::Display for OpDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.name)?;
        if !self.params.is_empty() {
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p.var)?;
                if let Some(sort) = &p.sort {
                    write!(f, ":{sort}")?;
                }
            }
            write!(f, ". ")?;
        }
        write!(f, "{} -o {}.", self.antecedent, self.consequent)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, constants) in self.sorts() {
            write!(f, "sort {name} = {{")?;
            for (i, c) in constants.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            writeln!(f, "}}.")?;
        }
        for (name, sorts) in self.preds() {
            write!(f, "pred {name}")?;
            if !sorts.is_empty() {
                write!(f, "(")?;
                for (i, s) in sorts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")")?;
            }
            writeln!(f, ".")?;
        }
        for decl in self.ops() {
            writeln!(f, "{decl}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.context.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_context_entry(f, n)?;
        }
        if !self.context.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.goal)
    }
}

fn write_context_entry(f: &mut fmt::Formatter<'_>, n: &Interface) -> fmt::Result {
    // A `,` separates entries, so nothing inside an entry needs protection,
    // but parenthesizing non-atomic entries keeps the list readable.
    match n {
        Interface::Pos(_) | Interface::Top => write!(f, "{n}"),
        _ => write!(f, "({n})"),
    }
}
