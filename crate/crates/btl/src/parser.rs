//! Concrete syntax for specification files, tree expressions, states,
//! formulas, interfaces, and sequents.
//!
//! Surface tokens: `-o` for linear implication, `*` for tensor, `&` for
//! alternatives, `top` and `1` for the units, `+` separates selector
//! branches, `;` separates sequence steps, `?S. e` guards `e` with the
//! condition `S`, `Rep{e}` repeats, `//` starts a line comment, and
//! declarations end with `.`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::logic::Sequent;
use crate::syntax::{
    Atom, BTExpr, Interface, OpDecl, Param, PosFormula, Signature, SignatureError, Term,
    WorldState,
};

/// A parse or validation error with a 1-based position in the input text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Hint describing the token class the parser was looking for.
    pub expected: Option<String>,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateName,
    ArityMismatch,
    UnboundVariable,
    UnknownOp,
    NonGroundArg,
    NonGroundAtom,
    /// The formula does not fit the interface grammar (an implication or
    /// alternative appears to the left of `-o` or `*`).
    Shape,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),   // lowercase-initial: predicates, ops, constants
    UpIdent(String), // uppercase-initial: variables
    KwSeq,
    KwSel,
    KwRep,
    KwSkip,
    KwAbort,
    KwTop,
    KwSort,
    KwPred,
    One,
    Colon,
    Dot,
    Lolli,
    Star,
    Amp,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Plus,
    Question,
    Turnstile,
    Equals,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::UpIdent(s) => format!("`{s}`"),
            Tok::KwSeq => "`Seq`".into(),
            Tok::KwSel => "`Sel`".into(),
            Tok::KwRep => "`Rep`".into(),
            Tok::KwSkip => "`Skip`".into(),
            Tok::KwAbort => "`Abort`".into(),
            Tok::KwTop => "`top`".into(),
            Tok::KwSort => "`sort`".into(),
            Tok::KwPred => "`pred`".into(),
            Tok::One => "`1`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Lolli => "`-o`".into(),
            Tok::Star => "`*`".into(),
            Tok::Amp => "`&`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Question => "`?`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr) => {
            out.push(Spanned {
                tok: $tok,
                line: $line,
                column: $col,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '/' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&'/') {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                            column = 1;
                            break;
                        }
                    }
                } else {
                    return Err(syntax_error(tl, tc, "unexpected `/`", Some("`//` comment")));
                }
            }
            '-' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&'o') {
                    chars.next();
                    column += 1;
                    push!(Tok::Lolli, tl, tc);
                } else {
                    return Err(syntax_error(tl, tc, "unexpected `-`", Some("`-o`")));
                }
            }
            '|' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    column += 1;
                    push!(Tok::Turnstile, tl, tc);
                } else {
                    return Err(syntax_error(tl, tc, "unexpected `|`", Some("`|-`")));
                }
            }
            '1' => {
                chars.next();
                column += 1;
                push!(Tok::One, tl, tc);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "Seq" => Tok::KwSeq,
                    "Sel" => Tok::KwSel,
                    "Rep" => Tok::KwRep,
                    "Skip" => Tok::KwSkip,
                    "Abort" => Tok::KwAbort,
                    "top" => Tok::KwTop,
                    "sort" => Tok::KwSort,
                    "pred" => Tok::KwPred,
                    _ if word.chars().next().unwrap().is_ascii_uppercase() => Tok::UpIdent(word),
                    _ => Tok::Ident(word),
                };
                push!(tok, tl, tc);
            }
            _ => {
                let tok = match c {
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '*' => Tok::Star,
                    '&' => Tok::Amp,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '?' => Tok::Question,
                    '=' => Tok::Equals,
                    other => {
                        return Err(syntax_error(
                            tl,
                            tc,
                            &format!("unexpected character `{other}`"),
                            None,
                        ))
                    }
                };
                chars.next();
                column += 1;
                push!(tok, tl, tc);
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

fn syntax_error(line: usize, column: usize, message: &str, expected: Option<&str>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.to_string(),
        expected: expected.map(str::to_string),
        kind: ParseErrorKind::Syntax,
    }
}

// ---------------------------------------------------------------------------
// Token stream
// ---------------------------------------------------------------------------

struct Stream {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Stream {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Stream {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos.min(self.toks.len() - 1)].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, ParseError> {
        let got = self.peek().clone();
        if got.tok == tok {
            Ok(self.next())
        } else {
            Err(syntax_error(
                got.line,
                got.column,
                &format!("unexpected {}", got.tok.describe()),
                Some(&tok.describe()),
            ))
        }
    }

    fn error_here(&self, message: &str, expected: Option<&str>, kind: ParseErrorKind) -> ParseError {
        let here = self.peek();
        ParseError {
            line: here.line,
            column: here.column,
            message: message.to_string(),
            expected: expected.map(str::to_string),
            kind,
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.error_here(
                &format!("unexpected {}", self.peek().tok.describe()),
                Some("end of input"),
                ParseErrorKind::Syntax,
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// General formulas (shared by interface and sequent parsing)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum GFormula {
    One,
    Top,
    Atom(Atom),
    Tensor(Box<GFormula>, Box<GFormula>),
    With(Box<GFormula>, Box<GFormula>),
    Lolli(Box<GFormula>, Box<GFormula>),
}

impl GFormula {
    fn to_pos(&self) -> Option<PosFormula> {
        match self {
            GFormula::One => Some(PosFormula::One),
            GFormula::Atom(a) => Some(PosFormula::Atom(a.clone())),
            GFormula::Tensor(l, r) => Some(PosFormula::tensor(l.to_pos()?, r.to_pos()?)),
            _ => None,
        }
    }

    fn to_interface(&self) -> Option<Interface> {
        if let Some(s) = self.to_pos() {
            return Some(Interface::Pos(s));
        }
        match self {
            GFormula::Top => Some(Interface::Top),
            GFormula::With(a, b) => Some(Interface::with(a.to_interface()?, b.to_interface()?)),
            GFormula::Lolli(l, r) => Some(Interface::lolli(l.to_pos()?, r.to_interface()?)),
            GFormula::Tensor(l, r) => Some(Interface::tensor(l.to_pos()?, r.to_interface()?)),
            _ => None,
        }
    }

    /// Splits top-level tensors into separate pieces until every piece fits
    /// the interface grammar. Used for sequent contexts, where `N1 * N2` is
    /// admissible because the pieces can be assumed separately.
    fn to_context_entries(&self) -> Option<Vec<Interface>> {
        if let Some(n) = self.to_interface() {
            return Some(vec![n]);
        }
        match self {
            GFormula::Tensor(l, r) => {
                let mut out = l.to_context_entries()?;
                out.extend(r.to_context_entries()?);
                Some(out)
            }
            _ => None,
        }
    }
}

/// Precedence: `-o` lowest (right-assoc), `&` next (right-assoc), `*`
/// highest (right-assoc).
fn parse_gformula(s: &mut Stream) -> Result<GFormula, ParseError> {
    let lhs = parse_gwith(s)?;
    if s.eat(&Tok::Lolli) {
        let rhs = parse_gformula(s)?;
        Ok(GFormula::Lolli(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_gwith(s: &mut Stream) -> Result<GFormula, ParseError> {
    let lhs = parse_gtensor(s)?;
    if s.eat(&Tok::Amp) {
        let rhs = parse_gwith(s)?;
        Ok(GFormula::With(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_gtensor(s: &mut Stream) -> Result<GFormula, ParseError> {
    let lhs = parse_gatom(s)?;
    if s.eat(&Tok::Star) {
        let rhs = parse_gtensor(s)?;
        Ok(GFormula::Tensor(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_gatom(s: &mut Stream) -> Result<GFormula, ParseError> {
    let t = s.peek().clone();
    match t.tok {
        Tok::One => {
            s.next();
            Ok(GFormula::One)
        }
        Tok::KwTop => {
            s.next();
            Ok(GFormula::Top)
        }
        Tok::LParen => {
            s.next();
            let inner = parse_gformula(s)?;
            s.expect(Tok::RParen)?;
            Ok(inner)
        }
        Tok::Ident(_) => Ok(GFormula::Atom(parse_atom(s)?)),
        other => Err(syntax_error(
            t.line,
            t.column,
            &format!("unexpected {}", other.describe()),
            Some("a formula"),
        )),
    }
}

fn parse_atom(s: &mut Stream) -> Result<Atom, ParseError> {
    let t = s.next();
    let name = match t.tok {
        Tok::Ident(n) => n,
        other => {
            return Err(syntax_error(
                t.line,
                t.column,
                &format!("unexpected {}", other.describe()),
                Some("a predicate name"),
            ))
        }
    };
    let mut args = Vec::new();
    if s.eat(&Tok::LParen) {
        if !s.eat(&Tok::RParen) {
            loop {
                args.push(parse_term(s)?);
                if s.eat(&Tok::Comma) {
                    continue;
                }
                s.expect(Tok::RParen)?;
                break;
            }
        }
    }
    Ok(Atom::new(name, args))
}

fn parse_term(s: &mut Stream) -> Result<Term, ParseError> {
    let t = s.next();
    match t.tok {
        Tok::Ident(n) => Ok(Term::Const(n)),
        Tok::UpIdent(n) => Ok(Term::Var(n)),
        other => Err(syntax_error(
            t.line,
            t.column,
            &format!("unexpected {}", other.describe()),
            Some("a constant or variable"),
        )),
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Parses a positive formula, e.g. `at_door * door_unlocked`.
pub fn parse_formula(text: &str) -> Result<PosFormula, ParseError> {
    let mut s = Stream::new(text)?;
    let start = s.peek().clone();
    let g = parse_gformula(&mut s)?;
    s.expect_eof()?;
    g.to_pos().ok_or_else(|| {
        syntax_error(
            start.line,
            start.column,
            "expected a positive formula (atoms, `1`, and `*` only)",
            None,
        )
    })
}

/// Parses an interface formula, rejecting shapes with an implication or
/// alternative to the left of `-o` or `*`.
pub fn parse_interface(text: &str) -> Result<Interface, ParseError> {
    let mut s = Stream::new(text)?;
    let start = s.peek().clone();
    let g = parse_gformula(&mut s)?;
    s.expect_eof()?;
    g.to_interface().ok_or_else(|| ParseError {
        line: start.line,
        column: start.column,
        message: "formula does not fit the interface grammar (only a positive formula may \
                  appear left of `-o` or `*`)"
            .to_string(),
        expected: None,
        kind: ParseErrorKind::Shape,
    })
}

/// Parses a world state literal, e.g. `{no_target, has_cigarette,
/// has_cigarette}`. Repetition encodes multiplicity.
pub fn parse_state(text: &str) -> Result<WorldState, ParseError> {
    let mut s = Stream::new(text)?;
    s.expect(Tok::LBrace)?;
    let mut out = WorldState::new();
    if !s.eat(&Tok::RBrace) {
        loop {
            let here = s.peek().clone();
            let atom = parse_atom(&mut s)?;
            out.insert(atom).map_err(|e| ParseError {
                line: here.line,
                column: here.column,
                message: format!("state atoms must be ground: {e}"),
                expected: None,
                kind: ParseErrorKind::NonGroundAtom,
            })?;
            if s.eat(&Tok::Comma) {
                continue;
            }
            s.expect(Tok::RBrace)?;
            break;
        }
    }
    s.expect_eof()?;
    Ok(out)
}

/// Parses a sequent `Δ |- C`, with Δ a comma-separated formula list. A
/// context entry whose top-level shape is a tensor of interfaces is split
/// into separate entries.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut s = Stream::new(text)?;
    let mut context = Vec::new();
    if !s.eat(&Tok::Turnstile) {
        loop {
            let here = s.peek().clone();
            let g = parse_gformula(&mut s)?;
            let entries = g.to_context_entries().ok_or_else(|| ParseError {
                line: here.line,
                column: here.column,
                message: "context formula does not fit the interface grammar".to_string(),
                expected: None,
                kind: ParseErrorKind::Shape,
            })?;
            context.extend(entries);
            if s.eat(&Tok::Comma) {
                continue;
            }
            s.expect(Tok::Turnstile)?;
            break;
        }
    }
    let here = s.peek().clone();
    let g = parse_gformula(&mut s)?;
    s.expect_eof()?;
    let goal = g.to_interface().ok_or_else(|| ParseError {
        line: here.line,
        column: here.column,
        message: "goal formula does not fit the interface grammar".to_string(),
        expected: None,
        kind: ParseErrorKind::Shape,
    })?;
    Ok(Sequent::new(context, goal))
}

/// Parses a specification file: operator declarations `name : xs. S -o S'.`
/// plus optional `sort name = {c, ...}.` and `pred name(sort, ...).`
/// declarations.
pub fn parse_spec(text: &str) -> Result<Signature, ParseError> {
    let mut s = Stream::new(text)?;
    let mut sig = Signature::new();
    loop {
        let t = s.peek().clone();
        match &t.tok {
            Tok::Eof => break,
            Tok::KwSort => {
                s.next();
                let name = expect_ident(&mut s, "a sort name")?;
                s.expect(Tok::Equals)?;
                s.expect(Tok::LBrace)?;
                let mut constants = BTreeSet::new();
                if !s.eat(&Tok::RBrace) {
                    loop {
                        constants.insert(expect_ident(&mut s, "a constant")?);
                        if s.eat(&Tok::Comma) {
                            continue;
                        }
                        s.expect(Tok::RBrace)?;
                        break;
                    }
                }
                s.expect(Tok::Dot)?;
                sig.add_sort(name, constants)
                    .map_err(|e| signature_error(&t, e))?;
            }
            Tok::KwPred => {
                s.next();
                let name = expect_ident(&mut s, "a predicate name")?;
                let mut arg_sorts = Vec::new();
                if s.eat(&Tok::LParen) {
                    if !s.eat(&Tok::RParen) {
                        loop {
                            arg_sorts.push(expect_ident(&mut s, "a sort name")?);
                            if s.eat(&Tok::Comma) {
                                continue;
                            }
                            s.expect(Tok::RParen)?;
                            break;
                        }
                    }
                }
                s.expect(Tok::Dot)?;
                sig.add_pred(name, arg_sorts)
                    .map_err(|e| signature_error(&t, e))?;
            }
            Tok::Ident(_) => {
                let name = expect_ident(&mut s, "an operator name")?;
                s.expect(Tok::Colon)?;
                // Parameter list: uppercase identifiers (optionally sorted)
                // terminated by `.`. Formulas never start with an uppercase
                // identifier, so one token of lookahead disambiguates.
                let mut params = Vec::new();
                while let Tok::UpIdent(_) = s.peek().tok {
                    let var = match s.next().tok {
                        Tok::UpIdent(v) => v,
                        _ => unreachable!(),
                    };
                    let sort = if s.eat(&Tok::Colon) {
                        Some(expect_ident(&mut s, "a sort name")?)
                    } else {
                        None
                    };
                    params.push(Param { var, sort });
                }
                if !params.is_empty() {
                    s.expect(Tok::Dot)?;
                }
                let ante_pos = s.peek().clone();
                let antecedent = parse_pos_only(&mut s, &ante_pos)?;
                s.expect(Tok::Lolli)?;
                let cons_pos = s.peek().clone();
                let consequent = parse_pos_only(&mut s, &cons_pos)?;
                s.expect(Tok::Dot)?;
                for p in &params {
                    if let Some(sort) = &p.sort {
                        if sig.sort(sort).is_none() {
                            return Err(signature_error(
                                &t,
                                SignatureError::UnknownSort { name: sort.clone() },
                            ));
                        }
                    }
                }
                let decl = OpDecl::new(name, params, antecedent, consequent)
                    .map_err(|e| signature_error(&t, e))?;
                sig.add_op(decl).map_err(|e| signature_error(&t, e))?;
            }
            other => {
                return Err(syntax_error(
                    t.line,
                    t.column,
                    &format!("unexpected {}", other.describe()),
                    Some("a declaration"),
                ))
            }
        }
    }
    Ok(sig)
}

fn parse_pos_only(s: &mut Stream, at: &Spanned) -> Result<PosFormula, ParseError> {
    let g = parse_gwith(s)?;
    g.to_pos().ok_or_else(|| {
        syntax_error(
            at.line,
            at.column,
            "operator antecedents and consequents are positive formulas",
            None,
        )
    })
}

fn expect_ident(s: &mut Stream, what: &str) -> Result<String, ParseError> {
    let t = s.next();
    match t.tok {
        Tok::Ident(n) => Ok(n),
        other => Err(syntax_error(
            t.line,
            t.column,
            &format!("unexpected {}", other.describe()),
            Some(what),
        )),
    }
}

fn signature_error(at: &Spanned, e: SignatureError) -> ParseError {
    let kind = match &e {
        SignatureError::DuplicateName { .. } => ParseErrorKind::DuplicateName,
        SignatureError::UnboundVariable { .. } => ParseErrorKind::UnboundVariable,
        SignatureError::ArityMismatch { .. } | SignatureError::PredicateArity { .. } => {
            ParseErrorKind::ArityMismatch
        }
        _ => ParseErrorKind::Syntax,
    };
    ParseError {
        line: at.line,
        column: at.column,
        message: e.to_string(),
        expected: None,
        kind,
    }
}

/// Parses a tree expression, resolving every op leaf against `sig`.
pub fn parse_tree(text: &str, sig: &Signature) -> Result<BTExpr, ParseError> {
    let mut s = Stream::new(text)?;
    let tree = parse_expr(&mut s, sig)?;
    s.expect_eof()?;
    Ok(tree)
}

fn parse_expr(s: &mut Stream, sig: &Signature) -> Result<BTExpr, ParseError> {
    let t = s.peek().clone();
    match &t.tok {
        Tok::KwSkip => {
            s.next();
            Ok(BTExpr::skip())
        }
        Tok::KwAbort => {
            s.next();
            Ok(BTExpr::abort())
        }
        Tok::KwSeq => {
            s.next();
            s.expect(Tok::LBrace)?;
            let mut children = Vec::new();
            if !s.eat(&Tok::RBrace) {
                loop {
                    children.push(parse_expr(s, sig)?);
                    if s.eat(&Tok::Semi) {
                        continue;
                    }
                    s.expect(Tok::RBrace)?;
                    break;
                }
            }
            Ok(BTExpr::Seq(children))
        }
        Tok::KwSel => {
            s.next();
            s.expect(Tok::LBrace)?;
            let mut children = Vec::new();
            if !s.eat(&Tok::RBrace) {
                loop {
                    children.push(parse_expr(s, sig)?);
                    if s.eat(&Tok::Plus) {
                        continue;
                    }
                    s.expect(Tok::RBrace)?;
                    break;
                }
            }
            Ok(BTExpr::Sel(children))
        }
        Tok::KwRep => {
            s.next();
            s.expect(Tok::LBrace)?;
            let body = parse_expr(s, sig)?;
            s.expect(Tok::RBrace)?;
            Ok(BTExpr::rep(body))
        }
        Tok::Question => {
            s.next();
            let here = s.peek().clone();
            let g = parse_gwith(s)?;
            let payload = g.to_pos().ok_or_else(|| {
                syntax_error(
                    here.line,
                    here.column,
                    "condition payloads are positive formulas",
                    None,
                )
            })?;
            if !payload.is_ground() {
                return Err(ParseError {
                    line: here.line,
                    column: here.column,
                    message: "condition payloads must be ground".to_string(),
                    expected: None,
                    kind: ParseErrorKind::NonGroundAtom,
                });
            }
            s.expect(Tok::Dot)?;
            let body = parse_expr(s, sig)?;
            Ok(BTExpr::cond(payload, body))
        }
        Tok::LParen => {
            s.next();
            let inner = parse_expr(s, sig)?;
            s.expect(Tok::RParen)?;
            Ok(inner)
        }
        Tok::Ident(_) => {
            let name = expect_ident(s, "an operator name")?;
            s.expect(Tok::LParen)?;
            let mut args = Vec::new();
            if !s.eat(&Tok::RParen) {
                loop {
                    let here = s.peek().clone();
                    let term = parse_term(s)?;
                    if !term.is_ground() {
                        return Err(ParseError {
                            line: here.line,
                            column: here.column,
                            message: format!("op arguments must be ground, got `{term}`"),
                            expected: None,
                            kind: ParseErrorKind::NonGroundArg,
                        });
                    }
                    args.push(term);
                    if s.eat(&Tok::Comma) {
                        continue;
                    }
                    s.expect(Tok::RParen)?;
                    break;
                }
            }
            let decl = sig.op(&name).ok_or_else(|| ParseError {
                line: t.line,
                column: t.column,
                message: format!("unknown op `{name}`"),
                expected: None,
                kind: ParseErrorKind::UnknownOp,
            })?;
            if decl.params.len() != args.len() {
                return Err(ParseError {
                    line: t.line,
                    column: t.column,
                    message: format!(
                        "op `{name}` expects {} argument(s), got {}",
                        decl.params.len(),
                        args.len()
                    ),
                    expected: None,
                    kind: ParseErrorKind::ArityMismatch,
                });
            }
            Ok(BTExpr::Op(name, args))
        }
        other => Err(syntax_error(
            t.line,
            t.column,
            &format!("unexpected {}", other.describe()),
            Some("a tree expression"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> PosFormula {
        PosFormula::prop(name)
    }

    fn investigation() -> Signature {
        parse_spec(
            "set_target : no_target -o has_target.\n\
             move_to_target : has_target -o has_target * at_target.\n\
             investigate_target : has_target * at_target * heard_noise -o no_target.\n\
             idle_smoke : has_cigarette -o 1.\n\
             idle_pace : 1 -o 1.\n",
        )
        .unwrap()
    }

    #[test]
    fn parses_smoke_declaration() {
        let sig = parse_spec("smoke : has_cigarette -o 1.").unwrap();
        let d = sig.op("smoke").unwrap();
        assert_eq!(d.antecedent, p("has_cigarette"));
        assert_eq!(d.consequent, PosFormula::One);
        assert!(d.params.is_empty());
    }

    #[test]
    fn parses_unit_declaration() {
        let sig = parse_spec("pace : 1 -o 1.").unwrap();
        let d = sig.op("pace").unwrap();
        assert_eq!(d.antecedent, PosFormula::One);
        assert_eq!(d.consequent, PosFormula::One);
    }

    #[test]
    fn rejects_unbound_consequent_variable() {
        let err = parse_spec("bad : 1 -o at(X).").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnboundVariable);
        assert!(err.message.contains('X'));
        assert!(err.message.contains("bad"));
    }

    #[test]
    fn parses_parameterized_declaration() {
        let sig =
            parse_spec("rewrite : X. circle(X) * diamond(X) -o diamond(c) * diamond(d).").unwrap();
        let d = sig.op("rewrite").unwrap();
        assert_eq!(d.params.len(), 1);
        assert_eq!(d.params[0].var, "X");
    }

    #[test]
    fn parses_sorted_parameters_and_preds() {
        let sig = parse_spec(
            "sort dir = {left, right}.\n\
             pred facing(dir).\n\
             turn : D:dir. facing(left) -o facing(D).",
        )
        .unwrap();
        assert_eq!(sig.sort("dir").unwrap().len(), 2);
        assert_eq!(sig.op("turn").unwrap().params[0].sort.as_deref(), Some("dir"));
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let err = parse_spec("pace : 1 -o 1. pace : 1 -o 1.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateName);
    }

    #[test]
    fn cross_declaration_arity_mismatch_rejected() {
        let err = parse_spec("f : at(a) -o 1. g : at -o 1.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ArityMismatch);
    }

    #[test]
    fn parses_sequence_of_ops() {
        let sig = investigation();
        let t = parse_tree("Seq{move_to_target(); investigate_target()}", &sig).unwrap();
        assert_eq!(
            t,
            BTExpr::Seq(vec![
                BTExpr::op("move_to_target", vec![]),
                BTExpr::op("investigate_target", vec![]),
            ])
        );
    }

    #[test]
    fn skip_is_empty_seq() {
        let sig = investigation();
        assert_eq!(parse_tree("Skip", &sig).unwrap(), BTExpr::skip());
        assert_eq!(parse_tree("Seq{}", &sig).unwrap(), BTExpr::skip());
        assert_eq!(parse_tree("Abort", &sig).unwrap(), BTExpr::abort());
    }

    #[test]
    fn condition_scopes_over_one_expression() {
        let sig = investigation();
        let t = parse_tree("?heard_noise. set_target()", &sig).unwrap();
        assert_eq!(
            t,
            BTExpr::cond(p("heard_noise"), BTExpr::op("set_target", vec![]))
        );
    }

    #[test]
    fn unknown_op_and_arity_errors() {
        let sig = investigation();
        let err = parse_tree("warp()", &sig).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownOp);
        let err = parse_tree("idle_pace(a)", &sig).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ArityMismatch);
        let err = parse_tree("idle_pace(X)", &sig).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonGroundArg);
    }

    #[test]
    fn state_literal_multiplicity() {
        let d = parse_state("{no_target, heard_noise, has_cigarette, has_cigarette}").unwrap();
        assert_eq!(d.count(&Atom::prop("has_cigarette")), 2);
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn empty_state() {
        assert!(parse_state("{}").unwrap().is_empty());
    }

    #[test]
    fn state_rejects_variables() {
        let err = parse_state("{at(X)}").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonGroundAtom);
    }

    #[test]
    fn formula_precedence() {
        // a * b -o c parses as (a * b) -o c
        let n = parse_interface("a * b -o c").unwrap();
        assert_eq!(
            n,
            Interface::lolli(PosFormula::tensor(p("a"), p("b")), Interface::pos(p("c")))
        );
    }

    #[test]
    fn interface_shape_error() {
        let err = parse_interface("(a -o b) -o c").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Shape);
    }

    #[test]
    fn lolli_with_unit() {
        let n = parse_interface("has_cigarette -o 1").unwrap();
        assert_eq!(
            n,
            Interface::lolli(p("has_cigarette"), Interface::one())
        );
    }

    #[test]
    fn sequent_splits_tensor_of_implications() {
        let seq = parse_sequent(
            "at_elsewhere, door_unlocked, (at_door*door_unlocked -o door_open)*(at_elsewhere -o at_door) |- door_unlocked",
        )
        .unwrap();
        assert_eq!(seq.context.len(), 4);
        assert_eq!(seq.goal, Interface::pos(p("door_unlocked")));
    }

    #[test]
    fn sequent_with_empty_context() {
        let seq = parse_sequent("|- 1").unwrap();
        assert!(seq.context.is_empty());
        assert_eq!(seq.goal, Interface::one());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_spec("pace : 1 -o\n  %").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.column > 0);
        assert!(!err.message.is_empty());
    }
}
