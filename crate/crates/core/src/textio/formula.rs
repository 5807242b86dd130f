use super::{ParseError, SourceSpan};
use crate::formula::{Formula, PredPattern, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Minimal parentheses.
    Pretty,
    /// Every compound subformula parenthesized.
    Canonical,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Percent,
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Arrow,
    Equals,
    Bottom,
    Forall,
    Exists,
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        let start = i;
        let single = |t: Tok, len: usize| (t, SourceSpan::new(start, start + len));
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let tok = match c {
            '(' => single(Tok::LParen, 1),
            ')' => single(Tok::RParen, 1),
            ',' => single(Tok::Comma, 1),
            '.' => single(Tok::Dot, 1),
            '&' | '∧' => single(Tok::And, c.len_utf8()),
            '=' => single(Tok::Equals, 1),
            '%' => single(Tok::Percent, 1),
            '∨' => single(Tok::Or, c.len_utf8()),
            '⊃' | '→' => single(Tok::Arrow, c.len_utf8()),
            '⊥' => single(Tok::Bottom, c.len_utf8()),
            '⊤' => single(Tok::Ident("T".into()), c.len_utf8()),
            '∀' => single(Tok::Forall, c.len_utf8()),
            '∃' => single(Tok::Exists, c.len_utf8()),
            '|' => single(Tok::Or, 1),
            '-' if bytes.get(i + 1) == Some(&b'>') => single(Tok::Arrow, 2),
            '_' if src[i..].starts_with("_|_") => single(Tok::Bottom, 3),
            c if c.is_ascii_alphanumeric() => {
                let mut j = i;
                while j < src.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
                {
                    j += 1;
                }
                let word = &src[i..j];
                let tok = match word {
                    "all" => Tok::Forall,
                    "ex" => Tok::Exists,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, SourceSpan::new(i, j))
            }
            other => {
                return Err(ParseError::Syntax {
                    message: format!("unexpected character `{other}`"),
                    span: SourceSpan::new(i, i + other.len_utf8()),
                })
            }
        };
        i = tok.1.end;
        out.push(tok);
    }
    out.push((Tok::Eof, SourceSpan::new(src.len(), src.len())));
    Ok(out)
}

pub(crate) fn is_var_name(s: &str) -> bool {
    matches!(s.as_bytes().first(), Some(b'u'..=b'z'))
}

pub(crate) fn is_param_name(s: &str) -> bool {
    matches!(s.as_bytes().first(), Some(b'a'..=b't'))
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser {
    fn new(src: &str, scope: Vec<String>) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            scope,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            message: message.into(),
            span: self.span(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Forall | Tok::Exists => {
                let universal = *self.peek() == Tok::Forall;
                self.bump();
                let (tok, span) = self.bump();
                let Tok::Ident(x) = tok else {
                    return Err(ParseError::Syntax {
                        message: "expected bound variable".into(),
                        span,
                    });
                };
                if !is_var_name(&x) {
                    return Err(ParseError::NamespaceClash { name: x, span });
                }
                self.expect(Tok::Dot, "`.` after bound variable")?;
                self.scope.push(x.clone());
                let body = self.formula();
                self.scope.pop();
                let body = Box::new(body?);
                Ok(if universal {
                    Formula::Forall(x, body)
                } else {
                    Formula::Exists(x, body)
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Percent => {
                self.bump();
                let (tok, span) = self.bump();
                let Tok::Ident(name) = tok else {
                    return Err(ParseError::Syntax {
                        message: "expected predicate parameter name".into(),
                        span,
                    });
                };
                let args = self.args()?;
                Ok(Formula::PredParam(name, args))
            }
            Tok::Ident(name) => {
                if name == "T" && !matches!(self.peek_at(1), Tok::LParen | Tok::Equals) {
                    self.bump();
                    return Ok(Formula::Top);
                }
                let start = self.pos;
                let (_, span) = self.bump();
                let args = if *self.peek() == Tok::LParen {
                    Some(self.args()?)
                } else {
                    None
                };
                if *self.peek() == Tok::Equals {
                    self.pos = start;
                    let lhs = self.term()?;
                    self.expect(Tok::Equals, "`=`")?;
                    let rhs = self.term()?;
                    return Ok(Formula::Eq(lhs, rhs));
                }
                if is_var_name(&name) && args.is_none() && self.scope.contains(&name) {
                    return Err(ParseError::Syntax {
                        message: format!("bound variable `{name}` used as a formula"),
                        span,
                    });
                }
                Ok(Formula::Atom(name, args.unwrap_or_default()))
            }
            _ => self.error("expected a formula"),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(out);
                }
                _ => return self.error("expected `,` or `)`"),
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, span) = self.bump();
        let Tok::Ident(name) = tok else {
            return Err(ParseError::Syntax {
                message: "expected a term".into(),
                span,
            });
        };
        if *self.peek() == Tok::LParen {
            let args = self.args()?;
            return Ok(Term::App(name, args));
        }
        if is_var_name(&name) {
            if self.scope.contains(&name) {
                return Ok(Term::Var(name));
            }
            return Err(ParseError::FreeVariable { name, span });
        }
        if is_param_name(&name) {
            return Ok(Term::Param(name));
        }
        Ok(Term::Const(name))
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, Vec::new())?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, Vec::new())?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses an atomic pseudo-formula in which `hole` may occur free.
pub fn parse_pattern(src: &str, hole: &str) -> Result<PredPattern, ParseError> {
    if !is_var_name(hole) {
        return Err(ParseError::NamespaceClash {
            name: hole.to_string(),
            span: SourceSpan::new(0, src.len()),
        });
    }
    let mut p = Parser::new(src, vec![hole.to_string()])?;
    let body = p.formula()?;
    p.finish()?;
    if !body.is_atomic() {
        return Err(ParseError::Syntax {
            message: "pattern must be an atomic formula".into(),
            span: SourceSpan::new(0, src.len()),
        });
    }
    Ok(PredPattern::new(body, hole))
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn print_formula(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    match style {
        Style::Pretty => pretty(f, 0, &mut out),
        Style::Canonical => canonical(f, &mut out),
    }
    out
}

fn args(out: &mut String, name: &str, args: &[Term]) {
    out.push_str(name);
    if !args.is_empty() {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&a.to_string());
        }
        out.push(')');
    }
}

fn atomic(f: &Formula, out: &mut String) -> bool {
    match f {
        Formula::Atom(p, a) => args(out, p, a),
        Formula::PredParam(p, a) => {
            out.push('%');
            args(out, p, a);
            if a.is_empty() {
                out.push_str("()");
            }
        }
        Formula::Bottom => out.push_str("_|_"),
        Formula::Top => out.push('T'),
        Formula::Eq(l, r) => {
            out.push_str(&format!("{l} = {r}"));
        }
        _ => return false,
    }
    true
}

// Precedence: 1 `->`, 2 `|`, 3 `&`, 4 atoms. Quantifiers bind loosest and
// are parenthesized whenever they are an operand.
fn pretty(f: &Formula, min: u8, out: &mut String) {
    if atomic(f, out) {
        return;
    }
    let (l, r, prec, lhs, rhs, op) = match f {
        Formula::Imp(l, r) => (l, r, 1, 2, 1, " -> "),
        Formula::Or(l, r) => (l, r, 2, 2, 3, " | "),
        Formula::And(l, r) => (l, r, 3, 3, 4, " & "),
        Formula::Forall(x, b) | Formula::Exists(x, b) => {
            let kw = if matches!(f, Formula::Forall(..)) {
                "all"
            } else {
                "ex"
            };
            let wrap = min > 0;
            if wrap {
                out.push('(');
            }
            out.push_str(&format!("{kw} {x}. "));
            pretty(b, 0, out);
            if wrap {
                out.push(')');
            }
            return;
        }
        _ => unreachable!(),
    };
    let wrap = prec < min;
    if wrap {
        out.push('(');
    }
    pretty(l, lhs, out);
    out.push_str(op);
    pretty(r, rhs, out);
    if wrap {
        out.push(')');
    }
}

fn canonical(f: &Formula, out: &mut String) {
    if atomic(f, out) {
        return;
    }
    match f {
        Formula::Imp(l, r) | Formula::Or(l, r) | Formula::And(l, r) => {
            let op = match f {
                Formula::Imp(..) => " -> ",
                Formula::Or(..) => " | ",
                _ => " & ",
            };
            out.push('(');
            canonical(l, out);
            out.push_str(op);
            canonical(r, out);
            out.push(')');
        }
        Formula::Forall(x, b) | Formula::Exists(x, b) => {
            let kw = if matches!(f, Formula::Forall(..)) {
                "all"
            } else {
                "ex"
            };
            out.push_str(&format!("({kw} {x}. "));
            canonical(b, out);
            out.push(')');
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(src: &str) {
        let f = parse_formula(src).unwrap();
        for style in [Style::Pretty, Style::Canonical] {
            let printed = print_formula(&f, style);
            assert_eq!(parse_formula(&printed).unwrap(), f, "{printed}");
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_formula("p & q -> _|_").unwrap(),
            Formula::imp(
                Formula::and(Formula::prop("p"), Formula::prop("q")),
                Formula::Bottom
            )
        );
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::imp(
                Formula::prop("p"),
                Formula::imp(Formula::prop("q"), Formula::prop("r"))
            )
        );
        assert_eq!(
            parse_formula("p | q & r").unwrap(),
            Formula::or(
                Formula::prop("p"),
                Formula::and(Formula::prop("q"), Formula::prop("r"))
            )
        );
    }

    #[test]
    fn binder_scope() {
        let f = parse_formula("all x. P(x) | q").unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::or(Formula::atom("P", vec![Term::var("x")]), Formula::prop("q"))
            )
        );
    }

    #[test]
    fn equations_and_terms() {
        assert_eq!(
            parse_formula("f(a) = b").unwrap(),
            Formula::eq(Term::app("f", vec![Term::param("a")]), Term::param("b"))
        );
        assert_eq!(parse_formula("T").unwrap(), Formula::Top);
        assert_eq!(
            parse_formula("T = a").unwrap(),
            Formula::eq(Term::constant("T"), Term::param("a"))
        );
        assert_eq!(
            parse_formula("%F(a)").unwrap(),
            Formula::PredParam("F".into(), vec![Term::param("a")])
        );
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_formula("P(x)").unwrap_err();
        assert!(
            matches!(e, ParseError::FreeVariable { span, .. } if span == SourceSpan::new(2, 3))
        );
        assert!(matches!(
            parse_formula("all a. P(a)").unwrap_err(),
            ParseError::NamespaceClash { .. }
        ));
        let e = parse_formula("p & ").unwrap_err();
        assert!(e.span().end <= 4);
        assert!(parse_formula("p q").is_err());
    }

    #[test]
    fn print_roundtrips() {
        for src in [
            "p & q -> _|_",
            "(p -> q) -> r",
            "p & (q | r)",
            "(p | q) | r",
            "p | (q | r)",
            "all x. ex y. R(x,f(y)) -> T",
            "(all x. P(x)) & q",
            "p -> all x. P(x)",
            "(ex x. P(x)) -> p",
            "a = b & f(c) = C0",
            "%F(a) -> %F(b)",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn pretty_is_minimal() {
        let f = parse_formula("((p & q) -> (r | s))").unwrap();
        assert_eq!(print_formula(&f, Style::Pretty), "p & q -> r | s");
        assert_eq!(print_formula(&f, Style::Canonical), "((p & q) -> (r | s))");
    }

    #[test]
    fn pattern_parsing() {
        let pat = parse_pattern("R(x,a)", "x").unwrap();
        assert_eq!(
            pat.apply(&Term::param("b")),
            parse_formula("R(b,a)").unwrap()
        );
        assert!(parse_pattern("P(x) & q", "x").is_err());
    }
}
