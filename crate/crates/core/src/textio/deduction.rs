use super::formula::{
    is_param_name, parse_formula, parse_pattern, parse_term, print_formula, Style,
};
use super::{ParseError, SourceSpan};
use crate::deduction::{ClassId, Deduction, Rule, RuleTag, StructureError};
use crate::formula::{Formula, Term};

#[derive(Debug, Clone)]
enum Sexp {
    List(Vec<Sexp>, SourceSpan),
    Symbol(String, SourceSpan),
    Str(String, SourceSpan),
}

impl Sexp {
    fn span(&self) -> SourceSpan {
        match self {
            Sexp::List(_, s) | Sexp::Symbol(_, s) | Sexp::Str(_, s) => *s,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn syntax(&self, message: &str, start: usize) -> ParseError {
        ParseError::Syntax {
            message: message.to_string(),
            span: SourceSpan::new(start, self.pos.max(start)),
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        match bytes.get(self.pos) {
            None => Err(self.syntax("unexpected end of input", start)),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match bytes.get(self.pos) {
                        None => return Err(self.syntax("unclosed `(`", start)),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, SourceSpan::new(start, self.pos)));
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => {
                self.pos += 1;
                Err(self.syntax("unbalanced `)`", start))
            }
            Some(b'"') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    let Some(c) = self.src[self.pos..].chars().next() else {
                        return Err(self.syntax("unterminated string", start));
                    };
                    self.pos += c.len_utf8();
                    match c {
                        '"' => return Ok(Sexp::Str(out, SourceSpan::new(start, self.pos))),
                        '\\' => {
                            let Some(e) = self.src[self.pos..].chars().next() else {
                                return Err(self.syntax("unterminated string", start));
                            };
                            self.pos += e.len_utf8();
                            out.push(e);
                        }
                        c => out.push(c),
                    }
                }
            }
            Some(_) => {
                while let Some(&b) = bytes.get(self.pos) {
                    if b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b'"' || b == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                Ok(Sexp::Symbol(
                    self.src[start..self.pos].to_string(),
                    SourceSpan::new(start, self.pos),
                ))
            }
        }
    }
}

fn structure(message: impl Into<String>, span: SourceSpan) -> ParseError {
    ParseError::Structure {
        message: message.into(),
        span,
    }
}

fn string_arg(
    item: Option<&Sexp>,
    what: &str,
    span: SourceSpan,
) -> Result<(String, SourceSpan), ParseError> {
    match item {
        Some(Sexp::Str(s, sp)) => Ok((s.clone(), *sp)),
        Some(other) => Err(structure(format!("expected quoted {what}"), other.span())),
        None => Err(structure(format!("missing {what}"), span)),
    }
}

fn symbol_arg(
    item: Option<&Sexp>,
    what: &str,
    span: SourceSpan,
) -> Result<(String, SourceSpan), ParseError> {
    match item {
        Some(Sexp::Symbol(s, sp)) => Ok((s.clone(), *sp)),
        Some(other) => Err(structure(format!("expected {what}"), other.span())),
        None => Err(structure(format!("missing {what}"), span)),
    }
}

fn formula_in(text: &str, span: SourceSpan) -> Result<Formula, ParseError> {
    parse_formula(text).map_err(|e| e.shifted(span.start + 1))
}

fn term_in(text: &str, span: SourceSpan) -> Result<Term, ParseError> {
    parse_term(text).map_err(|e| e.shifted(span.start + 1))
}

fn class_id(s: &str, span: SourceSpan) -> Result<ClassId, ParseError> {
    s.parse()
        .map_err(|_| structure(format!("`{s}` is not a class id"), span))
}

#[derive(Default)]
struct Options {
    dis: Vec<ClassId>,
    witness: Option<Term>,
    target: Option<Formula>,
    eigen: Option<String>,
    pat: Option<crate::formula::PredPattern>,
    concl: Option<Formula>,
    pred: Option<String>,
    terms: Option<(Term, Term)>,
}

fn node(sexp: &Sexp) -> Result<Deduction, ParseError> {
    let Sexp::List(items, span) = sexp else {
        return Err(structure("expected a parenthesized node", sexp.span()));
    };
    let span = *span;
    let (head, head_span) = symbol_arg(items.first(), "rule head", span)?;
    let tag = RuleTag::from_head(&head).ok_or(ParseError::UnknownRule {
        head: head.clone(),
        span: head_span,
    })?;
    if tag == RuleTag::Assumption {
        let (id, id_span) = symbol_arg(items.get(1), "class id", span)?;
        let (text, text_span) = string_arg(items.get(2), "formula", span)?;
        if items.len() > 3 {
            return Err(structure(
                "assumption takes a class id and a formula",
                items[3].span(),
            ));
        }
        return Ok(Deduction::leaf(
            class_id(&id, id_span)?,
            formula_in(&text, text_span)?,
        ));
    }
    let mut premises = Vec::new();
    let mut opts = Options::default();
    let mut i = 1;
    while let Some(Sexp::List(..)) = items.get(i) {
        premises.push(node(&items[i])?);
        i += 1;
    }
    while i < items.len() {
        let item = &items[i];
        i += 1;
        match item {
            Sexp::Str(text, sp) if tag == RuleTag::BotE && opts.concl.is_none() => {
                opts.concl = Some(formula_in(text, *sp)?);
            }
            Sexp::Symbol(key, sp) if key.starts_with(':') => match key.as_str() {
                ":dis" => {
                    while let Some(Sexp::Symbol(s, sp)) = items.get(i) {
                        if s.starts_with(':') {
                            break;
                        }
                        opts.dis.push(class_id(s, *sp)?);
                        i += 1;
                    }
                }
                ":witness" => {
                    let (t, tsp) = string_arg(items.get(i), "witness term", *sp)?;
                    opts.witness = Some(term_in(&t, tsp)?);
                    i += 1;
                }
                ":target" => {
                    let (t, tsp) = string_arg(items.get(i), "target formula", *sp)?;
                    opts.target = Some(formula_in(&t, tsp)?);
                    i += 1;
                }
                ":concl" => {
                    let (t, tsp) = string_arg(items.get(i), "conclusion", *sp)?;
                    opts.concl = Some(formula_in(&t, tsp)?);
                    i += 1;
                }
                ":eigen" => {
                    let (a, asp) = symbol_arg(items.get(i), "eigenparameter", *sp)?;
                    if !is_param_name(&a) {
                        return Err(ParseError::NamespaceClash { name: a, span: asp });
                    }
                    opts.eigen = Some(a);
                    i += 1;
                }
                ":pat" => {
                    let (body, bsp) = string_arg(items.get(i), "pattern", *sp)?;
                    let (hole, _) = symbol_arg(items.get(i + 1), "pattern variable", *sp)?;
                    opts.pat =
                        Some(parse_pattern(&body, &hole).map_err(|e| e.shifted(bsp.start + 1))?);
                    i += 2;
                }
                ":pred" => {
                    let (p, _) = symbol_arg(items.get(i), "predicate parameter", *sp)?;
                    opts.pred = Some(p.trim_start_matches('%').to_string());
                    i += 1;
                }
                ":terms" => {
                    let (l, lsp) = string_arg(items.get(i), "left term", *sp)?;
                    let (r, rsp) = string_arg(items.get(i + 1), "right term", *sp)?;
                    opts.terms = Some((term_in(&l, lsp)?, term_in(&r, rsp)?));
                    i += 2;
                }
                other => return Err(structure(format!("unknown option `{other}`"), *sp)),
            },
            other => return Err(structure("unexpected item", other.span())),
        }
    }
    if premises.len() != tag.arity() {
        return Err(structure(
            format!(
                "`{head}` takes {} premises, found {}",
                tag.arity(),
                premises.len()
            ),
            span,
        ));
    }
    let need = tag.discharge_children().len();
    if opts.dis.len() != need {
        return Err(structure(
            format!(
                "`{head}` takes {need} discharge labels, found {}",
                opts.dis.len()
            ),
            span,
        ));
    }
    let missing = |what: &str| structure(format!("`{head}` requires {what}"), span);
    let rule = match tag {
        RuleTag::AndI => Rule::AndI,
        RuleTag::AndE => Rule::AndE,
        RuleTag::ImpI => Rule::ImpI,
        RuleTag::ImpE => Rule::ImpE,
        RuleTag::OrI1 => Rule::OrI1,
        RuleTag::OrI2 => Rule::OrI2,
        RuleTag::OrE => Rule::OrE,
        RuleTag::BotE => Rule::BotE(opts.concl.ok_or_else(|| missing("a conclusion"))?),
        RuleTag::TopI => Rule::TopI,
        RuleTag::ExI => {
            let witness = opts.witness.ok_or_else(|| missing(":witness"))?;
            let target = match opts.target {
                Some(t) => t,
                None => premises[1]
                    .open_leaves()
                    .into_iter()
                    .find(|(_, c, _)| *c == opts.dis[0])
                    .map(|(_, _, f)| f)
                    .ok_or_else(|| missing(":target"))?,
            };
            Rule::ExI { witness, target }
        }
        RuleTag::ExE => Rule::ExE {
            eigen: opts.eigen.ok_or_else(|| missing(":eigen"))?,
        },
        RuleTag::AllI => Rule::AllI {
            eigen: opts.eigen.ok_or_else(|| missing(":eigen"))?,
        },
        RuleTag::AllE => Rule::AllE {
            witness: opts.witness.ok_or_else(|| missing(":witness"))?,
        },
        RuleTag::EqE => Rule::EqE(opts.pat.ok_or_else(|| missing(":pat"))?),
        RuleTag::EqES => Rule::EqES(opts.pat.ok_or_else(|| missing(":pat"))?),
        RuleTag::EqI => Rule::EqI,
        RuleTag::EqIPrime => {
            let (lhs, rhs) = opts.terms.ok_or_else(|| missing(":terms"))?;
            Rule::EqIPrime {
                pred: opts.pred.ok_or_else(|| missing(":pred"))?,
                lhs,
                rhs,
            }
        }
        RuleTag::Assumption => unreachable!(),
    };
    Ok(Deduction::apply(rule, premises, opts.dis))
}

/// Parses one `.ndi` deduction.
pub fn parse_deduction(src: &str) -> Result<Deduction, ParseError> {
    let mut reader = Reader { src, pos: 0 };
    let sexp = reader.read()?;
    reader.skip_ws();
    if reader.pos < src.len() {
        return Err(ParseError::Syntax {
            message: "one deduction per file".into(),
            span: SourceSpan::new(reader.pos, src.len()),
        });
    }
    let d = node(&sexp)?;
    match d.validate_structure() {
        Ok(()) => Ok(d),
        Err(StructureError::DuplicateDischarge { class, .. }) => {
            Err(ParseError::DuplicateDischarge {
                class,
                span: sexp.span(),
            })
        }
        Err(e) => Err(structure(e.to_string(), sexp.span())),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn fmt(f: &Formula) -> String {
    quote(&print_formula(f, Style::Pretty))
}

/// Canonical, byte-deterministic printing: one node per line, two-space
/// indentation, options on the closing line.
pub fn print_deduction(d: &Deduction) -> String {
    let mut out = String::new();
    print_node(d, 0, &mut out);
    out.push('\n');
    out
}

fn print_node(d: &Deduction, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match d {
        Deduction::Assumption { class, formula } => {
            out.push_str(&format!("{pad}(as {class} {})", fmt(formula)));
        }
        Deduction::Apply(inf) => {
            out.push_str(&format!("{pad}({}", inf.rule.tag().head()));
            for c in &inf.premises {
                out.push('\n');
                print_node(c, depth + 1, out);
            }
            let mut opts = Vec::new();
            if !inf.discharges.is_empty() {
                let ids: Vec<String> = inf.discharges.iter().map(|c| c.to_string()).collect();
                opts.push(format!(":dis {}", ids.join(" ")));
            }
            match &inf.rule {
                Rule::BotE(c) => opts.push(format!(":concl {}", fmt(c))),
                Rule::ExI { witness, target } => {
                    opts.push(format!(":witness {}", quote(&witness.to_string())));
                    opts.push(format!(":target {}", fmt(target)));
                }
                Rule::ExE { eigen } | Rule::AllI { eigen } => opts.push(format!(":eigen {eigen}")),
                Rule::AllE { witness } => {
                    opts.push(format!(":witness {}", quote(&witness.to_string())))
                }
                Rule::EqE(p) | Rule::EqES(p) => {
                    opts.push(format!(":pat {} {}", fmt(&p.body), p.hole))
                }
                Rule::EqIPrime { pred, lhs, rhs } => {
                    opts.push(format!(":pred {pred}"));
                    opts.push(format!(
                        ":terms {} {}",
                        quote(&lhs.to_string()),
                        quote(&rhs.to_string())
                    ));
                }
                _ => {}
            }
            out.push('\n');
            out.push_str(&"  ".repeat(depth + 1));
            out.push_str(&opts.join(" "));
            out.push(')');
        }
    }
}
