//! Parser for the knowledge-base language.
//!
//! The language is line oriented: one statement per line, `#` starts a
//! comment. Recovery is per line, so a bad statement produces one diagnostic
//! and parsing continues on the next line.
//!
//! ```text
//! statement := "class" IDENT
//!            | "member" IDENT classterm
//!            | "subset" classterm classterm
//!            | "stat" classterm classterm "[" RAT "," RAT "]"
//!            | "equiv" IDENT sentence
//! classterm := IDENT | "(" "and" classterm+ ")"
//! sentence  := IDENT | "(" "member" IDENT classterm ")"
//! RAT       := decimal literal | integer | numerator "/" denominator
//! ```

use crate::interval::Interval;
use crate::kb::{
    Diagnostic, DiagnosticKind, KbDocument, KnowledgeBase, Sentence, Span, Statement,
    ValidateOptions,
};
use crate::rational::parse_rational;
use crate::term::ClassTerm;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Number(s) => format!("number '{s}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
    }
}

fn lex_line(line: &str, line_no: u32, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = (i + 1) as u32;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token { tok: Tok::LParen, span: Span::new(line_no, col) });
            }
            ')' => {
                chars.next();
                tokens.push(Token { tok: Tok::RParen, span: Span::new(line_no, col) });
            }
            '[' => {
                chars.next();
                tokens.push(Token { tok: Tok::LBracket, span: Span::new(line_no, col) });
            }
            ']' => {
                chars.next();
                tokens.push(Token { tok: Tok::RBracket, span: Span::new(line_no, col) });
            }
            ',' => {
                chars.next();
                tokens.push(Token { tok: Tok::Comma, span: Span::new(line_no, col) });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Ident(word), span: Span::new(line_no, col) });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' || c == '/' {
                        text.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Number(text), span: Span::new(line_no, col) });
            }
            other => {
                diags.push(Diagnostic::new(
                    Span::new(line_no, col),
                    DiagnosticKind::Lexical,
                    format!("unexpected character '{other}'"),
                ));
                chars.next();
            }
        }
    }
    tokens
}

struct LineParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line_end: Span,
}

impl<'a> LineParser<'a> {
    fn new(tokens: &'a [Token], line_no: u32, line_len: usize) -> LineParser<'a> {
        LineParser { tokens, pos: 0, line_end: Span::new(line_no, (line_len + 1) as u32) }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.line_end)
    }

    fn err(&self, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(span, DiagnosticKind::Syntax, message)
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        let span = self.here();
        match self.next() {
            Some(Token { tok: Tok::Ident(s), .. }) => Ok(s),
            Some(t) => Err(self.err(t.span, format!("expected {what}, found {}", describe(&t.tok)))),
            None => Err(self.err(span, format!("expected {what}, found end of line"))),
        }
    }

    fn expect_tok(&mut self, want: Tok, what: &str) -> Result<Span, Diagnostic> {
        let span = self.here();
        match self.next() {
            Some(t) if t.tok == want => Ok(t.span),
            Some(t) => Err(self.err(t.span, format!("expected {what}, found {}", describe(&t.tok)))),
            None => Err(self.err(span, format!("expected {what}, found end of line"))),
        }
    }

    fn class_term(&mut self) -> Result<ClassTerm, Diagnostic> {
        let span = self.here();
        match self.next() {
            Some(Token { tok: Tok::Ident(name), .. }) => Ok(ClassTerm::prim(name)),
            Some(Token { tok: Tok::LParen, span: paren }) => {
                let keyword = self.expect_ident("'and'")?;
                if keyword != "and" {
                    return Err(self.err(paren, format!("expected 'and', found '{keyword}'")));
                }
                let mut names = Vec::new();
                loop {
                    match self.peek() {
                        Some(Token { tok: Tok::RParen, .. }) => {
                            self.next();
                            break;
                        }
                        Some(_) => {
                            let inner = self.class_term()?;
                            names.extend(inner.names());
                        }
                        None => {
                            return Err(self.err(self.line_end, "unclosed '(' in class term"));
                        }
                    }
                }
                if names.is_empty() {
                    return Err(self.err(paren, "intersection needs at least one class"));
                }
                Ok(ClassTerm::intersect(names))
            }
            Some(t) => Err(self.err(t.span, format!("expected a class term, found {}", describe(&t.tok)))),
            None => Err(self.err(span, "expected a class term, found end of line")),
        }
    }

    fn rational(&mut self) -> Result<crate::rational::Rational, Diagnostic> {
        let span = self.here();
        match self.next() {
            Some(Token { tok: Tok::Number(text), span }) => parse_rational(&text)
                .ok_or_else(|| self.err(span, format!("'{text}' is not a rational number"))),
            Some(t) => Err(self.err(t.span, format!("expected a number, found {}", describe(&t.tok)))),
            None => Err(self.err(span, "expected a number, found end of line")),
        }
    }

    fn interval(&mut self) -> Result<Interval, Diagnostic> {
        let open = self.expect_tok(Tok::LBracket, "'['")?;
        let lo = self.rational()?;
        self.expect_tok(Tok::Comma, "','")?;
        let hi = self.rational()?;
        self.expect_tok(Tok::RBracket, "']'")?;
        Interval::new(lo, hi).map_err(|e| {
            Diagnostic::new(open, DiagnosticKind::InvalidInterval, e.to_string())
        })
    }

    fn sentence(&mut self) -> Result<Sentence, Diagnostic> {
        let span = self.here();
        match self.next() {
            Some(Token { tok: Tok::Ident(name), .. }) => Ok(Sentence::Name(name)),
            Some(Token { tok: Tok::LParen, span: paren }) => {
                let keyword = self.expect_ident("'member'")?;
                if keyword != "member" {
                    return Err(self.err(paren, format!("expected 'member', found '{keyword}'")));
                }
                let individual = self.expect_ident("an individual name")?;
                let class = self.class_term()?;
                self.expect_tok(Tok::RParen, "')'")?;
                Ok(Sentence::Membership { individual, class })
            }
            Some(t) => Err(self.err(t.span, format!("expected a sentence, found {}", describe(&t.tok)))),
            None => Err(self.err(span, "expected a sentence, found end of line")),
        }
    }

    fn finish(&mut self) -> Result<(), Diagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(t) => {
                Err(self.err(t.span, format!("unexpected {} after statement", describe(&t.tok))))
            }
        }
    }

    fn statement(&mut self) -> Result<Statement, Diagnostic> {
        let keyword = self.expect_ident("a statement keyword")?;
        let stmt = match keyword.as_str() {
            "class" => Statement::ClassDecl(self.expect_ident("a class name")?),
            "member" => {
                let individual = self.expect_ident("an individual name")?;
                let class = self.class_term()?;
                Statement::Member { individual, class }
            }
            "subset" => {
                let sub = self.class_term()?;
                let sup = self.class_term()?;
                Statement::Subset { sub, sup }
            }
            "stat" => {
                let class = self.class_term()?;
                let target = self.class_term()?;
                let interval = self.interval()?;
                Statement::Stat { class, target, interval }
            }
            "equiv" => {
                let name = self.expect_ident("a sentence name")?;
                let sentence = self.sentence()?;
                Statement::Equiv { name, sentence }
            }
            other => {
                return Err(self.err(
                    self.tokens[0].span,
                    format!("unknown statement keyword '{other}'"),
                ));
            }
        };
        self.finish()?;
        Ok(stmt)
    }
}

/// Parses source text into a document. Always returns the statements that
/// did parse; diagnostics carry the ones that did not.
pub fn parse_document(text: &str) -> (KbDocument, Vec<Diagnostic>) {
    let mut doc = KbDocument::default();
    let mut diags = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let tokens = lex_line(line, line_no, &mut diags);
        if tokens.is_empty() {
            continue;
        }
        let span = tokens[0].span;
        let mut parser = LineParser::new(&tokens, line_no, line.chars().count());
        match parser.statement() {
            Ok(stmt) => doc.statements.push((stmt, span)),
            Err(d) => diags.push(d),
        }
    }
    diags.sort_by_key(|d| d.span);
    (doc, diags)
}

/// Parses and validates in one step. Diagnostics from both stages come back
/// together, ordered by source position.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    parse_kb_with(text, ValidateOptions::default())
}

pub fn parse_kb_with(
    text: &str,
    options: ValidateOptions,
) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let (doc, mut diags) = parse_document(text);
    match KnowledgeBase::from_document(&doc, options) {
        Ok(kb) if diags.is_empty() => Ok(kb),
        Ok(_) => Err(diags),
        Err(more) => {
            diags.extend(more);
            diags.sort_by_key(|d| d.span);
            Err(diags)
        }
    }
}

/// Parses a query sentence as given on the command line: a sentence name or
/// a literal like `(member m V)`.
pub fn parse_sentence(text: &str) -> Result<Sentence, Diagnostic> {
    let mut diags = Vec::new();
    let tokens = lex_line(text, 1, &mut diags);
    if let Some(d) = diags.into_iter().next() {
        return Err(d);
    }
    if tokens.is_empty() {
        return Err(Diagnostic::new(
            Span::new(1, 1),
            DiagnosticKind::Syntax,
            "empty query sentence",
        ));
    }
    let mut parser = LineParser::new(&tokens, 1, text.chars().count());
    let sentence = parser.sentence()?;
    parser.finish()?;
    Ok(sentence)
}
