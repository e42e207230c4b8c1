//! Text format for Lie algebras and named forms.
//!
//! ```text
//! algebra {
//!   dim 7
//!   d e5 = e12
//!   d e6 = e13
//! }
//!
//! form phi {
//!   e123 + e147 + e156 + e245 + e267 - e346 + e357
//! }
//! ```
//!
//! Monomials are written `e` followed by one digit per basis label (so the
//! dimension is at most 9). Labels that are not increasing are sorted and the
//! permutation sign is absorbed into the coefficient. Coefficients accept
//! integers, decimals, fractions `a/b`, `sqrt(n)` optionally divided by a
//! number, and products of those joined by `*`. `#` starts a comment.

use std::fmt;

use crate::exterior::KForm;
use crate::liealg::LieAlgebra;

/// Largest dimension expressible with single-digit basis labels.
pub const MAX_INPUT_DIM: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// A parsed input file: an algebra and an ordered list of named forms.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub dim: usize,
    /// `differentials[i]` is `d e^{i+1}`.
    pub differentials: Vec<KForm>,
    pub forms: Vec<(String, KForm)>,
}

impl InputDocument {
    pub fn algebra(&self) -> crate::Result<LieAlgebra> {
        LieAlgebra::new(self.differentials.clone())
    }

    pub fn form(&self, name: &str) -> Option<&KForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn from_algebra(algebra: &LieAlgebra, forms: Vec<(String, KForm)>) -> Self {
        InputDocument {
            dim: algebra.dim(),
            differentials: algebra.differentials().to_vec(),
            forms,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Mono(Vec<usize>),
    Number(f64),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("'{w}'"),
        Tok::Mono(l) => format!(
            "monomial 'e{}'",
            l.iter().map(|d| d.to_string()).collect::<String>()
        ),
        Tok::Number(x) => format!("number {x}"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Eof => "end of input".into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let value = text
                .parse::<f64>()
                .map_err(|_| err(start_line, start_col, format!("malformed number '{text}'")))?;
            out.push(Token {
                tok: Tok::Number(value),
                line: start_line,
                col: start_col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.strip_prefix('e') {
                Some(digits)
                    if !digits.is_empty() && digits.chars().all(|d| d.is_ascii_digit()) =>
                {
                    Tok::Mono(digits.chars().map(|d| d as usize - '0' as usize).collect())
                }
                _ => Tok::Word(word),
            };
            out.push(Token {
                tok,
                line: start_line,
                col: start_col,
            });
            continue;
        }
        if "{}=+-*/()".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line,
                col,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(err(line, col, format!("unexpected character '{c}'")));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.error_at(&t, format!("expected '{c}', found {}", describe(&t.tok))))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(x) if x == w => Ok(()),
            other => Err(self.error_at(&t, format!("expected '{w}', found {}", describe(other)))),
        }
    }

    fn expect_int(&mut self) -> Result<usize, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Number(x) if x.fract() == 0.0 && x >= 0.0 => Ok(x as usize),
            ref other => {
                Err(self.error_at(&t, format!("expected integer, found {}", describe(other))))
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Number(x) => Ok(x),
            ref other => {
                Err(self.error_at(&t, format!("expected number, found {}", describe(other))))
            }
        }
    }

    /// `number ['/' number] | sqrt '(' INT ')' ['/' number]`
    fn factor(&mut self) -> Result<f64, ParseError> {
        let t = self.peek().clone();
        let mut value = match &t.tok {
            Tok::Number(_) => self.number()?,
            Tok::Word(w) if w == "sqrt" => {
                self.next();
                self.expect_sym('(')?;
                let n = self.expect_int()?;
                self.expect_sym(')')?;
                (n as f64).sqrt()
            }
            other => {
                return Err(self.error_at(
                    &t,
                    format!("expected coefficient, found {}", describe(other)),
                ))
            }
        };
        if self.peek().tok == Tok::Sym('/') {
            let slash = self.next();
            let den = self.number()?;
            if den == 0.0 {
                return Err(self.error_at(&slash, "division by zero"));
            }
            value /= den;
        }
        Ok(value)
    }

    /// `coeff? MONO`, returning the coefficient and the labels.
    fn term(&mut self) -> Result<(f64, Vec<usize>, Token), ParseError> {
        let mut coeff = 1.0;
        if !matches!(self.peek().tok, Tok::Mono(_)) {
            coeff = self.factor()?;
            while self.peek().tok == Tok::Sym('*') {
                self.next();
                if matches!(self.peek().tok, Tok::Mono(_)) {
                    break;
                }
                coeff *= self.factor()?;
            }
        }
        let t = self.next();
        match t.tok {
            Tok::Mono(ref labels) => Ok((coeff, labels.clone(), t.clone())),
            ref other => {
                Err(self.error_at(&t, format!("expected monomial, found {}", describe(other))))
            }
        }
    }

    fn expr(&mut self, dim: usize, degree: Option<usize>) -> Result<KForm, ParseError> {
        let mut sign = 1.0;
        match self.peek().tok {
            Tok::Sym('-') => {
                self.next();
                sign = -1.0;
            }
            Tok::Sym('+') => {
                self.next();
            }
            _ => {}
        }
        let mut terms: Vec<(f64, Vec<usize>, Token)> = Vec::new();
        loop {
            let (c, labels, at) = self.term()?;
            terms.push((sign * c, labels, at));
            match self.peek().tok {
                Tok::Sym('+') => sign = 1.0,
                Tok::Sym('-') => sign = -1.0,
                _ => break,
            }
            self.next();
        }
        let degree = degree.unwrap_or(terms[0].1.len());
        let mut form = KForm::zero(dim, degree);
        for (c, labels, at) in terms {
            if labels.len() != degree {
                return Err(self.error_at(
                    &at,
                    format!(
                        "monomial of degree {} in a degree-{degree} expression",
                        labels.len()
                    ),
                ));
            }
            let mono = KForm::basis(dim, &labels).map_err(|e| self.error_at(&at, e.to_string()))?;
            form = form.add_scaled(c, &mono).expect("same shape");
        }
        Ok(form)
    }

    fn document(&mut self) -> Result<InputDocument, ParseError> {
        self.expect_word("algebra")?;
        self.expect_sym('{')?;
        self.expect_word("dim")?;
        let dim_tok = self.peek().clone();
        let dim = self.expect_int()?;
        if dim == 0 || dim > MAX_INPUT_DIM {
            return Err(self.error_at(
                &dim_tok,
                format!("dimension must be in 1..={MAX_INPUT_DIM}"),
            ));
        }
        let mut differentials: Vec<Option<KForm>> = vec![None; dim];
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Sym('}') => break,
                Tok::Word(w) if w == "d" => {
                    let target = self.next();
                    let label = match &target.tok {
                        Tok::Mono(l) if l.len() == 1 => l[0],
                        other => {
                            return Err(self.error_at(
                                &target,
                                format!(
                                    "expected a basis covector after 'd', found {}",
                                    describe(other)
                                ),
                            ))
                        }
                    };
                    if label == 0 || label > dim {
                        return Err(self.error_at(
                            &target,
                            format!("basis index {label} out of range 1..={dim}"),
                        ));
                    }
                    if differentials[label - 1].is_some() {
                        return Err(self.error_at(&target, format!("d e{label} given twice")));
                    }
                    self.expect_sym('=')?;
                    let is_zero = matches!(self.peek().tok, Tok::Number(x) if x == 0.0)
                        && !matches!(
                            self.peek_at(1),
                            Tok::Mono(_) | Tok::Sym('*') | Tok::Sym('/')
                        );
                    let de = if is_zero {
                        self.next();
                        KForm::zero(dim, 2)
                    } else {
                        self.expr(dim, Some(2))?
                    };
                    differentials[label - 1] = Some(de);
                }
                other => {
                    return Err(self.error_at(
                        &t,
                        format!("expected 'd' or '}}', found {}", describe(other)),
                    ))
                }
            }
        }
        let differentials = differentials
            .into_iter()
            .map(|d| d.unwrap_or_else(|| KForm::zero(dim, 2)))
            .collect();
        let mut forms: Vec<(String, KForm)> = Vec::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Eof => break,
                Tok::Word(w) if w == "form" => {
                    let name_tok = self.next();
                    let name = match &name_tok.tok {
                        Tok::Word(n) if !is_keyword(n) => n.clone(),
                        other => {
                            return Err(self.error_at(
                                &name_tok,
                                format!("expected form name, found {}", describe(other)),
                            ))
                        }
                    };
                    if forms.iter().any(|(n, _)| *n == name) {
                        return Err(
                            self.error_at(&name_tok, format!("form '{name}' defined twice"))
                        );
                    }
                    self.expect_sym('{')?;
                    let f = self.expr(dim, None)?;
                    self.expect_sym('}')?;
                    forms.push((name, f));
                }
                other => {
                    return Err(
                        self.error_at(&t, format!("expected 'form', found {}", describe(other)))
                    )
                }
            }
        }
        Ok(InputDocument {
            dim,
            differentials,
            forms,
        })
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "algebra" | "dim" | "d" | "form" | "sqrt")
}

/// Parses a document.
pub fn parse(src: &str) -> Result<InputDocument, ParseError> {
    let toks = tokenize(src)?;
    Parser { toks, pos: 0 }.document()
}

/// Writes an expression in the canonical input syntax (lexicographic terms,
/// shortest round-trip decimal coefficients).
pub fn format_expr(f: &KForm) -> String {
    let mut out = String::new();
    for (idx, c) in f.terms() {
        let mag = c.abs();
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        if mag != 1.0 {
            out.push_str(&format!("{mag} "));
        }
        out.push_str(&idx.to_string());
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Canonical text for a document; `parse(&format_document(d)) == d`.
pub fn format_document(doc: &InputDocument) -> String {
    let mut out = format!("algebra {{\n  dim {}\n", doc.dim);
    for (i, de) in doc.differentials.iter().enumerate() {
        if de.terms().next().is_some() {
            out.push_str(&format!("  d e{} = {}\n", i + 1, format_expr(de)));
        }
    }
    out.push_str("}\n");
    for (name, f) in &doc.forms {
        out.push_str(&format!("\nform {name} {{\n  {}\n}}\n", format_expr(f)));
    }
    out
}
