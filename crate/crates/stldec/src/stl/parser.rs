//! Hand-rolled lexer and recursive-descent parser for the formula syntax.
//!
//! Grammar, loosest to tightest binding: `U`, then `|`, then `&`, then the
//! prefix operators `!`/`G`/`F`, then parenthesized formulas and atomic
//! predicates. `&` and `|` associate left, `U` associates right and always
//! takes a window. Predicates are `term (+ term)* rel number` where a term is
//! `number * ident` or a bare `ident`.

use super::{BuildError, Formula, Interval, Predicate, Relation};

/// Parse failure with the source position that triggered it (1-based).
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}, column {col}: unknown operator '{text}'")]
    UnknownOperator { text: String, line: usize, col: usize },
    #[error("line {line}, column {col}: expected {expected}, found '{found}'")]
    Unexpected {
        expected: &'static str,
        found: String,
        line: usize,
        col: usize,
    },
    #[error("unexpected end of input: expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("line {line}, column {col}: malformed interval [{lo},{hi}]: upper bound below lower bound")]
    MalformedInterval { lo: usize, hi: usize, line: usize, col: usize },
    #[error("line {line}, column {col}: {msg}")]
    Invalid { msg: String, line: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    G,
    F,
    U,
    Bang,
    Amp,
    Pipe,
    Star,
    Plus,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Rel(Relation),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Number(s) => s.clone(),
            Tok::G => "G".into(),
            Tok::F => "F".into(),
            Tok::U => "U".into(),
            Tok::Bang => "!".into(),
            Tok::Amp => "&".into(),
            Tok::Pipe => "|".into(),
            Tok::Star => "*".into(),
            Tok::Plus => "+".into(),
            Tok::Comma => ",".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::Rel(r) => r.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '(' => {
                toks.push((Tok::LParen, pos));
                advance(1, &mut i, &mut col);
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                advance(1, &mut i, &mut col);
            }
            '[' => {
                toks.push((Tok::LBracket, pos));
                advance(1, &mut i, &mut col);
            }
            ']' => {
                toks.push((Tok::RBracket, pos));
                advance(1, &mut i, &mut col);
            }
            ',' => {
                toks.push((Tok::Comma, pos));
                advance(1, &mut i, &mut col);
            }
            '!' => {
                toks.push((Tok::Bang, pos));
                advance(1, &mut i, &mut col);
            }
            '&' => {
                toks.push((Tok::Amp, pos));
                advance(1, &mut i, &mut col);
            }
            '|' => {
                toks.push((Tok::Pipe, pos));
                advance(1, &mut i, &mut col);
            }
            '*' => {
                toks.push((Tok::Star, pos));
                advance(1, &mut i, &mut col);
            }
            '+' => {
                toks.push((Tok::Plus, pos));
                advance(1, &mut i, &mut col);
            }
            '>' | '<' => {
                let strict_or_eq = chars.get(i + 1) == Some(&'=');
                let rel = match (c, strict_or_eq) {
                    ('>', true) => Relation::Ge,
                    ('>', false) => Relation::Gt,
                    ('<', true) => Relation::Le,
                    ('<', false) => Relation::Lt,
                    _ => unreachable!(),
                };
                toks.push((Tok::Rel(rel), pos));
                advance(if strict_or_eq { 2 } else { 1 }, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let start = i;
                let mut j = i;
                if chars[j] == '-' {
                    j += 1;
                }
                let mut saw_digit = false;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    saw_digit = saw_digit || chars[j].is_ascii_digit();
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') && saw_digit {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '-' || chars[k] == '+') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text: String = chars[start..j].iter().collect();
                if !saw_digit {
                    return Err(ParseError::UnknownOperator { text, line, col });
                }
                let n = j - start;
                toks.push((Tok::Number(text), pos));
                advance(n, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.as_str() {
                    "G" => Tok::G,
                    "F" => Tok::F,
                    "U" => Tok::U,
                    _ => Tok::Ident(word),
                };
                let n = j - start;
                toks.push((tok, pos));
                advance(n, &mut i, &mut col);
            }
            other => {
                return Err(ParseError::UnknownOperator {
                    text: other.to_string(),
                    line,
                    col,
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn next(&mut self, expected: &'static str) -> Result<(Tok, Pos), ParseError> {
        let out = self
            .toks
            .get(self.i)
            .cloned()
            .ok_or(ParseError::UnexpectedEnd { expected })?;
        self.i += 1;
        Ok(out)
    }

    fn expect(&mut self, want: &Tok, expected: &'static str) -> Result<Pos, ParseError> {
        let (tok, pos) = self.next(expected)?;
        if &tok == want {
            Ok(pos)
        } else {
            Err(ParseError::Unexpected {
                expected,
                found: tok.describe(),
                line: pos.line,
                col: pos.col,
            })
        }
    }

    // formula := or_expr ("U" window formula)?   -- U binds loosest
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_expr()?;
        if self.peek() == Some(&Tok::U) {
            self.i += 1;
            let win = self.window()?;
            let rhs = self.formula()?;
            return Ok(Formula::until(win, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut out = self.and_expr()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.i += 1;
            out = Formula::or(out, self.and_expr()?);
        }
        Ok(out)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut out = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.i += 1;
            out = Formula::and(out, self.unary()?);
        }
        Ok(out)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.i += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::G) => {
                self.i += 1;
                let win = self.optional_window()?;
                Ok(Formula::globally(win, self.unary()?))
            }
            Some(Tok::F) => {
                self.i += 1;
                let win = self.optional_window()?;
                Ok(Formula::eventually(win, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::Ident(_)) | Some(Tok::Number(_)) => self.predicate(),
            Some(other) => {
                let (line, col) = self.here();
                Err(ParseError::Unexpected {
                    expected: "a formula",
                    found: other.describe(),
                    line,
                    col,
                })
            }
            None => Err(ParseError::UnexpectedEnd { expected: "a formula" }),
        }
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.i)
            .map(|(_, p)| (p.line, p.col))
            .unwrap_or((1, 1))
    }

    // pred := term ("+" term)* rel number
    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let (pline, pcol) = self.here();
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.i += 1;
            terms.push(self.term()?);
        }
        let (tok, pos) = self.next("a comparison operator")?;
        let Tok::Rel(rel) = tok else {
            return Err(ParseError::Unexpected {
                expected: "a comparison operator",
                found: tok.describe(),
                line: pos.line,
                col: pos.col,
            });
        };
        let constant = self.number("a constant")?;
        Predicate::new(terms, rel, constant)
            .map(Formula::Pred)
            .map_err(|e| match e {
                BuildError::NoCoefficients => ParseError::Invalid {
                    msg: "predicate has no nonzero coefficient".into(),
                    line: pline,
                    col: pcol,
                },
                other => ParseError::Invalid {
                    msg: other.to_string(),
                    line: pline,
                    col: pcol,
                },
            })
    }

    // term := number "*" ident | ident
    fn term(&mut self) -> Result<(String, f64), ParseError> {
        let (tok, pos) = self.next("a term")?;
        match tok {
            Tok::Ident(ch) => Ok((ch, 1.0)),
            Tok::Number(text) => {
                let coeff = parse_number(&text, pos)?;
                self.expect(&Tok::Star, "'*'")?;
                let (tok, pos) = self.next("a channel name")?;
                let Tok::Ident(ch) = tok else {
                    return Err(ParseError::Unexpected {
                        expected: "a channel name",
                        found: tok.describe(),
                        line: pos.line,
                        col: pos.col,
                    });
                };
                Ok((ch, coeff))
            }
            other => Err(ParseError::Unexpected {
                expected: "a term",
                found: other.describe(),
                line: pos.line,
                col: pos.col,
            }),
        }
    }

    fn number(&mut self, expected: &'static str) -> Result<f64, ParseError> {
        let (tok, pos) = self.next(expected)?;
        let Tok::Number(text) = tok else {
            return Err(ParseError::Unexpected {
                expected,
                found: tok.describe(),
                line: pos.line,
                col: pos.col,
            });
        };
        parse_number(&text, pos)
    }

    fn optional_window(&mut self) -> Result<Option<Interval>, ParseError> {
        if self.peek() == Some(&Tok::LBracket) {
            Ok(Some(self.window()?))
        } else {
            Ok(None)
        }
    }

    // window := "[" int "," int "]"
    fn window(&mut self) -> Result<Interval, ParseError> {
        let open = self.expect(&Tok::LBracket, "'['")?;
        let lo = self.step_bound()?;
        self.expect(&Tok::Comma, "','")?;
        let hi = self.step_bound()?;
        self.expect(&Tok::RBracket, "']'")?;
        Interval::new(lo, hi).map_err(|_| ParseError::MalformedInterval {
            lo,
            hi,
            line: open.line,
            col: open.col,
        })
    }

    fn step_bound(&mut self) -> Result<usize, ParseError> {
        let (tok, pos) = self.next("a step bound")?;
        let Tok::Number(text) = tok else {
            return Err(ParseError::Unexpected {
                expected: "a step bound",
                found: tok.describe(),
                line: pos.line,
                col: pos.col,
            });
        };
        text.parse::<usize>().map_err(|_| ParseError::Invalid {
            msg: format!("step bound must be a nonnegative integer, got '{}'", text),
            line: pos.line,
            col: pos.col,
        })
    }
}

fn parse_number(text: &str, pos: Pos) -> Result<f64, ParseError> {
    text.parse::<f64>().map_err(|_| ParseError::Invalid {
        msg: format!("malformed number '{}'", text),
        line: pos.line,
        col: pos.col,
    })
}

/// Parses the concrete syntax into a [`Formula`].
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0 };
    let f = p.formula()?;
    if let Some((tok, pos)) = p.toks.get(p.i) {
        return Err(ParseError::Unexpected {
            expected: "end of input",
            found: tok.describe(),
            line: pos.line,
            col: pos.col,
        });
    }
    Ok(f)
}
