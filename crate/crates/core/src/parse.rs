//! Text form of operator expressions: lexer, recursive-descent parser, and
//! lowering to normal-ordered [`OperatorExpr`] values.
//!
//! Grammar (whitespace insensitive):
//!
//!   expr   := ['-'] term (('+' | '-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ['^' ['-'] integer]
//!   atom   := number | 'i' | symbol | '(' expr ')'
//!           | '[' expr ',' expr ']'        commutator
//!           | '{' expr ',' expr '}'        anticommutator
//!
//! Numbers are exact: "7", "3/4", "0.75" all lower to rationals. Negative
//! exponents are only accepted directly above position symbols. The
//! canonical `Display` form of every expression parses back to the same
//! normal form.

use crate::error::WeylError;
use crate::param::rational_from_str;
use crate::scalar::GaussianRational;
use crate::weyl::OperatorExpr;
use num::rational::BigRational;
use num::ToPrimitive;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    BadNumber,
    UnexpectedToken(String),
    UnexpectedEnd,
    UnbalancedBracket(char),
    NegativeMomentumPower,
    InvalidNegativePower,
    UnknownSymbol(String),
    ExponentOverflow,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            Self::BadNumber => write!(f, "malformed number literal"),
            Self::UnexpectedToken(t) => write!(f, "unexpected token {t}"),
            Self::UnexpectedEnd => write!(f, "unexpected end of input"),
            Self::UnbalancedBracket(c) => write!(f, "unbalanced bracket, expected {c:?}"),
            Self::NegativeMomentumPower => {
                write!(f, "negative powers of momentum operators are not defined")
            }
            Self::InvalidNegativePower => {
                write!(f, "negative exponents are only allowed on position symbols")
            }
            Self::UnknownSymbol(s) => write!(f, "unknown symbol {s}"),
            Self::ExponentOverflow => write!(f, "exponent out of range"),
        }
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

/// Parse or lowering failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] WeylError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push(Spanned {
                    tok: Tok::Plus,
                    pos,
                });
                i += 1;
            }
            '-' => {
                out.push(Spanned {
                    tok: Tok::Minus,
                    pos,
                });
                i += 1;
            }
            '*' => {
                out.push(Spanned {
                    tok: Tok::Star,
                    pos,
                });
                i += 1;
            }
            '^' => {
                out.push(Spanned {
                    tok: Tok::Caret,
                    pos,
                });
                i += 1;
            }
            '(' => {
                out.push(Spanned {
                    tok: Tok::LParen,
                    pos,
                });
                i += 1;
            }
            ')' => {
                out.push(Spanned {
                    tok: Tok::RParen,
                    pos,
                });
                i += 1;
            }
            '[' => {
                out.push(Spanned {
                    tok: Tok::LBrack,
                    pos,
                });
                i += 1;
            }
            ']' => {
                out.push(Spanned {
                    tok: Tok::RBrack,
                    pos,
                });
                i += 1;
            }
            '{' => {
                out.push(Spanned {
                    tok: Tok::LBrace,
                    pos,
                });
                i += 1;
            }
            '}' => {
                out.push(Spanned {
                    tok: Tok::RBrace,
                    pos,
                });
                i += 1;
            }
            ',' => {
                out.push(Spanned {
                    tok: Tok::Comma,
                    pos,
                });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                // rational "a/b" or decimal "a.b", digits required after
                if i < bytes.len() && (bytes[i] == b'/' || bytes[i] == b'.') {
                    let j = i + 1;
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else if bytes[i] == b'.' {
                        return Err(ParseError {
                            pos: i,
                            kind: ParseErrorKind::BadNumber,
                        });
                    }
                }
                let text = &src[start..i];
                let r = rational_from_str(text).ok_or(ParseError {
                    pos: start,
                    kind: ParseErrorKind::BadNumber,
                })?;
                out.push(Spanned {
                    tok: Tok::Num(r),
                    pos: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            other => {
                return Err(ParseError {
                    pos,
                    kind: ParseErrorKind::UnexpectedChar(other),
                });
            }
        }
    }
    Ok(out)
}

/// Syntax tree; every node carries the byte offset where it started.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    pub kind: ExprKind,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(BigRational),
    ImaginaryUnit,
    Symbol(String),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    /// base, exponent, byte offset of the exponent literal
    Pow(Box<ExprAst>, i32, usize),
    Commutator(Box<ExprAst>, Box<ExprAst>),
    Anticommutator(Box<ExprAst>, Box<ExprAst>),
}

struct Parser<'a> {
    toks: &'a [Spanned],
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.at);
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let pos = self.peek().map(|t| t.pos).unwrap_or(self.end);
        ParseError { pos, kind }
    }

    fn expect(&mut self, want: &Tok, bracket: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if &t.tok == want => {
                self.at += 1;
                Ok(())
            }
            Some(t) => Err(ParseError {
                pos: t.pos,
                kind: ParseErrorKind::UnbalancedBracket(bracket),
            }),
            None => Err(ParseError {
                pos: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let lead_neg = matches!(
            self.peek(),
            Some(Spanned {
                tok: Tok::Minus,
                ..
            })
        );
        let neg_pos = self.peek().map(|t| t.pos).unwrap_or(0);
        if lead_neg {
            self.at += 1;
        }
        let mut lhs = self.term()?;
        if lead_neg {
            lhs = ExprAst {
                kind: ExprKind::Neg(Box::new(lhs)),
                pos: neg_pos,
            };
        }
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Plus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    let pos = lhs.pos;
                    lhs = ExprAst {
                        kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    let pos = lhs.pos;
                    lhs = ExprAst {
                        kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Star, .. })) {
            self.at += 1;
            let rhs = self.factor()?;
            let pos = lhs.pos;
            lhs = ExprAst {
                kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if !matches!(
            self.peek(),
            Some(Spanned {
                tok: Tok::Caret,
                ..
            })
        ) {
            return Ok(base);
        }
        self.at += 1;
        let exp_pos = self.peek().map(|t| t.pos).unwrap_or(self.end);
        let neg = matches!(
            self.peek(),
            Some(Spanned {
                tok: Tok::Minus,
                ..
            })
        );
        if neg {
            self.at += 1;
        }
        let exp = match self.next() {
            Some(Spanned {
                tok: Tok::Num(r),
                pos,
            }) => {
                if !r.is_integer() {
                    return Err(ParseError {
                        pos: *pos,
                        kind: ParseErrorKind::UnexpectedToken("fractional exponent".into()),
                    });
                }
                r.to_integer().to_i32().ok_or(ParseError {
                    pos: *pos,
                    kind: ParseErrorKind::ExponentOverflow,
                })?
            }
            Some(t) => {
                return Err(ParseError {
                    pos: t.pos,
                    kind: ParseErrorKind::UnexpectedToken(format!("{:?}", t.tok)),
                })
            }
            None => {
                return Err(ParseError {
                    pos: self.end,
                    kind: ParseErrorKind::UnexpectedEnd,
                })
            }
        };
        let exp = if neg { -exp } else { exp };
        let pos = base.pos;
        Ok(ExprAst {
            kind: ExprKind::Pow(Box::new(base), exp, exp_pos),
            pos,
        })
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.err_here(ParseErrorKind::UnexpectedEnd)),
        };
        match t.tok {
            Tok::Num(r) => {
                self.at += 1;
                Ok(ExprAst {
                    kind: ExprKind::Number(r),
                    pos: t.pos,
                })
            }
            Tok::Ident(name) => {
                self.at += 1;
                if name == "i" {
                    Ok(ExprAst {
                        kind: ExprKind::ImaginaryUnit,
                        pos: t.pos,
                    })
                } else {
                    Ok(ExprAst {
                        kind: ExprKind::Symbol(name),
                        pos: t.pos,
                    })
                }
            }
            Tok::LParen => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(&Tok::RParen, ')')?;
                Ok(inner)
            }
            Tok::LBrack => {
                self.at += 1;
                let a = self.expr()?;
                self.expect(&Tok::Comma, ',')?;
                let b = self.expr()?;
                self.expect(&Tok::RBrack, ']')?;
                Ok(ExprAst {
                    kind: ExprKind::Commutator(Box::new(a), Box::new(b)),
                    pos: t.pos,
                })
            }
            Tok::LBrace => {
                self.at += 1;
                let a = self.expr()?;
                self.expect(&Tok::Comma, ',')?;
                let b = self.expr()?;
                self.expect(&Tok::RBrace, '}')?;
                Ok(ExprAst {
                    kind: ExprKind::Anticommutator(Box::new(a), Box::new(b)),
                    pos: t.pos,
                })
            }
            other => Err(ParseError {
                pos: t.pos,
                kind: ParseErrorKind::UnexpectedToken(format!("{other:?}")),
            }),
        }
    }
}

/// Parses source text to a syntax tree. Symbol names are not interpreted.
pub fn parse(src: &str) -> Result<ExprAst, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        end: src.len(),
    };
    let ast = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError {
            pos: t.pos,
            kind: ParseErrorKind::UnexpectedToken(format!("{:?}", t.tok)),
        });
    }
    Ok(ast)
}

/// Role a symbol plays when lowering; governs negative-exponent legality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolClass {
    Position(usize),
    Momentum(usize),
    Param(usize),
    /// Anything defined as a composite expression (model generators).
    Derived,
}

#[derive(Debug, Clone)]
pub struct ResolvedSymbol {
    pub class: SymbolClass,
    pub expr: OperatorExpr,
}

/// The fixed symbol set of the CLI expression language.
pub fn standard_symbols(name: &str) -> Option<ResolvedSymbol> {
    let (head, idx) = name.split_at(1);
    let idx: usize = idx.parse().ok()?;
    match head {
        "x" if (1..=3).contains(&idx) => Some(ResolvedSymbol {
            class: SymbolClass::Position(idx - 1),
            expr: OperatorExpr::position(idx - 1),
        }),
        "p" if (1..=3).contains(&idx) => Some(ResolvedSymbol {
            class: SymbolClass::Momentum(idx - 1),
            expr: OperatorExpr::momentum(idx - 1),
        }),
        "c" if (1..=4).contains(&idx) => Some(ResolvedSymbol {
            class: SymbolClass::Param(idx - 1),
            expr: OperatorExpr::param(idx - 1),
        }),
        _ => None,
    }
}

/// Lowers a tree to a normal-ordered expression through a symbol resolver.
pub fn lower_with(
    ast: &ExprAst,
    resolve: &dyn Fn(&str) -> Option<ResolvedSymbol>,
) -> Result<OperatorExpr, ExprError> {
    match &ast.kind {
        ExprKind::Number(r) => Ok(OperatorExpr::scalar(GaussianRational::from_real(r.clone()))),
        ExprKind::ImaginaryUnit => Ok(OperatorExpr::scalar(GaussianRational::i())),
        ExprKind::Symbol(name) => {
            let sym = resolve(name).ok_or(ParseError {
                pos: ast.pos,
                kind: ParseErrorKind::UnknownSymbol(name.clone()),
            })?;
            Ok(sym.expr)
        }
        ExprKind::Neg(a) => Ok(lower_with(a, resolve)?.neg()),
        ExprKind::Add(a, b) => Ok(lower_with(a, resolve)?.add(&lower_with(b, resolve)?)),
        ExprKind::Sub(a, b) => Ok(lower_with(a, resolve)?.sub(&lower_with(b, resolve)?)),
        ExprKind::Mul(a, b) => Ok(lower_with(a, resolve)?.checked_mul(&lower_with(b, resolve)?)?),
        ExprKind::Pow(base, exp, exp_pos) => {
            if *exp < 0 {
                // only position symbols support Laurent powers
                if let ExprKind::Symbol(name) = &base.kind {
                    let sym = resolve(name).ok_or(ParseError {
                        pos: base.pos,
                        kind: ParseErrorKind::UnknownSymbol(name.clone()),
                    })?;
                    match sym.class {
                        SymbolClass::Position(j) => {
                            return Ok(OperatorExpr::position_pow(j, *exp));
                        }
                        SymbolClass::Momentum(_) => {
                            return Err(ParseError {
                                pos: *exp_pos,
                                kind: ParseErrorKind::NegativeMomentumPower,
                            }
                            .into());
                        }
                        _ => {
                            return Err(ParseError {
                                pos: *exp_pos,
                                kind: ParseErrorKind::InvalidNegativePower,
                            }
                            .into());
                        }
                    }
                }
                return Err(ParseError {
                    pos: *exp_pos,
                    kind: ParseErrorKind::InvalidNegativePower,
                }
                .into());
            }
            let b = lower_with(base, resolve)?;
            Ok(b.checked_pow(*exp as u32)?)
        }
        ExprKind::Commutator(a, b) => {
            Ok(lower_with(a, resolve)?.commutator(&lower_with(b, resolve)?)?)
        }
        ExprKind::Anticommutator(a, b) => {
            Ok(lower_with(a, resolve)?.anticommutator(&lower_with(b, resolve)?)?)
        }
    }
}

/// Walks the tree rejecting unknown symbols and ill-placed negative powers,
/// without lowering. Gives the CLI precise error positions cheaply.
fn validate_standard(ast: &ExprAst) -> Result<(), ParseError> {
    match &ast.kind {
        ExprKind::Number(_) | ExprKind::ImaginaryUnit => Ok(()),
        ExprKind::Symbol(name) => {
            if standard_symbols(name).is_some() {
                Ok(())
            } else {
                Err(ParseError {
                    pos: ast.pos,
                    kind: ParseErrorKind::UnknownSymbol(name.clone()),
                })
            }
        }
        ExprKind::Neg(a) => validate_standard(a),
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
            validate_standard(a)?;
            validate_standard(b)
        }
        ExprKind::Pow(base, exp, exp_pos) => {
            validate_standard(base)?;
            if *exp < 0 {
                match &base.kind {
                    ExprKind::Symbol(name) => match standard_symbols(name).map(|s| s.class) {
                        Some(SymbolClass::Position(_)) => Ok(()),
                        Some(SymbolClass::Momentum(_)) => Err(ParseError {
                            pos: *exp_pos,
                            kind: ParseErrorKind::NegativeMomentumPower,
                        }),
                        _ => Err(ParseError {
                            pos: *exp_pos,
                            kind: ParseErrorKind::InvalidNegativePower,
                        }),
                    },
                    _ => Err(ParseError {
                        pos: *exp_pos,
                        kind: ParseErrorKind::InvalidNegativePower,
                    }),
                }
            } else {
                Ok(())
            }
        }
        ExprKind::Commutator(a, b) | ExprKind::Anticommutator(a, b) => {
            validate_standard(a)?;
            validate_standard(b)
        }
    }
}

/// Parses and validates against the standard symbol set (x1..x3, p1..p3,
/// c1..c4, i) without lowering.
pub fn parse_operator(src: &str) -> Result<ExprAst, ParseError> {
    let ast = parse(src)?;
    validate_standard(&ast)?;
    Ok(ast)
}

/// Parses and lowers using the standard symbol set.
pub fn parse_and_lower(src: &str) -> Result<OperatorExpr, ExprError> {
    let ast = parse_operator(src)?;
    lower_with(&ast, &standard_symbols)
}
