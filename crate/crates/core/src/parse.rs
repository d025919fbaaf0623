//! Text input for ring elements, derivations and automorphisms.
//!
//! Grammar (whitespace ignored between tokens):
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := uint | var | '(' expr ')'
//! var    := ('x'|'x_') uint
//! ```
//!
//! Derivation expressions use the same term syntax with exactly one
//! derivation atom `d<i>` / `d_<i>` / `∂<i>` per term; automorphism input
//! is a semicolon-separated list of assignments `x<i> -> expr` covering
//! every variable once.
//!
//! Literal exponents at or above `p`, and products that overflow the
//! truncation `x_i^p = 0`, reduce to zero; the parse result carries a flag
//! recording that nonzero terms were dropped.

use alloc::vec::Vec;

use crate::autgrp::Automorphism;
use crate::error::{Error, Result};
use crate::oring::{RingElt, TruncRing};
use crate::witt::Derivation;

/// Parse result plus the truncation-warning flag.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub truncated: bool,
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Uint(u64),
    Var(usize),
    DAtom(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Arrow,
    Semi,
    Eof,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn read_uint(&mut self) -> u64 {
        let mut v: u64 = 0;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            v = v
                .saturating_mul(10)
                .saturating_add((self.bytes[self.pos] - b'0') as u64);
            self.pos += 1;
        }
        v
    }

    /// Next token with the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let at = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Tok::Eof, at));
        }
        let b = self.bytes[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                if self.pos < self.bytes.len() && self.bytes[self.pos] == b'>' {
                    self.pos += 1;
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b'0'..=b'9' => Tok::Uint(self.read_uint()),
            b'x' | b'd' => {
                self.pos += 1;
                if self.pos < self.bytes.len() && self.bytes[self.pos] == b'_' {
                    self.pos += 1;
                }
                if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_digit() {
                    return Err(Error::Syntax {
                        offset: at,
                        expected: "index after variable letter",
                    });
                }
                let idx = self.read_uint() as usize;
                if b == b'x' {
                    Tok::Var(idx)
                } else {
                    Tok::DAtom(idx)
                }
            }
            _ => {
                // the partial-derivative symbol, UTF-8 encoded
                let rest = &self.bytes[self.pos..];
                if rest.starts_with("\u{2202}".as_bytes()) {
                    self.pos += "\u{2202}".len();
                    if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_digit() {
                        return Err(Error::Syntax {
                            offset: at,
                            expected: "index after derivation symbol",
                        });
                    }
                    Tok::DAtom(self.read_uint() as usize)
                } else {
                    return Err(Error::Syntax {
                        offset: at,
                        expected: "token",
                    });
                }
            }
        };
        Ok((tok, at))
    }
}

struct Parser<'a> {
    ring: &'a TruncRing,
    lexer: Lexer<'a>,
    look: (Tok, usize),
    truncated: bool,
}

const MAX_EXPONENT: u64 = 10_000;

impl<'a> Parser<'a> {
    fn new(ring: &'a TruncRing, text: &'a str) -> Result<Parser<'a>> {
        let mut lexer = Lexer::new(text);
        let look = lexer.next()?;
        Ok(Parser {
            ring,
            lexer,
            look,
            truncated: false,
        })
    }

    fn advance(&mut self) -> Result<(Tok, usize)> {
        let cur = self.look.clone();
        self.look = self.lexer.next()?;
        Ok(cur)
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<usize> {
        let (cur, at) = self.advance()?;
        if cur == tok {
            Ok(at)
        } else {
            Err(Error::Syntax {
                offset: at,
                expected: what,
            })
        }
    }

    fn var_elt(&mut self, idx: usize, at: usize) -> Result<RingElt> {
        if idx == 0 || idx > self.ring.n() {
            return Err(Error::Syntax {
                offset: at,
                expected: "variable index between 1 and n",
            });
        }
        Ok(self.ring.var(idx))
    }

    fn mul(&mut self, a: &RingElt, b: &RingElt) -> RingElt {
        let (out, tr) = self.ring.mul_tracked(a, b);
        self.truncated |= tr;
        out
    }

    fn pow(&mut self, base: &RingElt, e: u64) -> RingElt {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = self.mul(&acc, base);
        }
        acc
    }

    // expr := sign? term (('+'|'-') term)*
    fn expr(&mut self) -> Result<RingElt> {
        let mut negate = false;
        if self.look.0 == Tok::Plus || self.look.0 == Tok::Minus {
            negate = self.look.0 == Tok::Minus;
            self.advance()?;
        }
        let mut acc = self.term()?;
        if negate {
            acc = self.ring.neg(&acc);
        }
        loop {
            match self.look.0 {
                Tok::Plus => {
                    self.advance()?;
                    let t = self.term()?;
                    acc = self.ring.add(&acc, &t);
                }
                Tok::Minus => {
                    self.advance()?;
                    let t = self.term()?;
                    acc = self.ring.sub(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RingElt> {
        let mut acc = self.factor()?;
        while self.look.0 == Tok::Star {
            self.advance()?;
            let f = self.factor()?;
            acc = self.mul(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RingElt> {
        let base = self.base()?;
        if self.look.0 == Tok::Caret {
            self.advance()?;
            let (tok, at) = self.advance()?;
            let Tok::Uint(e) = tok else {
                return Err(Error::Syntax {
                    offset: at,
                    expected: "integer exponent",
                });
            };
            if e > MAX_EXPONENT {
                return Err(Error::Syntax {
                    offset: at,
                    expected: "smaller exponent",
                });
            }
            return Ok(self.pow(&base, e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RingElt> {
        let (tok, at) = self.advance()?;
        match tok {
            Tok::Uint(v) => Ok(self.ring.constant(self.ring.gf().from_u64(v))),
            Tok::Var(idx) => self.var_elt(idx, at),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            _ => Err(Error::Syntax {
                offset: at,
                expected: "number, variable or parenthesis",
            }),
        }
    }

    // one derivation term: factors with exactly one derivation atom
    fn der_term(&mut self) -> Result<Derivation> {
        let mut coeff = self.ring.one();
        let mut atom: Option<usize> = None;
        loop {
            if let (Tok::DAtom(idx), at) = self.look.clone() {
                self.advance()?;
                if idx == 0 || idx > self.ring.n() {
                    return Err(Error::Syntax {
                        offset: at,
                        expected: "derivation index between 1 and n",
                    });
                }
                if atom.is_some() {
                    return Err(Error::Syntax {
                        offset: at,
                        expected: "a single derivation atom per term",
                    });
                }
                if self.look.0 == Tok::Caret {
                    return Err(Error::Syntax {
                        offset: self.look.1,
                        expected: "no exponent on a derivation atom",
                    });
                }
                atom = Some(idx);
            } else {
                let f = self.factor()?;
                coeff = self.mul(&coeff, &f);
            }
            if self.look.0 == Tok::Star {
                self.advance()?;
                continue;
            }
            break;
        }
        let Some(idx) = atom else {
            return Err(Error::Syntax {
                offset: self.look.1,
                expected: "derivation atom in every term",
            });
        };
        let mut d = Derivation::zero(self.ring);
        d.set_image(idx, coeff);
        Ok(d)
    }

    fn der_expr(&mut self) -> Result<Derivation> {
        let mut negate = false;
        if self.look.0 == Tok::Plus || self.look.0 == Tok::Minus {
            negate = self.look.0 == Tok::Minus;
            self.advance()?;
        }
        let mut acc = self.der_term()?;
        if negate {
            acc = acc.neg(self.ring);
        }
        loop {
            match self.look.0 {
                Tok::Plus => {
                    self.advance()?;
                    let t = self.der_term()?;
                    acc = acc.add(self.ring, &t);
                }
                Tok::Minus => {
                    self.advance()?;
                    let t = self.der_term()?;
                    acc = acc.sub(self.ring, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        let (tok, at) = self.advance()?;
        if tok == Tok::Eof {
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: at,
                expected: "end of input",
            })
        }
    }
}

/// Parses a ring element in the expression grammar.
pub fn ring_expr(ring: &TruncRing, text: &str) -> Result<Parsed<RingElt>> {
    let mut parser = Parser::new(ring, text)?;
    let value = parser.expr()?;
    parser.finish()?;
    Ok(Parsed {
        value,
        truncated: parser.truncated,
    })
}

/// Parses a derivation as a sum of `coeff * d<i>` terms.
pub fn derivation_expr(ring: &TruncRing, text: &str) -> Result<Parsed<Derivation>> {
    let mut parser = Parser::new(ring, text)?;
    let value = parser.der_expr()?;
    parser.finish()?;
    Ok(Parsed {
        value,
        truncated: parser.truncated,
    })
}

/// Parses `x1 -> expr; x2 -> expr; ..` and validates the automorphism.
pub fn automorphism_expr(ring: &TruncRing, text: &str) -> Result<Parsed<Automorphism>> {
    let mut parser = Parser::new(ring, text)?;
    let mut images: Vec<Option<RingElt>> = alloc::vec![None; ring.n()];
    loop {
        let (tok, at) = parser.advance()?;
        let Tok::Var(idx) = tok else {
            return Err(Error::Syntax {
                offset: at,
                expected: "variable on the left of an assignment",
            });
        };
        if idx == 0 || idx > ring.n() {
            return Err(Error::Syntax {
                offset: at,
                expected: "variable index between 1 and n",
            });
        }
        if images[idx - 1].is_some() {
            return Err(Error::Syntax {
                offset: at,
                expected: "each variable assigned once",
            });
        }
        parser.expect(Tok::Arrow, "-> after the variable")?;
        images[idx - 1] = Some(parser.expr()?);
        match parser.advance()? {
            (Tok::Semi, _) => continue,
            (Tok::Eof, _) => break,
            (_, at) => {
                return Err(Error::Syntax {
                    offset: at,
                    expected: "semicolon or end of input",
                })
            }
        }
    }
    let mut collected = Vec::with_capacity(ring.n());
    for (i, img) in images.into_iter().enumerate() {
        let Some(img) = img else {
            let _ = i;
            return Err(Error::Syntax {
                offset: text.len(),
                expected: "assignment for every variable",
            });
        };
        collected.push(img);
    }
    let value = Automorphism::new(ring, collected)?;
    Ok(Parsed {
        value,
        truncated: parser.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Gf;

    fn ring(p: u64, n: usize) -> TruncRing {
        TruncRing::new(Gf::new(p, 1).unwrap(), n).unwrap()
    }

    #[test]
    fn ring_expr_examples() {
        let r = ring(5, 1);
        let parsed = ring_expr(&r, "1 + 2*x1^3").unwrap();
        assert!(!parsed.truncated);
        let mut expect = r.one();
        expect = r.add(&expect, &r.monomial(&[3], r.gf().from_u64(2)));
        assert_eq!(parsed.value, expect);

        let parsed = ring_expr(&r, "x1*x1*x1*x1*x1").unwrap();
        assert!(parsed.truncated);
        assert!(r.is_zero(&parsed.value));

        let r2 = ring(3, 2);
        let parsed = ring_expr(&r2, "(1+x2)^2").unwrap();
        assert!(!parsed.truncated);
        let mut expect = r2.one();
        expect = r2.add(&expect, &r2.monomial(&[0, 1], r2.gf().from_u64(2)));
        expect = r2.add(&expect, &r2.monomial(&[0, 2], r2.gf().one()));
        assert_eq!(parsed.value, expect);
    }

    #[test]
    fn literal_exponent_overflow_vanishes_with_flag() {
        let r = ring(5, 1);
        let parsed = ring_expr(&r, "x1^7").unwrap();
        assert!(parsed.truncated);
        assert!(r.is_zero(&parsed.value));

        let parsed = ring_expr(&r, "2 + x1^5").unwrap();
        assert!(parsed.truncated);
        assert_eq!(parsed.value, r.constant(r.gf().from_u64(2)));
    }

    #[test]
    fn accepted_spellings() {
        let r = ring(5, 2);
        assert_eq!(ring_expr(&r, "x_1").unwrap().value, r.var(1));
        assert_eq!(ring_expr(&r, "x1").unwrap().value, r.var(1));
        let d = derivation_expr(&r, "d1").unwrap().value;
        assert_eq!(d, Derivation::partial(&r, 1));
        assert_eq!(
            derivation_expr(&r, "d_2").unwrap().value,
            Derivation::partial(&r, 2)
        );
        assert_eq!(
            derivation_expr(&r, "\u{2202}1").unwrap().value,
            Derivation::partial(&r, 1)
        );
        // leading sign
        let neg = ring_expr(&r, "-x1").unwrap().value;
        assert_eq!(neg, r.neg(&r.var(1)));
    }

    #[test]
    fn syntax_error_offsets() {
        let r = ring(5, 1);
        match ring_expr(&r, "1 + @").unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 4),
            e => panic!("unexpected {e:?}"),
        }
        match ring_expr(&r, "(1 + x1").unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 7),
            e => panic!("unexpected {e:?}"),
        }
        match ring_expr(&r, "x2").unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 0),
            e => panic!("unexpected {e:?}"),
        }
        match ring_expr(&r, "1 + x1 x1").unwrap_err() {
            Error::Syntax { offset, .. } => assert_eq!(offset, 7),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn derivation_expressions() {
        let r = ring(5, 2);
        let d = derivation_expr(&r, "(1+x1)*d1 + x1^2*d2").unwrap().value;
        assert_eq!(d.image(1), &r.add(&r.one(), &r.var(1)));
        assert_eq!(d.image(2), &r.monomial(&[2, 0], r.gf().one()));

        // coefficient can follow the atom too
        let d = derivation_expr(&r, "d1*x2").unwrap().value;
        assert_eq!(d.image(1), &r.var(2));

        assert!(matches!(
            derivation_expr(&r, "d1*d2").unwrap_err(),
            Error::Syntax { .. }
        ));
        assert!(matches!(
            derivation_expr(&r, "d1^2").unwrap_err(),
            Error::Syntax { .. }
        ));
        assert!(matches!(
            derivation_expr(&r, "x1 + d1").unwrap_err(),
            Error::Syntax { .. }
        ));
    }

    #[test]
    fn automorphism_assignments() {
        let r = ring(3, 2);
        let parsed = automorphism_expr(&r, "x1 -> x2; x2 -> x1 + x1^2*x2^2").unwrap();
        let a = parsed.value;
        assert_eq!(a.images()[0], r.var(2));

        // missing variable
        assert!(matches!(
            automorphism_expr(&r, "x1 -> x2").unwrap_err(),
            Error::Syntax { .. }
        ));
        // duplicate
        assert!(matches!(
            automorphism_expr(&r, "x1 -> x2; x1 -> x1").unwrap_err(),
            Error::Syntax { .. }
        ));
        // invalid images propagate the validation error
        assert_eq!(
            automorphism_expr(&r, "x1 -> x1^2; x2 -> x2").unwrap_err(),
            Error::JacobianNotUnit
        );
        assert_eq!(
            automorphism_expr(&r, "x1 -> 1 + x1; x2 -> x2").unwrap_err(),
            Error::ConstantTerm
        );
    }

    #[test]
    fn round_trip_format_and_parse() {
        let r = ring(5, 2);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(81);
        for _ in 0..50 {
            let coeffs = (0..r.n())
                .map(|_| {
                    let v = (0..r.dim())
                        .map(|_| r.gf().elt_from_index(rng.gen_range(0..r.gf().size())))
                        .collect();
                    r.from_coeffs(v).unwrap()
                })
                .collect();
            let d = Derivation::from_images(&r, coeffs).unwrap();
            if d.is_zero(&r) {
                continue;
            }
            let text = d.format(&r);
            let back = derivation_expr(&r, &text).unwrap();
            assert_eq!(back.value, d, "round trip through {text}");
        }
    }
}
