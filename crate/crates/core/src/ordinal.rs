//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite list of terms `ω^e·c` with strictly decreasing
//! exponents and coefficients `c ≥ 1`. Exponents are themselves ordinals, so
//! the representation is recursive. The empty list is `0`.
//!
//! Only the operations needed by the walk recursion are exposed: ordering,
//! the zero/successor/limit split, and the canonical fundamental sequences.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// One Cantor-normal-form summand `ω^exponent · coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    exponent: Ordinal,
    coefficient: BigUint,
}

impl Term {
    pub fn exponent(&self) -> &Ordinal {
        &self.exponent
    }

    pub fn coefficient(&self) -> &BigUint {
        &self.coefficient
    }
}

/// A countable ordinal below ε₀ in canonical Cantor normal form.
///
/// Cloning is cheap (the term list is shared). Two ordinals are equal iff
/// their term lists are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<[Term]>);

/// The zero / successor / limit case split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("exponents must be strictly decreasing")]
    NotDecreasing,
    #[error("coefficients must be at least 1")]
    ZeroCoefficient,
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal(Arc::from(Vec::new()))
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one(), 1u32)
    }

    /// The finite ordinal `n`.
    pub fn from_u64(n: u64) -> Self {
        Self::natural(BigUint::from(n))
    }

    pub fn natural(n: BigUint) -> Self {
        if n.is_zero() {
            Self::zero()
        } else {
            Self::single(Self::zero(), n)
        }
    }

    /// `ω^exponent · coefficient`; a zero coefficient gives `0`.
    pub fn omega_pow(exponent: Ordinal, coefficient: impl Into<BigUint>) -> Self {
        let coefficient = coefficient.into();
        if coefficient.is_zero() {
            Self::zero()
        } else {
            Self::single(exponent, coefficient)
        }
    }

    fn single(exponent: Ordinal, coefficient: BigUint) -> Self {
        Ordinal(Arc::from(vec![Term {
            exponent,
            coefficient,
        }]))
    }

    /// Builds an ordinal from terms that are already in canonical order.
    ///
    /// Terms with a zero coefficient are rejected rather than dropped, so a
    /// successful call always round-trips through [`Ordinal::terms`].
    pub fn from_terms<I>(terms: I) -> Result<Self, OrdinalError>
    where
        I: IntoIterator<Item = (Ordinal, BigUint)>,
    {
        let mut out: Vec<Term> = Vec::new();
        for (exponent, coefficient) in terms {
            if coefficient.is_zero() {
                return Err(OrdinalError::ZeroCoefficient);
            }
            if let Some(last) = out.last() {
                if exponent >= last.exponent {
                    return Err(OrdinalError::NotDecreasing);
                }
            }
            out.push(Term {
                exponent,
                coefficient,
            });
        }
        Ok(Ordinal(Arc::from(out)))
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(n)` when the ordinal is a natural number that fits in a `u64`.
    pub fn as_u64(&self) -> Option<u64> {
        match &*self.0 {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match &*self.0 {
            [] => true,
            [t] => t.exponent.is_zero(),
            _ => false,
        }
    }

    pub fn classify(&self) -> Kind {
        match self.0.last() {
            None => Kind::Zero,
            Some(last) if last.exponent.is_zero() => {
                let mut terms = self.0.to_vec();
                let t = terms.last_mut().unwrap();
                t.coefficient -= 1u32;
                if t.coefficient.is_zero() {
                    terms.pop();
                }
                Kind::Successor(Ordinal(Arc::from(terms)))
            }
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.0.last(), Some(t) if !t.exponent.is_zero())
    }

    /// Splits `self` as `λ + m` with `λ` zero or a limit and `m` finite.
    pub fn split_finite(&self) -> (Ordinal, BigUint) {
        match self.0.last() {
            Some(t) if t.exponent.is_zero() => {
                let head = Ordinal(Arc::from(&self.0[..self.0.len() - 1]));
                (head, t.coefficient.clone())
            }
            _ => (self.clone(), BigUint::zero()),
        }
    }

    /// `self + m` for finite `m`.
    pub fn plus_finite(&self, m: &BigUint) -> Ordinal {
        if m.is_zero() {
            return self.clone();
        }
        self.add_term(&Ordinal::zero(), m)
    }

    /// The `n`-th element (from 0) of the canonical fundamental sequence.
    ///
    /// Writing `self = δ + ω^γ`: if `γ = γ' + 1` the element is
    /// `δ + ω^γ'·(n+1)`, and if `γ` is a limit it is `δ + ω^(γ[n])`.
    pub fn fund_seq(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        let last = match self.0.last() {
            Some(t) if !t.exponent.is_zero() => t,
            _ => return Err(OrdinalError::NotLimit(self.clone())),
        };
        let mut terms = self.0.to_vec();
        let t = terms.last_mut().unwrap();
        t.coefficient -= 1u32;
        if t.coefficient.is_zero() {
            terms.pop();
        }
        let tail = match last.exponent.classify() {
            Kind::Successor(prev) => Term {
                exponent: prev,
                coefficient: BigUint::from(n) + 1u32,
            },
            Kind::Limit => Term {
                exponent: last.exponent.fund_seq(n)?,
                coefficient: BigUint::one(),
            },
            Kind::Zero => unreachable!("exponent checked nonzero"),
        };
        terms.push(tail);
        Ok(Ordinal(Arc::from(terms)))
    }

    /// Ordinal sum `self + ω^exponent·coefficient`: lower terms are absorbed.
    pub(crate) fn add_term(&self, exponent: &Ordinal, coefficient: &BigUint) -> Ordinal {
        if coefficient.is_zero() {
            return self.clone();
        }
        let mut terms: Vec<Term> = Vec::with_capacity(self.0.len() + 1);
        for t in self.0.iter() {
            match t.exponent.cmp(exponent) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    terms.push(Term {
                        exponent: exponent.clone(),
                        coefficient: &t.coefficient + coefficient,
                    });
                    return Ordinal(Arc::from(terms));
                }
                Ordering::Less => break,
            }
        }
        terms.push(Term {
            exponent: exponent.clone(),
            coefficient: coefficient.clone(),
        });
        Ordinal(Arc::from(terms))
    }

    fn render_exponent_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.finite_value() {
            write!(f, "{n}")
        } else if *self == Ordinal::omega() {
            f.write_str("w")
        } else {
            write!(f, "({self})")
        }
    }

    fn finite_value(&self) -> Option<&BigUint> {
        match &*self.0 {
            [t] if t.exponent.is_zero() => Some(&t.coefficient),
            _ => None,
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if !t.exponent.is_one() {
                f.write_str("^")?;
                t.exponent.render_exponent_atom(f)?;
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl Ordinal {
    fn is_one(&self) -> bool {
        matches!(self.finite_value(), Some(c) if c.is_one())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_u64(n)
    }
}

impl FromStr for Ordinal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parses the ASCII CNF grammar:
///
/// ```text
/// ordinal := "0" | term ("+" term)*
/// term    := "w" | "w*" nat | "w^" atom | "w^" atom "*" nat | nat
/// atom    := nat | "w" | "(" ordinal ")"
/// ```
///
/// Whitespace is ignored. Terms are combined with ordinal addition, so
/// out-of-order input such as `1+w` normalizes to `w`.
pub fn parse(text: &str) -> Result<Ordinal, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let value = p.ordinal()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn ordinal(&mut self) -> Result<Ordinal, ParseError> {
        if self.peek() == Some(b'0') {
            let start = self.pos;
            let n = self.digits()?;
            if n.is_zero() {
                return Ok(Ordinal::zero());
            }
            self.pos = start;
        }
        let (e, c) = self.term()?;
        let mut acc = Ordinal::zero().add_term(&e, &c);
        while self.eat(b'+') {
            let (e, c) = self.term()?;
            acc = acc.add_term(&e, &c);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(Ordinal, BigUint), ParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    self.atom()?
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') {
                    self.positive()?
                } else {
                    BigUint::one()
                };
                Ok((exponent, coefficient))
            }
            Some(c) if c.is_ascii_digit() => Ok((Ordinal::zero(), self.positive()?)),
            Some(_) => Err(self.error("expected a term")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn atom(&mut self) -> Result<Ordinal, ParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.ordinal()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::natural(self.positive()?)),
            Some(_) => Err(self.error("expected an exponent")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn positive(&mut self) -> Result<BigUint, ParseError> {
        let start = self.pos;
        let n = self.digits()?;
        if n.is_zero() {
            self.pos = start;
            return Err(self.error("expected a natural number >= 1"));
        }
        Ok(n)
    }

    fn digits(&mut self) -> Result<BigUint, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }
}
