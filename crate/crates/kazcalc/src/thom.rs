//! Thom polynomial tables for corank-one strata.
//!
//! Non-zero entries exist only in odd codimension: the trivialised-kernel
//! table is generated by powers of the Euler class chi_{k+1}, the full
//! corank-one table by powers of the Pontrjagin class p_{l+1} (k = 2l+1).
//! In even codimension every singular stratum is rationally null-homologous
//! and the whole table vanishes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Which table a query addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapClass {
    /// Corank-one maps with trivialised kernel line bundle.
    Prim,
    /// Arbitrary corank-one maps.
    Morin,
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapClass::Prim => write!(f, "prim"),
            MapClass::Morin => write!(f, "morin"),
        }
    }
}

/// A named characteristic-class generator with its degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// Pontrjagin class p_i, degree 4i.
    Pontrjagin(usize),
    /// Euler class of an oriented d-plane bundle, degree d.
    Euler(usize),
}

impl Generator {
    pub fn degree(&self) -> usize {
        match self {
            Generator::Pontrjagin(i) => 4 * i,
            Generator::Euler(d) => *d,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Pontrjagin(i) => write!(f, "p{i}"),
            Generator::Euler(d) => write!(f, "chi{d}"),
        }
    }
}

/// A monomial in the generators: exponent vector, empty meaning 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Generator, u32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn of(generator: Generator, exponent: u32) -> Self {
        let mut m = Self::default();
        m.mul_generator(generator, exponent);
        m
    }

    pub fn mul_generator(&mut self, generator: Generator, exponent: u32) {
        if exponent == 0 {
            return;
        }
        *self.0.entry(generator).or_insert(0) += exponent;
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|(g, &e)| g.degree() * e as usize).sum()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&Generator, &u32)> {
        self.0.iter()
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&g, &e) in &other.0 {
            out.mul_generator(g, e);
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (g, &e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A formal polynomial in named characteristic classes with exact integer
/// coefficients. Zero coefficients are never stored, so the zero polynomial
/// is the empty term set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharClassPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl CharClassPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coefficient: BigInt, monomial: Monomial) -> Self {
        let mut poly = Self::default();
        if !coefficient.is_zero() {
            poly.terms.insert(monomial, coefficient);
        }
        poly
    }

    pub fn generator_power(generator: Generator, exponent: u32) -> Self {
        Self::term(BigInt::one(), Monomial::of(generator, exponent))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let entry = out.terms.entry(m).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Common degree of the terms, when homogeneous; None for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|m| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|m| m.degree());
        match degrees.next() {
            None => true,
            Some(first) => degrees.all(|d| d == first),
        }
    }
}

impl fmt::Display for CharClassPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{m}")?;
            } else if m.0.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

/// A table entry: the polynomial together with its provenance metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThomTableEntry {
    pub class: MapClass,
    pub codim: usize,
    pub stratum: usize,
    pub polynomial: CharClassPoly,
    pub note: Option<&'static str>,
}

const NOTE_PRIM_INTEGRAL: &str =
    "rationally exact; integrally the power of the Euler class holds modulo \
     2-primary torsion, and the non-zero rational constant is normalised to 1";
const NOTE_EVEN_NULL: &str =
    "all singular strata are rationally null-homologous in even codimension";
const NOTE_ODD_STRATUM_NULL: &str =
    "odd-index strata of odd codimension are rationally null-homologous";

/// Thom polynomial of the stratum with index i >= 1.
///
/// Trivialised kernel, odd k: chi_{k+1}^i. Arbitrary corank one, odd
/// k = 2l+1: p_{l+1}^{i/2} for even i and 0 for odd i. Even k: 0.
pub fn thom_polynomial(class: MapClass, k: usize, i: usize) -> Result<ThomTableEntry> {
    if k == 0 {
        return Err(Error::MustBePositive {
            what: "codimension k",
        });
    }
    if i == 0 {
        return Err(Error::InvalidStratum(
            "the regular stratum has no Thom polynomial".into(),
        ));
    }
    let (polynomial, note) = if k % 2 == 0 {
        (CharClassPoly::zero(), Some(NOTE_EVEN_NULL))
    } else {
        match class {
            MapClass::Prim => (
                CharClassPoly::generator_power(Generator::Euler(k + 1), i as u32),
                Some(NOTE_PRIM_INTEGRAL),
            ),
            MapClass::Morin => {
                if i % 2 == 1 {
                    (CharClassPoly::zero(), Some(NOTE_ODD_STRATUM_NULL))
                } else {
                    let l = (k - 1) / 2;
                    (
                        CharClassPoly::generator_power(
                            Generator::Pontrjagin(l + 1),
                            (i / 2) as u32,
                        ),
                        None,
                    )
                }
            }
        }
    };
    Ok(ThomTableEntry {
        class,
        codim: k,
        stratum: i,
        polynomial,
        note,
    })
}

/// Higher Thom polynomial: the table entry of stratum i multiplied by the
/// Pontrjagin monomial p_I. Entries of I must lie in 1..=floor(k/2).
pub fn higher_thom_polynomial(
    class: MapClass,
    k: usize,
    i: usize,
    multi_index: &[usize],
) -> Result<ThomTableEntry> {
    let base = thom_polynomial(class, k, i)?;
    let l = k / 2;
    for &idx in multi_index {
        if idx == 0 || idx > l {
            return Err(Error::InvalidStratum(format!(
                "Pontrjagin index {idx} outside 1..={l} for codimension {k}"
            )));
        }
    }
    let mut p_i = CharClassPoly::term(BigInt::one(), Monomial::one());
    for &idx in multi_index {
        p_i = p_i.mul(&CharClassPoly::generator_power(
            Generator::Pontrjagin(idx),
            1,
        ));
    }
    Ok(ThomTableEntry {
        polynomial: base.polynomial.mul(&p_i),
        ..base
    })
}

/// Largest index of a possibly non-vanishing Pontrjagin class of the virtual
/// normal bundle of a corank-one map of odd codimension k = 2l+1: l + 1.
pub fn pontrjagin_vanishing_bound(k: usize) -> Result<usize> {
    if k % 2 == 0 {
        return Err(Error::EvenCodimension(k));
    }
    Ok((k - 1) / 2 + 1)
}
