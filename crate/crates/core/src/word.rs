//! Normal forms, conjugacy and roots for words in a free product A∗B.

use std::fmt;

use thiserror::Error;

use crate::group::{lcm, FiniteGroup, GroupError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("element {element} is out of range for factor {factor} of order {size}")]
    BadElement { factor: Factor, element: usize, size: usize },
    #[error("cannot parse word token {0:?}")]
    BadToken(String),
    #[error("roots need a cyclically reduced word of even length at least 2")]
    NotRootable,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    A,
    B,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::A => Factor::B,
            Factor::B => Factor::A,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::A => "A",
            Factor::B => "B",
        })
    }
}

/// A single nonidentity factor element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub factor: Factor,
    pub element: usize,
}

impl Syllable {
    pub fn a(element: usize) -> Self {
        Syllable { factor: Factor::A, element }
    }

    pub fn b(element: usize) -> Self {
        Syllable { factor: Factor::B, element }
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.factor, self.element)
    }
}

/// An element of A∗B in normal form: alternating factors, no identities.
///
/// Only [`FreeProduct`] constructs words, so the normal-form invariant holds
/// for every value in circulation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Syllable>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cyclically reduced: length ≤ 1 or first and last syllables in different factors.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) if self.0.len() >= 2 => f.factor != l.factor,
            _ => true,
        }
    }

    /// Cyclic shift by `k` syllables: s_k … s_{n−1} s_0 … s_{k−1}.
    fn rotated(&self, k: usize) -> Word {
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(Syllable::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Case split used by the separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordClass {
    Identity,
    InFactor,
    ConjugateIntoFactor,
    Hyperbolic,
}

/// The free product of two finite groups; all word arithmetic goes through here.
#[derive(Debug, Clone)]
pub struct FreeProduct {
    a: FiniteGroup,
    b: FiniteGroup,
}

impl FreeProduct {
    pub fn new(a: FiniteGroup, b: FiniteGroup) -> Self {
        FreeProduct { a, b }
    }

    pub fn a(&self) -> &FiniteGroup {
        &self.a
    }

    pub fn b(&self) -> &FiniteGroup {
        &self.b
    }

    pub fn factor(&self, f: Factor) -> &FiniteGroup {
        match f {
            Factor::A => &self.a,
            Factor::B => &self.b,
        }
    }

    /// Multiplies adjacent same-factor syllables and drops identities until
    /// the sequence is alternating. A single stack pass reaches the fixed point.
    pub fn normalize(&self, raw: &[Syllable]) -> Result<Word, WordError> {
        for s in raw {
            let g = self.factor(s.factor);
            if s.element >= g.size() {
                return Err(WordError::BadElement { factor: s.factor, element: s.element, size: g.size() });
            }
        }
        Ok(self.normalize_unchecked(raw.iter().copied()))
    }

    fn normalize_unchecked(&self, raw: impl IntoIterator<Item = Syllable>) -> Word {
        let mut out: Vec<Syllable> = Vec::new();
        for s in raw {
            if s.element == 0 {
                continue;
            }
            match out.last_mut() {
                Some(top) if top.factor == s.factor => {
                    let prod = self.factor(s.factor).mul(top.element, s.element);
                    if prod == 0 {
                        out.pop();
                    } else {
                        top.element = prod;
                    }
                }
                _ => out.push(s),
            }
        }
        Word(out)
    }

    /// Single factor element as a word (empty for the identity).
    pub fn letter(&self, factor: Factor, element: usize) -> Result<Word, WordError> {
        self.normalize(&[Syllable { factor, element }])
    }

    pub fn mul(&self, x: &Word, y: &Word) -> Word {
        self.normalize_unchecked(x.0.iter().chain(&y.0).copied())
    }

    pub fn product<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Word {
        self.normalize_unchecked(words.into_iter().flat_map(|w| w.0.iter().copied()))
    }

    pub fn invert(&self, w: &Word) -> Word {
        Word(
            w.0.iter()
                .rev()
                .map(|s| Syllable { factor: s.factor, element: self.factor(s.factor).inv(s.element) })
                .collect(),
        )
    }

    /// w^k for k ≥ 0.
    pub fn pow(&self, w: &Word, k: u64) -> Word {
        let mut acc = Word::empty();
        for _ in 0..k {
            acc = self.mul(&acc, w);
        }
        acc
    }

    /// `c⁻¹ w c`
    pub fn conjugate(&self, w: &Word, c: &Word) -> Word {
        self.product([&self.invert(c), w, c])
    }

    /// Returns `(reduced, conjugator)` with `w = conjugator · reduced · conjugator⁻¹`.
    pub fn cyclic_reduce(&self, w: &Word) -> (Word, Word) {
        let mut reduced = w.clone();
        let mut conj: Vec<Syllable> = Vec::new();
        while reduced.len() >= 2 {
            let first = reduced.0[0];
            let last = *reduced.0.last().unwrap();
            if first.factor != last.factor {
                break;
            }
            // x m y = x (m·yx) x⁻¹
            let mut inner = reduced.0[1..reduced.0.len() - 1].to_vec();
            inner.push(last);
            inner.push(first);
            reduced = self.normalize_unchecked(inner);
            conj.push(first);
        }
        (reduced, self.normalize_unchecked(conj))
    }

    /// Returns c with c⁻¹·w1·c = w2, if one exists.
    pub fn conjugate_test(&self, w1: &Word, w2: &Word) -> Option<Word> {
        let (r1, c1) = self.cyclic_reduce(w1);
        let (r2, c2) = self.cyclic_reduce(w2);
        // d⁻¹ r1 d = r2  ⇒  (c1 d c2⁻¹)⁻¹ w1 (c1 d c2⁻¹) = w2
        let d = if r1.len() <= 1 && r2.len() <= 1 {
            match (r1.0.first(), r2.0.first()) {
                (None, None) => Word::empty(),
                (Some(x), Some(y)) if x.factor == y.factor => {
                    let g = self.factor(x.factor);
                    let c = g.are_conjugate_in(x.element, y.element).ok()??;
                    self.normalize_unchecked([Syllable { factor: x.factor, element: c }])
                }
                _ => return None,
            }
        } else if r1.len() == r2.len() && r1.len() >= 2 {
            let k = (0..r1.len()).find(|&k| r1.rotated(k) == r2)?;
            Word(r1.0[..k].to_vec())
        } else {
            return None;
        };
        let c = self.product([&c1, &d, &self.invert(&c2)]);
        debug_assert_eq!(&self.conjugate(w1, &c), w2);
        Some(c)
    }

    /// Image in A×B: products of the A-syllables and of the B-syllables in order.
    pub fn project_to_direct_product(&self, w: &Word) -> (usize, usize) {
        w.0.iter().fold((0, 0), |(a, b), s| match s.factor {
            Factor::A => (self.a.mul(a, s.element), b),
            Factor::B => (a, self.b.mul(b, s.element)),
        })
    }

    /// Membership in the Cartesian subgroup, the kernel of A∗B → A×B.
    pub fn in_cartesian(&self, w: &Word) -> bool {
        self.project_to_direct_product(w) == (0, 0)
    }

    /// Minimal-period decomposition `w = base^k` of a cyclically reduced word.
    pub fn extract_root(&self, w: &Word) -> Result<(Word, u64), WordError> {
        let n = w.len();
        if n < 2 || !n.is_multiple_of(2) || !w.is_cyclically_reduced() {
            return Err(WordError::NotRootable);
        }
        let period = (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| (d..n).all(|i| w.0[i] == w.0[i - d]))
            .expect("n is always a period");
        Ok((Word(w.0[..period].to_vec()), (n / period) as u64))
    }

    /// Least q ≥ 1 with w^q in the Cartesian subgroup.
    pub fn power_entering_cartesian(&self, w: &Word) -> u64 {
        let (a, b) = self.project_to_direct_product(w);
        lcm(self.a.element_order_unchecked(a), self.b.element_order_unchecked(b))
    }

    pub fn classify(&self, w: &Word) -> WordClass {
        match w.len() {
            0 => WordClass::Identity,
            1 => WordClass::InFactor,
            _ if self.cyclic_reduce(w).0.len() <= 1 => WordClass::ConjugateIntoFactor,
            _ => WordClass::Hyperbolic,
        }
    }

    /// Parses whitespace-separated `A<i>` / `B<i>` tokens (`a`, `b` for index 1)
    /// and normalizes.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            let bad = || WordError::BadToken(token.to_string());
            let syl = match token {
                "a" => Syllable::a(1),
                "b" => Syllable::b(1),
                _ => {
                    let mut chars = token.chars();
                    let head = chars.next();
                    let element: usize = chars.as_str().parse().map_err(|_| bad())?;
                    if element == 0 {
                        return Err(bad());
                    }
                    match head {
                        Some('A') => Syllable::a(element),
                        Some('B') => Syllable::b(element),
                        _ => return Err(bad()),
                    }
                }
            };
            raw.push(syl);
        }
        self.normalize(&raw)
    }
}
