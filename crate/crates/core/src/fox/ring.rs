use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::word::{Letter, Word};

/// Finite real combination of free-group words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupRingElt {
    terms: BTreeMap<Word, f64>,
}

impl GroupRingElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, 1.0)
    }

    pub fn from_term(w: Word, coeff: f64) -> Self {
        let mut e = Self::zero();
        e.add_term(w, coeff);
        e
    }

    pub fn add_term(&mut self, w: Word, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> f64 {
        self.terms.get(w).cloned().unwrap_or(0.0)
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> f64 {
        self.terms.values().sum()
    }

    /// The involution `w -> w^-1` extended linearly.
    pub fn antipode(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.inverse(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.terms.keys().filter_map(|w| w.max_generator()).max()
    }
}

impl From<Word> for GroupRingElt {
    fn from(w: Word) -> Self {
        GroupRingElt::from_word(w)
    }
}

impl Add for &GroupRingElt {
    type Output = GroupRingElt;
    fn add(self, rhs: &GroupRingElt) -> GroupRingElt {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub for &GroupRingElt {
    type Output = GroupRingElt;
    fn sub(self, rhs: &GroupRingElt) -> GroupRingElt {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &GroupRingElt {
    type Output = GroupRingElt;
    fn neg(self) -> GroupRingElt {
        self.scale(-1.0)
    }
}

impl Mul for &GroupRingElt {
    type Output = GroupRingElt;
    fn mul(self, rhs: &GroupRingElt) -> GroupRingElt {
        let mut out = GroupRingElt::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0.0 { "-" } else { "+" };
            if i == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a == 1.0 {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Left Fox derivative `∂w/∂z` with `∂(uv)/∂z = ∂u/∂z + u·∂v/∂z`.
pub fn fox_derivative_unchecked(w: &Word, generator: usize) -> GroupRingElt {
    let mut out = GroupRingElt::zero();
    let mut prefix: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if l.generator == generator {
            if l.inverse {
                let mut p = prefix.clone();
                p.push(l);
                out.add_term(Word::reduce(p), -1.0);
            } else {
                out.add_term(Word::reduce(prefix.iter().cloned()), 1.0);
            }
        }
        prefix.push(l);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(fox_derivative_unchecked(&w("x1*y1"), 0), GroupRingElt::one());
        assert_eq!(
            fox_derivative_unchecked(&w("x1^-1"), 0),
            GroupRingElt::from_term(w("x1^-1"), -1.0)
        );
        let expected = &GroupRingElt::one() - &GroupRingElt::from_word(w("x1*y1*x1^-1"));
        assert_eq!(
            fox_derivative_unchecked(&w("x1*y1*x1^-1*y1^-1"), 0),
            expected
        );
    }

    #[test]
    fn ring_axioms_on_small_elements() {
        let a = &GroupRingElt::from_word(w("x1")) + &GroupRingElt::from_term(w("y1"), 2.0);
        let b = &GroupRingElt::one() - &GroupRingElt::from_word(w("x1^-1"));
        let c = GroupRingElt::from_word(w("y1*x1"));
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!((&a * &b).augmentation(), a.augmentation() * b.augmentation());
        assert!((&a - &a).is_zero());
    }
}
