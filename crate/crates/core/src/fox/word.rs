use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator of the free group together with an exponent sign.
///
/// Generators are numbered from zero in the order `x1, y1, x2, y2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// Name of generator `index` (zero based): `x1`, `y1`, `x2`, ...
pub fn generator_name(index: usize) -> String {
    let handle = index / 2 + 1;
    if index.is_multiple_of(2) {
        format!("x{handle}")
    } else {
        format!("y{handle}")
    }
}

/// A freely reduced word in the free group on `x1, y1, ..., xL, yL`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::new(index, false)])
    }

    pub fn x(handle: usize) -> Self {
        Word::generator(2 * (handle - 1))
    }

    pub fn y(handle: usize) -> Self {
        Word::generator(2 * (handle - 1) + 1)
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&last) if last.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn pow(&self, n: i32) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator).max()
    }

    pub fn exponent_sum(&self, generator: usize) -> i32 {
        self.0
            .iter()
            .filter(|l| l.generator == generator)
            .map(|l| l.sign())
            .sum()
    }

    /// Prefix of the first `k` letters (already reduced since `self` is).
    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    /// Applies the endomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        Word::reduce(self.0.iter().flat_map(|l| {
            let img = &images[l.generator];
            if l.inverse {
                img.inverse().0
            } else {
                img.0.clone()
            }
        }))
    }

    /// Cyclically reduced core of the word.
    pub fn cyclically_reduced(&self) -> Word {
        let mut v = self.0.as_slice();
        while v.len() >= 2 && v[0].cancels(v[v.len() - 1]) {
            v = &v[1..v.len() - 1];
        }
        Word(v.to_vec())
    }

    /// Whether `self` and `other` are conjugate in the free group.
    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        let a = self.cyclically_reduced();
        let b = other.cyclically_reduced();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let n = a.len();
        (0..n).any(|shift| (0..n).all(|i| a.0[(i + shift) % n] == b.0[i]))
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Self {
        Word(vec![l])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", generator_name(l.generator))?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s, 0)
    }
}

/// Parses `x1*y1*x1^-1` style words; `base` offsets error positions.
pub(crate) fn parse_word(s: &str, base: usize) -> Result<Word> {
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut letters = Vec::new();
    let err = |offset: usize, message: &str| Error::Parse {
        offset: base + offset,
        message: message.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let read_uint = |pos: &mut usize| -> Option<usize> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        s[start..*pos].parse().ok()
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty word"));
    }
    loop {
        skip_ws(&mut pos);
        let token_start = pos;
        let generator = match bytes.get(pos) {
            Some(b'1') => {
                pos += 1;
                None
            }
            Some(&c) if c == b'x' || c == b'y' => {
                pos += 1;
                let handle = read_uint(&mut pos)
                    .filter(|&h| h >= 1)
                    .ok_or_else(|| err(token_start, "expected generator index >= 1"))?;
                Some(2 * (handle - 1) + usize::from(c == b'y'))
            }
            _ => return Err(err(pos, "expected generator `x<k>`, `y<k>` or `1`")),
        };
        skip_ws(&mut pos);
        let mut exponent: i64 = 1;
        if bytes.get(pos) == Some(&b'^') {
            pos += 1;
            skip_ws(&mut pos);
            let negative = bytes.get(pos) == Some(&b'-');
            if negative {
                pos += 1;
            }
            let e = read_uint(&mut pos).ok_or_else(|| err(pos, "expected integer exponent"))?;
            exponent = if negative { -(e as i64) } else { e as i64 };
        }
        if let Some(g) = generator {
            let l = Letter::new(g, exponent < 0);
            for _ in 0..exponent.unsigned_abs() {
                letters.push(l);
            }
        }
        skip_ws(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b'*') => pos += 1,
            Some(_) => return Err(err(pos, "expected `*` between letters")),
        }
    }
    Ok(Word::reduce(letters))
}

/// The surface relator `[x1,y1]...[xL,yL]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    genus: usize,
    word: Word,
}

impl Relator {
    pub fn new(genus: usize) -> Self {
        assert!(genus >= 1, "genus must be positive");
        let word = (1..=genus).fold(Word::identity(), |acc, k| {
            acc.mul(&Word::commutator(&Word::x(k), &Word::y(k)))
        });
        Relator { genus, word }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert!(w("x1*x1^-1").is_identity());
        assert_eq!(w("x1*y1").len(), 2);
        assert_eq!(w("x1*y1*y1^-1*x1"), w("x1^2"));
        assert_eq!(w("x1*y1*y1^-1*x1").to_string(), "x1*x1");
    }

    #[test]
    fn parser_accepts_whitespace_and_powers() {
        assert_eq!(w(" x1 * y2 ^ -1 "), w("x1*y2^-1"));
        assert_eq!(w("y1^3"), w("y1*y1*y1"));
        assert!(w("1").is_identity());
        assert!("x0".parse::<Word>().is_err());
        assert!("z1".parse::<Word>().is_err());
        assert!("x1 y1".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
    }

    #[test]
    fn relator_shape() {
        for genus in 1..=4 {
            let r = Relator::new(genus);
            assert_eq!(r.word().len(), 4 * genus);
            for g in 0..2 * genus {
                assert_eq!(r.word().exponent_sum(g), 0);
            }
        }
        assert_eq!(Relator::new(1).word().to_string(), "x1*y1*x1^-1*y1^-1");
    }

    #[test]
    fn dehn_twist_fixes_relator() {
        let r = Relator::new(2);
        let mut images: Vec<Word> = (0..4).map(Word::generator).collect();
        images[1] = w("y1*x1");
        assert_eq!(r.word().substitute(&images), *r.word());
        images[1] = w("y1*x1^-1");
        assert_eq!(r.word().substitute(&images), *r.word());
    }

    #[test]
    fn conjugacy_detection() {
        let a = w("x1*y1*x1^-1*y1^-1");
        let b = w("y1*x1^-1*y1^-1*x1");
        assert!(a.is_conjugate_to(&b));
        assert!(a.is_conjugate_to(&w("x2*x1*y1*x1^-1*y1^-1*x2^-1")));
        assert!(!a.is_conjugate_to(&a.inverse()));
    }
}
