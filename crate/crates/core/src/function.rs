//! Conjugation-invariant functions on `G^{2ℓ}` built from trace and
//! determinant atoms of word maps.
//!
//! Grammar of the expression strings:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := number | 'tr' '(' word ')' | 'redet' '(' word ')'
//!          | ('sin' | 'cos' | 'exp' | 'bump') '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fox::{word_jacobian, Word};
use crate::linalg::{CMat, Vector};
use crate::rep::Representation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMap {
    Sin,
    Cos,
    Exp,
    /// `exp(-1/s²)` for `s ≠ 0`, `0` at `s = 0`; flat at the origin.
    Bump,
}

impl ScalarMap {
    fn name(self) -> &'static str {
        match self {
            ScalarMap::Sin => "sin",
            ScalarMap::Cos => "cos",
            ScalarMap::Exp => "exp",
            ScalarMap::Bump => "bump",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(ScalarMap::Sin),
            "cos" => Some(ScalarMap::Cos),
            "exp" => Some(ScalarMap::Exp),
            "bump" => Some(ScalarMap::Bump),
            _ => None,
        }
    }

    /// Value and derivative at `s`.
    fn eval(self, s: f64) -> (f64, f64) {
        match self {
            ScalarMap::Sin => (s.sin(), s.cos()),
            ScalarMap::Cos => (s.cos(), -s.sin()),
            ScalarMap::Exp => (s.exp(), s.exp()),
            ScalarMap::Bump => {
                if s == 0.0 {
                    (0.0, 0.0)
                } else {
                    let v = (-1.0 / (s * s)).exp();
                    (v, v * 2.0 / (s * s * s))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// `Re tr φ(w)`.
    Trace(Word),
    /// `Re det φ(w)`.
    ReDet(Word),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Apply(ScalarMap, Box<Expr>),
}

impl Expr {
    fn visit_words<F: FnMut(&Word)>(&self, f: &mut F) {
        match self {
            Expr::Const(_) => {}
            Expr::Trace(w) | Expr::ReDet(w) => f(w),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit_words(f);
                b.visit_words(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Apply(_, a) => a.visit_words(f),
        }
    }

    fn map_words<F: Fn(&Word) -> Word + Copy>(&self, f: F) -> Expr {
        let bx = |e: &Expr| Box::new(e.map_words(f));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Trace(w) => Expr::Trace(f(w)),
            Expr::ReDet(w) => Expr::ReDet(f(w)),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Pow(a, k) => Expr::Pow(bx(a), *k),
            Expr::Apply(m, a) => Expr::Apply(*m, bx(a)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

/// Value and gradient in left-translated dual coordinates.
struct Jet {
    value: f64,
    grad: Vector,
}

fn atom_jet(phi: &Representation, w: &Word, det: bool) -> Result<Jet> {
    let spec = phi.spec();
    let g: CMat = phi.eval(w)?;
    let jac = word_jacobian(w, phi)?;
    let (value, coeffs): (f64, Vec<f64>) = if det {
        let d = g.determinant();
        let c = spec.basis().iter().map(|e| (d * e.trace()).re).collect();
        (d.re, c)
    } else {
        let c = spec.basis().iter().map(|e| (e * &g).trace().re).collect();
        (g.trace().re, c)
    };
    Ok(Jet {
        value,
        grad: jac.transpose() * Vector::from_vec(coeffs),
    })
}

fn jet(e: &Expr, phi: &Representation) -> Result<Jet> {
    let dim = phi.tangent_dim();
    Ok(match e {
        Expr::Const(c) => Jet {
            value: *c,
            grad: Vector::zeros(dim),
        },
        Expr::Trace(w) => atom_jet(phi, w, false)?,
        Expr::ReDet(w) => atom_jet(phi, w, true)?,
        Expr::Add(a, b) => {
            let (a, b) = (jet(a, phi)?, jet(b, phi)?);
            Jet {
                value: a.value + b.value,
                grad: a.grad + b.grad,
            }
        }
        Expr::Sub(a, b) => {
            let (a, b) = (jet(a, phi)?, jet(b, phi)?);
            Jet {
                value: a.value - b.value,
                grad: a.grad - b.grad,
            }
        }
        Expr::Mul(a, b) => {
            let (a, b) = (jet(a, phi)?, jet(b, phi)?);
            Jet {
                value: a.value * b.value,
                grad: a.grad * b.value + b.grad * a.value,
            }
        }
        Expr::Neg(a) => {
            let a = jet(a, phi)?;
            Jet {
                value: -a.value,
                grad: -a.grad,
            }
        }
        Expr::Pow(a, k) => {
            let a = jet(a, phi)?;
            let k = *k as i32;
            let d = if k == 0 { 0.0 } else { k as f64 * a.value.powi(k - 1) };
            Jet {
                value: a.value.powi(k),
                grad: a.grad * d,
            }
        }
        Expr::Apply(m, a) => {
            let a = jet(a, phi)?;
            let (v, d) = m.eval(a.value);
            Jet {
                value: v,
                grad: a.grad * d,
            }
        }
    })
}

/// A conjugation-invariant function on `G^{2ℓ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFunction {
    expr: Expr,
}

impl InvariantFunction {
    pub fn new(expr: Expr) -> Self {
        InvariantFunction { expr }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Expr::Const(c))
    }

    pub fn trace(w: Word) -> Self {
        Self::new(Expr::Trace(w))
    }

    pub fn re_det(w: Word) -> Self {
        Self::new(Expr::ReDet(w))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Parser::new(s).parse()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn apply(&self, map: ScalarMap) -> Self {
        Self::new(Expr::Apply(map, Box::new(self.expr.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::new(Expr::Pow(Box::new(self.expr.clone()), k))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(Expr::Mul(Box::new(Expr::Const(c)), Box::new(self.expr.clone())))
    }

    /// Largest zero-based generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        let mut best = None;
        self.expr.visit_words(&mut |w| best = best.max(w.max_generator()));
        best
    }

    pub fn eval(&self, phi: &Representation) -> Result<f64> {
        self.value(phi)
    }

    fn value(&self, phi: &Representation) -> Result<f64> {
        fn go(e: &Expr, phi: &Representation) -> Result<f64> {
            Ok(match e {
                Expr::Const(c) => *c,
                Expr::Trace(w) => phi.eval(w)?.trace().re,
                Expr::ReDet(w) => phi.eval(w)?.determinant().re,
                Expr::Add(a, b) => go(a, phi)? + go(b, phi)?,
                Expr::Sub(a, b) => go(a, phi)? - go(b, phi)?,
                Expr::Mul(a, b) => go(a, phi)? * go(b, phi)?,
                Expr::Neg(a) => -go(a, phi)?,
                Expr::Pow(a, k) => go(a, phi)?.powi(*k as i32),
                Expr::Apply(m, a) => m.eval(go(a, phi)?).0,
            })
        }
        go(&self.expr, phi)
    }

    /// Left-translated differential: block `i` is `X -> d/dt f(.., φ(z_i)exp(tX), ..)`.
    pub fn differential(&self, phi: &Representation) -> Result<Vector> {
        Ok(jet(&self.expr, phi)?.grad)
    }

    pub fn value_and_differential(&self, phi: &Representation) -> Result<(f64, Vector)> {
        let j = jet(&self.expr, phi)?;
        Ok((j.value, j.grad))
    }

    /// `f ∘ β*`: every word `w` is replaced by `β(w)`.
    pub fn pullback(&self, images: &[Word]) -> Self {
        Self::new(self.expr.map_words(|w| w.substitute(images)))
    }
}

impl std::ops::Add for &InvariantFunction {
    type Output = InvariantFunction;
    fn add(self, rhs: &InvariantFunction) -> InvariantFunction {
        InvariantFunction::new(Expr::Add(Box::new(self.expr.clone()), Box::new(rhs.expr.clone())))
    }
}

impl std::ops::Sub for &InvariantFunction {
    type Output = InvariantFunction;
    fn sub(self, rhs: &InvariantFunction) -> InvariantFunction {
        InvariantFunction::new(Expr::Sub(Box::new(self.expr.clone()), Box::new(rhs.expr.clone())))
    }
}

impl std::ops::Mul for &InvariantFunction {
    type Output = InvariantFunction;
    fn mul(self, rhs: &InvariantFunction) -> InvariantFunction {
        InvariantFunction::new(Expr::Mul(Box::new(self.expr.clone()), Box::new(rhs.expr.clone())))
    }
}

impl std::ops::Neg for &InvariantFunction {
    type Output = InvariantFunction;
    fn neg(self) -> InvariantFunction {
        InvariantFunction::new(Expr::Neg(Box::new(self.expr.clone())))
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let child = |c: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        if c.precedence() < min {
            write!(f, "(")?;
            write_expr(c, f)?;
            write!(f, ")")
        } else {
            write_expr(c, f)
        }
    };
    match e {
        Expr::Const(c) => write!(f, "{c:?}"),
        Expr::Trace(w) => write!(f, "tr({w})"),
        Expr::ReDet(w) => write!(f, "redet({w})"),
        Expr::Add(a, b) => {
            child(a, 1, f)?;
            write!(f, " + ")?;
            child(b, 2, f)
        }
        Expr::Sub(a, b) => {
            child(a, 1, f)?;
            write!(f, " - ")?;
            child(b, 2, f)
        }
        Expr::Mul(a, b) => {
            child(a, 2, f)?;
            write!(f, "*")?;
            child(b, 3, f)
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            child(a, 3, f)
        }
        Expr::Pow(a, k) => {
            child(a, 5, f)?;
            write!(f, "^{k}")
        }
        Expr::Apply(m, a) => {
            write!(f, "{}(", m.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for InvariantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.expr, f)
    }
}

impl FromStr for InvariantFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for InvariantFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for InvariantFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        InvariantFunction::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&format!("expected `{c}`"))
        }
    }

    fn parse(mut self) -> Result<InvariantFunction> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(InvariantFunction::new(e))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: u32 = match self.src[start..self.pos].parse() {
                Ok(k) => k,
                Err(_) => {
                    self.pos = start;
                    return self.err("expected a non-negative integer exponent");
                }
            };
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn word_argument(&mut self) -> Result<Word> {
        self.expect('(')?;
        let start = self.pos;
        let end = match self.src[start..].find(')') {
            Some(k) => start + k,
            None => return self.err("unterminated word argument"),
        };
        let w = crate::fox::parse_word(&self.src[start..end], start)?;
        self.pos = end + 1;
        Ok(w)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.ident();
                match name {
                    "tr" => Ok(Expr::Trace(self.word_argument()?)),
                    "redet" => Ok(Expr::ReDet(self.word_argument()?)),
                    _ => match ScalarMap::from_name(name) {
                        Some(m) => {
                            self.expect('(')?;
                            let e = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Apply(m, Box::new(e)))
                        }
                        None => {
                            self.pos = at;
                            self.err(&format!("unknown function `{name}`"))
                        }
                    },
                }
            }
            Some(_) => self.err("expected a number, function or `(`"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'-' || bytes[k] == b'+') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Expr::Const(v))
            }
            Err(_) => self.err("malformed number"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieGroupSpec;
    use crate::rep::{conjugate, random_tuple, sample_hom_xi};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn f(s: &str) -> InvariantFunction {
        InvariantFunction::parse(s).unwrap()
    }

    #[test]
    fn parser_examples() {
        let g = f("tr(x1*y1) + 0.5*tr(x2)^2");
        assert_eq!(g.to_string(), "tr(x1*y1) + 0.5*tr(x2)^2");
        assert_eq!(f(" tr( x1 * y1 )+0.5 * tr(x2) ^ 2 "), g);
        assert_eq!(f("-tr(x1) - (tr(y1) - 2)").to_string(), "-tr(x1) - (tr(y1) - 2.0)");
        assert_eq!(f("sin(tr(x1))*exp(1e-1*tr(y1))").to_string(), "sin(tr(x1))*exp(0.1*tr(y1))");
        assert!(InvariantFunction::parse("tr(x1").is_err());
        assert!(InvariantFunction::parse("foo(x1)").is_err());
        assert!(InvariantFunction::parse("tr(x1) +").is_err());
        match InvariantFunction::parse("tr(x1) + tr(z2)") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evaluation_examples() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = random_tuple(&spec, 2, &mut rng);
        let t1 = phi.image(0).trace().re;
        let t2 = phi.image(2).trace().re;
        let v = f("tr(x1) + 0.5*tr(x2)^2").eval(&phi).unwrap();
        assert!((v - (t1 + 0.5 * t2 * t2)).abs() < 1e-14);
        assert_eq!(f("3").eval(&phi).unwrap(), 3.0);
        assert!((f("redet(x1)").eval(&phi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_and_critical_differentials() {
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_tuple(&spec, 2, &mut rng);
        assert_eq!(f("2.5").differential(&phi).unwrap().norm(), 0.0);
        let mut images = phi.images().to_vec();
        images[0] = spec.scalar_element(-1.0).unwrap();
        let psi = phi.with_images(images);
        let d = f("tr(x1)").differential(&psi).unwrap();
        assert!(d.norm() < 1e-15);
    }

    fn fd_differential(g: &InvariantFunction, phi: &Representation, h: f64) -> Vector {
        let dim = phi.tangent_dim();
        Vector::from_fn(dim, |k, _| {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            let plus = g.eval(&phi.perturbed(&e, h)).unwrap();
            let minus = g.eval(&phi.perturbed(&e, -h)).unwrap();
            (plus - minus) / (2.0 * h)
        })
    }

    #[test]
    fn differential_matches_finite_differences() {
        let funcs = [
            "tr(x1*y1*x2^-1)",
            "tr(x1)*tr(y2*x1) - 0.3*tr(x2)^3",
            "sin(tr(x1*y1)) + exp(0.2*tr(y1^2*x2))",
            "redet(x1*y2) + cos(redet(x2))",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for spec in [LieGroupSpec::su2(), LieGroupSpec::u2(), LieGroupSpec::so3()] {
            let spec = Arc::new(spec);
            for _ in 0..10 {
                let phi = random_tuple(&spec, 2, &mut rng);
                for s in funcs {
                    let g = f(s);
                    let an = g.differential(&phi).unwrap();
                    let fd = fd_differential(&g, &phi, 1e-5);
                    assert!((an - fd).amax() < 1e-6, "{s}");
                }
            }
        }
    }

    #[test]
    fn differentials_are_cycles_on_members() {
        let spec = Arc::new(LieGroupSpec::su2());
        let phi = sample_hom_xi(&spec, 2, &spec.identity(), 3).unwrap();
        let data = crate::homology::build_complex(&phi);
        for s in ["tr(x1)", "tr(x1*y1*x2)", "tr(x1)*tr(y2) + sin(tr(y1*x2^-1))"] {
            let d = f(s).differential(&phi).unwrap();
            assert!(data.cycle_residual(&d) < 1e-9);
        }
    }

    #[test]
    fn pullback_examples() {
        let g = f("tr(x1*y1) + tr(y1)");
        let images: Vec<Word> = vec!["x1".parse().unwrap(), "y1*x1".parse().unwrap()];
        assert_eq!(g.pullback(&images).to_string(), "tr(x1*y1*x1) + tr(y1*x1)");
        let spec = Arc::new(LieGroupSpec::su2());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = random_tuple(&spec, 1, &mut rng);
        let lhs = g.pullback(&images).eval(&phi).unwrap();
        let rhs = g.eval(&phi.precompose(&images).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let word = prop::collection::vec((0usize..4, any::<bool>()), 1..5).prop_map(|ls| {
            let w = Word::reduce(ls.into_iter().map(|(g, i)| crate::fox::Letter::new(g, i)));
            w.to_string()
        });
        let leaf = prop_oneof![
            word.clone().prop_map(|w| format!("tr({w})")),
            (-3.0f64..3.0).prop_map(|c| format!("{c:?}")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
                inner.clone().prop_map(|a| format!("sin({a})")),
                inner.prop_map(|a| format!("({a})^2")),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn display_round_trips(s in arb_expr()) {
            let g = f(&s);
            prop_assert_eq!(f(&g.to_string()), g);
        }

        #[test]
        fn conjugation_invariance(s in arb_expr(), seed in 0u64..1000) {
            let spec = Arc::new(LieGroupSpec::su2());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = random_tuple(&spec, 2, &mut rng);
            let x = spec.random_element(&mut rng);
            let g = f(&s);
            let a = g.eval(&phi).unwrap();
            let b = g.eval(&conjugate(&phi, &x)).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            let _ = rng.random::<u8>();
        }
    }
}
