//! Multilinear polynomials over literals with nonnegative coefficients, the
//! rational functions they form, and symmetrization to univariate
//! polynomials in the Hamming weight.
//!
//! A monomial is a product of literals `x_i` and `(1 - x_j)` over disjoint
//! index sets.  Products that pair `x_i` with `(1 - x_i)` vanish on the cube
//! and are dropped, and `x_i^2 = x_i`, so every polynomial here is reduced.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::boolean::{cube, BitString, BooleanFunction, MAX_FUNCTION_VARS};
use crate::rat::{fmt_slash, parse_rational, Rational};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

/// A product of positive literals `x_i` (mask `pos`) and negated literals
/// `(1 - x_j)` (mask `neg`) over disjoint variable sets; bit `i-1` stands for
/// variable `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralMonomial {
    pos: u64,
    neg: u64,
}

impl LiteralMonomial {
    pub fn new(pos: u64, neg: u64) -> Result<Self> {
        let overlap = pos & neg;
        if overlap != 0 {
            return Err(Error::OverlappingLiterals {
                var: overlap.trailing_zeros() as usize + 1,
            });
        }
        Ok(LiteralMonomial { pos, neg })
    }

    /// The empty product, i.e. the constant 1.
    pub fn one() -> Self {
        LiteralMonomial { pos: 0, neg: 0 }
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    pub fn neg(&self) -> u64 {
        self.neg
    }

    /// Total degree `|S| + |T|`.
    pub fn degree(&self) -> usize {
        (self.pos.count_ones() + self.neg.count_ones()) as usize
    }

    /// Largest variable index used, 0 when constant.
    pub fn max_var(&self) -> usize {
        64 - (self.pos | self.neg).leading_zeros() as usize
    }

    /// Value on `x`: 1 when all positive literals are set and all negated
    /// ones are clear, else 0.
    pub fn eval_word(&self, x: u64) -> bool {
        x & self.pos == self.pos && x & self.neg == 0
    }

    /// Product of two monomials; `None` when it contains `x_i (1 - x_i)` and
    /// therefore vanishes on the whole cube.
    pub fn product(&self, other: &Self) -> Option<Self> {
        if self.pos & other.neg != 0 || self.neg & other.pos != 0 {
            return None;
        }
        Some(LiteralMonomial {
            pos: self.pos | other.pos,
            neg: self.neg | other.neg,
        })
    }
}

impl fmt::Display for LiteralMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pos == 0 && self.neg == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for i in 1..=self.max_var() {
            let lit = if self.pos >> (i - 1) & 1 == 1 {
                format!("x{i}")
            } else if self.neg >> (i - 1) & 1 == 1 {
                format!("(1-x{i})")
            } else {
                continue;
            };
            if !first {
                f.write_str("*")?;
            }
            f.write_str(&lit)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for LiteralMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiteralMonomial({self})")
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// A polynomial `sum_m c_m * m` over literal monomials on `n` variables with
/// strictly positive rational coefficients (zero terms are never stored).
#[derive(Clone, PartialEq, Eq)]
pub struct LiteralPolynomial {
    n: usize,
    terms: BTreeMap<LiteralMonomial, Rational>,
}

impl LiteralPolynomial {
    /// The zero polynomial on `n` variables.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_FUNCTION_VARS {
            return Err(Error::TooManyVariables {
                what: "literal polynomials",
                n,
                cap: MAX_FUNCTION_VARS,
            });
        }
        Ok(LiteralPolynomial {
            n,
            terms: BTreeMap::new(),
        })
    }

    /// The constant polynomial `c` (`c > 0`).
    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        let mut p = Self::zero(n)?;
        p.add_term(LiteralMonomial::one(), c)?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in the canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&LiteralMonomial, &Rational)> {
        self.terms.iter()
    }

    /// Max total degree of a monomial, 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Sum of all coefficients.
    pub fn coefficient_mass(&self) -> Rational {
        self.terms.values().sum()
    }

    /// Adds `c * m`; `c` must be strictly positive and `m` within range.
    pub fn add_term(&mut self, m: LiteralMonomial, c: Rational) -> Result<()> {
        if !c.is_positive() {
            return Err(Error::NonpositiveCoefficient { coeff: c });
        }
        if m.max_var() > self.n {
            return Err(Error::IndexOutOfRange {
                index: m.max_var(),
                n: self.n,
            });
        }
        *self.terms.entry(m).or_insert_with(Rational::zero) += c;
        Ok(())
    }

    /// `self += scale * other`, with `scale > 0`.
    pub fn add_scaled(&mut self, other: &Self, scale: &Rational) -> Result<()> {
        assert_eq!(self.n, other.n, "variable count mismatch");
        if !scale.is_positive() {
            return Err(Error::NonpositiveCoefficient {
                coeff: scale.clone(),
            });
        }
        for (m, c) in &other.terms {
            *self.terms.entry(*m).or_insert_with(Rational::zero) += c * scale;
        }
        Ok(())
    }

    /// The polynomial scaled by `c > 0`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonpositiveCoefficient { coeff: c.clone() });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, coeff)| (*m, coeff * c))
            .collect();
        Ok(LiteralPolynomial { n: self.n, terms })
    }

    /// Product of two polynomials; monomial products containing
    /// `x_i (1 - x_i)` vanish pointwise and are dropped.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count mismatch");
        let mut terms: BTreeMap<LiteralMonomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(m) = ma.product(mb) {
                    *terms.entry(m).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        }
        LiteralPolynomial { n: self.n, terms }
    }

    /// `self^k` for `k >= 1`.
    pub fn pow(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Value at `x`.
    pub fn eval(&self, x: &BitString) -> Rational {
        assert_eq!(x.len(), self.n, "input length mismatch");
        self.eval_word(x.word())
    }

    pub(crate) fn eval_word(&self, x: u64) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            if m.eval_word(x) {
                acc += c;
            }
        }
        acc
    }

    /// Canonical text form: `n=<N>` then one
    /// `term coef=<p/q> pos=<i,...> neg=<j,...>` line per monomial.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for (m, c) in &self.terms {
            out.push_str(&term_line(m, c));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty polynomial description".into(),
        })?;
        let n = parse_n_header(line_no, header)?;
        let mut p = Self::zero(n)?;
        for (line, l) in lines {
            let (m, c) = parse_term_line(line, l)?;
            p.add_term(m, c)?;
        }
        Ok(p)
    }
}

impl fmt::Display for LiteralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            if m.degree() == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for LiteralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiteralPolynomial({self})")
    }
}

fn term_line(m: &LiteralMonomial, c: &Rational) -> String {
    let list = |mask: u64| -> String {
        (1..=64)
            .filter(|i| mask >> (i - 1) & 1 == 1)
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "term coef={} pos={} neg={}\n",
        fmt_slash(c),
        list(m.pos()),
        list(m.neg())
    )
}

fn parse_n_header(line: usize, header: &str) -> Result<usize> {
    header
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or(Error::Parse {
            line,
            msg: format!("expected `n=<N>`, got `{header}`"),
        })
}

fn parse_term_line(line: usize, l: &str) -> Result<(LiteralMonomial, Rational)> {
    let perr = |msg: String| Error::Parse { line, msg };
    let mut coef = None;
    let mut pos = None;
    let mut neg = None;
    let parse_mask = |s: &str| -> Result<u64> {
        let mut mask = 0u64;
        for tok in s.split(',').filter(|t| !t.is_empty()) {
            let i: usize = tok
                .parse()
                .map_err(|_| perr(format!("bad variable index `{tok}`")))?;
            if i == 0 || i > 64 {
                return Err(perr(format!("variable index {i} out of range")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(mask)
    };
    let mut toks = l.split_whitespace();
    if toks.next() != Some("term") {
        return Err(perr(format!("expected `term ...`, got `{l}`")));
    }
    for tok in toks {
        if let Some(v) = tok.strip_prefix("coef=") {
            coef = Some(parse_rational(v)?);
        } else if let Some(v) = tok.strip_prefix("pos=") {
            pos = Some(parse_mask(v)?);
        } else if let Some(v) = tok.strip_prefix("neg=") {
            neg = Some(parse_mask(v)?);
        } else {
            return Err(perr(format!("unexpected token `{tok}`")));
        }
    }
    match (coef, pos, neg) {
        (Some(c), Some(p), Some(ng)) => Ok((LiteralMonomial::new(p, ng)?, c)),
        _ => Err(perr(
            "expected `term coef=<p/q> pos=<i,...> neg=<j,...>`".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Rational functions
// ---------------------------------------------------------------------------

/// A ratio `P/Q` of literal polynomials with nonnegative coefficients whose
/// denominator is strictly positive on the whole cube (checked exhaustively
/// at construction).
#[derive(Clone, PartialEq, Eq)]
pub struct PosRationalFunction {
    p: LiteralPolynomial,
    q: LiteralPolynomial,
}

impl PosRationalFunction {
    pub fn new(p: LiteralPolynomial, q: LiteralPolynomial) -> Result<Self> {
        if p.n() != q.n() {
            return Err(Error::InvalidParameter(format!(
                "numerator on {} variables, denominator on {}",
                p.n(),
                q.n()
            )));
        }
        for x in cube(p.n()) {
            if q.eval(&x).is_zero() {
                return Err(Error::DenominatorVanishes { x: x.to_string() });
            }
        }
        Ok(PosRationalFunction { p, q })
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn numerator(&self) -> &LiteralPolynomial {
        &self.p
    }

    pub fn denominator(&self) -> &LiteralPolynomial {
        &self.q
    }

    /// `max(deg P, deg Q)`.
    pub fn degree(&self) -> usize {
        self.p.degree().max(self.q.degree())
    }

    /// `P(x) / Q(x)`.
    pub fn value(&self, x: &BitString) -> Rational {
        self.p.eval(x) / self.q.eval(x)
    }

    /// `(P(x), Q(x))`.
    pub fn parts(&self, x: &BitString) -> (Rational, Rational) {
        (self.p.eval(x), self.q.eval(x))
    }

    /// Worst-case deviation `max_x |P(x)/Q(x) - f(x)|` over the domain of `f`.
    pub fn approx_error(&self, f: &BooleanFunction) -> Result<Rational> {
        if f.n() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "function on {} variables, rational function on {}",
                f.n(),
                self.n()
            )));
        }
        if f.domain_size() == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut worst = Rational::zero();
        for x in f.domain_iter() {
            let target = if f.value(&x).unwrap() {
                Rational::one()
            } else {
                Rational::zero()
            };
            let dev = (self.value(&x) - target).abs();
            if dev > worst {
                worst = dev;
            }
        }
        Ok(worst)
    }

    /// Does `P/Q` approximate `f` within `eps` on the whole domain?
    pub fn represents(&self, f: &BooleanFunction, eps: &Rational) -> Result<bool> {
        Ok(self.approx_error(f)? <= *eps)
    }

    /// Canonical text form: `n=<N>`, a `P:` block and a `Q:` block of term
    /// lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\nP:\n", self.n());
        for (m, c) in self.p.terms() {
            out.push_str(&term_line(m, c));
        }
        out.push_str("Q:\n");
        for (m, c) in self.q.terms() {
            out.push_str(&term_line(m, c));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty rational function description".into(),
        })?;
        let n = parse_n_header(line_no, header)?;
        let mut p = LiteralPolynomial::zero(n)?;
        let mut q = LiteralPolynomial::zero(n)?;
        let mut target: Option<bool> = None; // true = in P block
        for (line, l) in lines {
            match l {
                "P:" => target = Some(true),
                "Q:" => target = Some(false),
                _ => {
                    let (m, c) = parse_term_line(line, l)?;
                    match target {
                        Some(true) => p.add_term(m, c)?,
                        Some(false) => q.add_term(m, c)?,
                        None => {
                            return Err(Error::Parse {
                                line,
                                msg: "term before `P:`/`Q:` block".into(),
                            })
                        }
                    }
                }
            }
        }
        Self::new(p, q)
    }
}

impl fmt::Display for PosRationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.p, self.q)
    }
}

impl fmt::Debug for PosRationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PosRationalFunction({self})")
    }
}

/// The textbook approximation of OR: `P = sum_i x_i`,
/// `Q = eps + sum_i x_i`.  Exact on the all-zero input and within
/// `eps / (eps + 1)` elsewhere.
pub fn or_rational(n: usize, eps: &Rational) -> Result<PosRationalFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(
            "the error parameter must be positive".into(),
        ));
    }
    let mut p = LiteralPolynomial::zero(n)?;
    for i in 1..=n {
        p.add_term(LiteralMonomial::new(1 << (i - 1), 0)?, Rational::one())?;
    }
    let mut q = p.clone();
    q.add_term(LiteralMonomial::one(), eps.clone())?;
    PosRationalFunction::new(p, q)
}

// ---------------------------------------------------------------------------
// Univariate polynomials
// ---------------------------------------------------------------------------

/// A univariate polynomial with rational coefficients, stored in ascending
/// powers with trailing zeros trimmed; the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct UnivariatePolynomial {
    coeffs: Vec<Rational>,
}

impl UnivariatePolynomial {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = UnivariatePolynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        UnivariatePolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UnivariatePolynomial {
            coeffs: vec![Rational::one()],
        }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Ascending coefficients (empty for zero).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Rational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }
}

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            match j {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if j == 1 {
                        f.write_str("k")?;
                    } else {
                        write!(f, "k^{j}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnivariatePolynomial({self})")
    }
}

// ---------------------------------------------------------------------------
// Symmetrization
// ---------------------------------------------------------------------------

/// Average of one monomial with `s` positive and `t` negated literals over
/// the inputs of weight `k`, as a polynomial in `k`:
/// `k (k-1) ... (k-s+1) * (n-k) ... (n-k-t+1) / (n (n-1) ... (n-s-t+1))`.
fn class_average(n: usize, s: usize, t: usize) -> UnivariatePolynomial {
    let mut p = UnivariatePolynomial::one();
    // falling factorial of k
    for j in 0..s {
        p = p.mul(&UnivariatePolynomial::from_coeffs(vec![
            -Rational::from_integer(BigInt::from(j)),
            Rational::one(),
        ]));
    }
    // falling factorial of (n - k)
    for j in 0..t {
        p = p.mul(&UnivariatePolynomial::from_coeffs(vec![
            Rational::from_integer(BigInt::from(n as i64 - j as i64)),
            -Rational::one(),
        ]));
    }
    let mut denom = BigInt::one();
    for j in 0..s + t {
        denom *= BigInt::from(n as i64 - j as i64);
    }
    p.scaled(&Rational::new(BigInt::one(), denom))
}

/// Symmetrization: the polynomial `p_hat(k)` equal, for every integer
/// `0 <= k <= n`, to the average of `p` over all inputs of weight `k`.
/// Degree does not go up.
pub fn symmetrize(p: &LiteralPolynomial) -> UnivariatePolynomial {
    let mut acc = UnivariatePolynomial::zero();
    for (m, c) in p.terms() {
        let avg = class_average(
            p.n(),
            m.pos().count_ones() as usize,
            m.neg().count_ones() as usize,
        );
        acc = acc.add(&avg.scaled(c));
    }
    acc
}

/// Symmetrizes numerator and denominator separately.
pub fn symmetrize_rational(
    r: &PosRationalFunction,
) -> (UnivariatePolynomial, UnivariatePolynomial) {
    (symmetrize(r.numerator()), symmetrize(r.denominator()))
}

/// Reference implementation of symmetrization: entry `k` is the average of
/// `p` over all inputs of weight `k`, computed by direct enumeration.
pub fn symmetrize_brute(p: &LiteralPolynomial) -> Vec<Rational> {
    let n = p.n();
    let mut sums = vec![Rational::zero(); n + 1];
    let mut counts = vec![0u64; n + 1];
    for x in cube(n) {
        let w = x.weight();
        sums[w] += p.eval(&x);
        counts[w] += 1;
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| s / Rational::from_integer(BigInt::from(c)))
        .collect()
}
