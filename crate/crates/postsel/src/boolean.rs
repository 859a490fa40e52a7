//! Bit strings, (partial) Boolean functions and certificates.
//!
//! Functions live on `{0,1}^n` with `n <= 24`; the domain and the values are
//! kept as bitmaps over the cube, so membership tests are O(1) and whole-cube
//! sweeps are cheap at desk scale.  Variable indices are 1-based throughout,
//! and index 1 is the leftmost character of a printed bit string.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::poly::UnivariatePolynomial;
use crate::rat::int;
use crate::{Error, Result};

/// Largest `n` for which functions are represented as cube bitmaps.
pub const MAX_FUNCTION_VARS: usize = 24;
/// Largest `n` accepted by the certificate search (3^n partial assignments).
pub const MAX_CERTIFICATE_VARS: usize = 12;

// ---------------------------------------------------------------------------
// Bit strings
// ---------------------------------------------------------------------------

/// A fixed-length bit string; bit `i` (1-based) is stored in bit `i-1` of the
/// word, so the printed form `b_1 b_2 ... b_n` has index 1 leftmost.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    n: usize,
    bits: u64,
}

impl BitString {
    /// A bit string of length `n` from its packed word (bits past `n` must be
    /// zero).
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::TooManyVariables {
                what: "bit strings",
                n,
                cap: 64,
            });
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "bit word {bits:#x} has bits set past length {n}"
            )));
        }
        Ok(BitString { n, bits })
    }

    /// The all-zero string of length `n`.
    pub fn zeros(n: usize) -> Self {
        BitString::new(n, 0).expect("length within cap")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Bit `i`, 1-based. Panics when out of range.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "bit index {i} out of 1..={}", self.n);
        self.bits >> (i - 1) & 1 == 1
    }

    /// Hamming weight `|x|`.
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// The packed word (bit `i` of the string in bit `i-1`).
    pub fn word(&self) -> u64 {
        self.bits
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut n = 0;
        for (pos, c) in s.trim().chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << pos,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bit string may only contain 0 and 1, got `{c}`"),
                    })
                }
            }
            n = pos + 1;
            if n > 64 {
                return Err(Error::TooManyVariables {
                    what: "bit strings",
                    n,
                    cap: 64,
                });
            }
        }
        BitString::new(n, bits)
    }
}

/// All `2^n` bit strings of length `n`, in ascending word order.
pub fn cube(n: usize) -> impl Iterator<Item = BitString> {
    assert!(
        n <= MAX_FUNCTION_VARS,
        "cube iteration capped at n = {MAX_FUNCTION_VARS}"
    );
    (0u64..1 << n).map(move |w| BitString { n, bits: w })
}

// ---------------------------------------------------------------------------
// Boolean functions
// ---------------------------------------------------------------------------

/// A possibly partial Boolean function on `{0,1}^n`, `n <= 24`.
///
/// The domain and values are bitmaps indexed by the packed word of an input.
/// When the function is total and symmetric, the weight profile
/// `(f_0, ..., f_n)` is detected at construction and cached.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    domain: Vec<u64>,
    values: Vec<u64>,
    profile: Option<Vec<bool>>,
}

fn bitmap_get(map: &[u64], idx: u64) -> bool {
    map[(idx >> 6) as usize] >> (idx & 63) & 1 == 1
}

fn bitmap_set(map: &mut [u64], idx: u64) {
    map[(idx >> 6) as usize] |= 1 << (idx & 63);
}

impl BooleanFunction {
    fn empty(n: usize) -> Result<Self> {
        if n > MAX_FUNCTION_VARS {
            return Err(Error::TooManyVariables {
                what: "Boolean functions",
                n,
                cap: MAX_FUNCTION_VARS,
            });
        }
        let blocks = (1usize << n).div_ceil(64);
        Ok(BooleanFunction {
            n,
            domain: vec![0; blocks],
            values: vec![0; blocks],
            profile: None,
        })
    }

    /// Total function from a pointwise rule.
    pub fn new_total(n: usize, rule: impl Fn(&BitString) -> bool) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for x in cube(n) {
            bitmap_set(&mut f.domain, x.word());
            if rule(&x) {
                bitmap_set(&mut f.values, x.word());
            }
        }
        f.profile = f.detect_profile();
        Ok(f)
    }

    /// Total symmetric function from its weight profile `(f_0, ..., f_n)`.
    pub fn from_profile(n: usize, profile: &[bool]) -> Result<Self> {
        if profile.len() != n + 1 {
            return Err(Error::InvalidParameter(format!(
                "profile has {} entries, expected {}",
                profile.len(),
                n + 1
            )));
        }
        let f = Self::new_total(n, |x| profile[x.weight()])?;
        debug_assert_eq!(f.profile.as_deref(), Some(profile));
        Ok(f)
    }

    /// Partial function from explicit `(input, value)` pairs.  Conflicting
    /// values for one input are rejected; duplicates with equal values are
    /// collapsed.
    pub fn from_points(n: usize, points: &[(BitString, bool)]) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for (x, v) in points {
            if x.len() != n {
                return Err(Error::BitLength {
                    expected: n,
                    got: x.len(),
                });
            }
            if bitmap_get(&f.domain, x.word()) && bitmap_get(&f.values, x.word()) != *v {
                return Err(Error::InvalidParameter(format!(
                    "conflicting values for input {x}"
                )));
            }
            bitmap_set(&mut f.domain, x.word());
            if *v {
                bitmap_set(&mut f.values, x.word());
            }
        }
        if f.domain_size() == 0 {
            return Err(Error::EmptyDomain);
        }
        f.profile = f.detect_profile();
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `f(x)`, or `None` outside the domain.
    pub fn value(&self, x: &BitString) -> Option<bool> {
        assert_eq!(x.len(), self.n, "input length mismatch");
        self.value_at(x.word())
    }

    pub(crate) fn value_at(&self, idx: u64) -> Option<bool> {
        if bitmap_get(&self.domain, idx) {
            Some(bitmap_get(&self.values, idx))
        } else {
            None
        }
    }

    pub fn is_total(&self) -> bool {
        self.domain_size() == 1usize << self.n
    }

    pub fn domain_size(&self) -> usize {
        self.domain.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Domain points in ascending word order.
    pub fn domain_iter(&self) -> impl Iterator<Item = BitString> + '_ {
        cube(self.n).filter(|x| bitmap_get(&self.domain, x.word()))
    }

    /// All domain values equal (fails on an empty domain).
    pub fn is_constant(&self) -> bool {
        let mut it = self.domain_iter();
        match it.next() {
            None => false,
            Some(first) => {
                let v = self.value(&first).unwrap();
                it.all(|x| self.value(&x).unwrap() == v)
            }
        }
    }

    /// Weight profile of a total symmetric function, if this is one.
    pub fn symmetric_profile(&self) -> Option<&[bool]> {
        self.profile.as_deref()
    }

    /// Per-weight values when the domain is closed under bit permutations and
    /// the value depends only on the weight: entry `k` is `Some(f_k)` when
    /// weight `k` lies in the domain, `None` when it is entirely outside.
    /// Returns `None` for asymmetric functions.
    pub fn symmetric_weight_values(&self) -> Option<Vec<Option<bool>>> {
        let mut classes: Vec<Option<Option<bool>>> = vec![None; self.n + 1];
        let mut in_domain = vec![0usize; self.n + 1];
        for x in self.domain_iter() {
            let w = x.weight();
            in_domain[w] += 1;
            let v = self.value(&x).unwrap();
            match classes[w] {
                None => classes[w] = Some(Some(v)),
                Some(Some(prev)) if prev == v => {}
                _ => return None, // mixed values within one weight class
            }
        }
        // Each touched weight class must be entirely inside the domain.
        for (k, &count) in in_domain.iter().enumerate() {
            if count != 0 && num_bigint::BigInt::from(count) != crate::rat::binomial(self.n, k) {
                return None;
            }
        }
        Some(classes.into_iter().map(|c| c.flatten()).collect())
    }

    fn detect_profile(&self) -> Option<Vec<bool>> {
        if !self.is_total() {
            return None;
        }
        let classes = self.symmetric_weight_values()?;
        classes.into_iter().collect()
    }

    // -- built-ins ---------------------------------------------------------

    /// OR: 1 unless all bits are 0.
    pub fn or(n: usize) -> Self {
        Self::new_total(n, |x| x.weight() >= 1).expect("small n")
    }

    /// AND: 1 only on the all-ones input.
    pub fn and(n: usize) -> Self {
        Self::new_total(n, move |x| x.weight() == n).expect("small n")
    }

    /// Majority: 1 when strictly more than half the bits are 1.
    pub fn maj(n: usize) -> Self {
        Self::new_total(n, move |x| 2 * x.weight() > n).expect("small n")
    }

    /// 0 exactly on the middle weight `ceil(n/2)`, 1 elsewhere.
    pub fn notmid(n: usize) -> Self {
        let mid = n.div_ceil(2);
        Self::new_total(n, move |x| x.weight() != mid).expect("small n")
    }

    /// Parity of the Hamming weight.
    pub fn parity(n: usize) -> Self {
        Self::new_total(n, |x| x.weight() % 2 == 1).expect("small n")
    }

    /// The constant function `b`.
    pub fn constant(n: usize, b: bool) -> Self {
        Self::new_total(n, move |_| b).expect("small n")
    }

    /// Built-in function by name (`or`, `and`, `maj`, `notmid`, `parity`,
    /// `const0`, `const1`).
    pub fn builtin(name: &str, n: usize) -> Result<Self> {
        match name {
            "or" => Ok(Self::or(n)),
            "and" => Ok(Self::and(n)),
            "maj" => Ok(Self::maj(n)),
            "notmid" => Ok(Self::notmid(n)),
            "parity" => Ok(Self::parity(n)),
            "const0" => Ok(Self::constant(n, false)),
            "const1" => Ok(Self::constant(n, true)),
            _ => Err(Error::InvalidParameter(format!(
                "unknown built-in function `{name}`"
            ))),
        }
    }

    // -- text format -------------------------------------------------------

    /// Canonical text form.
    ///
    /// Header `n=<N> <total|partial> <symmetric|general>`, followed by a
    /// `profile=` line for total symmetric functions or one
    /// `bits=<01...> value=<0|1>` line per domain point (sorted by the
    /// printed string) otherwise.
    pub fn to_text(&self) -> String {
        let total = self.is_total();
        let symmetric = self.symmetric_weight_values().is_some();
        let mut out = format!(
            "n={} {} {}\n",
            self.n,
            if total { "total" } else { "partial" },
            if symmetric { "symmetric" } else { "general" }
        );
        if let Some(profile) = &self.profile {
            out.push_str("profile=");
            let entries: Vec<&str> = profile.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&entries.join(" "));
            out.push('\n');
        } else {
            let mut lines: Vec<(String, bool)> = self
                .domain_iter()
                .map(|x| (x.to_string(), self.value(&x).unwrap()))
                .collect();
            lines.sort();
            for (bits, v) in lines {
                out.push_str(&format!("bits={bits} value={}\n", u8::from(v)));
            }
        }
        out
    }

    /// Parses the text form produced by [`Self::to_text`].
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty function description".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let perr = |line, msg: String| Error::Parse { line, msg };
        if parts.len() != 3 || !parts[0].starts_with("n=") {
            return Err(perr(
                line_no,
                format!("expected `n=<N> total|partial symmetric|general`, got `{header}`"),
            ));
        }
        let n: usize = parts[0][2..]
            .parse()
            .map_err(|_| perr(line_no, format!("bad variable count in `{}`", parts[0])))?;
        let total = match parts[1] {
            "total" => true,
            "partial" => false,
            other => {
                return Err(perr(
                    line_no,
                    format!("expected total|partial, got `{other}`"),
                ))
            }
        };
        let symmetric = match parts[2] {
            "symmetric" => true,
            "general" => false,
            other => {
                return Err(perr(
                    line_no,
                    format!("expected symmetric|general, got `{other}`"),
                ))
            }
        };

        let body: Vec<(usize, &str)> = lines.collect();
        if let Some(&(line, first)) = body.first() {
            if let Some(rest) = first.strip_prefix("profile=") {
                if !total || !symmetric {
                    return Err(perr(
                        line,
                        "profile form is only valid for total symmetric functions".into(),
                    ));
                }
                if body.len() > 1 {
                    return Err(perr(
                        body[1].0,
                        "unexpected content after profile line".into(),
                    ));
                }
                let mut profile = Vec::new();
                for tok in rest.split_whitespace() {
                    match tok {
                        "0" => profile.push(false),
                        "1" => profile.push(true),
                        other => {
                            return Err(perr(
                                line,
                                format!("profile entries are 0/1, got `{other}`"),
                            ))
                        }
                    }
                }
                return Self::from_profile(n, &profile);
            }
        }

        let mut points = Vec::new();
        for (line, l) in body {
            let mut bits = None;
            let mut value = None;
            for tok in l.split_whitespace() {
                if let Some(b) = tok.strip_prefix("bits=") {
                    bits = Some(b.parse::<BitString>()?);
                } else if let Some(v) = tok.strip_prefix("value=") {
                    value = Some(match v {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(perr(line, format!("value must be 0 or 1, got `{other}`")))
                        }
                    });
                } else {
                    return Err(perr(line, format!("unexpected token `{tok}`")));
                }
            }
            match (bits, value) {
                (Some(b), Some(v)) => {
                    if b.len() != n {
                        return Err(Error::BitLength {
                            expected: n,
                            got: b.len(),
                        });
                    }
                    points.push((b, v));
                }
                _ => return Err(perr(line, "expected `bits=<01...> value=<0|1>`".into())),
            }
        }
        let f = Self::from_points(n, &points)?;
        if total && !f.is_total() {
            return Err(Error::NotTotal);
        }
        if symmetric && f.symmetric_weight_values().is_none() {
            return Err(Error::NotSymmetric);
        }
        Ok(f)
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BooleanFunction(n={}, |dom|={})",
            self.n,
            self.domain_size()
        )
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// A partial assignment with a claimed function value: every domain input
/// consistent with the assignment must take the value `label`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate {
    /// Mask of fixed variables (bit `i-1` for variable `i`).
    vars: u64,
    /// Values on the fixed variables (subset of `vars`).
    values: u64,
    /// The claimed function value.
    label: bool,
}

impl Certificate {
    pub fn new(vars: u64, values: u64, label: bool) -> Self {
        assert_eq!(values & !vars, 0, "values outside the fixed variables");
        Certificate {
            vars,
            values,
            label,
        }
    }

    pub fn label(&self) -> bool {
        self.label
    }

    /// Number of fixed variables.
    pub fn size(&self) -> usize {
        self.vars.count_ones() as usize
    }

    pub fn fixed_vars(&self) -> u64 {
        self.vars
    }

    pub fn fixed_values(&self) -> u64 {
        self.values
    }

    /// Does `x` agree with the assignment?
    pub fn consistent_with(&self, x: &BitString) -> bool {
        x.word() & self.vars == self.values
    }

    /// True when every consistent domain input of `f` has value `label`.
    pub fn certifies(&self, f: &BooleanFunction) -> bool {
        for y in f.domain_iter() {
            if y.word() & self.vars == self.values && f.value(&y).unwrap() != self.label {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in 0..64 {
            if self.vars >> i & 1 == 1 {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "x{}={}", i + 1, self.values >> i & 1)?;
                first = false;
            }
        }
        write!(f, "}} -> {}", u8::from(self.label))
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({self})")
    }
}

/// Certificate complexities of a function together with one minimum witness
/// per domain input.
#[derive(Clone, Debug)]
pub struct CertificateComplexity {
    /// Max over 0-inputs of the smallest certificate (0 when no 0-inputs).
    pub c0: usize,
    /// Max over 1-inputs of the smallest certificate (0 when no 1-inputs).
    pub c1: usize,
    /// `max(c0, c1)`.
    pub c: usize,
    /// For each domain input, a minimum-size certificate consistent with it.
    pub witnesses: BTreeMap<BitString, Certificate>,
}

impl CertificateComplexity {
    /// Non-deterministic query complexities `(N_0, N_1, N)`; for classical
    /// query algorithms these coincide with the certificate numbers.
    pub fn nondeterministic(&self) -> (usize, usize, usize) {
        (self.c0, self.c1, self.c)
    }
}

/// Lexicographic subsets of `{1, ..., n}` of size `k`, as variable masks.
pub(crate) fn subsets_lex(n: usize, k: usize) -> impl Iterator<Item = u64> {
    // Standard combination stepping keeps the index list sorted; listing them
    // in this order means the first certifying subset found is the
    // lexicographically smallest variable set.
    let mut idx: Vec<usize> = (1..=k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << (i - 1));
        if k == 0 {
            done = true;
            return Some(mask);
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            if idx[i - 1] < n - (k - i) {
                idx[i - 1] += 1;
                for j in i..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            i -= 1;
        }
        Some(mask)
    })
}

/// Certificate complexity by exhaustive search.
///
/// For each domain input, subsets of variables are tried in increasing size
/// and lexicographic order, so the recorded witness is the minimum-size
/// certificate with the lexicographically smallest variable set (the
/// assignment itself is forced by the input).
pub fn certificate_complexity(f: &BooleanFunction) -> Result<CertificateComplexity> {
    let n = f.n();
    if n > MAX_CERTIFICATE_VARS {
        return Err(Error::TooManyVariables {
            what: "certificate search",
            n,
            cap: MAX_CERTIFICATE_VARS,
        });
    }
    if f.domain_size() == 0 {
        return Err(Error::EmptyDomain);
    }
    let domain: Vec<u64> = f.domain_iter().map(|x| x.word()).collect();
    let mut witnesses = BTreeMap::new();
    let (mut c0, mut c1) = (0usize, 0usize);
    for &x in &domain {
        let label = f.value_at(x).unwrap();
        let mut found = None;
        'sizes: for s in 0..=n {
            for vars in subsets_lex(n, s) {
                let cert = Certificate::new(vars, x & vars, label);
                let ok = domain
                    .iter()
                    .all(|&y| y & vars != x & vars || f.value_at(y).unwrap() == label);
                if ok {
                    found = Some(cert);
                    break 'sizes;
                }
            }
        }
        let cert = found.expect("the full assignment always certifies");
        if label {
            c1 = c1.max(cert.size());
        } else {
            c0 = c0.max(cert.size());
        }
        witnesses.insert(BitString::new(n, x).unwrap(), cert);
    }
    Ok(CertificateComplexity {
        c0,
        c1,
        c: c0.max(c1),
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// Symmetric measures
// ---------------------------------------------------------------------------

/// Step gap of a total symmetric non-constant function: the minimum of
/// `|2k - n + 1|` over weights `k` where the profile flips between `k` and
/// `k+1`.  Returns `(gamma, k)` with the smallest minimizing `k`.
pub fn gamma(f: &BooleanFunction) -> Result<(usize, usize)> {
    if !f.is_total() {
        return Err(Error::NotTotal);
    }
    let profile = f.symmetric_profile().ok_or(Error::NotSymmetric)?;
    let n = f.n() as i64;
    let mut best: Option<(usize, usize)> = None;
    for k in 0..f.n() {
        if profile[k] != profile[k + 1] {
            let g = (2 * k as i64 - n + 1).unsigned_abs() as usize;
            if best.map_or(true, |(bg, _)| g < bg) {
                best = Some((g, k));
            }
        }
    }
    best.ok_or(Error::ConstantFunction {
        value: profile.first().copied(),
    })
}

/// The univariate non-deterministic polynomial of a symmetric function:
/// the monic product of `(X - k)` over the domain weights `k` where `f`
/// vanishes.  Nonzero exactly on the weights where `f = 1`.
pub fn ndeg_symmetric(f: &BooleanFunction) -> Result<UnivariatePolynomial> {
    let classes = f.symmetric_weight_values().ok_or(Error::NotSymmetric)?;
    let any_one = classes.iter().any(|c| *c == Some(true));
    if !any_one {
        return Err(Error::ConstantFunction { value: Some(false) });
    }
    let mut p = UnivariatePolynomial::one();
    for (k, class) in classes.iter().enumerate() {
        if *class == Some(false) {
            // multiply by (X - k)
            p = p.mul(&UnivariatePolynomial::from_coeffs(vec![
                -int(k as i64),
                int(1),
            ]));
        }
    }
    Ok(p)
}

/// Does `p(|x|) != 0` hold exactly on the 1-inputs of the symmetric `f`?
pub fn is_nondeterministic_poly(p: &UnivariatePolynomial, f: &BooleanFunction) -> Result<bool> {
    let classes = f.symmetric_weight_values().ok_or(Error::NotSymmetric)?;
    for (k, class) in classes.iter().enumerate() {
        if let Some(v) = class {
            let nonzero = !p.eval(&int(k as i64)).is_zero();
            if nonzero != *v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
