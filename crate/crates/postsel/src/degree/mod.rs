//! Degree measures of rational representations: feasibility programs for a
//! given degree, the minimum degree itself, and closed-form lower bounds for
//! majority and general symmetric functions.
//!
//! Feasibility of "some `P/Q` of degree at most `d` with nonnegative
//! coefficients approximates `f` within `eps`" is decided exactly by a
//! linear program over the monomial coefficients.  For symmetric functions
//! the program collapses: averaging any solution over bit permutations
//! yields one with equal coefficients on every monomial class with `s`
//! positive and `u` negated literals, and the constraints only depend on the
//! Hamming weight, so one variable per class and one constraint block per
//! weight decide the same question.

mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::boolean::{cube, subsets_lex, BooleanFunction};
use crate::poly::{LiteralMonomial, LiteralPolynomial, PosRationalFunction};
use crate::rat::{binomial, rat, Rational};
use crate::{Error, Result};

use simplex::{LpInstance, LpOutcome, SparseCol};

/// Largest `n` for which the per-input (non-collapsed) program is built.
pub const MAX_FULL_LP_VARS: usize = 10;

/// Which feasibility program to build.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpMode {
    /// Collapsed for symmetric functions, per-input otherwise.
    Auto,
    /// Always per-input.
    Full,
    /// Always collapsed; fails on asymmetric functions.
    Collapsed,
}

/// Outcome of one feasibility question.
#[derive(Clone, Debug)]
pub struct LpReport {
    pub feasible: bool,
    /// The degree bound that was tested.
    pub degree: usize,
    /// Whether the collapsed (per-weight) program was used.
    pub collapsed: bool,
    pub rows: usize,
    pub cols: usize,
    pub pivots: u64,
    /// A verified representation when feasible: degree at most `degree`,
    /// denominator at least 1 everywhere, error at most `eps` on the domain.
    pub witness: Option<PosRationalFunction>,
}

/// All monomials with disjoint literal sets and total degree at most `d`,
/// in a fixed deterministic order.
fn monomials_up_to(n: usize, d: usize) -> Vec<LiteralMonomial> {
    let mut out = Vec::new();
    for size in 0..=d.min(n) {
        for support in subsets_lex(n, size) {
            // Every way of negating a subset of the support.
            let vars: Vec<u64> = (0..64)
                .filter(|i| support >> i & 1 == 1)
                .map(|i| 1u64 << i)
                .collect();
            for split in 0u64..1 << size {
                let mut neg = 0u64;
                for (j, bit) in vars.iter().enumerate() {
                    if split >> j & 1 == 1 {
                        neg |= bit;
                    }
                }
                out.push(LiteralMonomial::new(support & !neg, neg).expect("disjoint by split"));
            }
        }
    }
    out
}

/// Decides whether some degree-`<= d` ratio of nonnegative-coefficient
/// literal polynomials approximates `f` within `eps` everywhere on its
/// domain, and returns a verified witness when one exists.
pub fn lp_feasible(
    f: &BooleanFunction,
    eps: &Rational,
    d: usize,
    mode: LpMode,
) -> Result<LpReport> {
    if eps.is_negative() || *eps >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "the error bound must lie in [0, 1), got {eps}"
        )));
    }
    if f.domain_size() == 0 {
        return Err(Error::EmptyDomain);
    }
    let classes = f.symmetric_weight_values();
    let collapsed = match mode {
        LpMode::Auto => classes.is_some(),
        LpMode::Collapsed => {
            if classes.is_none() {
                return Err(Error::NotSymmetric);
            }
            true
        }
        LpMode::Full => false,
    };
    if collapsed {
        solve_collapsed(f, &classes.unwrap(), eps, d)
    } else {
        if f.n() > MAX_FULL_LP_VARS {
            return Err(Error::TooManyVariables {
                what: "per-input feasibility programs",
                n: f.n(),
                cap: MAX_FULL_LP_VARS,
            });
        }
        solve_full(f, eps, d)
    }
}

fn solve_full(f: &BooleanFunction, eps: &Rational, d: usize) -> Result<LpReport> {
    let n = f.n();
    let monomials = monomials_up_to(n, d);
    let nm = monomials.len();
    let domain: Vec<(u64, bool)> = f
        .domain_iter()
        .map(|x| (x.word(), f.value(&x).unwrap()))
        .collect();

    // Row layout: per 1-input an upper and a lower error row, per 0-input an
    // upper row, then one row `t - Q(x) <= 0` per cube point, then the
    // normalization `sum b <= 1`.
    let mut upper_row = std::collections::HashMap::new();
    let mut lower_row = std::collections::HashMap::new();
    let mut next = 0usize;
    for &(x, v) in &domain {
        upper_row.insert(x, next);
        next += 1;
        if v {
            lower_row.insert(x, next);
            next += 1;
        }
    }
    let q_row_base = next;
    let rows = q_row_base + (1usize << n) + 1;
    let norm_row = rows - 1;

    let mut rhs = vec![Rational::zero(); rows];
    rhs[norm_row] = Rational::one();

    let one_plus = Rational::one() + eps;
    let one_minus = Rational::one() - eps;

    let mut cols = Vec::with_capacity(2 * nm + 1);
    // P coefficients.
    for m in &monomials {
        let mut entries = Vec::new();
        for &(x, v) in &domain {
            if m.eval_word(x) {
                entries.push((upper_row[&x], Rational::one()));
                if v {
                    entries.push((lower_row[&x], -Rational::one()));
                }
            }
        }
        cols.push(SparseCol { entries });
    }
    // Q coefficients.
    for m in &monomials {
        let mut entries = Vec::new();
        for &(x, v) in &domain {
            if m.eval_word(x) {
                if v {
                    entries.push((upper_row[&x], -one_plus.clone()));
                    entries.push((lower_row[&x], one_minus.clone()));
                } else {
                    entries.push((upper_row[&x], -eps.clone()));
                }
            }
        }
        for x in 0u64..1 << n {
            if m.eval_word(x) {
                entries.push((q_row_base + x as usize, -Rational::one()));
            }
        }
        entries.push((norm_row, Rational::one()));
        cols.push(SparseCol { entries });
    }
    // t.
    let t_col = cols.len();
    cols.push(SparseCol {
        entries: (0..1usize << n)
            .map(|x| (q_row_base + x, Rational::one()))
            .collect(),
    });

    let inst = LpInstance {
        rows,
        cols,
        rhs,
        t_col,
    };
    let (outcome, stats) = simplex::maximize_t(&inst)?;
    let mut report = LpReport {
        feasible: false,
        degree: d,
        collapsed: false,
        rows: stats.rows,
        cols: stats.cols,
        pivots: stats.pivots,
        witness: None,
    };
    if let LpOutcome::PositiveT { solution, .. } = outcome {
        let mut p = LiteralPolynomial::zero(n)?;
        let mut q = LiteralPolynomial::zero(n)?;
        for (i, m) in monomials.iter().enumerate() {
            if solution[i].is_positive() {
                p.add_term(*m, solution[i].clone())?;
            }
            if solution[nm + i].is_positive() {
                q.add_term(*m, solution[nm + i].clone())?;
            }
        }
        report.feasible = true;
        report.witness = Some(finish_witness(f, eps, d, p, q)?);
    }
    Ok(report)
}

fn solve_collapsed(
    f: &BooleanFunction,
    classes: &[Option<bool>],
    eps: &Rational,
    d: usize,
) -> Result<LpReport> {
    let n = f.n();
    // One variable per class of monomials with s positive and u negated
    // literals; on weight-w inputs each such monomial class sums to
    // binom(w, s) binom(n-w, u) times the shared coefficient.
    let pairs: Vec<(usize, usize)> = (0..=d.min(n))
        .flat_map(|total| (0..=total).map(move |s| (s, total - s)))
        .collect();
    let np = pairs.len();

    let mut upper_row = vec![None; n + 1];
    let mut lower_row = vec![None; n + 1];
    let mut next = 0usize;
    for (w, v) in classes.iter().enumerate() {
        if let Some(v) = v {
            upper_row[w] = Some(next);
            next += 1;
            if *v {
                lower_row[w] = Some(next);
                next += 1;
            }
        }
    }
    let q_row_base = next;
    let rows = q_row_base + (n + 1) + 1;
    let norm_row = rows - 1;

    let mut rhs = vec![Rational::zero(); rows];
    rhs[norm_row] = Rational::one();

    let one_plus = Rational::one() + eps;
    let one_minus = Rational::one() - eps;
    let weight_coeff = |w: usize, s: usize, u: usize| -> Rational {
        Rational::from_integer(binomial(w, s) * binomial(n - w, u))
    };

    let mut cols = Vec::with_capacity(2 * np + 1);
    for &(s, u) in &pairs {
        let mut entries = Vec::new();
        for (w, v) in classes.iter().enumerate() {
            let Some(v) = v else { continue };
            let c = weight_coeff(w, s, u);
            if c.is_zero() {
                continue;
            }
            entries.push((upper_row[w].unwrap(), c.clone()));
            if *v {
                entries.push((lower_row[w].unwrap(), -c));
            }
        }
        cols.push(SparseCol { entries });
    }
    for &(s, u) in &pairs {
        let mut entries = Vec::new();
        for (w, v) in classes.iter().enumerate() {
            let Some(v) = v else { continue };
            let c = weight_coeff(w, s, u);
            if c.is_zero() {
                continue;
            }
            if *v {
                entries.push((upper_row[w].unwrap(), -&c * &one_plus));
                entries.push((lower_row[w].unwrap(), &c * &one_minus));
            } else {
                entries.push((upper_row[w].unwrap(), -&c * eps));
            }
        }
        for w in 0..=n {
            let c = weight_coeff(w, s, u);
            if !c.is_zero() {
                entries.push((q_row_base + w, -c));
            }
        }
        // Class size, so the normalization matches the per-monomial sum.
        entries.push((
            norm_row,
            Rational::from_integer(binomial(n, s) * binomial(n - s, u)),
        ));
        cols.push(SparseCol { entries });
    }
    let t_col = cols.len();
    cols.push(SparseCol {
        entries: (0..=n).map(|w| (q_row_base + w, Rational::one())).collect(),
    });

    let inst = LpInstance {
        rows,
        cols,
        rhs,
        t_col,
    };
    let (outcome, stats) = simplex::maximize_t(&inst)?;
    let mut report = LpReport {
        feasible: false,
        degree: d,
        collapsed: true,
        rows: stats.rows,
        cols: stats.cols,
        pivots: stats.pivots,
        witness: None,
    };
    if let LpOutcome::PositiveT { solution, .. } = outcome {
        let mut p = LiteralPolynomial::zero(n)?;
        let mut q = LiteralPolynomial::zero(n)?;
        for (i, &(s, u)) in pairs.iter().enumerate() {
            for (target, value) in [(&mut p, &solution[i]), (&mut q, &solution[np + i])] {
                if value.is_positive() {
                    for m in class_monomials(n, s, u) {
                        target.add_term(m, value.clone())?;
                    }
                }
            }
        }
        report.feasible = true;
        report.witness = Some(finish_witness(f, eps, d, p, q)?);
    }
    Ok(report)
}

/// All monomials with positive-literal set of size `s` and negated set of
/// size `u`.
fn class_monomials(n: usize, s: usize, u: usize) -> Vec<LiteralMonomial> {
    let mut out = Vec::new();
    for pos in subsets_lex(n, s) {
        let free: Vec<usize> = (1..=n).filter(|i| pos >> (i - 1) & 1 == 0).collect();
        for pick in subsets_lex(free.len(), u) {
            let mut neg = 0u64;
            for (j, &var) in free.iter().enumerate() {
                if pick >> j & 1 == 1 {
                    neg |= 1 << (var - 1);
                }
            }
            out.push(LiteralMonomial::new(pos, neg).expect("disjoint by construction"));
        }
    }
    out
}

/// Rescales a solver solution so the denominator's minimum is exactly 1 and
/// re-verifies every claim it is returned with.
fn finish_witness(
    f: &BooleanFunction,
    eps: &Rational,
    d: usize,
    p: LiteralPolynomial,
    q: LiteralPolynomial,
) -> Result<PosRationalFunction> {
    let n = f.n();
    let tau = cube(n)
        .map(|x| q.eval(&x))
        .min()
        .ok_or_else(|| Error::Internal("empty cube".into()))?;
    if !tau.is_positive() {
        return Err(Error::Internal(
            "solver produced a vanishing denominator".into(),
        ));
    }
    let scale = tau.recip();
    let witness = PosRationalFunction::new(p.scaled(&scale)?, q.scaled(&scale)?)?;
    if witness.degree() > d {
        return Err(Error::Internal("witness degree exceeds the bound".into()));
    }
    if witness.approx_error(f)? > *eps {
        return Err(Error::Internal("witness violates the error bound".into()));
    }
    Ok(witness)
}

/// The minimum degree of a nonnegative-coefficient rational representation
/// of `f` within error `eps`: sweeps the feasibility program over
/// `d = 0, 1, ...` and returns the first feasible degree with its report.
pub fn rdeg_plus(f: &BooleanFunction, eps: &Rational, mode: LpMode) -> Result<(usize, LpReport)> {
    for d in 0..=f.n() {
        let report = lp_feasible(f, eps, d, mode)?;
        if report.feasible {
            return Ok((d, report));
        }
    }
    // Degree n always suffices: point indicators are literal monomials, so
    // P = sum of 1-input indicators over Q = 1 is exact.
    Err(Error::Internal(
        "no feasible degree up to n; the sweep is broken".into(),
    ))
}

/// Degree lower bound for majority on `n` bits (`n` even) at error `eps`:
/// the smallest `d` where `n + 1 - 2d <= 0` or
/// `(n + 1 - 2d)^2 <= eps/(1-eps) (n^2 + 2n) + 1`.
///
/// Any shallower representation would force a sign change too sharp for a
/// degree-`d` numerator on the two middle weights.
pub fn maj_lower_bound(n: usize, eps: &Rational) -> Result<usize> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "the majority bound needs an even positive bit count, got {n}"
        )));
    }
    if eps.is_negative() || *eps >= rat(1, 2) {
        return Err(Error::InvalidParameter(format!(
            "the error bound must lie in [0, 1/2), got {eps}"
        )));
    }
    let n_int = BigInt::from(n);
    let threshold = eps / (Rational::one() - eps)
        * Rational::from_integer(&n_int * &n_int + 2 * &n_int)
        + Rational::one();
    for d in 0.. {
        let gap = BigInt::from(n as i64 + 1 - 2 * d as i64);
        if !gap.is_positive() || Rational::from_integer(&gap * &gap) <= threshold {
            return Ok(d);
        }
    }
    unreachable!("the gap eventually turns nonpositive")
}

/// Degree lower bound for a total symmetric non-constant `f` at error `eps`.
///
/// At `eps = 1/3` this is `ceil((n - gap) / 8)` with `gap` the step gap of
/// the profile.  For other `eps` it is the smallest `d` with
/// `d^2 - (n+1) d + (n-T)(T+1) (1 - eps/(1-eps)) <= 0`, where `T` is the
/// smallest weight realizing the gap.
pub fn symmetric_lower_bound(f: &BooleanFunction, eps: &Rational) -> Result<usize> {
    let (gap, t) = crate::boolean::gamma(f)?;
    if eps.is_negative() || *eps >= rat(1, 2) {
        return Err(Error::InvalidParameter(format!(
            "the error bound must lie in [0, 1/2), got {eps}"
        )));
    }
    let n = f.n();
    if *eps == rat(1, 3) {
        return Ok((n - gap).div_ceil(8));
    }
    let alpha = Rational::one() - eps / (Rational::one() - eps);
    if !alpha.is_positive() {
        return Ok(0);
    }
    let product = Rational::from_integer(BigInt::from((n - t) as u64) * BigInt::from(t as u64 + 1));
    for d in 0..=n {
        let d_rat = rat(d as i64, 1);
        let value = &d_rat * &d_rat - rat((n + 1) as i64, 1) * &d_rat + &product * &alpha;
        if !value.is_positive() {
            return Ok(d);
        }
    }
    Err(Error::Internal(
        "the quadratic never turned nonpositive".into(),
    ))
}
