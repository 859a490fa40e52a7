//! Conversions between programs and rational functions, and the standard
//! program constructions.
//!
//! The two directions are exact: a program on `n` bits induces polynomials
//! `P(x) = Pr[output 1]` and `Q(x) = Pr[output 0 or 1]` with nonnegative
//! coefficients and degree at most the query depth, and conversely a ratio
//! `P/Q` can be turned back into a shallow program whose conditional
//! acceptance probability is `P^k / (P^k + r Q^k)`.

use num_traits::{One, Zero};

use crate::boolean::{subsets_lex, BooleanFunction};
use crate::poly::{LiteralMonomial, LiteralPolynomial, PosRationalFunction};
use crate::program::{Node, Outcome, Program};
use crate::rat::{binomial, Rational};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Program -> rational function
// ---------------------------------------------------------------------------

/// The rational-function form of a program: `P(x)` is the probability of
/// output 1 and `Q(x)` the probability of any non-bot output, both
/// polynomials in literals with nonnegative coefficients and degree at most
/// the query depth.  Fails when some input is always discarded (`Q(x) = 0`).
pub fn program_to_rational(p: &Program) -> Result<PosRationalFunction> {
    let (num, den) = node_polys(p.root(), p.n())?;
    PosRationalFunction::new(num, den)
}

fn node_polys(node: &Node, n: usize) -> Result<(LiteralPolynomial, LiteralPolynomial)> {
    match node {
        Node::Leaf(Outcome::One) => Ok((
            LiteralPolynomial::constant(n, Rational::one())?,
            LiteralPolynomial::constant(n, Rational::one())?,
        )),
        Node::Leaf(Outcome::Zero) => Ok((
            LiteralPolynomial::zero(n)?,
            LiteralPolynomial::constant(n, Rational::one())?,
        )),
        Node::Leaf(Outcome::Bot) => Ok((LiteralPolynomial::zero(n)?, LiteralPolynomial::zero(n)?)),
        Node::Query {
            index,
            child0,
            child1,
        } => {
            let (p0, q0) = node_polys(child0, n)?;
            let (p1, q1) = node_polys(child1, n)?;
            let bit = 1u64 << (index - 1);
            let mut lit1 = LiteralPolynomial::zero(n)?;
            lit1.add_term(LiteralMonomial::new(bit, 0)?, Rational::one())?;
            let mut lit0 = LiteralPolynomial::zero(n)?;
            lit0.add_term(LiteralMonomial::new(0, bit)?, Rational::one())?;
            let mut p = lit1.mul(&p1);
            p.add_scaled(&lit0.mul(&p0), &Rational::one())?;
            let mut q = lit1.mul(&q1);
            q.add_scaled(&lit0.mul(&q0), &Rational::one())?;
            Ok((p, q))
        }
        Node::Chance { branches } => {
            let mut p = LiteralPolynomial::zero(n)?;
            let mut q = LiteralPolynomial::zero(n)?;
            for (w, child) in branches {
                let (cp, cq) = node_polys(child, n)?;
                p.add_scaled(&cp, w)?;
                q.add_scaled(&cq, w)?;
            }
            Ok((p, q))
        }
    }
}

// ---------------------------------------------------------------------------
// Rational function -> program
// ---------------------------------------------------------------------------

/// Builds a program whose conditional probability of output 1 on every input
/// is exactly `P(x)^k / (P(x)^k + r Q(x)^k)`, with query depth at most
/// `k * max(deg P, deg Q)`.
///
/// The program draws `k` monomials independently, each proportional to its
/// coefficient from the pooled terms of `P` and `Q`.  A draw entirely from
/// `P` checks its combined literals and answers 1 on success; a draw
/// entirely from `Q` checks likewise and answers 0 with probability `r` on
/// success; every other draw or failed check gives up.
pub fn rational_to_program(ratio: &PosRationalFunction, k: usize, r: &Rational) -> Result<Program> {
    if k == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    if !(Rational::zero() < *r && *r <= Rational::one()) {
        return Err(Error::InvalidParameter(format!(
            "the zero-output acceptance probability must lie in (0, 1], got {r}"
        )));
    }
    let n = ratio.n();
    // Pooled entries: (from_numerator, monomial, coefficient).
    let mut entries: Vec<(bool, LiteralMonomial, Rational)> = Vec::new();
    for (m, c) in ratio.numerator().terms() {
        entries.push((true, *m, c.clone()));
    }
    for (m, c) in ratio.denominator().terms() {
        entries.push((false, *m, c.clone()));
    }
    let mass: Rational = entries.iter().map(|(_, _, c)| c.clone()).sum();
    debug_assert!(mass > Rational::zero(), "denominator is positive somewhere");

    let mut branches = Vec::new();
    let mut pick = vec![0usize; k];
    loop {
        // Branch for one ordered k-tuple of entries.
        let mut weight = Rational::one();
        let mut all_from_p = true;
        let mut all_from_q = true;
        let mut combined = Some(LiteralMonomial::one());
        for &e in &pick {
            let (from_p, m, c) = &entries[e];
            weight *= c / &mass;
            all_from_p &= *from_p;
            all_from_q &= !*from_p;
            combined = combined.and_then(|acc| acc.product(m));
        }
        let terminal = if all_from_p {
            Node::leaf(Outcome::One)
        } else if all_from_q {
            Node::coin(
                r.clone(),
                Node::leaf(Outcome::Zero),
                Node::leaf(Outcome::Bot),
            )
        } else {
            // Mixed tuples contribute to neither P^k nor Q^k.
            Node::leaf(Outcome::Bot)
        };
        let subtree = match (&terminal, combined) {
            // A tuple whose literals contradict can never succeed.
            (_, None) => Node::leaf(Outcome::Bot),
            (Node::Leaf(Outcome::Bot), _) => terminal,
            (_, Some(m)) => literal_chain(&m, terminal),
        };
        branches.push((weight, subtree));

        // Next tuple (odometer over entry indices).
        let mut pos = 0;
        loop {
            if pos == k {
                let root = Node::chance(branches);
                return Program::new(n, root);
            }
            pick[pos] += 1;
            if pick[pos] < entries.len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

/// Chain of queries verifying every literal of `m` in ascending variable
/// order; a falsified literal gives up, full agreement reaches `terminal`.
fn literal_chain(m: &LiteralMonomial, terminal: Node) -> Node {
    let mut node = terminal;
    for i in (1..=m.max_var()).rev() {
        let bit = 1u64 << (i - 1);
        if m.pos() & bit != 0 {
            node = Node::query(i, Node::leaf(Outcome::Bot), node);
        } else if m.neg() & bit != 0 {
            node = Node::query(i, node, Node::leaf(Outcome::Bot));
        }
    }
    node
}

// ---------------------------------------------------------------------------
// Programs from certificates
// ---------------------------------------------------------------------------

/// A zero-error program: the output is never wrong, every domain input is
/// kept with positive probability, and the query depth is exactly the
/// certificate complexity of `f`.
///
/// The program picks, uniformly over the domain, a minimum certificate of
/// one input and checks it; agreement answers the certified value,
/// disagreement gives up.
pub fn zero_error_program(f: &BooleanFunction) -> Result<Program> {
    let cc = crate::boolean::certificate_complexity(f)?;
    let total = cc.witnesses.len();
    // Identical witnesses collapse into one branch with the summed weight.
    let mut merged: Vec<(crate::boolean::Certificate, usize)> = Vec::new();
    for cert in cc.witnesses.values() {
        match merged.iter_mut().find(|(c, _)| c == cert) {
            Some((_, count)) => *count += 1,
            None => merged.push((*cert, 1)),
        }
    }
    let branches: Vec<(Rational, Node)> = merged
        .into_iter()
        .map(|(cert, count)| {
            let m = LiteralMonomial::new(
                cert.fixed_values(),
                cert.fixed_vars() & !cert.fixed_values(),
            )
            .expect("masks are disjoint");
            let node = literal_chain(&m, Node::leaf(Outcome::from_bool(cert.label())));
            (crate::rat::rat(count as i64, total as i64), node)
        })
        .collect();
    let root = if branches.len() == 1 {
        branches.into_iter().next().unwrap().1
    } else {
        Node::chance(branches)
    };
    Program::new(f.n(), root)
}

/// A one-sided program for value `b`: on `b`-inputs the conditional
/// probability of answering `b` exceeds 2/3, on other inputs the answer is
/// `1 - b` with certainty, and the query depth is at most the `b`-side
/// certificate complexity.
///
/// Checks a random minimum `b`-certificate; a falsified check answers
/// `1 - b` with small probability instead of always giving up.
pub fn one_sided_program(f: &BooleanFunction, b: bool) -> Result<Program> {
    let cc = crate::boolean::certificate_complexity(f)?;
    let b_inputs: Vec<_> = f.domain_iter().filter(|x| f.value(x) == Some(b)).collect();
    if b_inputs.is_empty() {
        return Err(Error::NoInputsWithValue { value: b });
    }
    let total = b_inputs.len();
    let mut merged: Vec<(crate::boolean::Certificate, usize)> = Vec::new();
    for x in &b_inputs {
        let cert = cc.witnesses[x];
        match merged.iter_mut().find(|(c, _)| c == &cert) {
            Some((_, count)) => *count += 1,
            None => merged.push((cert, 1)),
        }
    }
    // Kept small enough that correct b-answers dominate: a b-input reaches
    // its own certificate's b-leaf with probability >= 1/2^n, while wrong
    // answers carry at most eta = 1/2^(n+1) in total.
    let eta = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(f.n() as u32 + 1));
    let opposite = Node::coin(
        eta,
        Node::leaf(Outcome::from_bool(!b)),
        Node::leaf(Outcome::Bot),
    );
    let branches: Vec<(Rational, Node)> = merged
        .into_iter()
        .map(|(cert, count)| {
            let m = LiteralMonomial::new(
                cert.fixed_values(),
                cert.fixed_vars() & !cert.fixed_values(),
            )
            .expect("masks are disjoint");
            let node = mismatch_chain(&m, Node::leaf(Outcome::from_bool(b)), &opposite);
            (crate::rat::rat(count as i64, total as i64), node)
        })
        .collect();
    let root = if branches.len() == 1 {
        branches.into_iter().next().unwrap().1
    } else {
        Node::chance(branches)
    };
    Program::new(f.n(), root)
}

/// Like [`literal_chain`], but a falsified literal continues in a copy of
/// `mismatch` instead of giving up.
fn mismatch_chain(m: &LiteralMonomial, terminal: Node, mismatch: &Node) -> Node {
    let mut node = terminal;
    for i in (1..=m.max_var()).rev() {
        let bit = 1u64 << (i - 1);
        if m.pos() & bit != 0 {
            node = Node::query(i, mismatch.clone(), node);
        } else if m.neg() & bit != 0 {
            node = Node::query(i, node, mismatch.clone());
        }
    }
    node
}

// ---------------------------------------------------------------------------
// Canonical constructions
// ---------------------------------------------------------------------------

/// Depth-1 program for OR with conditional error below 1/3: query a uniform
/// bit, answer 1 on a 1, and on a 0 answer 0 with probability `1/(2n)`.
pub fn or_program(n: usize) -> Result<Program> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    let keep = Rational::new(1.into(), (2 * n as i64).into());
    let parts = (1..=n)
        .map(|i| {
            let node = Node::query(
                i,
                Node::coin(
                    keep.clone(),
                    Node::leaf(Outcome::Zero),
                    Node::leaf(Outcome::Bot),
                ),
                Node::leaf(Outcome::One),
            );
            Ok((
                Rational::new(1.into(), (n as i64).into()),
                Program::new(n, node)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Program::mix(parts)
}

/// Depth-1 program for AND, the mirror image of [`or_program`]: a 0 answers
/// 0, a 1 answers 1 with probability `1/(2n)`.
pub fn and_program(n: usize) -> Result<Program> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    let keep = Rational::new(1.into(), (2 * n as i64).into());
    let parts = (1..=n)
        .map(|i| {
            let node = Node::query(
                i,
                Node::leaf(Outcome::Zero),
                Node::coin(
                    keep.clone(),
                    Node::leaf(Outcome::One),
                    Node::leaf(Outcome::Bot),
                ),
            );
            Ok((
                Rational::new(1.into(), (n as i64).into()),
                Program::new(n, node)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Program::mix(parts)
}

/// Majority on an even number of bits with `n/2 + 1` queries: check a
/// uniform `(n/2 + 1)`-subset for being all ones; success answers 1, any 0
/// answers 0 with probability `r` (default `1 / (2 binom(n, n/2+1))`).
///
/// The 0-side is never wrong; the 1-side error is at most
/// `r (binom(n, n/2+1) - 1)`, so small `r` trades discarded runs for
/// accuracy.
pub fn maj_program(n: usize, r: Option<Rational>) -> Result<Program> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "majority programs need an even positive bit count, got {n}"
        )));
    }
    let m = n / 2 + 1;
    let count = binomial(n, m);
    let r = r.unwrap_or_else(|| Rational::new(1.into(), 2 * count.clone()));
    if !(Rational::zero() < r && r <= Rational::one()) {
        return Err(Error::InvalidParameter(format!(
            "the zero-output acceptance probability must lie in (0, 1], got {r}"
        )));
    }
    let weight = Rational::new(1.into(), count);
    let exit = Node::coin(r, Node::leaf(Outcome::Zero), Node::leaf(Outcome::Bot));
    let branches: Vec<(Rational, Node)> = subsets_lex(n, m)
        .map(|mask| {
            let m = LiteralMonomial::new(mask, 0).expect("positive literals only");
            let node = mismatch_chain(&m, Node::leaf(Outcome::One), &exit);
            (weight.clone(), node)
        })
        .collect();
    Program::new(n, Node::chance(branches))
}

/// Depth-1 program that guesses a whole input `y` and a coordinate to check:
/// agreement of `x` and `y` at the coordinate answers `f(y)` with
/// probability `1/accept_denom`, everything else gives up.
pub fn equality_program(f: &BooleanFunction, accept_denom: u64) -> Result<Program> {
    if !f.is_total() {
        return Err(Error::NotTotal);
    }
    let n = f.n();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    if accept_denom == 0 {
        return Err(Error::InvalidParameter(
            "the acceptance denominator must be positive".into(),
        ));
    }
    let accept = Rational::new(1.into(), (accept_denom as i64).into());
    let y_weight = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(n as u32));
    let i_weight = Rational::new(1.into(), (n as i64).into());
    let y_branches: Vec<(Rational, Node)> = crate::boolean::cube(n)
        .map(|y| {
            let answer = Node::coin(
                accept.clone(),
                Node::leaf(Outcome::from_bool(f.value(&y).unwrap())),
                Node::leaf(Outcome::Bot),
            );
            let i_branches: Vec<(Rational, Node)> = (1..=n)
                .map(|i| {
                    let (on_match, on_mismatch) = (answer.clone(), Node::leaf(Outcome::Bot));
                    let node = if y.bit(i) {
                        Node::query(i, on_mismatch, on_match)
                    } else {
                        Node::query(i, on_match, on_mismatch)
                    };
                    (i_weight.clone(), node)
                })
                .collect();
            (y_weight.clone(), Node::chance(i_branches))
        })
        .collect();
    Program::new(n, Node::chance(y_branches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{cube, BitString};
    use crate::program::Distribution;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    fn dist(p: &Program, s: &str) -> Distribution {
        p.exact_distribution(&s.parse().unwrap())
    }

    #[test]
    fn or_program_known_distribution() {
        let p = or_program(2).unwrap();
        assert_eq!(p.query_depth(), 1);
        let d = dist(&p, "10");
        assert_eq!(d.p1, rat(1, 2));
        assert_eq!(d.p0, rat(1, 8));
        assert_eq!(d.pbot, rat(3, 8));
        // All-zero input: 0 with certainty after post-selection.
        let (c0, _) = p.conditional_distribution(&"00".parse().unwrap()).unwrap();
        assert_eq!(c0, int(1));
    }

    #[test]
    fn or_program_worst_error() {
        for n in 1..=8 {
            let p = or_program(n).unwrap();
            let f = BooleanFunction::or(n);
            let expect = if n == 1 {
                int(0)
            } else {
                rat(n as i64 - 1, 3 * n as i64 - 1)
            };
            assert_eq!(p.postselected_error(&f).unwrap(), expect);
            assert!(p.postselected_error(&f).unwrap() < rat(1, 3));
        }
    }

    #[test]
    fn and_program_mirrors_or() {
        for n in 1..=6 {
            let p = and_program(n).unwrap();
            let f = BooleanFunction::and(n);
            assert_eq!(p.query_depth(), 1);
            assert!(p.postselected_error(&f).unwrap() < rat(1, 3));
            // All-ones: 1 with certainty.
            let ones = BitString::new(n, (1 << n) - 1).unwrap();
            let (_, c1) = p.conditional_distribution(&ones).unwrap();
            assert_eq!(c1, int(1));
        }
    }

    #[test]
    fn maj4_distribution_with_explicit_r() {
        let p = maj_program(4, Some(rat(1, 8))).unwrap();
        assert_eq!(p.query_depth(), 3);
        let d = dist(&p, "1110");
        assert_eq!(d.p1, rat(1, 4));
        assert_eq!(d.p0, rat(3, 32));
        assert_eq!(d.pbot, rat(21, 32));
        let (_, c1) = p
            .conditional_distribution(&"1110".parse().unwrap())
            .unwrap();
        assert_eq!(c1, rat(8, 11));
    }

    #[test]
    fn maj_program_zero_side_is_exact() {
        for n in [4usize, 6] {
            let p = maj_program(n, None).unwrap();
            let f = BooleanFunction::maj(n);
            assert_eq!(p.query_depth(), n / 2 + 1);
            for x in cube(n) {
                let (c0, c1) = p.conditional_distribution(&x).unwrap();
                if f.value(&x).unwrap() {
                    assert!(c1 > rat(2, 3), "conditional 1 too small at {x}");
                } else {
                    assert_eq!(c0, int(1), "majority-0 input {x} must never answer 1");
                }
            }
        }
    }

    #[test]
    fn maj_error_shrinks_with_r() {
        let f = BooleanFunction::maj(4);
        let err = maj_program(4, Some(rat(1, 1_000_000)))
            .unwrap()
            .postselected_error(&f)
            .unwrap();
        // At most r (binom(4,3) - 1) = 3e-6.
        assert!(err <= rat(3, 1_000_000));
    }

    #[test]
    fn maj_conditional_one_monotone_in_exit_coin() {
        // Growing the 0-exit coin only shifts conditional mass from 1 to 0
        // on 1-inputs, and the 0-side stays exact for every positive coin.
        let f = BooleanFunction::maj(6);
        let coins = [rat(1, 1000), rat(1, 40), rat(1, 8), rat(1, 2), int(1)];
        let programs: Vec<_> = coins
            .iter()
            .map(|r| maj_program(6, Some(r.clone())).unwrap())
            .collect();
        for x in cube(6) {
            if f.value(&x).unwrap() {
                let ones: Vec<_> = programs
                    .iter()
                    .map(|p| p.conditional_distribution(&x).unwrap().1)
                    .collect();
                for pair in ones.windows(2) {
                    assert!(pair[0] >= pair[1], "not monotone at {x}");
                }
            } else {
                for p in &programs {
                    assert_eq!(p.conditional_distribution(&x).unwrap().0, int(1));
                }
            }
        }
    }

    #[test]
    fn lemma_style_polys_track_probabilities() {
        // P = Pr[1], Q = Pr[keep] exactly, on every input.
        for p in [
            or_program(3).unwrap(),
            and_program(3).unwrap(),
            maj_program(4, None).unwrap(),
            zero_error_program(&BooleanFunction::maj(4)).unwrap(),
        ] {
            let ratio = program_to_rational(&p).unwrap();
            assert!(ratio.degree() <= p.query_depth());
            for x in cube(p.n()) {
                let d = p.exact_distribution(&x);
                let (num, den) = ratio.parts(&x);
                assert_eq!(num, d.p1, "P at {x}");
                assert_eq!(den, d.success_mass(), "Q at {x}");
            }
        }
    }

    #[test]
    fn conversion_fails_when_postselection_impossible() {
        let p = Program::new(1, Node::leaf(Outcome::Bot)).unwrap();
        assert!(matches!(
            program_to_rational(&p),
            Err(Error::DenominatorVanishes { .. })
        ));
    }

    #[test]
    fn trivial_ratio_gives_fair_coin() {
        // P = Q = 1, k = 1, r = 1: both answers equally likely everywhere.
        let one = LiteralPolynomial::constant(1, int(1)).unwrap();
        let ratio = PosRationalFunction::new(one.clone(), one).unwrap();
        let p = rational_to_program(&ratio, 1, &int(1)).unwrap();
        let (c0, c1) = p.conditional_distribution(&"0".parse().unwrap()).unwrap();
        assert_eq!(c0, rat(1, 2));
        assert_eq!(c1, rat(1, 2));
    }

    #[test]
    fn converted_or_ratio_has_expected_conditional() {
        // k = 1, r = 1: conditional 1 equals P / (P + Q).
        let ratio = crate::poly::or_rational(2, &rat(1, 10)).unwrap();
        let p = rational_to_program(&ratio, 1, &int(1)).unwrap();
        let x: BitString = "11".parse().unwrap();
        let (_, c1) = p.conditional_distribution(&x).unwrap();
        assert_eq!(c1, rat(20, 41)); // 2 / (2 + 21/10)
    }

    #[test]
    fn amplified_conversion_matches_power_formula() {
        // Conditional 1 is P^k / (P^k + r Q^k) for every input and k.
        let ratio = crate::poly::or_rational(3, &rat(1, 10)).unwrap();
        for k in 1..=3usize {
            let r = rat(2, 9);
            let p = rational_to_program(&ratio, k, &r).unwrap();
            assert!(p.query_depth() <= k * ratio.degree());
            let pk = ratio.numerator().pow(k).unwrap();
            let qk = ratio.denominator().pow(k).unwrap();
            for x in cube(3) {
                let expect_denom = pk.eval(&x) + &r * qk.eval(&x);
                let expect = pk.eval(&x) / expect_denom;
                let (_, c1) = p.conditional_distribution(&x).unwrap();
                assert_eq!(c1, expect, "k = {k}, x = {x}");
            }
        }
    }

    #[test]
    fn amplification_with_k2_brings_error_under_a_third() {
        // eps/(1+eps)-close ratio for OR, squared with r = eps(1-eps) at
        // eps = 1/3: the converted program decides OR with error <= 1/3.
        let f = BooleanFunction::or(4);
        let ratio = crate::poly::or_rational(4, &rat(1, 3)).unwrap();
        let p = rational_to_program(&ratio, 2, &rat(2, 9)).unwrap();
        assert!(p.postselected_error(&f).unwrap() <= rat(1, 3));
        assert_eq!(p.query_depth(), 2);
    }

    #[test]
    fn zero_error_program_is_never_wrong() {
        for f in [
            BooleanFunction::maj(4),
            BooleanFunction::or(3),
            BooleanFunction::parity(3),
        ] {
            let p = zero_error_program(&f).unwrap();
            let cc = crate::boolean::certificate_complexity(&f).unwrap();
            assert_eq!(p.query_depth(), cc.c);
            for x in f.domain_iter() {
                let (c0, c1) = p.conditional_distribution(&x).unwrap();
                if f.value(&x).unwrap() {
                    assert_eq!(c1, int(1));
                } else {
                    assert_eq!(c0, int(1));
                }
            }
        }
    }

    #[test]
    fn zero_error_on_constant_collapses_to_a_leaf() {
        let f = BooleanFunction::constant(3, true);
        let p = zero_error_program(&f).unwrap();
        assert_eq!(p.query_depth(), 0);
        assert_eq!(p.node_count(), 1);
        let d = dist(&p, "010");
        assert_eq!(d.p1, int(1));
    }

    #[test]
    fn one_sided_program_properties() {
        let f = BooleanFunction::or(3);
        let cc = crate::boolean::certificate_complexity(&f).unwrap();
        for b in [true, false] {
            let p = one_sided_program(&f, b).unwrap();
            let cb = if b { cc.c1 } else { cc.c0 };
            assert!(p.query_depth() <= cb);
            for x in f.domain_iter() {
                let (c0, c1) = p.conditional_distribution(&x).unwrap();
                let cond_b = if b { &c1 } else { &c0 };
                if f.value(&x).unwrap() == b {
                    assert!(*cond_b > rat(2, 3), "b-side too weak at {x}");
                } else {
                    assert_eq!(*cond_b, int(0), "must never answer {b} at {x}");
                }
            }
        }
    }

    #[test]
    fn one_sided_needs_both_values() {
        let f = BooleanFunction::constant(2, false);
        assert!(matches!(
            one_sided_program(&f, true),
            Err(Error::NoInputsWithValue { value: true })
        ));
        assert!(one_sided_program(&f, false).is_ok());
    }

    #[test]
    fn equality_program_shape_and_distribution() {
        // Guessing y and checking one coordinate: on input x the probability
        // of answering 1 is sum_y [f(y)=1] agree(x,y) / (n 2^n accept_denom).
        let f = BooleanFunction::parity(2);
        let p = equality_program(&f, 16).unwrap();
        assert_eq!(p.query_depth(), 1);
        for x in cube(2) {
            let d = p.exact_distribution(&x);
            let agree = |y: &BitString| (1..=2).filter(|&i| x.bit(i) == y.bit(i)).count() as i64;
            let mut expect1 = int(0);
            let mut expect0 = int(0);
            for y in cube(2) {
                let t = rat(agree(&y), 2 * 4 * 16);
                if f.value(&y).unwrap() {
                    expect1 += t;
                } else {
                    expect0 += t;
                }
            }
            assert_eq!(d.p1, expect1, "at {x}");
            assert_eq!(d.p0, expect0, "at {x}");
        }
        // On 11, matching weight splits evenly between the two parities.
        let (_, c1) = p.conditional_distribution(&"11".parse().unwrap()).unwrap();
        assert_eq!(c1, rat(1, 2));
    }

    // Random programs for the conversion invariant.
    fn arb_node(n: usize, depth: usize) -> BoxedStrategy<Node> {
        let leaf = prop_oneof![
            Just(Node::leaf(Outcome::Zero)),
            Just(Node::leaf(Outcome::One)),
            Just(Node::leaf(Outcome::Bot)),
        ];
        if depth == 0 {
            return leaf.boxed();
        }
        let child = arb_node(n, depth - 1);
        let query =
            (1..=n, child.clone(), child.clone()).prop_map(|(i, c0, c1)| Node::query(i, c0, c1));
        let chance =
            proptest::collection::vec((1u32..9, arb_node(n, depth - 1)), 1..4).prop_map(|parts| {
                let total: u32 = parts.iter().map(|(w, _)| *w).sum();
                Node::chance(
                    parts
                        .into_iter()
                        .map(|(w, c)| (rat(w as i64, total as i64), c))
                        .collect(),
                )
            });
        prop_oneof![1 => leaf, 2 => query, 1 => chance].boxed()
    }

    proptest! {
        #[test]
        fn conversion_invariant_on_random_programs(root in arb_node(3, 3)) {
            let p = Program::new(3, root).unwrap();
            match program_to_rational(&p) {
                Ok(ratio) => {
                    prop_assert!(ratio.degree() <= p.query_depth());
                    for x in cube(3) {
                        let d = p.exact_distribution(&x);
                        let (num, den) = ratio.parts(&x);
                        prop_assert_eq!(den, d.success_mass());
                        prop_assert_eq!(num, d.p1);
                    }
                }
                Err(Error::DenominatorVanishes { x }) => {
                    let x: BitString = x.parse().unwrap();
                    let d = p.exact_distribution(&x);
                    prop_assert!(d.success_mass().is_zero());
                }
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn round_trip_preserves_the_ratio(root in arb_node(3, 2)) {
            // program -> ratio -> program (k = 1, r = 1/2): the new
            // conditional 1 must be P/(P + Q/2) pointwise.
            let p = Program::new(3, root).unwrap();
            if let Ok(ratio) = program_to_rational(&p) {
                let back = rational_to_program(&ratio, 1, &rat(1, 2)).unwrap();
                for x in cube(3) {
                    let (num, den) = ratio.parts(&x);
                    let expect = num.clone() / (num + den / int(2));
                    let (_, c1) = back.conditional_distribution(&x).unwrap();
                    prop_assert_eq!(c1, expect);
                }
            }
        }

        #[test]
        fn zero_error_sound_on_random_partial_functions(
            bits in proptest::collection::vec(proptest::option::of(any::<bool>()), 8),
        ) {
            let points: Vec<(BitString, bool)> = bits
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (BitString::new(3, i as u64).unwrap(), v)))
                .collect();
            prop_assume!(!points.is_empty());
            let f = BooleanFunction::from_points(3, &points).unwrap();
            let p = zero_error_program(&f).unwrap();
            for x in f.domain_iter() {
                let (c0, c1) = p.conditional_distribution(&x).unwrap();
                if f.value(&x).unwrap() {
                    prop_assert_eq!(c1, int(1));
                } else {
                    prop_assert_eq!(c0, int(1));
                }
            }
        }
    }
}
