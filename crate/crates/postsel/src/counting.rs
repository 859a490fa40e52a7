//! Post-selected approximate counting.
//!
//! The building block is a constant-depth verifier program parameterized by a
//! threshold `A`: it samples `k` input positions uniformly with replacement,
//! answers 1 when every sampled bit is 1, answers 0 (with probability
//! proportional to `2 A^k / n^k`) when every sampled bit is 0, and aborts
//! otherwise.  Conditioned on not aborting, the answer is strongly biased
//! towards 1 once `A < |x|/2` and towards 0 once `A > 2|x|`, so a doubling
//! search over `A` with majority voting brackets the Hamming weight `|x|`
//! within a constant factor ([`weak_count`]).  Running the same search on a
//! virtual product string, whose bits are ANDs of `t` independent positions,
//! sharpens the factor to `1 + 1/p` at a `t`-fold query cost
//! ([`strong_count`]).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolean::BitString;
use crate::program::{CompiledSampler, Node, Outcome, Program};
use crate::rat::{ceil_log2, Rational};
use crate::sampling::bernoulli;
use crate::{Error, Result};

/// Largest number of sampled index tuples a verifier program materializes.
const TUPLE_CAP: u128 = 1 << 20;

/// Discarded-run budget for a single post-selected execution.
const ATTEMPT_CAP: u64 = 1 << 20;

/// Shared parameters of the counting routines.
#[derive(Clone, Debug)]
pub struct CountingParams {
    /// Input length.
    pub n: usize,
    /// Positions sampled per verifier run.
    pub k: u32,
    /// Overall failure probability budget.
    pub eps: Rational,
    /// Accuracy parameter of [`strong_count`]: target factor `1 + 1/p`.
    pub p: u64,
}

impl CountingParams {
    /// Defaults: `k = 2` (the smallest k with a 2/3-vs-1/3 threshold gap)
    /// and `p = 1`.
    pub fn new(n: usize, eps: Rational) -> Result<Self> {
        let params = CountingParams { n, k: 2, eps, p: 1 };
        params.validate()?;
        Ok(params)
    }

    pub fn with_k(mut self, k: u32) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_p(mut self, p: u64) -> Result<Self> {
        self.p = p;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 64 {
            return Err(Error::InvalidParameter(format!(
                "input length n = {} out of range 1..=64",
                self.n
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter(
                "sample count k must be at least 1".into(),
            ));
        }
        if self.p == 0 {
            return Err(Error::InvalidParameter(
                "accuracy parameter p must be at least 1".into(),
            ));
        }
        if self.eps <= Rational::zero() || self.eps >= Rational::new(1.into(), 2.into()) {
            return Err(Error::InvalidParameter(format!(
                "failure budget eps = {} must lie strictly between 0 and 1/2",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Acceptance odds `r = 2 A^k / n^k` of the 0-answer relative to the
/// 1-answer.
fn threshold_odds(n: &BigUint, k: u32, a: &BigUint) -> Rational {
    Rational::new(
        BigInt::from(2) * BigInt::from(a.clone()).pow(k),
        BigInt::from(n.clone()).pow(k),
    )
}

/// Splits the odds `1 : r` into two acceptance probabilities in `[0, 1]`
/// (scaling both sides down by `max(1, r)` when `r` exceeds 1).
fn acceptance_coins(r: &Rational) -> (Rational, Rational) {
    if *r <= Rational::one() {
        (Rational::one(), r.clone())
    } else {
        (r.recip(), Rational::one())
    }
}

/// Exact probability that the threshold-`A` verifier answers 1, conditioned
/// on not aborting, on inputs of Hamming weight `weight`:
/// `1 / (1 + r ((n-|x|)/|x|)^k)` for interior weights, with the obvious
/// limits 0 and 1 at `|x| = 0` and `|x| = n`.
pub fn verifier_conditional_one(n: usize, k: u32, a: usize, weight: usize) -> Result<Rational> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and k >= 1".into()));
    }
    if a == 0 || a > n {
        return Err(Error::InvalidParameter(format!(
            "threshold A = {a} out of range 1..={n}"
        )));
    }
    if weight > n {
        return Err(Error::InvalidParameter(format!(
            "weight {weight} exceeds input length {n}"
        )));
    }
    if weight == 0 {
        return Ok(Rational::zero());
    }
    if weight == n {
        return Ok(Rational::one());
    }
    let r = threshold_odds(&BigUint::from(n), k, &BigUint::from(a));
    let ratio = Rational::new(BigInt::from(n - weight), BigInt::from(weight));
    Ok((Rational::one() + r * ratio.pow(k as i32)).recip())
}

/// The threshold-`A` verifier as an explicit program: a chance node over all
/// `n^k` ordered index tuples, each tuple checked by a query chain that
/// accepts 1 on all-ones, accepts 0 on all-zeros with the tuned coin, and
/// aborts on mixed samples.  Depth is the number of distinct sampled indices
/// (repeats along a path are collapsed), so at most `min(k, n)`.
pub fn counting_verifier(a: usize, params: &CountingParams) -> Result<Program> {
    params.validate()?;
    let n = params.n;
    let k = params.k;
    if a == 0 || a > n {
        return Err(Error::InvalidParameter(format!(
            "threshold A = {a} out of range 1..={n}"
        )));
    }
    let total = (n as u128)
        .checked_pow(k)
        .filter(|&t| t <= TUPLE_CAP)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "verifier over {n}^{k} index tuples is too large to materialize"
            ))
        })? as usize;
    let r = threshold_odds(&BigUint::from(n), k, &BigUint::from(a));
    let (accept1, accept0) = acceptance_coins(&r);
    let weight = Rational::new(BigInt::one(), BigInt::from(total));
    let mut branches = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut distinct: Vec<usize> = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let i = rem % n + 1;
            rem /= n;
            if !distinct.contains(&i) {
                distinct.push(i);
            }
        }
        branches.push((weight.clone(), tuple_node(&distinct, &accept1, &accept0)));
    }
    Program::new(n, Node::chance(branches))
}

/// Decision tree for one fixed tuple of distinct indices: the first query
/// splits into an all-ones chain and an all-zeros chain over the remaining
/// indices; any disagreement aborts.
fn tuple_node(distinct: &[usize], accept1: &Rational, accept0: &Rational) -> Node {
    let ones = same_value_chain(
        &distinct[1..],
        true,
        Node::coin(
            accept1.clone(),
            Node::leaf(Outcome::One),
            Node::leaf(Outcome::Bot),
        ),
    );
    let zeros = same_value_chain(
        &distinct[1..],
        false,
        Node::coin(
            accept0.clone(),
            Node::leaf(Outcome::Zero),
            Node::leaf(Outcome::Bot),
        ),
    );
    Node::query(distinct[0], zeros, ones)
}

/// Chain querying `indices` in order, aborting unless every answer is `bit`.
fn same_value_chain(indices: &[usize], bit: bool, terminal: Node) -> Node {
    let mut node = terminal;
    for &i in indices.iter().rev() {
        node = if bit {
            Node::query(i, Node::leaf(Outcome::Bot), node)
        } else {
            Node::query(i, node, Node::leaf(Outcome::Bot))
        };
    }
    node
}

/// Odd number of majority-vote repetitions for a doubling search with
/// `rounds` rounds and failure budget `eps`: `ceil(8 ln(max(1, rounds)/eps))`
/// rounded up to odd, sized so each round's vote errs with probability well
/// below `eps / rounds`.
fn majority_reps(rounds: u64, eps: &Rational) -> u32 {
    let l = rounds.max(1) as f64;
    let e = eps.to_f64().expect("eps is a small positive rational");
    let raw = (8.0 * (l / e).ln()).ceil().max(1.0) as u32;
    if raw % 2 == 0 {
        raw + 1
    } else {
        raw
    }
}

/// One round of a doubling search: the threshold tried, how many
/// post-selected verifier runs were taken, and how many answered 1.
#[derive(Clone, Debug)]
pub struct CountRound {
    pub threshold: BigUint,
    pub reps: u32,
    pub ones: u32,
}

/// Factor-4 estimate of the Hamming weight `|x|`: doubles the verifier
/// threshold `A = min(2^i, n)` until the majority of an odd number of
/// post-selected runs answers 0, returning that `A` (or `n` if every round
/// answers 1).  With probability at least `1 - eps` the estimate lies in
/// `[|x|/2, 4|x|]`.  All-zero inputs are detected exactly up front (the
/// width-1 verifier answers 1 with conditional probability 0 only for them)
/// and reported as 0.
pub fn weak_count(x: &BitString, eps: &Rational, seed: u64) -> Result<usize> {
    Ok(weak_count_trace(x, eps, seed)?.0)
}

/// [`weak_count`] plus the per-round transcript.  An all-zero input is
/// detected by the exact preliminary check and comes back with no rounds.
pub fn weak_count_trace(
    x: &BitString,
    eps: &Rational,
    seed: u64,
) -> Result<(usize, Vec<CountRound>)> {
    let n = x.len();
    let params = CountingParams::new(n, eps.clone())?;
    let (_, c1) = counting_verifier(1, &params)?.conditional_distribution(x)?;
    if c1.is_zero() {
        return Ok((0, Vec::new()));
    }
    let rounds = ceil_log2(&BigUint::from(n));
    let reps = majority_reps(rounds, eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    for i in 0..=rounds {
        let a = (1usize << i).min(n);
        let sampler = CompiledSampler::new(&counting_verifier(a, &params)?);
        let mut ones = 0;
        for _ in 0..reps {
            if sampler.run_postselected(x, &mut rng, ATTEMPT_CAP)? {
                ones += 1;
            }
        }
        trace.push(CountRound {
            threshold: BigUint::from(a),
            reps,
            ones,
        });
        if 2 * ones < reps {
            return Ok((a, trace));
        }
    }
    Ok((n, trace))
}

/// Smallest `t` with `(1 + 1/p)^t >= 2`: the number of AND-ed positions per
/// virtual bit that turns a factor-2 weight estimate of `|x|^t` into a
/// factor-`(1 + 1/p)` estimate of `|x|`.  Exact (the floating-point guess is
/// corrected by integer comparison of `2 p^t` against `(p+1)^t`).
pub fn product_arity(p: u64) -> Result<u32> {
    if p == 0 {
        return Err(Error::InvalidParameter(
            "accuracy parameter p must be at least 1".into(),
        ));
    }
    let arity_ok =
        |t: u32| BigUint::from(2u32) * BigUint::from(p).pow(t) <= BigUint::from(p + 1).pow(t);
    let guess = (1.0 / (1.0 + 1.0 / p as f64).log2()).ceil().max(1.0) as u32;
    let mut t = guess;
    while !arity_ok(t) {
        t += 1;
    }
    while t > 1 && arity_ok(t - 1) {
        t -= 1;
    }
    Ok(t)
}

/// Factor-`(1 + 1/p)` estimate of `|x|`: runs the doubling search of
/// [`weak_count`] on the virtual string of length `n^t` whose bit at
/// `(i_1, …, i_t)` is `x_{i_1} ∧ … ∧ x_{i_t}` (weight `|x|^t`), with
/// `t = ` [`product_arity`]`(p)`.  Virtual bits are sampled on demand — the
/// product string is never materialized — so each verifier run costs `k·t`
/// real queries.  The returned estimate is the largest `m` with
/// `(2m-1)^t <= 2^t · Â`, i.e. `Â^{1/t}` rounded to the nearest integer.
pub fn strong_count(x: &BitString, params: &CountingParams, seed: u64) -> Result<usize> {
    Ok(strong_count_trace(x, params, seed)?.0)
}

/// [`strong_count`] plus the per-round transcript over the virtual string.
/// An all-zero input is detected exactly and comes back with no rounds.
pub fn strong_count_trace(
    x: &BitString,
    params: &CountingParams,
    seed: u64,
) -> Result<(usize, Vec<CountRound>)> {
    params.validate()?;
    if x.len() != params.n {
        return Err(Error::BitLength {
            expected: params.n,
            got: x.len(),
        });
    }
    if x.weight() == 0 {
        // Every AND of positions is 0; the weight being estimated is 0.
        return Ok((0, Vec::new()));
    }
    let t = product_arity(params.p)?;
    let n_virt = BigUint::from(params.n).pow(t);
    let rounds = ceil_log2(&n_virt);
    let reps = majority_reps(rounds, &params.eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimate_pow = n_virt.clone();
    let mut trace = Vec::new();
    for i in 0..=rounds {
        let a = (BigUint::one() << i).min(n_virt.clone());
        let r = threshold_odds(&n_virt, params.k, &a);
        let (accept1, accept0) = acceptance_coins(&r);
        let mut ones = 0;
        for _ in 0..reps {
            if virtual_run(x, t, params.k, &accept1, &accept0, &mut rng)? {
                ones += 1;
            }
        }
        trace.push(CountRound {
            threshold: a.clone(),
            reps,
            ones,
        });
        if 2 * ones < reps {
            estimate_pow = a;
            break;
        }
    }
    let bound = &estimate_pow << t;
    let mut m = 1usize;
    while BigUint::from(2 * (m + 1) - 1).pow(t) <= bound {
        m += 1;
    }
    Ok((m, trace))
}

/// One post-selected execution of the virtual-string verifier: samples `k`
/// virtual bits (each the AND of `t` uniform real positions, evaluated
/// lazily), applies the acceptance coins on all-ones / all-zeros samples,
/// and retries on abort.
fn virtual_run(
    x: &BitString,
    t: u32,
    k: u32,
    accept1: &Rational,
    accept0: &Rational,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let n = x.len();
    for _ in 0..ATTEMPT_CAP {
        let mut ones_seen = false;
        let mut zeros_seen = false;
        for _ in 0..k {
            let mut bit = true;
            for _ in 0..t {
                if !x.bit(rng.gen_range(1..=n)) {
                    bit = false;
                    break;
                }
            }
            if bit {
                ones_seen = true;
            } else {
                zeros_seen = true;
            }
            if ones_seen && zeros_seen {
                break;
            }
        }
        if !zeros_seen {
            if bernoulli(rng, accept1) {
                return Ok(true);
            }
        } else if !ones_seen && bernoulli(rng, accept0) {
            return Ok(false);
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: ATTEMPT_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::cube;
    use crate::rat::rat;

    fn params(n: usize) -> CountingParams {
        CountingParams::new(n, rat(1, 3)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CountingParams::new(0, rat(1, 3)).is_err());
        assert!(CountingParams::new(65, rat(1, 3)).is_err());
        assert!(CountingParams::new(4, rat(0, 1)).is_err());
        assert!(CountingParams::new(4, rat(1, 2)).is_err());
        assert!(CountingParams::new(4, rat(-1, 3)).is_err());
        assert!(params(4).with_k(0).is_err());
        assert!(params(4).with_p(0).is_err());
        assert!(params(4).with_k(3).is_ok());
    }

    #[test]
    fn verifier_rejects_bad_threshold() {
        assert!(counting_verifier(0, &params(4)).is_err());
        assert!(counting_verifier(5, &params(4)).is_err());
    }

    #[test]
    fn verifier_too_large_to_materialize() {
        let p = params(64).with_k(4).unwrap();
        assert!(matches!(
            counting_verifier(2, &p),
            Err(Error::InvalidParameter(_))
        ));
    }

    // The program's exact distribution, the closed-form conditional, and a
    // from-scratch recomputation of the branch probabilities all agree, for
    // every input and threshold.
    #[test]
    fn verifier_matches_closed_form_exhaustively() {
        for n in 1..=8usize {
            let par = params(n);
            for a in 1..=n {
                let prog = counting_verifier(a, &par).unwrap();
                assert!(prog.query_depth() <= 2);
                let r = threshold_odds(&BigUint::from(n), 2, &BigUint::from(a));
                let (acc1, acc0) = acceptance_coins(&r);
                for x in cube(n) {
                    let w = x.weight();
                    let frac1 = rat(w as i64, n as i64);
                    let frac0 = rat((n - w) as i64, n as i64);
                    let d = prog.exact_distribution(&x);
                    assert_eq!(d.p1, frac1.pow(2) * &acc1);
                    assert_eq!(d.p0, frac0.pow(2) * &acc0);
                    let (_, c1) = prog.conditional_distribution(&x).unwrap();
                    assert_eq!(c1, verifier_conditional_one(n, 2, a, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn conditional_one_boundary_value() {
        // n = 4, A = 4, |x| = 2: odds r = 2, distance ratio 1, so exactly
        // 1/(1 + 2) — the edge of the "reject" threshold A = 2|x|.
        assert_eq!(verifier_conditional_one(4, 2, 4, 2).unwrap(), rat(1, 3));
        let x: BitString = "1100".parse().unwrap();
        let prog = counting_verifier(4, &params(4)).unwrap();
        let (_, c1) = prog.conditional_distribution(&x).unwrap();
        assert_eq!(c1, rat(1, 3));
    }

    #[test]
    fn thresholds_exhaustive_small_n() {
        for n in 1..=8usize {
            for a in 1..=n {
                for w in 0..=n {
                    let c1 = verifier_conditional_one(n, 2, a, w).unwrap();
                    if 2 * a < w {
                        assert!(c1 >= rat(2, 3), "n={n} a={a} w={w}: {c1}");
                    }
                    if a > 2 * w && 2 * w <= n {
                        assert!(c1 <= rat(1, 3), "n={n} a={a} w={w}: {c1}");
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_indices_collapse() {
        // n = 1 forces every sampled pair onto the same variable; the
        // deduplicated chain keeps the depth legal and the answer exact.
        let par = params(1);
        let prog = counting_verifier(1, &par).unwrap();
        assert_eq!(prog.query_depth(), 1);
        let one: BitString = "1".parse().unwrap();
        let zero: BitString = "0".parse().unwrap();
        let (_, c1) = prog.conditional_distribution(&one).unwrap();
        assert_eq!(c1, rat(1, 1));
        let (c0, _) = prog.conditional_distribution(&zero).unwrap();
        assert_eq!(c0, rat(1, 1));
    }

    #[test]
    fn weak_count_zero_input() {
        let x = BitString::new(8, 0).unwrap();
        for seed in 0..4 {
            assert_eq!(weak_count(&x, &rat(1, 3), seed).unwrap(), 0);
        }
    }

    #[test]
    fn weak_count_all_ones_hits_the_cap() {
        let x = BitString::new(16, 0xffff).unwrap();
        for seed in 0..4 {
            assert_eq!(weak_count(&x, &rat(1, 3), seed).unwrap(), 16);
        }
    }

    #[test]
    fn weak_count_deterministic_per_seed() {
        let x = BitString::new(24, 0b1001_0010_0100_1001_0010_0100).unwrap();
        let a = weak_count(&x, &rat(1, 3), 5).unwrap();
        let b = weak_count(&x, &rat(1, 3), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weak_count_stays_in_range_on_nonzero_inputs() {
        for (n, word) in [
            (2usize, 0b10u64),
            (5, 0b10101),
            (9, 0b100000000),
            (16, 0xf0f0),
        ] {
            let x = BitString::new(n, word).unwrap();
            for seed in 0..5 {
                let est = weak_count(&x, &rat(1, 3), seed).unwrap();
                assert!(est >= 1 && est <= n, "n={n} est={est}");
            }
        }
    }

    #[test]
    fn weak_count_window_statistics() {
        // Weight 8 spread over 64 positions; the guarantee promises
        // [|x|/2, 4|x|] = [4, 32] with probability >= 2/3 per seed, and the
        // vote sizing makes misses rare in practice.
        let x = BitString::new(64, 0x0101_0101_0101_0101).unwrap();
        let mut hits = 0;
        for seed in 0..60 {
            let est = weak_count(&x, &rat(1, 3), seed).unwrap();
            if (4..=32).contains(&est) {
                hits += 1;
            }
        }
        assert!(hits >= 40, "only {hits}/60 estimates in [4, 32]");
    }

    #[test]
    fn product_arity_values() {
        assert_eq!(product_arity(1).unwrap(), 1);
        assert_eq!(product_arity(2).unwrap(), 2);
        assert_eq!(product_arity(3).unwrap(), 3);
        assert_eq!(product_arity(4).unwrap(), 4);
        assert_eq!(product_arity(8).unwrap(), 6);
        assert_eq!(product_arity(10).unwrap(), 8);
        assert!(product_arity(0).is_err());
    }

    #[test]
    fn product_arity_is_minimal_and_sufficient() {
        let ok = |p: u64, t: u32| {
            BigUint::from(2u32) * BigUint::from(p).pow(t) <= BigUint::from(p + 1).pow(t)
        };
        for p in 1..=500u64 {
            let t = product_arity(p).unwrap();
            assert!(ok(p, t), "p={p} t={t} misses the factor-2 target");
            assert!(t == 1 || !ok(p, t - 1), "p={p} t={t} is not minimal");
        }
    }

    #[test]
    fn strong_count_zero_input() {
        let par = params(8).with_p(4).unwrap();
        let x = BitString::new(8, 0).unwrap();
        assert_eq!(strong_count(&x, &par, 1).unwrap(), 0);
    }

    #[test]
    fn strong_count_rejects_length_mismatch() {
        let par = params(8);
        let x = BitString::new(4, 0b1010).unwrap();
        assert!(matches!(
            strong_count(&x, &par, 1),
            Err(Error::BitLength { .. })
        ));
    }

    #[test]
    fn strong_count_deterministic_per_seed() {
        let par = params(16).with_p(2).unwrap();
        let x = BitString::new(16, 0b0000_0101_0101_0101).unwrap();
        let a = strong_count(&x, &par, 9).unwrap();
        let b = strong_count(&x, &par, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strong_count_p1_behaves_like_weak_count() {
        // p = 1 means t = 1: the virtual string is the input itself and the
        // estimate map is the identity, so the weak-count window applies.
        let par = params(16);
        let x = BitString::new(16, 0b10101_0000_0000_101).unwrap();
        let w = x.weight() as i64;
        let mut hits = 0;
        for seed in 0..40 {
            let est = strong_count(&x, &par, seed).unwrap() as i64;
            if 2 * est >= w && est <= 4 * w {
                hits += 1;
            }
        }
        assert!(hits >= 27, "only {hits}/40 estimates within factor 4");
    }

    #[test]
    fn strong_count_window_statistics() {
        // Weight 6 out of 16 at accuracy p = 4 (t = 4 AND-factors): the
        // target window is 6 within factor 5/4, integer-rounded to [5, 8].
        let par = params(16).with_p(4).unwrap();
        let x = BitString::new(16, 0b0000_0101_0101_0101).unwrap();
        let mut hits = 0;
        for seed in 0..200 {
            let est = strong_count(&x, &par, seed).unwrap();
            if (5..=8).contains(&est) {
                hits += 1;
            }
        }
        assert!(hits >= 134, "only {hits}/200 estimates in [5, 8]");
    }
}
