//! End-to-end checks of the library's headline guarantees.
//!
//! Each numbered criterion is a self-contained experiment over exact
//! arithmetic (plus seeded sampling where the claim itself is statistical),
//! returning a [`CriterionReport`] with a verdict and human-readable
//! evidence.  The integration test suite runs all of them and the CLI exposes
//! them through `reproduce <id>`, so a verdict can always be regenerated from
//! a clean checkout.

use std::time::Instant;

use crate::boolean::{certificate_complexity, ndeg_symmetric, BitString, BooleanFunction};
use crate::counting::{counting_verifier, weak_count, CountingParams};
use crate::degree::{lp_feasible, maj_lower_bound, rdeg_plus, symmetric_lower_bound, LpMode};
use crate::poly::{or_rational, symmetrize, symmetrize_brute, LiteralMonomial, LiteralPolynomial};
use crate::program::Program;
use crate::rat::{int, rat, Rational};
use crate::transforms::{
    and_program, equality_program, maj_program, one_sided_program, or_program, program_to_rational,
    rational_to_program, zero_error_program,
};
use crate::Result;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of numbered criteria.
pub const CRITERION_COUNT: usize = 11;

/// Outcome of one criterion run.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    /// Evidence lines: measured worst cases, counts, timings.
    pub details: Vec<String>,
    pub millis: u128,
}

/// Short description of a criterion, `None` for an unknown id.
pub fn criterion_title(id: usize) -> Option<&'static str> {
    Some(match id {
        1 => "disjunction programs: depth 1, success >= 2/3, exact on all-zeros",
        2 => "zero-error programs match certificate complexity (all n=3 functions)",
        3 => "one-sided programs within one-sided certificate bounds (n=3)",
        4 => "program-to-rational conversion reproduces conditional probabilities exactly",
        5 => "power amplification is exact and brings the error below 1/3 at k=2",
        6 => "majority programs: depth n/2+1, exact 0-side, tunable 1-side error",
        7 => "majority degree lower bound; degree 1 infeasible vs degree 5 feasible at n=8",
        8 => "exact degree sweep dominates the symmetric lower bound",
        9 => "symmetrization closed form agrees with per-weight brute force",
        10 => "counting verifier thresholds and the weak-count window",
        11 => "depth-1 string-guessing routine reaches 2/3 for parity and AND",
        _ => return None,
    })
}

/// Runs one criterion and reports the verdict with evidence and wall time.
pub fn run_criterion(id: usize) -> Result<CriterionReport> {
    let title = criterion_title(id).ok_or_else(|| {
        crate::Error::InvalidParameter(format!(
            "criterion id {id} out of range 1..={CRITERION_COUNT}"
        ))
    })?;
    let runner: fn() -> Result<(bool, Vec<String>)> = match id {
        1 => c01_disjunction,
        2 => c02_zero_error,
        3 => c03_one_sided,
        4 => c04_to_rational,
        5 => c05_amplification,
        6 => c06_majority_upper,
        7 => c07_majority_lower,
        8 => c08_symmetric_sweep,
        9 => c09_symmetrization,
        10 => c10_counting,
        _ => c11_string_guessing,
    };
    let started = Instant::now();
    let (pass, details) = runner()?;
    Ok(CriterionReport {
        id,
        title,
        pass,
        details,
        millis: started.elapsed().as_millis(),
    })
}

fn third() -> Rational {
    rat(1, 3)
}

/// 1. The single-query disjunction program family: depth 1, conditional
/// error at most 1/3 on every input, and a certain 0 answer on the all-zero
/// input, for every width up to 16.
fn c01_disjunction() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut worst = Rational::zero();
    let mut worst_n = 0;
    for n in 1..=16 {
        let f = BooleanFunction::or(n);
        let prog = or_program(n)?;
        if prog.query_depth() != 1 {
            pass = false;
        }
        let err = prog.postselected_error(&f)?;
        if err > worst {
            worst = err.clone();
            worst_n = n;
        }
        if err > third() {
            pass = false;
        }
        let (c0, _) = prog.conditional_distribution(&BitString::new(n, 0)?)?;
        if !c0.is_one() {
            pass = false;
        }
    }
    let details = vec![
        "all widths n = 1..=16 have query depth 1 and answer 0 with certainty on the all-zero input".into(),
        format!("worst conditional error {worst} (at n = {worst_n}), below the 1/3 target"),
    ];
    Ok((pass, details))
}

/// 2. Over all 256 total functions on 3 bits, the zero-error construction
/// answers correctly with conditional probability 1 everywhere and its depth
/// equals the certificate complexity.
fn c02_zero_error() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut checked = 0;
    for table in 0..256u64 {
        let f = BooleanFunction::new_total(3, |x| table >> x.word() & 1 == 1)?;
        let cc = certificate_complexity(&f)?;
        let prog = zero_error_program(&f)?;
        if prog.query_depth() != cc.c {
            pass = false;
        }
        if !prog.postselected_error(&f)?.is_zero() {
            pass = false;
        }
        checked += 1;
    }
    Ok((
        pass,
        vec![format!(
            "{checked} total functions on 3 bits: conditional error 0 on every input and query depth equal to the certificate complexity"
        )],
    ))
}

/// 3. For every non-constant total function on 3 bits and both output values
/// `b`, the one-sided program stays within the b-side certificate bound,
/// answers b-inputs correctly with conditional probability above 2/3, and
/// never errs on the other side.
fn c03_one_sided() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut checked = 0;
    let two_thirds = rat(2, 3);
    for table in 1..255u64 {
        let f = BooleanFunction::new_total(3, |x| table >> x.word() & 1 == 1)?;
        let cc = certificate_complexity(&f)?;
        for b in [false, true] {
            let prog = one_sided_program(&f, b)?;
            let cap = if b { cc.c1 } else { cc.c0 };
            if prog.query_depth() > cap {
                pass = false;
            }
            for x in f.domain_iter() {
                let (c0, c1) = prog.conditional_distribution(&x)?;
                let success = if f.value(&x).unwrap() { c1 } else { c0 };
                if f.value(&x).unwrap() == b {
                    if success <= two_thirds {
                        pass = false;
                    }
                } else if !success.is_one() {
                    pass = false;
                }
            }
            checked += 1;
        }
    }
    Ok((
        pass,
        vec![format!(
            "{checked} (function, side) pairs on 3 bits: depth within the one-sided certificate bound, success > 2/3 on the guessed side, exact on the other"
        )],
    ))
}

/// 4. Converting a program to a ratio of nonnegative-coefficient literal
/// polynomials preserves the conditional-1 probability exactly on every
/// input, at degree no larger than the query depth.
fn c04_to_rational() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut named: Vec<(String, Program)> = vec![
        ("or(4)".into(), or_program(4)?),
        ("and(4)".into(), and_program(4)?),
        ("maj(4)".into(), maj_program(4, None)?),
        ("maj(6)".into(), maj_program(6, None)?),
    ];
    for table in 0..256u64 {
        let f = BooleanFunction::new_total(3, |x| table >> x.word() & 1 == 1)?;
        named.push((format!("zero-error table {table}"), zero_error_program(&f)?));
    }
    for (_name, prog) in &named {
        // Nonnegativity of the coefficients is a type invariant of the
        // ratio; degree and pointwise agreement are checked here.
        let ratio = program_to_rational(prog)?;
        if ratio.degree() > prog.query_depth() {
            pass = false;
        }
        for x in crate::boolean::cube(prog.n()) {
            let (_, c1) = prog.conditional_distribution(&x)?;
            if ratio.value(&x) != c1 {
                pass = false;
            }
        }
    }
    Ok((
        pass,
        vec![format!(
            "{} programs (or, and, maj(4), maj(6), and all 256 zero-error programs on 3 bits): exact agreement on every input, degree bounded by depth",
            named.len()
        )],
    ))
}

/// 5. Raising a ratio to the k-th power and post-selecting yields exactly
/// `P^k / (P^k + r Q^k)`; at `k = 2` with `r = 2/9` the worst-case error
/// drops to at most 1/3.  The error-balancing `r` for odd `k` is irrational
/// (`sqrt(2)/3` and `2 sqrt(2)/27`), so those runs use the close rational
/// stand-in obtained from the convergent `577/408` of `sqrt(2)`; the quotient
/// identity being tested holds exactly for any rational `r`.
fn c05_amplification() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let cases: Vec<(&str, BooleanFunction, crate::poly::PosRationalFunction)> = vec![
        (
            "or family (n=4, eps=1/10)",
            BooleanFunction::or(4),
            or_rational(4, &rat(1, 10))?,
        ),
        (
            "converted maj(4)",
            BooleanFunction::maj(4),
            program_to_rational(&maj_program(4, None)?)?,
        ),
    ];
    // r = sqrt((eps(1-eps))^k) at eps = 1/3: exact 2/9 for k = 2, the
    // convergent-based stand-ins for k = 1 and 3.
    let r_for = [rat(577, 1224), rat(2, 9), rat(577, 5508)];
    let mut worst_err = Rational::zero();
    for (_, f, ratio) in &cases {
        for (ki, r) in r_for.iter().enumerate() {
            let k = ki + 1;
            let prog = rational_to_program(ratio, k, r)?;
            for x in crate::boolean::cube(4) {
                let (p, q) = ratio.parts(&x);
                let pk = p.pow(k as i32);
                let expected = &pk / (&pk + r * q.pow(k as i32));
                let (_, c1) = prog.conditional_distribution(&x)?;
                if c1 != expected {
                    pass = false;
                }
            }
            if k == 2 {
                let err = prog.postselected_error(f)?;
                if err > third() {
                    pass = false;
                }
                if err > worst_err {
                    worst_err = err;
                }
            }
        }
    }
    Ok((
        pass,
        vec![
            "conditional-1 equals P^k/(P^k + r Q^k) exactly for k = 1, 2, 3 on both source ratios".into(),
            "odd k uses the rational stand-in for the irrational balancing r (convergent 577/408 of sqrt 2); the identity is exact for any rational r".into(),
            format!("k = 2, r = 2/9: worst conditional error {worst_err}, below the 1/3 target"),
        ],
    ))
}

/// 6. Majority programs at widths 4, 6, 8: depth n/2 + 1, a certain answer
/// on 0-inputs, conditional error below 1/3 on 1-inputs at the default exit
/// coin, and error below 1/10000 when the coin is shrunk to 10^-6 — at
/// unchanged depth.
fn c06_majority_upper() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut details = Vec::new();
    for n in [4usize, 6, 8] {
        let f = BooleanFunction::maj(n);
        let prog = maj_program(n, None)?;
        let mut worst_default = Rational::zero();
        if prog.query_depth() != n / 2 + 1 {
            pass = false;
        }
        for x in f.domain_iter() {
            let (c0, _) = prog.conditional_distribution(&x)?;
            if f.value(&x).unwrap() {
                let err = c0;
                if err >= third() {
                    pass = false;
                }
                if err > worst_default {
                    worst_default = err;
                }
            } else if !c0.is_one() {
                pass = false;
            }
        }
        let small = maj_program(n, Some(rat(1, 1_000_000)))?;
        if small.query_depth() != n / 2 + 1 {
            pass = false;
        }
        let small_err = small.postselected_error(&f)?;
        if small_err >= rat(1, 10_000) {
            pass = false;
        }
        details.push(format!(
            "n = {n}: depth {}, 0-inputs exact, worst 1-side error {} default / {} at r = 10^-6",
            n / 2 + 1,
            worst_default,
            small_err
        ));
    }
    Ok((pass, details))
}

/// 7. The closed-form majority degree bound dominates ceil(n/8) for all even
/// widths up to 128, and the exact feasibility programs certify that degree 1
/// cannot approximate maj(8) within 1/3 while degree 5 can.  The per-input
/// program is run at degree 1 as cross-validation of the collapsed one.
fn c07_majority_lower() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut details = Vec::new();
    let eps = third();
    for n in (2..=128).step_by(2) {
        let bound = maj_lower_bound(n, &eps)?;
        if bound < (n + 7) / 8 {
            pass = false;
        }
    }
    details.push("maj_lower_bound(n, 1/3) >= ceil(n/8) for every even n <= 128".into());

    let f8 = BooleanFunction::maj(8);
    fn timed_lp(
        f: &BooleanFunction,
        eps: &Rational,
        d: usize,
        mode: LpMode,
        label: &str,
        budget_s: u64,
        details: &mut Vec<String>,
    ) -> Result<(bool, bool)> {
        let t = Instant::now();
        let report = lp_feasible(f, eps, d, mode)?;
        let in_budget = t.elapsed().as_secs() < budget_s;
        // Measured milliseconds stay out of the detail text so reports are
        // byte-identical across runs; only the budget verdict is recorded.
        details.push(format!(
            "{label}: {} ({} rows x {} cols, {} pivots, within {budget_s} s budget: {})",
            if report.feasible {
                "feasible"
            } else {
                "infeasible"
            },
            report.rows,
            report.cols,
            report.pivots,
            if in_budget { "yes" } else { "no" },
        ));
        Ok((report.feasible, in_budget))
    }
    for (d, mode, label, budget, want_feasible) in [
        (1, LpMode::Collapsed, "degree 1, collapsed", 10, false),
        (1, LpMode::Full, "degree 1, per-input", 600, false),
        (5, LpMode::Collapsed, "degree 5, collapsed", 10, true),
    ] {
        let (feasible, in_budget) = timed_lp(&f8, &eps, d, mode, label, budget, &mut details)?;
        if feasible != want_feasible || !in_budget {
            pass = false;
        }
    }
    Ok((pass, details))
}

/// 8. For every non-constant symmetric function on 4 and 6 bits, the exact
/// degree found by the feasibility sweep is at least the closed-form
/// symmetric lower bound; and the function that is 0 only at weight n/2
/// has nondeterministic degree 1 yet needs ratio degree >= 2 at n = 8.
fn c08_symmetric_sweep() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut details = Vec::new();
    let eps = third();
    for n in [4usize, 6] {
        let mut checked = 0;
        let mut max_deg = 0;
        for bits in 1..((1u64 << (n + 1)) - 1) {
            let profile: Vec<bool> = (0..=n).map(|w| bits >> w & 1 == 1).collect();
            let f = BooleanFunction::from_profile(n, &profile)?;
            let (deg, _) = rdeg_plus(&f, &eps, LpMode::Auto)?;
            let bound = symmetric_lower_bound(&f, &eps)?;
            if deg < bound {
                pass = false;
            }
            max_deg = max_deg.max(deg);
            checked += 1;
        }
        details.push(format!(
            "n = {n}: all {checked} non-constant symmetric functions have exact degree >= the closed-form bound (largest exact degree seen: {max_deg})"
        ));
    }
    let g = BooleanFunction::notmid(8);
    let nd = ndeg_symmetric(&g)?.degree();
    let d1 = lp_feasible(&g, &eps, 1, LpMode::Collapsed)?;
    if nd != Some(1) || d1.feasible {
        pass = false;
    }
    details.push(
        "0-only-at-weight-4 on 8 bits: nondeterministic degree 1, yet degree 1 is infeasible for the ratio representation (so its exact degree is >= 2)"
            .into(),
    );
    Ok((pass, details))
}

/// 9. The falling-factorial closed form of symmetrization agrees with the
/// brute-force per-weight average on 200 random nonnegative literal
/// polynomials with up to 6 variables.
fn c09_symmetrization() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6usize);
        let terms = rng.gen_range(1..=6usize);
        let mut p = LiteralPolynomial::zero(n)?;
        for _ in 0..terms {
            let support = rng.gen_range(0..1u64 << n);
            let neg = rng.gen_range(0..1u64 << n) & support;
            let m = LiteralMonomial::new(support & !neg, neg)?;
            let coeff = rat(rng.gen_range(1..=9), rng.gen_range(1..=9));
            p.add_term(m, coeff)?;
        }
        let closed = symmetrize(&p);
        let brute = symmetrize_brute(&p);
        for (w, expected) in brute.iter().enumerate() {
            if closed.eval(&int(w as i64)) != *expected {
                pass = false;
            }
        }
    }
    Ok((
        pass,
        vec!["200 random nonnegative literal polynomials (n <= 6): closed form equals the per-weight average at every Hamming weight".into()],
    ))
}

/// 10. The counting verifier's exact conditional bias clears 2/3 whenever
/// the threshold sits below half the weight and falls below 1/3 whenever it
/// exceeds twice the weight (weight at most n/2), for every width up to 8;
/// and the seeded weak count lands in `[|x|/2, 4 |x|]` in at least 2/3 of
/// 200 trials for each tested weight on 64 bits.
fn c10_counting() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut details = Vec::new();
    let two_thirds = rat(2, 3);
    let mut threshold_checks = 0;
    for n in 1..=8usize {
        let params = CountingParams::new(n, third())?;
        for a in 1..=n {
            let prog = counting_verifier(a, &params)?;
            for x in crate::boolean::cube(n) {
                let w = x.weight();
                let (_, c1) = prog.conditional_distribution(&x)?;
                if 2 * a < w && c1 < two_thirds {
                    pass = false;
                }
                if a > 2 * w && 2 * w <= n && c1 > third() {
                    pass = false;
                }
                threshold_checks += 1;
            }
        }
    }
    details.push(format!(
        "{threshold_checks} exact verifier distributions over n <= 8: conditional-1 >= 2/3 below half the weight, <= 1/3 beyond twice the weight"
    ));

    for (w, word) in [
        (1usize, 1u64),
        (8, 0x0101_0101_0101_0101),
        (32, 0x5555_5555_5555_5555),
        (63, !(1u64 << 63)),
    ] {
        let x = BitString::new(64, word)?;
        let mut hits = 0;
        let mut lo = usize::MAX;
        let mut hi = 0;
        for seed in 0..200 {
            let est = weak_count(&x, &third(), seed)?;
            lo = lo.min(est);
            hi = hi.max(est);
            if 2 * est >= w && est <= 4 * w {
                hits += 1;
            }
        }
        if hits < 134 {
            pass = false;
        }
        details.push(format!(
            "|x| = {w}: {hits}/200 estimates within [{}/2, 4x] (range seen: {lo}..={hi})",
            w
        ));
    }
    Ok((pass, details))
}

/// 11. The depth-1 guessing routine — draw a uniform string y, check one
/// random position of x against it, and output f(y) with a small acceptance
/// coin on agreement — would need conditional success at least 2/3 on every
/// input for parity and AND on 2..=4 bits.  It does not get there: on
/// parity the conditional success is exactly 1/2 on every input (flipping
/// one bit of y negates f(y) while moving the agreement count by one, so the
/// two sides always balance), and on AND the all-ones input succeeds with
/// probability 2^(1-n).  No depth-1 program can fix parity (its conditional
/// bias, averaged over each weight class, is a degree-1 rational function of
/// the weight, which cannot cross 2/3 in alternating directions three
/// times), so this criterion records the measured shortfall rather than a
/// pass.
fn c11_string_guessing() -> Result<(bool, Vec<String>)> {
    let mut pass = true;
    let mut details = Vec::new();
    let two_thirds = rat(2, 3);
    for n in [2usize, 3, 4] {
        let denom = 2 * (n as u64) * (1u64 << n);
        for (name, f) in [
            ("parity", BooleanFunction::parity(n)),
            ("and", BooleanFunction::and(n)),
        ] {
            let prog = equality_program(&f, denom)?;
            if prog.query_depth() != 1 {
                pass = false;
            }
            let mut worst = Rational::one();
            let mut worst_x = String::new();
            for x in f.domain_iter() {
                let (c0, c1) = prog.conditional_distribution(&x)?;
                let success = if f.value(&x).unwrap() { c1 } else { c0 };
                if success < worst {
                    worst = success.clone();
                    worst_x = x.to_string();
                }
            }
            if worst < two_thirds {
                pass = false;
            }
            details.push(format!(
                "{name} on {n} bits: worst conditional success {worst} (at x = {worst_x}), target 2/3"
            ));
        }
    }
    if !pass {
        details.push(
            "expected shortfall: depth-1 conditional bias is a degree-1 rational function of the Hamming weight after averaging each weight class, which cannot alternate around 2/3 as parity requires"
                .into(),
        );
    }
    Ok((pass, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn titles_cover_exactly_the_declared_range() {
        for id in 1..=CRITERION_COUNT {
            assert!(criterion_title(id).is_some());
        }
        assert!(criterion_title(0).is_none());
        assert!(criterion_title(CRITERION_COUNT + 1).is_none());
        assert!(run_criterion(0).is_err());
    }
}
