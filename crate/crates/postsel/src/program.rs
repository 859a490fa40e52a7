//! Randomized query programs with post-selection.
//!
//! A program is a finite tree over three node kinds: query a 1-based input
//! bit and branch on it, pick a child at random from an exact rational
//! distribution, or stop with outcome 0, 1 or bot (give up).  Running a
//! program means walking the tree; running it *post-selected* means
//! resampling until the outcome is not bot.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
pub use rand_chacha::ChaCha8Rng;

use crate::boolean::{BitString, BooleanFunction};
use crate::rat::{fmt_slash, parse_rational, Rational};
use crate::sampling::uniform_below;
use crate::{Error, Result};

/// Deterministic RNG for the seeded entry points.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Result of one run: an answer, or bot when the run is discarded.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Outcome {
    Zero,
    One,
    Bot,
}

impl Outcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Outcome::Zero => Some(false),
            Outcome::One => Some(true),
            Outcome::Bot => None,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Zero => "0",
            Outcome::One => "1",
            Outcome::Bot => "bot",
        })
    }
}

/// One tree node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Node {
    /// Stop with the given outcome.
    Leaf(Outcome),
    /// Read bit `index` (1-based) and continue in the matching child.
    Query {
        index: usize,
        child0: Box<Node>,
        child1: Box<Node>,
    },
    /// Continue in a random child; weights must be positive and sum to 1.
    Chance { branches: Vec<(Rational, Node)> },
}

impl Node {
    pub fn leaf(o: Outcome) -> Node {
        Node::Leaf(o)
    }

    pub fn query(index: usize, child0: Node, child1: Node) -> Node {
        Node::Query {
            index,
            child0: Box::new(child0),
            child1: Box::new(child1),
        }
    }

    pub fn chance(branches: Vec<(Rational, Node)>) -> Node {
        Node::Chance { branches }
    }

    /// A coin flip: `p` for `yes`, `1 - p` for `no`.  Degenerate weights
    /// collapse to the corresponding child.
    pub fn coin(p: Rational, yes: Node, no: Node) -> Node {
        if p.is_one() {
            yes
        } else if p.is_zero() {
            no
        } else {
            let q = Rational::one() - &p;
            Node::chance(vec![(p, yes), (q, no)])
        }
    }
}

/// Exact outcome probabilities of one program on one input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Distribution {
    pub p0: Rational,
    pub p1: Rational,
    pub pbot: Rational,
}

impl Distribution {
    fn zero() -> Self {
        Distribution {
            p0: Rational::zero(),
            p1: Rational::zero(),
            pbot: Rational::zero(),
        }
    }

    /// Probability that a run is kept, `p0 + p1`.
    pub fn success_mass(&self) -> Rational {
        &self.p0 + &self.p1
    }
}

/// A validated program on `n` input bits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    n: usize,
    root: Node,
}

impl Program {
    /// Validates the tree: chance weights positive and summing to 1, query
    /// indices in `1..=n`, and no root-to-leaf path with more than `n`
    /// queries.
    pub fn new(n: usize, root: Node) -> Result<Self> {
        let depth = validate(&root, n)?;
        if depth > n {
            return Err(Error::DepthExceedsVariables { depth, n });
        }
        Ok(Program { n, root })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Maximum number of queries on any root-to-leaf path.
    pub fn query_depth(&self) -> usize {
        depth_of(&self.root)
    }

    pub fn node_count(&self) -> usize {
        count_nodes(&self.root)
    }

    /// Exact outcome distribution on input `x`.
    pub fn exact_distribution(&self, x: &BitString) -> Distribution {
        assert_eq!(x.len(), self.n, "input length mismatch");
        let mut d = Distribution::zero();
        accumulate(&self.root, x.word(), &Rational::one(), &mut d);
        d
    }

    /// Conditional outcome probabilities given that the run is kept:
    /// `(Pr[0 | not bot], Pr[1 | not bot])`.  Fails when every run is
    /// discarded.
    pub fn conditional_distribution(&self, x: &BitString) -> Result<(Rational, Rational)> {
        let d = self.exact_distribution(x);
        let mass = d.success_mass();
        if mass.is_zero() {
            return Err(Error::PostselectionImpossible { x: x.to_string() });
        }
        Ok((d.p0 / &mass, d.p1 / &mass))
    }

    /// Worst-case conditional error against `f`:
    /// `max_x Pr[output != f(x) | not bot]` over the domain of `f`.
    pub fn postselected_error(&self, f: &BooleanFunction) -> Result<Rational> {
        if f.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "function on {} variables, program on {}",
                f.n(),
                self.n
            )));
        }
        if f.domain_size() == 0 {
            return Err(Error::EmptyDomain);
        }
        let mut worst = Rational::zero();
        for x in f.domain_iter() {
            let (c0, c1) = self.conditional_distribution(&x)?;
            let err = if f.value(&x).unwrap() { c0 } else { c1 };
            if err > worst {
                worst = err;
            }
        }
        Ok(worst)
    }

    /// Mixture: run `p_i` with probability `w_i`.  All programs must share
    /// `n`; the weights must be positive and sum to 1.
    pub fn mix(parts: Vec<(Rational, Program)>) -> Result<Program> {
        let n = match parts.first() {
            Some((_, p)) => p.n,
            None => {
                return Err(Error::WeightSum {
                    sum: Rational::zero(),
                })
            }
        };
        let mut branches = Vec::with_capacity(parts.len());
        for (w, p) in parts {
            if p.n != n {
                return Err(Error::InvalidParameter(format!(
                    "mixing programs on {} and {} variables",
                    n, p.n
                )));
            }
            branches.push((w, p.root));
        }
        Program::new(n, Node::chance(branches))
    }

    /// One sampled run (convenience wrapper; for batches build a
    /// [`CompiledSampler`] once).
    pub fn sample(&self, x: &BitString, rng: &mut ChaCha8Rng) -> Outcome {
        CompiledSampler::new(self).sample(x, rng)
    }

    /// Samples until the outcome is not bot; fails after `max_attempts`
    /// discarded runs.
    pub fn run_postselected(
        &self,
        x: &BitString,
        rng: &mut ChaCha8Rng,
        max_attempts: u64,
    ) -> Result<bool> {
        CompiledSampler::new(self).run_postselected(x, rng, max_attempts)
    }

    // -- text format -------------------------------------------------------

    /// Canonical text form, one node per line in pre-order:
    /// `Q <i>` with both subtrees following (0-child first), `C <m>` with
    /// `m` groups of a `w=<p/q>` line plus a subtree, `L 0|1|B`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_node(&self.root, &mut out);
        out
    }

    /// Parses the text form.  The variable count is inferred as the largest
    /// queried index unless `n` is given (which must not be smaller).
    pub fn parse_text(text: &str, n: Option<usize>) -> Result<Program> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut pos = 0;
        let root = parse_node(&lines, &mut pos)?;
        if pos != lines.len() {
            return Err(Error::Parse {
                line: lines[pos].0,
                msg: "trailing content after the program tree".into(),
            });
        }
        let used = max_index(&root);
        let n = match n {
            Some(n) => {
                if n < used {
                    return Err(Error::IndexOutOfRange { index: used, n });
                }
                n
            }
            None => used,
        };
        Program::new(n, root)
    }
}

fn validate(node: &Node, n: usize) -> Result<usize> {
    match node {
        Node::Leaf(_) => Ok(0),
        Node::Query {
            index,
            child0,
            child1,
        } => {
            if *index == 0 || *index > n {
                return Err(Error::IndexOutOfRange { index: *index, n });
            }
            let d0 = validate(child0, n)?;
            let d1 = validate(child1, n)?;
            Ok(1 + d0.max(d1))
        }
        Node::Chance { branches } => {
            let mut sum = Rational::zero();
            let mut depth = 0;
            for (w, child) in branches {
                if !w.is_positive() {
                    return Err(Error::NonpositiveWeight);
                }
                sum += w;
                depth = depth.max(validate(child, n)?);
            }
            if !sum.is_one() {
                return Err(Error::WeightSum { sum });
            }
            Ok(depth)
        }
    }
}

fn depth_of(node: &Node) -> usize {
    match node {
        Node::Leaf(_) => 0,
        Node::Query { child0, child1, .. } => 1 + depth_of(child0).max(depth_of(child1)),
        Node::Chance { branches } => branches.iter().map(|(_, c)| depth_of(c)).max().unwrap_or(0),
    }
}

fn count_nodes(node: &Node) -> usize {
    match node {
        Node::Leaf(_) => 1,
        Node::Query { child0, child1, .. } => 1 + count_nodes(child0) + count_nodes(child1),
        Node::Chance { branches } => {
            1 + branches.iter().map(|(_, c)| count_nodes(c)).sum::<usize>()
        }
    }
}

fn max_index(node: &Node) -> usize {
    match node {
        Node::Leaf(_) => 0,
        Node::Query {
            index,
            child0,
            child1,
        } => (*index).max(max_index(child0)).max(max_index(child1)),
        Node::Chance { branches } => branches
            .iter()
            .map(|(_, c)| max_index(c))
            .max()
            .unwrap_or(0),
    }
}

fn accumulate(node: &Node, x: u64, weight: &Rational, d: &mut Distribution) {
    match node {
        Node::Leaf(o) => match o {
            Outcome::Zero => d.p0 += weight,
            Outcome::One => d.p1 += weight,
            Outcome::Bot => d.pbot += weight,
        },
        Node::Query {
            index,
            child0,
            child1,
        } => {
            let child = if x >> (index - 1) & 1 == 1 {
                child1
            } else {
                child0
            };
            accumulate(child, x, weight, d);
        }
        Node::Chance { branches } => {
            for (w, child) in branches {
                accumulate(child, x, &(weight * w), d);
            }
        }
    }
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Leaf(o) => {
            out.push_str(match o {
                Outcome::Zero => "L 0\n",
                Outcome::One => "L 1\n",
                Outcome::Bot => "L B\n",
            });
        }
        Node::Query {
            index,
            child0,
            child1,
        } => {
            out.push_str(&format!("Q {index}\n"));
            write_node(child0, out);
            write_node(child1, out);
        }
        Node::Chance { branches } => {
            out.push_str(&format!("C {}\n", branches.len()));
            for (w, child) in branches {
                out.push_str(&format!("w={}\n", fmt_slash(w)));
                write_node(child, out);
            }
        }
    }
}

fn parse_node(lines: &[(usize, &str)], pos: &mut usize) -> Result<Node> {
    let (line, l) = *lines.get(*pos).ok_or(Error::Parse {
        line: lines.last().map_or(0, |(n, _)| *n),
        msg: "unexpected end of program text".into(),
    })?;
    *pos += 1;
    let perr = |msg: String| Error::Parse { line, msg };
    let mut toks = l.split_whitespace();
    match toks.next() {
        Some("L") => match toks.next() {
            Some("0") => Ok(Node::leaf(Outcome::Zero)),
            Some("1") => Ok(Node::leaf(Outcome::One)),
            Some("B") => Ok(Node::leaf(Outcome::Bot)),
            other => Err(perr(format!("expected `L 0|1|B`, got `L {other:?}`"))),
        },
        Some("Q") => {
            let index: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(format!("expected `Q <index>`, got `{l}`")))?;
            let child0 = parse_node(lines, pos)?;
            let child1 = parse_node(lines, pos)?;
            Ok(Node::query(index, child0, child1))
        }
        Some("C") => {
            let m: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(format!("expected `C <m>`, got `{l}`")))?;
            let mut branches = Vec::with_capacity(m);
            for _ in 0..m {
                let (wline, wl) = *lines
                    .get(*pos)
                    .ok_or_else(|| perr("unexpected end of text inside a chance node".into()))?;
                *pos += 1;
                let w = wl
                    .strip_prefix("w=")
                    .ok_or(Error::Parse {
                        line: wline,
                        msg: format!("expected `w=<p/q>`, got `{wl}`"),
                    })
                    .and_then(parse_rational)?;
                let child = parse_node(lines, pos)?;
                branches.push((w, child));
            }
            Ok(Node::chance(branches))
        }
        _ => Err(perr(format!("expected `L`, `Q` or `C` line, got `{l}`"))),
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

enum WeightTable {
    /// Cumulative scaled weights fitting in machine words.
    Small { total: u64, cum: Vec<u64> },
    /// Arbitrary-precision cumulative weights.
    Big { total: BigUint, cum: Vec<BigUint> },
}

impl WeightTable {
    /// Scales the weights by the lcm of their denominators so a branch can
    /// be chosen with a single exact uniform draw.
    fn new(weights: &[&Rational]) -> Self {
        let mut lcm = BigUint::one();
        for w in weights {
            lcm = lcm.lcm(&w.denom().to_biguint().expect("positive weight"));
        }
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = BigUint::zero();
        for w in weights {
            let numer = w.numer().to_biguint().expect("positive weight");
            acc += numer * (&lcm / w.denom().to_biguint().expect("positive weight"));
            cum.push(acc.clone());
        }
        debug_assert_eq!(acc, lcm, "weights sum to 1");
        if let Some(total) = lcm.to_u64() {
            WeightTable::Small {
                total,
                cum: cum
                    .iter()
                    .map(|c| c.to_u64().expect("below total"))
                    .collect(),
            }
        } else {
            WeightTable::Big { total: lcm, cum }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            WeightTable::Small { total, cum } => {
                let r = uniform_below(rng, &BigUint::from(*total))
                    .to_u64()
                    .expect("below u64 bound");
                cum.partition_point(|c| *c <= r)
            }
            WeightTable::Big { total, cum } => {
                let r = uniform_below(rng, total);
                cum.partition_point(|c| *c <= r)
            }
        }
    }
}

enum CompiledNode {
    Leaf(Outcome),
    Query {
        index: usize,
        child0: Box<CompiledNode>,
        child1: Box<CompiledNode>,
    },
    Chance {
        table: WeightTable,
        children: Vec<CompiledNode>,
    },
}

/// A program preprocessed for repeated sampling: every chance node carries
/// integer cumulative weights so each random choice is one exact uniform
/// draw.
pub struct CompiledSampler {
    n: usize,
    root: CompiledNode,
}

impl CompiledSampler {
    pub fn new(p: &Program) -> Self {
        CompiledSampler {
            n: p.n,
            root: compile(&p.root),
        }
    }

    pub fn sample(&self, x: &BitString, rng: &mut ChaCha8Rng) -> Outcome {
        assert_eq!(x.len(), self.n, "input length mismatch");
        let mut node = &self.root;
        loop {
            match node {
                CompiledNode::Leaf(o) => return *o,
                CompiledNode::Query {
                    index,
                    child0,
                    child1,
                } => {
                    node = if x.word() >> (index - 1) & 1 == 1 {
                        child1
                    } else {
                        child0
                    };
                }
                CompiledNode::Chance { table, children } => {
                    node = &children[table.draw(rng)];
                }
            }
        }
    }

    /// Samples until the outcome is not bot.
    pub fn run_postselected(
        &self,
        x: &BitString,
        rng: &mut ChaCha8Rng,
        max_attempts: u64,
    ) -> Result<bool> {
        for _ in 0..max_attempts {
            if let Some(b) = self.sample(x, rng).as_bool() {
                return Ok(b);
            }
        }
        Err(Error::AttemptsExhausted {
            attempts: max_attempts,
        })
    }
}

fn compile(node: &Node) -> CompiledNode {
    match node {
        Node::Leaf(o) => CompiledNode::Leaf(*o),
        Node::Query {
            index,
            child0,
            child1,
        } => CompiledNode::Query {
            index: *index,
            child0: Box::new(compile(child0)),
            child1: Box::new(compile(child1)),
        },
        Node::Chance { branches } => {
            let weights: Vec<&Rational> = branches.iter().map(|(w, _)| w).collect();
            CompiledNode::Chance {
                table: WeightTable::new(&weights),
                children: branches.iter().map(|(_, c)| compile(c)).collect(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn or2() -> Program {
        // Query a uniform bit; on 1 answer 1, on 0 answer 0 with probability
        // 1/4, else give up.
        let leaf_branch = |i| {
            Node::query(
                i,
                Node::coin(
                    rat(1, 4),
                    Node::leaf(Outcome::Zero),
                    Node::leaf(Outcome::Bot),
                ),
                Node::leaf(Outcome::One),
            )
        };
        Program::new(
            2,
            Node::chance(vec![
                (rat(1, 2), leaf_branch(1)),
                (rat(1, 2), leaf_branch(2)),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn distribution_of_or_like_program() {
        let p = or2();
        assert_eq!(p.query_depth(), 1);
        let d = p.exact_distribution(&"10".parse().unwrap());
        assert_eq!(d.p1, rat(1, 2));
        assert_eq!(d.p0, rat(1, 8));
        assert_eq!(d.pbot, rat(3, 8));
        let (c0, c1) = p.conditional_distribution(&"10".parse().unwrap()).unwrap();
        assert_eq!(c1, rat(4, 5));
        assert_eq!(c0, rat(1, 5));
        // All-zero input: only 0 survives post-selection.
        let (c0, c1) = p.conditional_distribution(&"00".parse().unwrap()).unwrap();
        assert_eq!(c0, int(1));
        assert_eq!(c1, int(0));
    }

    #[test]
    fn postselected_error_against_or() {
        // Worst input has a single 1: error (n-1)/(3n-1) = 1/5 at n = 2.
        let p = or2();
        let f = BooleanFunction::or(2);
        assert_eq!(p.postselected_error(&f).unwrap(), rat(1, 5));
    }

    #[test]
    fn validation_rejects_bad_trees() {
        // Weights not summing to 1.
        let bad = Node::chance(vec![(rat(1, 2), Node::leaf(Outcome::Zero))]);
        assert!(matches!(Program::new(1, bad), Err(Error::WeightSum { .. })));
        // Nonpositive weight.
        let bad = Node::chance(vec![
            (rat(3, 2), Node::leaf(Outcome::Zero)),
            (rat(-1, 2), Node::leaf(Outcome::One)),
        ]);
        assert!(matches!(
            Program::new(1, bad),
            Err(Error::NonpositiveWeight)
        ));
        // Query index out of range.
        let bad = Node::query(3, Node::leaf(Outcome::Zero), Node::leaf(Outcome::One));
        assert!(matches!(
            Program::new(2, bad),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        ));
        // More queries on a path than variables.
        let deep = Node::query(
            1,
            Node::query(1, Node::leaf(Outcome::Zero), Node::leaf(Outcome::One)),
            Node::leaf(Outcome::One),
        );
        assert!(matches!(
            Program::new(1, deep),
            Err(Error::DepthExceedsVariables { depth: 2, n: 1 })
        ));
    }

    #[test]
    fn postselection_impossible_when_all_bot() {
        let p = Program::new(1, Node::leaf(Outcome::Bot)).unwrap();
        assert!(matches!(
            p.conditional_distribution(&"0".parse().unwrap()),
            Err(Error::PostselectionImpossible { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            p.run_postselected(&"0".parse().unwrap(), &mut rng, 100),
            Err(Error::AttemptsExhausted { attempts: 100 })
        ));
    }

    #[test]
    fn mix_concentrates_weights() {
        let a = Program::new(1, Node::leaf(Outcome::Zero)).unwrap();
        let b = Program::new(1, Node::leaf(Outcome::One)).unwrap();
        let m = Program::mix(vec![(rat(1, 3), a), (rat(2, 3), b)]).unwrap();
        let d = m.exact_distribution(&"0".parse().unwrap());
        assert_eq!(d.p0, rat(1, 3));
        assert_eq!(d.p1, rat(2, 3));
    }

    #[test]
    fn text_round_trip_or_like() {
        let p = or2();
        let text = p.to_text();
        let back = Program::parse_text(&text, None).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_text(), text);
        // Explicit n may widen but not narrow.
        assert_eq!(Program::parse_text(&text, Some(4)).unwrap().n(), 4);
        assert!(Program::parse_text(&text, Some(1)).is_err());
    }

    #[test]
    fn parse_rejects_malformed_text() {
        assert!(Program::parse_text("L 2\n", None).is_err());
        assert!(Program::parse_text("Q 1\nL 0\n", None).is_err()); // missing child
        assert!(Program::parse_text("C 1\nw=1/2\nL 0\n", None).is_err()); // bad sum
        assert!(Program::parse_text("L 0\nL 1\n", None).is_err()); // trailing
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let p = or2();
        let x = "10".parse().unwrap();
        let sampler = CompiledSampler::new(&p);
        let mut a = ChaCha8Rng::seed_from_u64(123);
        let mut b = ChaCha8Rng::seed_from_u64(123);
        let run_a: Vec<Outcome> = (0..50).map(|_| sampler.sample(&x, &mut a)).collect();
        let run_b: Vec<Outcome> = (0..50).map(|_| sampler.sample(&x, &mut b)).collect();
        assert_eq!(run_a, run_b);
    }

    #[test]
    fn sampler_frequencies_match_distribution() {
        // Chance node {1/3: 1, 2/3: 0}; 30000 draws stay well within 5 sigma.
        let p = Program::new(
            1,
            Node::chance(vec![
                (rat(1, 3), Node::leaf(Outcome::One)),
                (rat(2, 3), Node::leaf(Outcome::Zero)),
            ]),
        )
        .unwrap();
        let sampler = CompiledSampler::new(&p);
        let x = "0".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let ones = (0..30_000)
            .filter(|_| sampler.sample(&x, &mut rng) == Outcome::One)
            .count();
        // mean 10000, sd ~81.6
        assert!((9_550..=10_450).contains(&ones), "ones = {ones}");
    }

    #[test]
    fn run_postselected_skips_bot() {
        let p = Program::new(
            1,
            Node::chance(vec![
                (rat(1, 10), Node::leaf(Outcome::One)),
                (rat(9, 10), Node::leaf(Outcome::Bot)),
            ]),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert!(p
                .run_postselected(&"1".parse().unwrap(), &mut rng, 10_000)
                .unwrap());
        }
    }

    // Random program trees for property tests.
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
        prop_oneof![2 => leaf, 2 => query, 1 => chance].boxed()
    }

    proptest! {
        #[test]
        fn random_programs_have_probability_distributions(
            root in arb_node(3, 3),
            word in 0u64..8,
        ) {
            let p = Program::new(3, root).unwrap();
            let x = BitString::new(3, word).unwrap();
            let d = p.exact_distribution(&x);
            prop_assert!(!d.p0.is_negative() && !d.p1.is_negative() && !d.pbot.is_negative());
            prop_assert_eq!(&d.p0 + &d.p1 + &d.pbot, int(1));
        }

        #[test]
        fn random_programs_round_trip_through_text(root in arb_node(3, 3)) {
            let p = Program::new(3, root).unwrap();
            let text = p.to_text();
            let back = Program::parse_text(&text, Some(3)).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_text(), text);
        }

        #[test]
        fn sampled_outcomes_have_positive_probability(
            root in arb_node(3, 2),
            word in 0u64..8,
            seed in 0u64..1000,
        ) {
            let p = Program::new(3, root).unwrap();
            let x = BitString::new(3, word).unwrap();
            let d = p.exact_distribution(&x);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = p.sample(&x, &mut rng);
            let prob = match o {
                Outcome::Zero => &d.p0,
                Outcome::One => &d.p1,
                Outcome::Bot => &d.pbot,
            };
            prop_assert!(prob.is_positive());
        }
    }
}
