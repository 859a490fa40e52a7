//! Exact revised simplex for the feasibility programs in this module.
//!
//! The programs all have the shape `maximize t` subject to `A v <= rhs`,
//! `v >= 0`, with `rhs >= 0`, so the all-slack basis is feasible and no
//! artificial variables are needed.  The caller only wants to know whether
//! the optimum is positive, so the solver stops at the first basic solution
//! with `t > 0`; otherwise it runs to optimality and certifies `t* = 0`.

use num_traits::{One, Signed, Zero};

use crate::rat::Rational;
use crate::{Error, Result};

/// A structural column, sparse over the rows.
#[derive(Clone, Debug)]
pub(crate) struct SparseCol {
    pub entries: Vec<(usize, Rational)>,
}

/// `maximize t` over `A v <= rhs, v >= 0`; column `t_col` is the objective
/// variable.
pub(crate) struct LpInstance {
    pub rows: usize,
    pub cols: Vec<SparseCol>,
    pub rhs: Vec<Rational>,
    pub t_col: usize,
}

/// Solver verdict.
pub(crate) enum LpOutcome {
    /// Stopped at a feasible basic solution with `t > 0` (not necessarily
    /// optimal); `solution` holds the structural variable values, the
    /// objective variable among them.
    PositiveT { solution: Vec<Rational> },
    /// Proven optimal with `t = 0`.
    ZeroOptimum,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct LpStats {
    pub rows: usize,
    pub cols: usize,
    pub pivots: u64,
}

/// Runs the simplex method on `inst`.  Entering columns are picked by
/// largest reduced cost; the leaving row follows the lexicographic rule,
/// which excludes cycling and keeps degenerate stretches short even though
/// most right-hand sides here are zero.
pub(crate) fn maximize_t(inst: &LpInstance) -> Result<(LpOutcome, LpStats)> {
    let m = inst.rows;
    let n_struct = inst.cols.len();
    let total = n_struct + m; // structural + slack columns
    let mut stats = LpStats {
        rows: m,
        cols: n_struct,
        pivots: 0,
    };

    for col in &inst.cols {
        for &(r, _) in &col.entries {
            debug_assert!(r < m, "row index out of range");
        }
    }
    debug_assert!(
        inst.rhs.iter().all(|b| !b.is_negative()),
        "rhs must be nonnegative"
    );

    // basis[i] = column id occupying row i; slack i = n_struct + i.
    let mut basis: Vec<usize> = (n_struct..total).collect();
    let mut in_basis = vec![false; total];
    for &b in &basis {
        in_basis[b] = true;
    }
    let mut binv: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); m];
            row[i] = Rational::one();
            row
        })
        .collect();
    let mut xb: Vec<Rational> = inst.rhs.clone();
    let mut t_row: Option<usize> = None; // basis position of t, if basic

    loop {
        // Price vector y = c_B B^-1; the only cost-1 variable is t, so y is
        // a single row of B^-1 (or zero when t is nonbasic).
        let y: Option<&[Rational]> = t_row.map(|r| binv[r].as_slice());

        let reduced_cost = |c: usize| -> Rational {
            let direct = if c == inst.t_col {
                Rational::one()
            } else {
                Rational::zero()
            };
            match y {
                None => direct,
                Some(y) => {
                    if c < n_struct {
                        let mut dot = Rational::zero();
                        for (r, a) in &inst.cols[c].entries {
                            if !y[*r].is_zero() {
                                dot += &y[*r] * a;
                            }
                        }
                        direct - dot
                    } else {
                        direct - y[c - n_struct].clone()
                    }
                }
            }
        };

        // Entering column: largest reduced cost, ties to the smallest id.
        let mut entering: Option<(usize, Rational)> = None;
        for c in 0..total {
            if in_basis[c] {
                continue;
            }
            let rc = reduced_cost(c);
            if rc.is_positive() {
                match &entering {
                    Some((_, best)) if *best >= rc => {}
                    _ => entering = Some((c, rc)),
                }
            }
        }
        let Some((enter, _)) = entering else {
            // Optimal.  By construction the t value is still zero: any pivot
            // that raised it would have returned below.
            let t_val = t_row.map(|r| xb[r].clone()).unwrap_or_else(Rational::zero);
            if !t_val.is_zero() {
                return Err(Error::Internal(
                    "optimum with positive objective was not caught early".into(),
                ));
            }
            return Ok((LpOutcome::ZeroOptimum, stats));
        };

        // Direction d = B^-1 a_enter.
        let direction: Vec<Rational> = if enter < n_struct {
            (0..m)
                .map(|i| {
                    let mut acc = Rational::zero();
                    for (r, a) in &inst.cols[enter].entries {
                        if !binv[i][*r].is_zero() {
                            acc += &binv[i][*r] * a;
                        }
                    }
                    acc
                })
                .collect()
        } else {
            let s = enter - n_struct;
            (0..m).map(|i| binv[i][s].clone()).collect()
        };

        // Lexicographic ratio test: among rows with a positive direction
        // entry, take the one minimizing (x_B[i], B^-1 row i) / d_i in
        // lexicographic order.  Rows of B^-1 are independent, so the minimum
        // is unique and bases never repeat.
        let lex_less = |i: usize, j: usize| -> bool {
            let cross = (&xb[i] * &direction[j]).cmp(&(&xb[j] * &direction[i]));
            match cross {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
            for k in 0..m {
                let cross = (&binv[i][k] * &direction[j]).cmp(&(&binv[j][k] * &direction[i]));
                match cross {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            unreachable!("distinct rows of an invertible matrix");
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if direction[i].is_positive() {
                match leave {
                    None => leave = Some(i),
                    Some(j) => {
                        if lex_less(i, j) {
                            leave = Some(i);
                        }
                    }
                }
            }
        }
        let Some(leave_row) = leave else {
            // The objective is bounded by construction (t <= Q-row rhs plus
            // normalization), so an unbounded ray means a broken instance.
            return Err(Error::Internal("unbounded feasibility program".into()));
        };

        // Pivot: replace basis[leave_row] by enter.
        let leaving = basis[leave_row];
        in_basis[leaving] = false;
        in_basis[enter] = true;
        basis[leave_row] = enter;
        let pivot = direction[leave_row].clone();
        for v in binv[leave_row].iter_mut() {
            *v /= &pivot;
        }
        xb[leave_row] /= &pivot;
        let pivot_row = binv[leave_row].clone();
        let pivot_x = xb[leave_row].clone();
        for i in 0..m {
            if i == leave_row || direction[i].is_zero() {
                continue;
            }
            let factor = direction[i].clone();
            for (v, p) in binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            xb[i] -= &factor * &pivot_x;
        }
        stats.pivots += 1;

        t_row = basis.iter().position(|&b| b == inst.t_col);

        // Feasibility is maintained, so a positive t value settles the
        // question immediately.
        if let Some(r) = t_row {
            if xb[r].is_positive() {
                let mut solution = vec![Rational::zero(); n_struct];
                for (i, &b) in basis.iter().enumerate() {
                    if b < n_struct {
                        solution[b] = xb[i].clone();
                    }
                }
                return Ok((LpOutcome::PositiveT { solution }, stats));
            }
        }
    }
}
