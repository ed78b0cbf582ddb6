//! Exact solve plans for the order-by-order reconstruction systems.
//!
//! Every system solved during reconstruction has the same coefficient matrix
//! for a given `(kind, m, t)`; only the right-hand side changes. A plan picks
//! a maximal independent set of rows, inverts that square block once, and
//! checks the remaining rows for consistency on every solve.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::multi_index::{all_tuples, MultiIndex};
use crate::scalar::{invert_matrix, Scalar};

/// Sparse row `Σ coeff · x[col]`.
pub type SparseRow = Vec<(usize, Scalar)>;

#[derive(Debug)]
pub struct SolvePlan {
    unknowns: usize,
    rows: Vec<SparseRow>,
    rank: usize,
    pivot_rows: Vec<usize>,
    inverse: Vec<Vec<Scalar>>,
}

/// Why a right-hand side could not be solved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveFailure {
    RankDeficient { rank: usize, unknowns: usize },
    Inconsistent { row: usize },
}

impl SolvePlan {
    pub fn build(unknowns: usize, rows: Vec<SparseRow>) -> SolvePlan {
        // incremental echelon basis: (pivot column, dense normalized row)
        let mut basis: Vec<(usize, Vec<Scalar>)> = Vec::new();
        let mut pivot_rows = Vec::new();
        for (ri, row) in rows.iter().enumerate() {
            if basis.len() == unknowns {
                break;
            }
            let mut dense = vec![Scalar::zero(); unknowns];
            for (c, v) in row {
                dense[*c] += v;
            }
            for (pc, b) in &basis {
                if !dense[*pc].is_zero() {
                    let f = dense[*pc].clone();
                    for (d, x) in dense.iter_mut().zip(b) {
                        if !x.is_zero() {
                            *d -= &f * x;
                        }
                    }
                }
            }
            if let Some(pc) = dense.iter().position(|x| !x.is_zero()) {
                let inv = dense[pc].recip();
                for x in dense.iter_mut() {
                    *x *= &inv;
                }
                basis.push((pc, dense));
                pivot_rows.push(ri);
            }
        }
        let rank = basis.len();
        let inverse = if rank == unknowns {
            let square: Vec<Vec<Scalar>> = pivot_rows
                .iter()
                .map(|&ri| {
                    let mut dense = vec![Scalar::zero(); unknowns];
                    for (c, v) in &rows[ri] {
                        dense[*c] += v;
                    }
                    dense
                })
                .collect();
            invert_matrix(&square).expect("independent rows form an invertible block")
        } else {
            Vec::new()
        };
        SolvePlan {
            unknowns,
            rows,
            rank,
            pivot_rows,
            inverse,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self, rhs: &[Scalar]) -> std::result::Result<Vec<Scalar>, SolveFailure> {
        if self.rank < self.unknowns {
            return Err(SolveFailure::RankDeficient {
                rank: self.rank,
                unknowns: self.unknowns,
            });
        }
        let b: Vec<&Scalar> = self.pivot_rows.iter().map(|&r| &rhs[r]).collect();
        let x: Vec<Scalar> = self
            .inverse
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero();
                for (a, bi) in row.iter().zip(&b) {
                    if !a.is_zero() && !bi.is_zero() {
                        acc += a * *bi;
                    }
                }
                acc
            })
            .collect();
        for (ri, row) in self.rows.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (c, v) in row {
                acc += v * &x[*c];
            }
            if acc != rhs[ri] {
                return Err(SolveFailure::Inconsistent { row: ri });
            }
        }
        Ok(x)
    }
}

/// Meaning of one row of a reconstruction system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKey {
    /// Prescribed total symmetrization at the given multi-index.
    Gauge(MultiIndex),
    /// Curvature component: leading lower index (classical only), then `λ < μ` and the σ tuple.
    Curvature {
        lead: usize,
        lambda: usize,
        mu: usize,
        sigma: Vec<usize>,
    },
}

/// Unknown of a reconstruction block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    /// Lower connection indices: `(a, b)` with `a <= b` for classical, `(λ)` for linear.
    pub lower: Vec<usize>,
    pub deriv: MultiIndex,
}

#[derive(Debug)]
pub struct ReconstructionPlan {
    pub unknowns: Vec<Unknown>,
    pub rows: Vec<RowKey>,
    pub plan: SolvePlan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PlanKind {
    Classical,
    Linear,
}

fn plan_cache() -> &'static Mutex<HashMap<(PlanKind, usize, usize), Arc<ReconstructionPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<(PlanKind, usize, usize), Arc<ReconstructionPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: PlanKind, m: usize, t: usize, build: impl FnOnce() -> ReconstructionPlan) -> Arc<ReconstructionPlan> {
    if let Some(p) = plan_cache().lock().unwrap().get(&(kind, m, t)) {
        return p.clone();
    }
    let built = Arc::new(build());
    plan_cache()
        .lock()
        .unwrap()
        .entry((kind, m, t))
        .or_insert(built)
        .clone()
}

fn ratio(n: usize, d: usize) -> Scalar {
    Scalar::new((n as i64).into(), (d as i64).into())
}

/// Plan for the order-`t` top coordinates `X[a, ρ, b; D]` of a classical jet, one block per `ρ`.
pub fn classical_plan(m: usize, t: usize) -> Arc<ReconstructionPlan> {
    cached(PlanKind::Classical, m, t, || {
        let ds = MultiIndex::all_of_order(m, t);
        let d_pos: HashMap<MultiIndex, usize> = ds.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let mut unknowns = Vec::new();
        let mut pair_pos = HashMap::new();
        for a in 0..m {
            for b in a..m {
                pair_pos.insert((a, b), unknowns.len() / ds.len().max(1));
                for d in &ds {
                    unknowns.push(Unknown {
                        lower: vec![a, b],
                        deriv: d.clone(),
                    });
                }
            }
        }
        let col = |a: usize, b: usize, d: &MultiIndex| -> usize {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            pair_pos[&(a, b)] * ds.len() + d_pos[d]
        };
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        for s in MultiIndex::all_of_order(m, t + 2) {
            let exps = s.exponents(m);
            let mut row: HashMap<usize, Scalar> = HashMap::new();
            for a in 0..m {
                for b in 0..m {
                    let avail = exps[b] as usize - usize::from(a == b).min(exps[b] as usize);
                    if exps[a] == 0 || avail == 0 || (a == b && exps[a] < 2) {
                        continue;
                    }
                    let mut rest = exps.clone();
                    rest[a] -= 1;
                    rest[b] -= 1;
                    let d = MultiIndex::from_exponents(&rest);
                    let w = ratio(exps[a] as usize * avail, (t + 2) * (t + 1));
                    *row.entry(col(a, b, &d)).or_insert_with(Scalar::zero) += w;
                }
            }
            let mut row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            row.sort_by_key(|(c, _)| *c);
            keys.push(RowKey::Gauge(s));
            rows.push(row);
        }
        if t >= 1 {
            for nu in 0..m {
                for l in 0..m {
                    for mu in l + 1..m {
                        for sigma in all_tuples(m, t - 1) {
                            let d1 = MultiIndex::new(sigma.clone()).with(mu);
                            let d2 = MultiIndex::new(sigma.clone()).with(l);
                            let mut row = vec![(col(nu, l, &d1), Scalar::one())];
                            let c2 = col(nu, mu, &d2);
                            if c2 == row[0].0 {
                                row.clear();
                            } else {
                                row.push((c2, -Scalar::one()));
                            }
                            keys.push(RowKey::Curvature {
                                lead: nu,
                                lambda: l,
                                mu,
                                sigma,
                            });
                            rows.push(row);
                        }
                    }
                }
            }
        }
        let plan = SolvePlan::build(unknowns.len(), rows);
        ReconstructionPlan {
            unknowns,
            rows: keys,
            plan,
        }
    })
}

/// Plan for the order-`t` top coordinates `X[j, i, λ; D]` of a linear jet, one block per `(j, i)`.
pub fn linear_plan(m: usize, t: usize) -> Arc<ReconstructionPlan> {
    cached(PlanKind::Linear, m, t, || {
        let ds = MultiIndex::all_of_order(m, t);
        let d_pos: HashMap<MultiIndex, usize> = ds.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let mut unknowns = Vec::new();
        for l in 0..m {
            for d in &ds {
                unknowns.push(Unknown {
                    lower: vec![l],
                    deriv: d.clone(),
                });
            }
        }
        let col = |l: usize, d: &MultiIndex| -> usize { l * ds.len() + d_pos[d] };
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        for s in MultiIndex::all_of_order(m, t + 1) {
            let exps = s.exponents(m);
            let mut row = Vec::new();
            for a in 0..m {
                if exps[a] == 0 {
                    continue;
                }
                let mut rest = exps.clone();
                rest[a] -= 1;
                row.push((col(a, &MultiIndex::from_exponents(&rest)), ratio(exps[a] as usize, t + 1)));
            }
            keys.push(RowKey::Gauge(s));
            rows.push(row);
        }
        if t >= 1 {
            for l in 0..m {
                for mu in l + 1..m {
                    for sigma in all_tuples(m, t - 1) {
                        let d1 = MultiIndex::new(sigma.clone()).with(mu);
                        let d2 = MultiIndex::new(sigma.clone()).with(l);
                        keys.push(RowKey::Curvature {
                            lead: 0,
                            lambda: l,
                            mu,
                            sigma,
                        });
                        rows.push(vec![(col(l, &d1), Scalar::one()), (col(mu, &d2), -Scalar::one())]);
                    }
                }
            }
        }
        let plan = SolvePlan::build(unknowns.len(), rows);
        ReconstructionPlan {
            unknowns,
            rows: keys,
            plan,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn solves_square_system() {
        let rows = vec![
            vec![(0, int(1)), (1, int(1))],
            vec![(0, int(1)), (1, int(-1))],
            vec![(0, int(2))],
        ];
        let plan = SolvePlan::build(2, rows);
        assert_eq!(plan.rank(), 2);
        assert_eq!(plan.solve(&[int(3), int(1), int(4)]).unwrap(), vec![int(2), int(1)]);
        assert_eq!(
            plan.solve(&[int(3), int(1), int(5)]),
            Err(SolveFailure::Inconsistent { row: 2 })
        );
    }

    #[test]
    fn reports_rank_deficiency() {
        let plan = SolvePlan::build(2, vec![vec![(0, int(1)), (1, int(1))]]);
        assert_eq!(
            plan.solve(&[int(1)]),
            Err(SolveFailure::RankDeficient { rank: 1, unknowns: 2 })
        );
    }

    #[test]
    fn reconstruction_systems_have_full_rank() {
        for m in 1..=3 {
            for t in 0..=3 {
                let c = classical_plan(m, t);
                assert_eq!(c.plan.rank(), c.plan.unknowns(), "classical m={m} t={t}");
                if t >= 1 {
                    let l = linear_plan(m, t);
                    assert_eq!(l.plan.rank(), l.plan.unknowns(), "linear m={m} t={t}");
                }
            }
        }
    }
}
