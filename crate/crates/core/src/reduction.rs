//! Reduction of connection jets to curvature data, and the inverse maps.
//!
//! The first reduction sends `(j^sΛ, j^rK)` to `j^{k-2}Λ`, `j^{min(k-1,r)}K` and
//! the values at the origin of `∇^i R[Λ]` and `∇^i R[K]`. Reconstruction solves
//! for the top jet coordinates order by order with the totally symmetrized part
//! prescribed (zero for the canonical representative).

use num_traits::{One, Zero};

use crate::connection::{
    classical_sym_value, linear_sym_value, ClassicalConnectionJet, ConnectionKind, LinearConnectionJet,
    SymmetricJetPart,
};
use crate::covariant::{
    curvature_classical, curvature_linear, formal_curvature_map_classical, formal_curvature_map_linear,
    iterated_covariant_differential, tensor_product_curvature_action, CurvatureDifferentialData,
};
use crate::error::{JetError, Result};
use crate::group::{act_on_classical, act_on_linear, act_on_tensor, make_kernel_element_from, WGroupElement};
use crate::multi_index::{all_tuples, MultiIndex};
use crate::scalar::Scalar;
use crate::solver::{classical_plan, linear_plan, ReconstructionPlan, RowKey, SolveFailure};
use crate::tensor::TensorFieldJet;

/// Rank bookkeeping for one order of a reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub stage: &'static str,
    pub order: usize,
    pub rank: usize,
    pub unknowns: usize,
    pub rows: usize,
}

impl SolveReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.unknowns
    }
}

/// Output of the first reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDataFirst {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub k: usize,
    /// `j^{k-2}Λ`, absent for `k = 1`.
    pub lambda_low: Option<ClassicalConnectionJet>,
    /// `j^{min(k-1, r)}K`.
    pub k_low: LinearConnectionJet,
    /// `∇^i R[Λ](0)` for `i = max(k-2, 0) .. s-1`.
    pub w: Vec<CurvatureDifferentialData>,
    /// `∇^i R[K](0)` for `i = k-1 .. r-1`.
    pub u: Vec<CurvatureDifferentialData>,
}

impl ReducedDataFirst {
    pub fn w_start(&self) -> usize {
        self.k.saturating_sub(2)
    }

    pub fn u_start(&self) -> usize {
        self.k - 1
    }

    pub fn w_at(&self, i: usize) -> Option<&CurvatureDifferentialData> {
        i.checked_sub(self.w_start()).and_then(|p| self.w.get(p))
    }

    pub fn u_at(&self, i: usize) -> Option<&CurvatureDifferentialData> {
        i.checked_sub(self.u_start()).and_then(|p| self.u.get(p))
    }

    fn check_shape(&self) -> Result<()> {
        check_orders(self.s, self.r, self.k, false)?;
        let bad = |what: &str| Err(JetError::Precondition(format!("reduced data: {what}")));
        match (&self.lambda_low, self.k >= 2) {
            (None, false) => {}
            (Some(l), true) if l.order() == self.k - 2 && l.m() == self.m => {}
            _ => return bad("classical jet has the wrong order"),
        }
        if self.k_low.order() != (self.k - 1).min(self.r) || self.k_low.m() != self.m || self.k_low.n() != self.n {
            return bad("linear jet has the wrong shape");
        }
        if self.w.len() != self.s.saturating_sub(self.w_start()) {
            return bad("wrong number of classical curvature entries");
        }
        if self.u.len() != self.r.saturating_sub(self.u_start()) {
            return bad("wrong number of linear curvature entries");
        }
        for (p, d) in self.w.iter().enumerate() {
            if d.kind() != ConnectionKind::Classical || d.order() != self.w_start() + p || d.value().m() != self.m {
                return bad("misplaced classical curvature entry");
            }
        }
        for (p, d) in self.u.iter().enumerate() {
            if d.kind() != ConnectionKind::Linear
                || d.order() != self.u_start() + p
                || d.value().m() != self.m
                || d.value().n() != self.n
            {
                return bad("misplaced linear curvature entry");
            }
        }
        Ok(())
    }
}

fn check_orders(s: usize, r: usize, k: usize, strict: bool) -> Result<()> {
    let fail = |msg: String| Err(JetError::Precondition(msg));
    if k == 0 {
        return fail("k must be at least 1".into());
    }
    if s + 2 < k {
        return fail(format!("classical order {s} below k - 2 = {}", k - 2));
    }
    let r_min = if strict { k - 1 } else { k.saturating_sub(2) };
    if r < r_min {
        return fail(format!("linear order {r} below {r_min}"));
    }
    if s + 2 < r {
        return fail(format!("classical order {s} below linear order {r} - 2"));
    }
    Ok(())
}

fn check_pair(lambda: &ClassicalConnectionJet, k_jet: &LinearConnectionJet) -> Result<()> {
    if lambda.m() != k_jet.m() {
        return Err(JetError::DimensionMismatch {
            expected: lambda.m(),
            found: k_jet.m(),
        });
    }
    Ok(())
}

fn reduce_connections(
    lambda: &ClassicalConnectionJet,
    k_jet: &LinearConnectionJet,
    k: usize,
    strict: bool,
) -> Result<ReducedDataFirst> {
    check_pair(lambda, k_jet)?;
    let (s, r) = (lambda.order(), k_jet.order());
    check_orders(s, r, k, strict)?;
    let lambda_low = if k >= 2 { Some(lambda.project(k - 2)?) } else { None };
    let k_low = k_jet.project((k - 1).min(r))?;
    let w = (k.saturating_sub(2)..s)
        .map(|i| formal_curvature_map_classical(lambda, i))
        .collect::<Result<Vec<_>>>()?;
    let u = (k - 1..r)
        .map(|i| formal_curvature_map_linear(Some(lambda), k_jet, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReducedDataFirst {
        m: lambda.m(),
        n: k_jet.n(),
        s,
        r,
        k,
        lambda_low,
        k_low,
        w,
        u,
    })
}

/// First reduction; needs `k >= 1`, `s + 2 >= k`, `r + 1 >= k` and `s + 2 >= r`.
pub fn reduce_first(lambda: &ClassicalConnectionJet, k_jet: &LinearConnectionJet, k: usize) -> Result<ReducedDataFirst> {
    reduce_connections(lambda, k_jet, k, true)
}

fn not_member(stage: &str, order: usize) -> JetError {
    JetError::NotMember {
        stage: stage.into(),
        order,
    }
}

fn audit_entries(d: &ReducedDataFirst) -> Result<()> {
    for w in &d.w {
        w.value().audit().map_err(|_| not_member("classical curvature", w.order()))?;
    }
    for u in &d.u {
        u.value().audit().map_err(|_| not_member("linear curvature", u.order()))?;
    }
    Ok(())
}

fn run_plan(
    plan: &ReconstructionPlan,
    rhs: &[Scalar],
    stage: &'static str,
    order: usize,
    fail_order: usize,
) -> Result<Vec<Scalar>> {
    plan.plan.solve(rhs).map_err(|e| match e {
        SolveFailure::RankDeficient { rank, unknowns } => JetError::RankDeficient { rank, unknowns },
        SolveFailure::Inconsistent { row } => match plan.rows[row] {
            RowKey::Gauge(_) => not_member(stage, order),
            RowKey::Curvature { .. } => not_member(stage, fail_order),
        },
    })
}

fn report(plan: &ReconstructionPlan, stage: &'static str, order: usize, blocks: usize) -> SolveReport {
    SolveReport {
        stage,
        order,
        rank: plan.plan.rank() * blocks,
        unknowns: plan.plan.unknowns() * blocks,
        rows: plan.plan.row_count() * blocks,
    }
}

/// Inverse of the first reduction with prescribed symmetrized tops.
///
/// `sym_classical` / `sym_linear` give the symmetrized part per connection
/// order; missing entries count as zero. Returns the rank trace per order.
pub fn reconstruct_first_with(
    d: &ReducedDataFirst,
    sym_classical: Option<&SymmetricJetPart>,
    sym_linear: Option<&SymmetricJetPart>,
) -> Result<(ClassicalConnectionJet, LinearConnectionJet, Vec<SolveReport>)> {
    d.check_shape()?;
    audit_entries(d)?;
    let (m, n, s, r, k) = (d.m, d.n, d.s, d.r, d.k);
    let mut reports = Vec::new();

    let mut lam = match &d.lambda_low {
        Some(l) => l.padded(s),
        None => ClassicalConnectionJet::zero(m, s),
    };
    for t in (k - 1)..=s {
        let plan = classical_plan(m, t);
        let p = if t >= 1 {
            Some(formal_curvature_map_classical(&lam.project(t)?, t - 1)?)
        } else {
            None
        };
        let mut solved = Vec::with_capacity(m);
        for rho in 0..m {
            let rhs: Vec<Scalar> = plan
                .rows
                .iter()
                .map(|key| match key {
                    RowKey::Gauge(sidx) => sym_classical.map(|sp| sp.get(t, &[rho], sidx)).unwrap_or_else(Scalar::zero),
                    RowKey::Curvature { lead, lambda, mu, sigma } => {
                        let idx = [&[*lead, rho, *lambda, *mu][..], sigma].concat();
                        let target = d.w_at(t - 1).expect("shape checked").get(&idx);
                        target - p.as_ref().expect("t >= 1").get(&idx)
                    }
                })
                .collect();
            solved.push(run_plan(&plan, &rhs, "classical curvature", t, t.saturating_sub(1))?);
        }
        for (rho, x) in solved.into_iter().enumerate() {
            for (u, v) in plan.unknowns.iter().zip(x) {
                lam.set_jet_coordinate(u.lower[0], rho, u.lower[1], &u.deriv, v)?;
            }
        }
        reports.push(report(&plan, "classical", t, m));
    }

    let mut kj = d.k_low.padded(r);
    for t in k..=r {
        let plan = linear_plan(m, t);
        let p = formal_curvature_map_linear(Some(&lam), &kj.project(t)?, t - 1)?;
        for j in 0..n {
            for i in 0..n {
                let rhs: Vec<Scalar> = plan
                    .rows
                    .iter()
                    .map(|key| match key {
                        RowKey::Gauge(sidx) => sym_linear.map(|sp| sp.get(t, &[j, i], sidx)).unwrap_or_else(Scalar::zero),
                        RowKey::Curvature { lambda, mu, sigma, .. } => {
                            let idx = [&[j, i, *lambda, *mu][..], sigma].concat();
                            d.u_at(t - 1).expect("shape checked").get(&idx) - p.get(&idx)
                        }
                    })
                    .collect();
                let x = run_plan(&plan, &rhs, "linear curvature", t, t - 1)?;
                for (u, v) in plan.unknowns.iter().zip(x) {
                    kj.set_jet_coordinate(j, i, u.lower[0], &u.deriv, v)?;
                }
            }
        }
        reports.push(report(&plan, "linear", t, n * n));
    }
    Ok((lam, kj, reports))
}

/// Canonical inverse of the first reduction: symmetrized tops above `(k-2, k-1)` vanish.
pub fn reconstruct_first(d: &ReducedDataFirst) -> Result<(ClassicalConnectionJet, LinearConnectionJet)> {
    let (l, k, _) = reconstruct_first_with(d, None, None)?;
    Ok((l, k))
}

/// True when `d` lies in the image of the first reduction.
pub fn c_space_membership(d: &ReducedDataFirst) -> Result<bool> {
    match reconstruct_first(d) {
        Ok((l, k)) => Ok(reduce_connections(&l, &k, d.k, false)? == *d),
        Err(JetError::NotMember { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Group orders used for orbit computations on `(j^sΛ, j^rK)`.
pub fn group_orders(s: usize, r: usize) -> (usize, usize) {
    ((s + 2).max(r + 1), r + 1)
}

/// Moves `(Λ, K)` into the canonical gauge by kernel elements of level `k`.
///
/// Returns `h` with `h · (Λ, K)` canonical; `h` acts trivially on the reduced data.
pub fn canonicalize(
    lambda: &ClassicalConnectionJet,
    k_jet: &LinearConnectionJet,
    k: usize,
) -> Result<(WGroupElement, ClassicalConnectionJet, LinearConnectionJet)> {
    check_pair(lambda, k_jet)?;
    let (m, n, s, r) = (lambda.m(), k_jet.n(), lambda.order(), k_jet.order());
    check_orders(s, r, k, false)?;
    let (t1, t2) = group_orders(s, r);
    let mut h = WGroupElement::identity(m, n, t1, t2);
    let (mut lam, mut kj) = (lambda.clone(), k_jet.clone());
    for deg in (k + 1)..=t1.max(t2) {
        if deg <= t1 && deg - 2 <= s {
            let mut coords = Vec::new();
            for l in 0..m {
                for sidx in MultiIndex::all_of_order(m, deg) {
                    let v = classical_sym_value(&lam, l, &sidx);
                    if !v.is_zero() {
                        coords.push((l, sidx, -v));
                    }
                }
            }
            if !coords.is_empty() {
                let e = make_kernel_element_from(m, n, t1, t2, &coords, &[])?;
                lam = act_on_classical(&e, &lam)?;
                kj = act_on_linear(&e, &kj)?;
                h = e.mul(&h)?;
            }
        }
        if deg <= t2 {
            let mut coords = Vec::new();
            for j in 0..n {
                for i in 0..n {
                    for sidx in MultiIndex::all_of_order(m, deg) {
                        let v = linear_sym_value(&kj, j, i, &sidx);
                        if !v.is_zero() {
                            coords.push((i, j, sidx, -v));
                        }
                    }
                }
            }
            if !coords.is_empty() {
                let e = make_kernel_element_from(m, n, t1, t2, &[], &coords)?;
                lam = act_on_classical(&e, &lam)?;
                kj = act_on_linear(&e, &kj)?;
                h = e.mul(&h)?;
            }
        }
    }
    Ok((h, lam, kj))
}

/// Finds `h` in the level-`k` kernel with `h · (Λ2, K2) = (Λ1, K1)`, if one exists.
pub fn orbit_solve(
    first: (&ClassicalConnectionJet, &LinearConnectionJet),
    second: (&ClassicalConnectionJet, &LinearConnectionJet),
    k: usize,
) -> Result<Option<WGroupElement>> {
    let d1 = reduce_connections(first.0, first.1, k, false)?;
    let d2 = reduce_connections(second.0, second.1, k, false)?;
    if d1 != d2 {
        return Ok(None);
    }
    let (h1, _, _) = canonicalize(first.0, first.1, k)?;
    let (h2, _, _) = canonicalize(second.0, second.1, k)?;
    let h = h1.inv()?.mul(&h2)?;
    let ok = act_on_classical(&h, second.0)? == *first.0 && act_on_linear(&h, second.1)? == *first.1;
    Ok(if ok { Some(h) } else { None })
}

/// Output of the second reduction: connection data plus field data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDataSecond {
    pub connections: ReducedDataFirst,
    /// Order of the field jet.
    pub r: usize,
    /// `j^{k-1}Φ`.
    pub phi_low: TensorFieldJet,
    /// `∇^iΦ(0)` for `i = k ..= r`.
    pub phi_diffs: Vec<TensorFieldJet>,
}

impl ReducedDataSecond {
    pub fn k(&self) -> usize {
        self.connections.k
    }

    pub fn diff_at(&self, i: usize) -> Option<&TensorFieldJet> {
        i.checked_sub(self.k()).and_then(|p| self.phi_diffs.get(p))
    }
}

/// Second reduction of `(j^{s1}Λ, j^{s2}K, j^rΦ)`; needs `s1 + 2 >= s2`, `s1, s2 >= r - 1`, `r + 1 >= k >= 1`.
pub fn reduce_second(
    lambda: &ClassicalConnectionJet,
    k_jet: &LinearConnectionJet,
    phi: &TensorFieldJet,
    k: usize,
) -> Result<ReducedDataSecond> {
    check_pair(lambda, k_jet)?;
    let r = phi.order();
    if phi.m() != lambda.m() || phi.n() != k_jet.n() {
        return Err(JetError::Precondition("field dimensions differ from the connections".into()));
    }
    if k == 0 || r + 1 < k {
        return Err(JetError::Precondition(format!("need r + 1 >= k >= 1, got r = {r}, k = {k}")));
    }
    if lambda.order() + 1 < r || k_jet.order() + 1 < r {
        return Err(JetError::Precondition(format!("connection orders must be at least r - 1 = {}", r as i64 - 1)));
    }
    let connections = reduce_connections(lambda, k_jet, k, false)?;
    let phi_low = phi.project(k - 1)?;
    let phi_diffs = (k..=r)
        .map(|i| Ok(iterated_covariant_differential(&phi.project(i)?, Some(k_jet), Some(lambda), i)?.projected(0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReducedDataSecond {
        connections,
        r,
        phi_low,
        phi_diffs,
    })
}

fn check_second_shape(d: &ReducedDataSecond) -> Result<()> {
    let k = d.k();
    let c = &d.connections;
    if d.phi_low.order() != k - 1 || d.phi_low.m() != c.m || d.phi_low.n() != c.n {
        return Err(JetError::Precondition("reduced data: field jet has the wrong shape".into()));
    }
    if d.r + 1 < k || d.phi_diffs.len() != d.r + 1 - k {
        return Err(JetError::Precondition("reduced data: wrong number of field differentials".into()));
    }
    for (p, v) in d.phi_diffs.iter().enumerate() {
        let i = k + p;
        if v.valence().slots() != d.phi_low.valence().with_appended(i).slots() || v.m() != c.m || v.n() != c.n {
            return Err(JetError::Precondition(format!("reduced data: field differential {i} has the wrong valence")));
        }
    }
    Ok(())
}

/// Solves for `Φ̂` from sorted derivative tuples without checking the other tuples.
fn reconstruct_field_raw(
    d: &ReducedDataSecond,
    lam: &ClassicalConnectionJet,
    kj: &LinearConnectionJet,
    reports: &mut Vec<SolveReport>,
) -> Result<TensorFieldJet> {
    let k = d.k();
    let mut phi = d.phi_low.padded(d.r);
    let space = d.phi_low.index_space();
    for t in k..=d.r {
        let p = iterated_covariant_differential(&phi.project(t)?, Some(kj), Some(lam), t)?;
        let target = d.diff_at(t).expect("shape checked");
        let derivs = MultiIndex::all_of_order(d.connections.m, t);
        for idx in space.tuples() {
            for deriv in &derivs {
                let full = [&idx[..], deriv.labels()].concat();
                let v = target.component(&full).constant_term() - p.component(&full).constant_term();
                phi.set_jet_coordinate(&idx, deriv, v)?;
            }
        }
        let count = space.size() * derivs.len();
        reports.push(SolveReport {
            stage: "field",
            order: t,
            rank: count,
            unknowns: count,
            rows: space.size() * d.connections.m.pow(t as u32),
        });
    }
    Ok(phi)
}

/// One Ricci-equation residual: `Alt` of derivative slots `(j-1, j)` of `V_i` minus its curvature prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RicciResidual {
    pub i: usize,
    pub j: usize,
    pub residual: TensorFieldJet,
}

fn ricci_residuals_with(
    d: &ReducedDataSecond,
    lam: &ClassicalConnectionJet,
    kj: &LinearConnectionJet,
    phi: &TensorFieldJet,
) -> Result<Vec<RicciResidual>> {
    let k = d.k();
    let base_rank = d.phi_low.valence().rank();
    let mut out = Vec::new();
    if k.max(2) > d.r {
        return Ok(out);
    }
    let u = curvature_linear(kj)?;
    let w = curvature_classical(lam)?;
    let minus_half = -Scalar::one() / Scalar::from_integer(2.into());
    for i in k.max(2)..=d.r {
        let v = d.diff_at(i).expect("shape checked");
        for j in 1..i {
            let lhs = v.alternate_slots(&[base_rank + j - 1, base_rank + j])?;
            let inner = iterated_covariant_differential(&phi.project(i)?, Some(kj), Some(lam), j - 1)?;
            let act = tensor_product_curvature_action(&inner, Some(&u), Some(&w))?.scale(&minus_half);
            let rhs = iterated_covariant_differential(&act, Some(kj), Some(lam), i - j - 1)?.projected(0);
            let residual = lhs.checked_sub(&rhs.with_valence(lhs.valence().clone())?)?;
            out.push(RicciResidual { i, j, residual });
        }
    }
    Ok(out)
}

/// Residuals of the Ricci equations on the field part of `d`.
///
/// The connection part must already be admissible.
pub fn ricci_equation_residuals(d: &ReducedDataSecond) -> Result<Vec<RicciResidual>> {
    check_second_shape(d)?;
    let (lam, kj, _) = reconstruct_first_with(&d.connections, None, None)?;
    let phi = reconstruct_field_raw(d, &lam, &kj, &mut Vec::new())?;
    ricci_residuals_with(d, &lam, &kj, &phi)
}

/// Canonical inverse of the second reduction, with the rank trace.
pub fn reconstruct_second_with_report(
    d: &ReducedDataSecond,
) -> Result<(ClassicalConnectionJet, LinearConnectionJet, TensorFieldJet, Vec<SolveReport>)> {
    check_second_shape(d)?;
    let (lam, kj, mut reports) = reconstruct_first_with(&d.connections, None, None)?;
    let phi = reconstruct_field_raw(d, &lam, &kj, &mut reports)?;
    for res in ricci_residuals_with(d, &lam, &kj, &phi)? {
        if !res.residual.is_zero() {
            return Err(not_member("Ricci equations", res.i));
        }
    }
    for t in d.k()..=d.r {
        let full = iterated_covariant_differential(&phi.project(t)?, Some(&kj), Some(&lam), t)?.projected(0);
        if &full != d.diff_at(t).expect("shape checked") {
            return Err(not_member("field", t));
        }
    }
    Ok((lam, kj, phi, reports))
}

pub fn reconstruct_second(d: &ReducedDataSecond) -> Result<(ClassicalConnectionJet, LinearConnectionJet, TensorFieldJet)> {
    let (l, k, p, _) = reconstruct_second_with_report(d)?;
    Ok((l, k, p))
}

/// Applies a group element to a full jet triple.
pub fn act_on_triple(
    g: &WGroupElement,
    lambda: &ClassicalConnectionJet,
    k_jet: &LinearConnectionJet,
    phi: Option<&TensorFieldJet>,
) -> Result<(ClassicalConnectionJet, LinearConnectionJet, Option<TensorFieldJet>)> {
    Ok((
        act_on_classical(g, lambda)?,
        act_on_linear(g, k_jet)?,
        phi.map(|p| act_on_tensor(g, p)).transpose()?,
    ))
}

/// Sorted derivative tuples of length `t` over `m` labels.
pub fn sorted_tuples(m: usize, t: usize) -> Vec<Vec<usize>> {
    all_tuples(m, t)
        .into_iter()
        .filter(|v| v.windows(2).all(|w| w[0] <= w[1]))
        .collect()
}
