//! Jet groups `W^(t1,t2)_m GL(n)`: composition, inversion, kernels and actions.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::{ClassicalConnectionJet, LinearConnectionJet};
use crate::error::{JetError, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{self, Scalar};
use crate::series::{
    diffeo_invert, identity_map, jacobian, linear_part, matrix_identity, matrix_mul,
    matrix_series_inverse, ComposePlan, SeriesMatrix, TruncatedSeries,
};
use crate::tensor::{random_scalar, IndexSpace, SlotKind, TensorFieldJet};

/// Jet at the origin of a diffeomorphism of `R^m` fixing the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffeoJet {
    map: Vec<TruncatedSeries>,
}

impl DiffeoJet {
    pub fn new(map: Vec<TruncatedSeries>) -> Result<Self> {
        let m = map.len();
        for (i, s) in map.iter().enumerate() {
            if s.m() != m {
                return Err(JetError::DimensionMismatch {
                    expected: m,
                    found: s.m(),
                });
            }
            if !s.constant_term().is_zero() {
                return Err(JetError::NonzeroConstantTerm { index: i });
            }
        }
        if scalar::invert_matrix(&linear_part(&map)).is_none() {
            return Err(JetError::Singular("linear part of diffeomorphism jet".into()));
        }
        let order = map.iter().map(|s| s.order()).min().unwrap_or(0);
        Ok(DiffeoJet {
            map: map.into_iter().map(|s| s.truncated(order)).collect(),
        })
    }

    pub fn identity(m: usize, order: usize) -> Self {
        DiffeoJet {
            map: identity_map(m, order),
        }
    }

    pub fn m(&self) -> usize {
        self.map.len()
    }

    pub fn order(&self) -> usize {
        self.map.first().map_or(0, |s| s.order())
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.map
    }

    /// `a^λ_{μ1..μk}`.
    pub fn jet_coordinate(&self, lambda: usize, deriv: &MultiIndex) -> Scalar {
        self.map[lambda].jet_coordinate(deriv)
    }

    pub fn compose(&self, inner: &DiffeoJet) -> Result<DiffeoJet> {
        let plan = ComposePlan::new(&inner.map)?;
        let map = self.map.iter().map(|s| plan.apply(s)).collect::<Result<_>>()?;
        Ok(DiffeoJet { map })
    }

    pub fn inverse(&self) -> Result<DiffeoJet> {
        Ok(DiffeoJet {
            map: diffeo_invert(&self.map)?,
        })
    }

    pub fn project(&self, k: usize) -> DiffeoJet {
        DiffeoJet {
            map: self.map.iter().map(|s| s.truncated(k)).collect(),
        }
    }
}

/// Jet at the origin of a map `R^m -> GL(n)`; `matrix[i][j] = a^i_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeJet {
    m: usize,
    matrix: SeriesMatrix,
}

impl GaugeJet {
    pub fn new(m: usize, matrix: SeriesMatrix) -> Result<Self> {
        let n = matrix.len();
        let mut constant = Vec::with_capacity(n);
        for row in &matrix {
            if row.len() != n {
                return Err(JetError::Precondition("gauge matrix must be square".into()));
            }
            for s in row {
                if s.m() != m {
                    return Err(JetError::DimensionMismatch {
                        expected: m,
                        found: s.m(),
                    });
                }
            }
            constant.push(row.iter().map(|s| s.constant_term().clone()).collect::<Vec<_>>());
        }
        if scalar::invert_matrix(&constant).is_none() {
            return Err(JetError::Singular("constant part of gauge jet".into()));
        }
        let order = matrix.iter().flatten().map(|s| s.order()).min().unwrap_or(0);
        let matrix = matrix
            .into_iter()
            .map(|r| r.into_iter().map(|s| s.truncated(order)).collect())
            .collect();
        Ok(GaugeJet { m, matrix })
    }

    pub fn identity(m: usize, n: usize, order: usize) -> Self {
        GaugeJet {
            m,
            matrix: matrix_identity(n, m, order),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn order(&self) -> usize {
        self.matrix
            .first()
            .and_then(|r| r.first())
            .map_or(0, |s| s.order())
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.matrix
    }

    /// `a^i_{j μ1..μk}`.
    pub fn jet_coordinate(&self, i: usize, j: usize, deriv: &MultiIndex) -> Scalar {
        self.matrix[i][j].jet_coordinate(deriv)
    }

    pub fn project(&self, k: usize) -> GaugeJet {
        GaugeJet {
            m: self.m,
            matrix: truncate_matrix(&self.matrix, k),
        }
    }
}

fn truncate_matrix(a: &SeriesMatrix, k: usize) -> SeriesMatrix {
    a.iter()
        .map(|r| r.iter().map(|s| s.truncated(k)).collect())
        .collect()
}

fn compose_matrix(plan: &ComposePlan, a: &SeriesMatrix) -> Result<SeriesMatrix> {
    a.iter()
        .map(|r| r.iter().map(|s| plan.apply(s)).collect())
        .collect()
}

fn transpose(a: &SeriesMatrix) -> SeriesMatrix {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

/// Element `(φ, A)` of the principal jet group, with product
/// `(φ, A)·(ψ, B) = (φ∘ψ, (A∘ψ)·B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WGroupElement {
    base: DiffeoJet,
    gauge: GaugeJet,
}

impl WGroupElement {
    pub fn new(base: DiffeoJet, gauge: GaugeJet) -> Result<Self> {
        if base.m() != gauge.m() {
            return Err(JetError::DimensionMismatch {
                expected: base.m(),
                found: gauge.m(),
            });
        }
        Ok(WGroupElement { base, gauge })
    }

    pub fn identity(m: usize, n: usize, base_order: usize, gauge_order: usize) -> Self {
        WGroupElement {
            base: DiffeoJet::identity(m, base_order),
            gauge: GaugeJet::identity(m, n, gauge_order),
        }
    }

    pub fn base(&self) -> &DiffeoJet {
        &self.base
    }

    pub fn gauge(&self) -> &GaugeJet {
        &self.gauge
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn n(&self) -> usize {
        self.gauge.n()
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.base.order(), self.gauge.order())
    }

    pub fn project(&self, base_order: usize, gauge_order: usize) -> Result<Self> {
        let (t1, t2) = self.orders();
        if base_order > t1 || gauge_order > t2 {
            return Err(JetError::InsufficientOrder {
                what: "group projection".into(),
                needed: base_order.max(gauge_order),
                available: if base_order > t1 { t1 } else { t2 },
            });
        }
        Ok(WGroupElement {
            base: self.base.project(base_order),
            gauge: self.gauge.project(gauge_order),
        })
    }

    pub fn is_identity(&self) -> bool {
        let (t1, t2) = self.orders();
        *self == WGroupElement::identity(self.m(), self.n(), t1, t2)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(JetError::DimensionMismatch {
                expected: self.m(),
                found: other.m(),
            });
        }
        if self.n() != other.n() {
            return Err(JetError::FiberMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        if self.orders() != other.orders() {
            return Err(JetError::Precondition(format!(
                "group orders differ: {:?} vs {:?}",
                self.orders(),
                other.orders()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = self.base.compose(&other.base)?;
        let plan = ComposePlan::new(&other.base.map)?;
        let a_psi = compose_matrix(&plan, &self.gauge.matrix)?;
        let matrix = truncate_matrix(&matrix_mul(&a_psi, &other.gauge.matrix), self.gauge.order());
        Ok(WGroupElement {
            base,
            gauge: GaugeJet { m: self.m(), matrix },
        })
    }

    pub fn inv(&self) -> Result<Self> {
        let psi = self.base.inverse()?;
        let plan = ComposePlan::new(&psi.map)?;
        let a_psi = truncate_matrix(&compose_matrix(&plan, &self.gauge.matrix)?, self.gauge.order());
        let matrix = matrix_series_inverse(&a_psi)?;
        Ok(WGroupElement {
            base: psi,
            gauge: GaugeJet { m: self.m(), matrix },
        })
    }

    /// Random element with invertible linear and constant parts.
    pub fn random(m: usize, n: usize, base_order: usize, gauge_order: usize, seed: u64, bound: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, m, n, base_order, gauge_order, bound)
    }

    pub fn random_with<R: Rng>(rng: &mut R, m: usize, n: usize, base_order: usize, gauge_order: usize, bound: u64) -> Self {
        let bound = bound.max(1);
        loop {
            let map: Vec<TruncatedSeries> = (0..m)
                .map(|_| {
                    let mut s = TruncatedSeries::zero(m, base_order);
                    for x in s.coeffs_mut().iter_mut().skip(1) {
                        *x = random_scalar(rng, bound);
                    }
                    s
                })
                .collect();
            let matrix: SeriesMatrix = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let mut s = TruncatedSeries::zero(m, gauge_order);
                            for x in s.coeffs_mut() {
                                *x = random_scalar(rng, bound);
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            if let (Ok(base), Ok(gauge)) = (DiffeoJet::new(map), GaugeJet::new(m, matrix)) {
                return WGroupElement { base, gauge };
            }
        }
    }

    /// Random element of the kernel over `W^(k,k)`: identity through order `k`.
    pub fn random_kernel(m: usize, n: usize, base_order: usize, gauge_order: usize, k: usize, seed: u64, bound: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_kernel_with(&mut rng, m, n, base_order, gauge_order, k, bound)
    }

    pub fn random_kernel_with<R: Rng>(
        rng: &mut R,
        m: usize,
        n: usize,
        base_order: usize,
        gauge_order: usize,
        k: usize,
        bound: u64,
    ) -> Result<Self> {
        if k > base_order || k > gauge_order {
            return Err(JetError::Precondition(format!(
                "kernel level {k} exceeds group orders ({base_order}, {gauge_order})"
            )));
        }
        let bound = bound.max(1);
        let mut map = identity_map(m, base_order);
        for s in &mut map {
            for idx in 0..s.len() {
                if s.degree_of_slot(idx) > k.max(1) {
                    s.coeffs_mut()[idx] = random_scalar(rng, bound);
                }
            }
        }
        let mut matrix = matrix_identity(n, m, gauge_order);
        for s in matrix.iter_mut().flatten() {
            for idx in 0..s.len() {
                if s.degree_of_slot(idx) > k {
                    s.coeffs_mut()[idx] = random_scalar(rng, bound);
                }
            }
        }
        Ok(WGroupElement {
            base: DiffeoJet { map },
            gauge: GaugeJet { m, matrix },
        })
    }

    /// Derived quantities of the field-level action, truncated to the given orders.
    fn action_frame(&self, base_order: usize, gauge_order: usize, need_gauge: bool) -> Result<ActionFrame> {
        let base = self.base.project(base_order);
        let psi = base.inverse()?;
        let plan = ComposePlan::new(&psi.map)?;
        let jt = jacobian(&psi.map)?;
        let dphi = jacobian(&base.map)?;
        let jinv = compose_matrix(&plan, &dphi)?;
        let (a_bar, b) = if need_gauge {
            let a = truncate_matrix(&self.gauge.matrix, gauge_order);
            let a_bar = truncate_matrix(&compose_matrix(&plan, &a)?, gauge_order);
            let b = matrix_series_inverse(&a_bar)?;
            (a_bar, b)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(ActionFrame {
            psi: psi.map,
            plan,
            jt,
            jinv,
            a_bar,
            b,
        })
    }

    fn require(&self, what: &str, base_needed: usize, gauge_needed: Option<usize>) -> Result<()> {
        let (t1, t2) = self.orders();
        if t1 < base_needed {
            return Err(JetError::InsufficientOrder {
                what: format!("{what} (base order)"),
                needed: base_needed,
                available: t1,
            });
        }
        if let Some(g) = gauge_needed {
            if t2 < g {
                return Err(JetError::InsufficientOrder {
                    what: format!("{what} (gauge order)"),
                    needed: g,
                    available: t2,
                });
            }
        }
        Ok(())
    }
}

struct ActionFrame {
    psi: Vec<TruncatedSeries>,
    plan: ComposePlan,
    /// `∂_μ ψ^λ` at `[λ][μ]`.
    jt: SeriesMatrix,
    /// `(∂_μ φ^λ) ∘ ψ` at `[λ][μ]`.
    jinv: SeriesMatrix,
    /// `A ∘ ψ`.
    a_bar: SeriesMatrix,
    /// `(A ∘ ψ)^{-1}`.
    b: SeriesMatrix,
}

fn sum_products(order: usize, m: usize, terms: impl Iterator<Item = (TruncatedSeries, TruncatedSeries)>) -> TruncatedSeries {
    let mut acc = TruncatedSeries::zero(m, order);
    for (a, b) in terms {
        acc.add_product(&a, &b);
    }
    acc
}

/// Left action on classical connection jets; needs base order `>= s + 2`.
pub fn act_on_classical(g: &WGroupElement, lambda: &ClassicalConnectionJet) -> Result<ClassicalConnectionJet> {
    let s = lambda.order();
    let m = lambda.m();
    if g.m() != m {
        return Err(JetError::DimensionMismatch {
            expected: g.m(),
            found: m,
        });
    }
    g.require("classical connection action", s + 2, None)?;
    let fr = g.action_frame(s + 2, 0, false)?;
    let lam_psi: Vec<TruncatedSeries> = lambda
        .field()
        .components()
        .iter()
        .map(|c| fr.plan.apply(c))
        .collect::<Result<_>>()?;
    let space = IndexSpace::new(vec![m, m, m]);
    let jt = truncate_matrix(&fr.jt, s);
    let jinv = truncate_matrix(&fr.jinv, s);
    // Y_q^p_ν = Λψ_q^p_ρ J̃^ρ_ν
    let mut y = vec![TruncatedSeries::zero(m, s); m * m * m];
    for q in 0..m {
        for p in 0..m {
            for nu in 0..m {
                let acc = &mut y[space.flat(&[q, p, nu])];
                for rho in 0..m {
                    acc.add_product(&lam_psi[space.flat(&[q, p, rho])], &jt[rho][nu]);
                }
            }
        }
    }
    // T^p_μν = J̃^q_μ Y_q^p_ν − ∂_ν∂_μ ψ^p
    let mut tt = vec![TruncatedSeries::zero(m, s); m * m * m];
    for p in 0..m {
        for mu in 0..m {
            let d_mu = fr.psi[p].partial(mu)?;
            for nu in 0..m {
                let acc = &mut tt[space.flat(&[mu, p, nu])];
                for q in 0..m {
                    acc.add_product(&jt[q][mu], &y[space.flat(&[q, p, nu])]);
                }
                let second = d_mu.partial(nu)?;
                acc.add_scaled(&-Scalar::one(), &second);
            }
        }
    }
    let mut out = vec![TruncatedSeries::zero(m, s); m * m * m];
    for mu in 0..m {
        for l in 0..m {
            for nu in 0..m {
                out[space.flat(&[mu, l, nu])] = sum_products(
                    s,
                    m,
                    (0..m).map(|p| (jinv[l][p].clone(), tt[space.flat(&[mu, p, nu])].clone())),
                );
            }
        }
    }
    let field = TensorFieldJet::from_components(m, 0, lambda.field().valence().clone(), out)?;
    Ok(ClassicalConnectionJet::new_unchecked(field))
}

/// Left action on linear connection jets; needs base and gauge orders `>= r + 1`.
pub fn act_on_linear(g: &WGroupElement, k: &LinearConnectionJet) -> Result<LinearConnectionJet> {
    let r = k.order();
    let (m, n) = (k.m(), k.n());
    if g.m() != m {
        return Err(JetError::DimensionMismatch {
            expected: g.m(),
            found: m,
        });
    }
    if g.n() != n {
        return Err(JetError::FiberMismatch {
            expected: g.n(),
            found: n,
        });
    }
    g.require("linear connection action", r + 1, Some(r + 1))?;
    let fr = g.action_frame(r + 1, r + 1, true)?;
    let space = IndexSpace::new(vec![n, n, m]);
    let k_psi: Vec<TruncatedSeries> = k
        .field()
        .components()
        .iter()
        .map(|c| fr.plan.apply(c))
        .collect::<Result<_>>()?;
    let jt = truncate_matrix(&fr.jt, r);
    let b_r = truncate_matrix(&fr.b, r);
    let a_r = truncate_matrix(&fr.a_bar, r);
    // Y_q^p_λ = Kψ_q^p_ρ J̃^ρ_λ
    let mut y = vec![TruncatedSeries::zero(m, r); n * n * m];
    for q in 0..n {
        for p in 0..n {
            for l in 0..m {
                let acc = &mut y[space.flat(&[q, p, l])];
                for rho in 0..m {
                    acc.add_product(&k_psi[space.flat(&[q, p, rho])], &jt[rho][l]);
                }
            }
        }
    }
    // Z_j^p_λ = Y_q^p_λ B^q_j − ∂_λ B^p_j
    let mut z = vec![TruncatedSeries::zero(m, r); n * n * m];
    for j in 0..n {
        for p in 0..n {
            for l in 0..m {
                let acc = &mut z[space.flat(&[j, p, l])];
                for q in 0..n {
                    acc.add_product(&y[space.flat(&[q, p, l])], &b_r[q][j]);
                }
                acc.add_scaled(&-Scalar::one(), &fr.b[p][j].partial(l)?);
            }
        }
    }
    let mut out = vec![TruncatedSeries::zero(m, r); n * n * m];
    for j in 0..n {
        for i in 0..n {
            for l in 0..m {
                out[space.flat(&[j, i, l])] = sum_products(
                    r,
                    m,
                    (0..n).map(|p| (a_r[i][p].clone(), z[space.flat(&[j, p, l])].clone())),
                );
            }
        }
    }
    let field = TensorFieldJet::from_components(m, n, k.field().valence().clone(), out)?;
    Ok(LinearConnectionJet::new_unchecked(field))
}

/// Contracts one slot with a matrix: `new[.., a, ..] = Σ_b M[a][b] old[.., b, ..]`.
pub(crate) fn contract_slot(
    comps: &[TruncatedSeries],
    space: &IndexSpace,
    slot: usize,
    matrix: &[Vec<TruncatedSeries>],
    m: usize,
    order: usize,
) -> Vec<TruncatedSeries> {
    let stride = space.stride(slot);
    let range = space.ranges()[slot];
    let mut out = Vec::with_capacity(comps.len());
    for f in 0..space.size() {
        let a = (f / stride) % range;
        let base = f - a * stride;
        let mut acc = TruncatedSeries::zero(m, order);
        for (b, mab) in matrix[a].iter().enumerate().take(range) {
            let src = &comps[base + b * stride];
            if src.is_zero() || mab.is_zero() {
                continue;
            }
            acc.add_product(mab, src);
        }
        out.push(acc);
    }
    out
}

/// Tensorial action of order `(1, 0)`, prolonged through the base diffeomorphism.
/// Needs base order `>= N + 1` and gauge order `>= N` for a jet of order `N`.
pub fn act_on_tensor(g: &WGroupElement, t: &TensorFieldJet) -> Result<TensorFieldJet> {
    let order = t.order();
    let (m, n) = (t.m(), t.n());
    if g.m() != m {
        return Err(JetError::DimensionMismatch {
            expected: g.m(),
            found: m,
        });
    }
    let has_fiber = t.valence().slots().iter().any(|s| s.is_fiber());
    if has_fiber && g.n() != n {
        return Err(JetError::FiberMismatch {
            expected: g.n(),
            found: n,
        });
    }
    g.require("tensor action", order + 1, if has_fiber { Some(order) } else { None })?;
    let fr = g.action_frame(order + 1, order, has_fiber)?;
    let space = t.index_space();
    let mut comps: Vec<TruncatedSeries> = t
        .components()
        .iter()
        .map(|c| fr.plan.apply(c))
        .collect::<Result<_>>()?;
    let jt_t = transpose(&truncate_matrix(&fr.jt, order));
    let jinv = truncate_matrix(&fr.jinv, order);
    let (a_bar, b_t) = if has_fiber {
        (
            truncate_matrix(&fr.a_bar, order),
            transpose(&truncate_matrix(&fr.b, order)),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    for (slot, kind) in t.valence().slots().iter().enumerate() {
        let matrix = match kind {
            SlotKind::FiberUp => &a_bar,
            SlotKind::FiberDown => &b_t,
            SlotKind::BaseUp => &jinv,
            SlotKind::BaseDown => &jt_t,
        };
        comps = contract_slot(&comps, &space, slot, matrix, m, order);
    }
    TensorFieldJet::from_components(m, n, t.valence().clone(), comps)
}

/// Kernel element with explicit top data: base map `x + a` and gauge `I + c`,
/// where `a`, `c` are given as lists of jet coordinates.
pub fn make_kernel_element_from(
    m: usize,
    n: usize,
    base_order: usize,
    gauge_order: usize,
    base_coords: &[(usize, MultiIndex, Scalar)],
    gauge_coords: &[(usize, usize, MultiIndex, Scalar)],
) -> Result<WGroupElement> {
    let mut map = identity_map(m, base_order);
    for (l, d, v) in base_coords {
        if d.order() < 2 || d.order() > base_order {
            return Err(JetError::Precondition(format!("base kernel coordinate of order {}", d.order())));
        }
        let cur = map[*l].jet_coordinate(d);
        map[*l].set_jet_coordinate(d, cur + v);
    }
    let mut matrix = matrix_identity(n, m, gauge_order);
    for (i, j, d, v) in gauge_coords {
        if d.order() < 1 || d.order() > gauge_order {
            return Err(JetError::Precondition(format!("gauge kernel coordinate of order {}", d.order())));
        }
        let cur = matrix[*i][*j].jet_coordinate(d);
        matrix[*i][*j].set_jet_coordinate(d, cur + v);
    }
    Ok(WGroupElement {
        base: DiffeoJet { map },
        gauge: GaugeJet { m, matrix },
    })
}

/// Random kernel element of profile `(base_order, gauge_order, k)`.
pub fn make_kernel_element(
    m: usize,
    n: usize,
    base_order: usize,
    gauge_order: usize,
    k: usize,
    seed: u64,
) -> Result<WGroupElement> {
    WGroupElement::random_kernel(m, n, base_order, gauge_order, k, seed, 5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn identity_is_neutral() {
        let g = WGroupElement::random(2, 2, 3, 2, 1, 4);
        let e = WGroupElement::identity(2, 2, 3, 2);
        assert_eq!(g.mul(&e).unwrap(), g);
        assert_eq!(e.mul(&g).unwrap(), g);
        assert!(g.mul(&g.inv().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn order_mismatch_rejected() {
        let g = WGroupElement::random(2, 1, 3, 2, 1, 4);
        let h = WGroupElement::random(2, 1, 2, 2, 1, 4);
        assert!(g.mul(&h).is_err());
    }

    #[test]
    fn vector_at_order_zero() {
        let g = WGroupElement::random(2, 2, 1, 0, 3, 4);
        let mut v = TensorFieldJet::zero(2, 2, crate::tensor::Valence::standard(1, 0, 0, 0), 0);
        v.set_jet_coordinate(&[0], &MultiIndex::empty(), int(2)).unwrap();
        v.set_jet_coordinate(&[1], &MultiIndex::empty(), int(-1)).unwrap();
        let out = act_on_tensor(&g, &v).unwrap();
        for i in 0..2 {
            let e = MultiIndex::empty();
            let expected = g.gauge().jet_coordinate(i, 0, &e) * int(2) - g.gauge().jet_coordinate(i, 1, &e);
            assert_eq!(out.jet_coordinate(&[i], &e).unwrap(), expected);
        }
    }
}
