//! Curvature, covariant differentials and the formal curvature maps.

use num_traits::One;

use crate::connection::{ClassicalConnectionJet, ConnectionKind, LinearConnectionJet};
use crate::error::{JetError, Result};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::tensor::{IndexSpace, SlotKind, TensorFieldJet, Valence};

/// Value at the origin of `∇^i R[Λ]` (in `W_i`) or `∇^i R[K]` (in `U_i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureDifferentialData {
    kind: ConnectionKind,
    order: usize,
    value: TensorFieldJet,
}

impl CurvatureDifferentialData {
    /// Wraps an order-0 tensor of the matching valence, checking the λμ antisymmetry.
    pub fn new(kind: ConnectionKind, order: usize, value: TensorFieldJet) -> Result<Self> {
        let expected = match kind {
            ConnectionKind::Classical => Valence::classical_curvature(order),
            ConnectionKind::Linear => Valence::linear_curvature(order),
        };
        if value.valence() != &expected {
            return Err(JetError::ValenceMismatch(format!(
                "curvature data of order {order} needs {expected}, found {}",
                value.valence()
            )));
        }
        value.audit()?;
        Ok(CurvatureDifferentialData {
            kind,
            order,
            value: value.projected(0),
        })
    }

    /// Like [`CurvatureDifferentialData::new`] without the symmetry audit.
    pub fn new_unaudited(kind: ConnectionKind, order: usize, value: TensorFieldJet) -> Self {
        CurvatureDifferentialData {
            kind,
            order,
            value: value.projected(0),
        }
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> &TensorFieldJet {
        &self.value
    }

    pub fn value_mut(&mut self) -> &mut TensorFieldJet {
        &mut self.value
    }

    /// Component value at a 0-based index tuple.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        self.value.component(idx).constant_term().clone()
    }
}

fn neg_one() -> Scalar {
    -Scalar::one()
}

/// `w_ν^ρ_λμ = ∂_μΛ_ν^ρ_λ − ∂_λΛ_ν^ρ_μ + Λ_ν^σ_μ Λ_σ^ρ_λ − Λ_ν^σ_λ Λ_σ^ρ_μ`, trust order `s − 1`.
pub fn curvature_classical(lambda: &ClassicalConnectionJet) -> Result<TensorFieldJet> {
    let s = lambda.order();
    if s == 0 {
        return Err(JetError::InsufficientOrder {
            what: "classical curvature".into(),
            needed: 1,
            available: 0,
        });
    }
    let m = lambda.m();
    let valence = Valence::classical_curvature(0);
    let space = IndexSpace::new(valence.ranges(m, 0));
    let mut comps = Vec::with_capacity(space.size());
    for idx in space.tuples() {
        let (nu, rho, l, mu) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = lambda.symbol(nu, rho, l).partial(mu)?;
        acc = &acc - &lambda.symbol(nu, rho, mu).partial(l)?;
        for sg in 0..m {
            acc.add_product(lambda.symbol(nu, sg, mu), lambda.symbol(sg, rho, l));
            acc.add_scaled_product(&neg_one(), lambda.symbol(nu, sg, l), lambda.symbol(sg, rho, mu));
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(m, 0, valence, comps)
}

/// `u_j^i_λμ = ∂_μK_j^i_λ − ∂_λK_j^i_μ + K_j^p_μ K_p^i_λ − K_j^p_λ K_p^i_μ`, trust order `r − 1`.
pub fn curvature_linear(k: &LinearConnectionJet) -> Result<TensorFieldJet> {
    let r = k.order();
    if r == 0 {
        return Err(JetError::InsufficientOrder {
            what: "linear curvature".into(),
            needed: 1,
            available: 0,
        });
    }
    let (m, n) = (k.m(), k.n());
    let valence = Valence::linear_curvature(0);
    let space = IndexSpace::new(valence.ranges(m, n));
    let mut comps = Vec::with_capacity(space.size());
    for idx in space.tuples() {
        let (j, i, l, mu) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = k.symbol(j, i, l).partial(mu)?;
        acc = &acc - &k.symbol(j, i, mu).partial(l)?;
        for p in 0..n {
            acc.add_product(k.symbol(j, p, mu), k.symbol(p, i, l));
            acc.add_scaled_product(&neg_one(), k.symbol(j, p, l), k.symbol(p, i, mu));
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(m, n, valence, comps)
}

/// One covariant differential with respect to `(K, Λ)`; appends a covariant slot.
///
/// `K` is required when `Φ` has fiber slots, `Λ` when it has base slots.
pub fn covariant_differential(
    phi: &TensorFieldJet,
    k: Option<&LinearConnectionJet>,
    lambda: Option<&ClassicalConnectionJet>,
) -> Result<TensorFieldJet> {
    let (m, n) = (phi.m(), phi.n());
    if phi.order() == 0 {
        return Err(JetError::InsufficientOrder {
            what: "covariant differential".into(),
            needed: 1,
            available: 0,
        });
    }
    let slots = phi.valence().slots().to_vec();
    let has_fiber = slots.iter().any(|s| s.is_fiber());
    let has_base = slots.iter().any(|s| !s.is_fiber());
    let mut order = phi.order() - 1;
    let k = if has_fiber {
        let k = k.ok_or_else(|| JetError::Precondition("fiber slots need a linear connection".into()))?;
        if k.m() != m {
            return Err(JetError::DimensionMismatch {
                expected: m,
                found: k.m(),
            });
        }
        if k.n() != n {
            return Err(JetError::FiberMismatch {
                expected: n,
                found: k.n(),
            });
        }
        order = order.min(k.order());
        Some(k)
    } else {
        None
    };
    let lambda = if has_base {
        let l = lambda.ok_or_else(|| JetError::Precondition("base slots need a classical connection".into()))?;
        if l.m() != m {
            return Err(JetError::DimensionMismatch {
                expected: m,
                found: l.m(),
            });
        }
        order = order.min(l.order());
        Some(l)
    } else {
        None
    };
    let in_space = phi.index_space();
    let valence = phi.valence().with_appended(1);
    let out_space = IndexSpace::new(valence.ranges(m, n));
    let base: Vec<TruncatedSeries> = phi.components().iter().map(|c| c.truncated(order)).collect();
    let mut comps = Vec::with_capacity(out_space.size());
    let minus = neg_one();
    for out_idx in out_space.tuples() {
        let nu = *out_idx.last().unwrap();
        let idx = &out_idx[..out_idx.len() - 1];
        let f = in_space.flat(idx);
        let mut acc = phi.components()[f].partial(nu)?.truncated(order);
        for (a, kind) in slots.iter().enumerate() {
            let v = idx[a];
            let stride = in_space.stride(a);
            let range = in_space.ranges()[a];
            let rest = f - v * stride;
            for p in 0..range {
                let src = &base[rest + p * stride];
                if src.is_zero() {
                    continue;
                }
                match kind {
                    SlotKind::FiberUp => acc.add_scaled_product(&minus, k.unwrap().symbol(p, v, nu), src),
                    SlotKind::FiberDown => acc.add_product(k.unwrap().symbol(v, p, nu), src),
                    SlotKind::BaseUp => acc.add_scaled_product(&minus, lambda.unwrap().symbol(p, v, nu), src),
                    SlotKind::BaseDown => acc.add_product(lambda.unwrap().symbol(v, p, nu), src),
                }
            }
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(m, n, valence, comps)
}

/// `i`-fold covariant differential.
pub fn iterated_covariant_differential(
    phi: &TensorFieldJet,
    k: Option<&LinearConnectionJet>,
    lambda: Option<&ClassicalConnectionJet>,
    i: usize,
) -> Result<TensorFieldJet> {
    if phi.order() < i {
        return Err(JetError::InsufficientOrder {
            what: format!("{i}-fold covariant differential"),
            needed: i,
            available: phi.order(),
        });
    }
    let mut cur = phi.projected(phi.order());
    for _ in 0..i {
        cur = covariant_differential(&cur, k, lambda)?;
    }
    Ok(cur)
}

/// `∇^i R[Λ]` at the origin; needs `Λ` of order `>= i + 1`.
pub fn formal_curvature_map_classical(lambda: &ClassicalConnectionJet, i: usize) -> Result<CurvatureDifferentialData> {
    if lambda.order() < i + 1 {
        return Err(JetError::InsufficientOrder {
            what: format!("classical formal curvature map of order {i}"),
            needed: i + 1,
            available: lambda.order(),
        });
    }
    let lp = lambda.project(i + 1)?;
    let r = curvature_classical(&lp)?;
    let d = iterated_covariant_differential(&r, None, Some(&lp), i)?;
    Ok(CurvatureDifferentialData::new_unaudited(ConnectionKind::Classical, i, d))
}

/// `∇^i R[K]` at the origin; needs `K` of order `>= i + 1` and, for `i >= 1`, `Λ` of order `>= i − 1`.
pub fn formal_curvature_map_linear(
    lambda: Option<&ClassicalConnectionJet>,
    k: &LinearConnectionJet,
    i: usize,
) -> Result<CurvatureDifferentialData> {
    if k.order() < i + 1 {
        return Err(JetError::InsufficientOrder {
            what: format!("linear formal curvature map of order {i}"),
            needed: i + 1,
            available: k.order(),
        });
    }
    let kp = k.project(i + 1)?;
    let lp = if i >= 1 {
        let l = lambda.ok_or_else(|| JetError::Precondition("classical connection required".into()))?;
        if l.order() + 1 < i {
            return Err(JetError::InsufficientOrder {
                what: format!("classical jet for linear formal curvature map of order {i}"),
                needed: i - 1,
                available: l.order(),
            });
        }
        Some(l.project(i - 1)?)
    } else {
        None
    };
    let r = curvature_linear(&kp)?;
    let d = iterated_covariant_differential(&r, Some(&kp), lp.as_ref(), i)?;
    Ok(CurvatureDifferentialData::new_unaudited(ConnectionKind::Linear, i, d))
}

/// Slot-wise curvature action on `Φ`, appending two covariant slots `(ν1, ν2)`.
///
/// Fiber slots contract with `u = R[K]`, base slots with `w = R[Λ]`:
/// `+u_p^i Φ^p`, `−u_j^p Φ_p`, `+w_ρ^λ Φ^ρ`, `−w_μ^ω Φ_ω`.
pub fn tensor_product_curvature_action(
    phi: &TensorFieldJet,
    u: Option<&TensorFieldJet>,
    w: Option<&TensorFieldJet>,
) -> Result<TensorFieldJet> {
    let (m, n) = (phi.m(), phi.n());
    let slots = phi.valence().slots().to_vec();
    let mut order = phi.order();
    let u = if slots.iter().any(|s| s.is_fiber()) {
        let u = u.ok_or_else(|| JetError::Precondition("fiber slots need R[K]".into()))?;
        if u.valence().slots() != Valence::linear_curvature(0).slots() || u.m() != m || u.n() != n {
            return Err(JetError::ValenceMismatch(format!("R[K] argument has valence {}", u.valence())));
        }
        order = order.min(u.order());
        Some(u)
    } else {
        None
    };
    let w = if slots.iter().any(|s| !s.is_fiber()) {
        let w = w.ok_or_else(|| JetError::Precondition("base slots need R[Λ]".into()))?;
        if w.valence().slots() != Valence::classical_curvature(0).slots() || w.m() != m {
            return Err(JetError::ValenceMismatch(format!("R[Λ] argument has valence {}", w.valence())));
        }
        order = order.min(w.order());
        Some(w)
    } else {
        None
    };
    let in_space = phi.index_space();
    let valence = phi.valence().with_appended(2);
    let out_space = IndexSpace::new(valence.ranges(m, n));
    let minus = neg_one();
    let mut comps = Vec::with_capacity(out_space.size());
    for out_idx in out_space.tuples() {
        let r = out_idx.len();
        let (n1, n2) = (out_idx[r - 2], out_idx[r - 1]);
        let idx = &out_idx[..r - 2];
        let f = in_space.flat(idx);
        let mut acc = TruncatedSeries::zero(m, order);
        for (a, kind) in slots.iter().enumerate() {
            let v = idx[a];
            let stride = in_space.stride(a);
            let rest = f - v * stride;
            for p in 0..in_space.ranges()[a] {
                let src = &phi.components()[rest + p * stride];
                if src.is_zero() {
                    continue;
                }
                match kind {
                    SlotKind::FiberUp => acc.add_product(u.unwrap().component(&[p, v, n1, n2]), src),
                    SlotKind::FiberDown => acc.add_scaled_product(&minus, u.unwrap().component(&[v, p, n1, n2]), src),
                    SlotKind::BaseUp => acc.add_product(w.unwrap().component(&[p, v, n1, n2]), src),
                    SlotKind::BaseDown => acc.add_scaled_product(&minus, w.unwrap().component(&[v, p, n1, n2]), src),
                }
            }
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(m, n, valence, comps)
}

/// Antisymmetrization `½(T_{..ab..} − T_{..ba..})` over two slots.
pub fn alt_pair(t: &TensorFieldJet, a: usize, b: usize) -> Result<TensorFieldJet> {
    t.alternate_slots(&[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::MultiIndex;
    use crate::scalar::int;

    #[test]
    fn classical_curvature_by_hand() {
        let mut l = ClassicalConnectionJet::zero(2, 1);
        l.set_jet_coordinate(0, 0, 0, &MultiIndex::new(vec![1]), int(1)).unwrap();
        let w = curvature_classical(&l).unwrap();
        assert_eq!(w.jet_coordinate(&[0, 0, 0, 1], &MultiIndex::empty()).unwrap(), int(1));
        assert_eq!(w.jet_coordinate(&[0, 0, 1, 0], &MultiIndex::empty()).unwrap(), int(-1));
    }

    #[test]
    fn linear_curvature_by_hand() {
        let mut k = LinearConnectionJet::zero(2, 1, 1);
        k.set_jet_coordinate(0, 0, 1, &MultiIndex::new(vec![0]), int(3)).unwrap();
        let u = curvature_linear(&k).unwrap();
        assert_eq!(u.jet_coordinate(&[0, 0, 0, 1], &MultiIndex::empty()).unwrap(), int(-3));
    }

    #[test]
    fn covariant_differential_by_hand() {
        let mut phi = TensorFieldJet::zero(1, 1, Valence::standard(1, 0, 0, 0), 1);
        phi.set_jet_coordinate(&[0], &MultiIndex::empty(), int(2)).unwrap();
        phi.set_jet_coordinate(&[0], &MultiIndex::new(vec![0]), int(1)).unwrap();
        let mut k = LinearConnectionJet::zero(1, 1, 0);
        k.set_jet_coordinate(0, 0, 0, &MultiIndex::empty(), int(5)).unwrap();
        let d = covariant_differential(&phi, Some(&k), None).unwrap();
        assert_eq!(d.jet_coordinate(&[0, 0], &MultiIndex::empty()).unwrap(), int(-9));
    }

    #[test]
    fn scalar_differential_ignores_connections() {
        let phi = TensorFieldJet::random(2, 1, Valence::scalar(), 2, 3, 5);
        let d = covariant_differential(&phi, None, None).unwrap();
        for nu in 0..2 {
            assert_eq!(d.components()[nu], phi.components()[0].partial(nu).unwrap());
        }
    }
}
