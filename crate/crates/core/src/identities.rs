//! Residuals of the Bianchi and Ricci identities.

use num_traits::One;

use crate::connection::{ClassicalConnectionJet, LinearConnectionJet};
use crate::covariant::{
    covariant_differential, curvature_classical, curvature_linear, tensor_product_curvature_action,
};
use crate::error::{JetError, Result};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::tensor::{TensorFieldJet, Valence};

/// `T[..a..b..c..] + T[..b..c..a..] + T[..c..a..b..]` over three slots.
pub fn cyclic_sum(t: &TensorFieldJet, slots: [usize; 3]) -> Result<TensorFieldJet> {
    let space = t.index_space();
    for s in slots {
        if s >= t.valence().rank() {
            return Err(JetError::IndexOutOfRange(format!("slot {}", s + 1)));
        }
    }
    let plain = Valence::new(t.valence().slots().to_vec(), t.valence().appended(), Vec::new())?;
    let mut comps = Vec::with_capacity(space.size());
    for idx in space.tuples() {
        let mut acc = TruncatedSeries::zero(t.m(), t.order());
        for shift in 0..3 {
            let mut src = idx.clone();
            for q in 0..3 {
                src[slots[q]] = idx[slots[(q + shift) % 3]];
            }
            acc.add_scaled(&Scalar::one(), &t.components()[space.flat(&src)]);
        }
        comps.push(acc);
    }
    TensorFieldJet::from_components(t.m(), t.n(), plain, comps)
}

fn expect_slots(t: &TensorFieldJet, expected: &Valence, what: &str) -> Result<()> {
    if t.valence().slots() != expected.slots() {
        return Err(JetError::ValenceMismatch(format!(
            "{what} needs {expected}, found {}",
            t.valence()
        )));
    }
    Ok(())
}

/// Cyclic sum of `w_ν^ρ_λμ` over `(ν, λ, μ)`.
pub fn bianchi_first_classical_residual(w: &TensorFieldJet) -> Result<TensorFieldJet> {
    expect_slots(w, &Valence::classical_curvature(0), "first Bianchi residual")?;
    cyclic_sum(w, [0, 2, 3])
}

/// Cyclic sum of `w_ν^ρ_λμ;σ` over `(λ, μ, σ)`.
pub fn bianchi_second_classical_residual(dw: &TensorFieldJet) -> Result<TensorFieldJet> {
    expect_slots(dw, &Valence::classical_curvature(1), "second Bianchi residual")?;
    cyclic_sum(dw, [2, 3, 4])
}

/// Cyclic sum of `u_j^i_λμ;ν` over `(λ, μ, ν)`.
pub fn bianchi_generalized_linear_residual(du: &TensorFieldJet) -> Result<TensorFieldJet> {
    expect_slots(du, &Valence::linear_curvature(1), "generalized Bianchi residual")?;
    cyclic_sum(du, [2, 3, 4])
}

/// `Alt ∇²Φ + ½ R[K ⊗ Λ]∘Φ`, antisymmetrizing the two appended slots.
pub fn ricci_identity_residual(
    phi: &TensorFieldJet,
    k: Option<&LinearConnectionJet>,
    lambda: Option<&ClassicalConnectionJet>,
) -> Result<TensorFieldJet> {
    if phi.order() < 2 {
        return Err(JetError::InsufficientOrder {
            what: "Ricci identity".into(),
            needed: 2,
            available: phi.order(),
        });
    }
    let has_fiber = phi.valence().slots().iter().any(|s| s.is_fiber());
    let has_base = phi.valence().slots().iter().any(|s| !s.is_fiber());
    let d1 = covariant_differential(phi, k, lambda)?;
    let d2 = covariant_differential(&d1, k, lambda)?;
    let r = d2.valence().rank();
    let alt = d2.alternate_slots(&[r - 2, r - 1])?;
    let u = if has_fiber {
        Some(curvature_linear(k.ok_or_else(|| JetError::Precondition("linear connection required".into()))?)?)
    } else {
        None
    };
    let w = if has_base {
        Some(curvature_classical(
            lambda.ok_or_else(|| JetError::Precondition("classical connection required".into()))?,
        )?)
    } else {
        None
    };
    let action = tensor_product_curvature_action(phi, u.as_ref(), w.as_ref())?;
    let half = Scalar::new(1.into(), 2.into());
    alt.checked_add(&action.scale(&half))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_curvature_has_zero_residual() {
        let w = TensorFieldJet::zero(2, 0, Valence::classical_curvature(0), 1);
        assert!(bianchi_first_classical_residual(&w).unwrap().is_zero());
    }

    #[test]
    fn wrong_valence_rejected() {
        let w = TensorFieldJet::zero(2, 1, Valence::linear_curvature(0), 1);
        assert!(bianchi_first_classical_residual(&w).is_err());
    }
}
