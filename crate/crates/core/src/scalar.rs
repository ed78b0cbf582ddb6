//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

/// `n/d`; panics on a zero denominator.
pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Serialized form, always `numerator/denominator`.
pub fn format_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `n/d` or a bare integer `n`.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Scalar::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(Scalar::from_integer),
    }
}

/// Inverse of a square scalar matrix by Gauss-Jordan elimination, `None` if singular.
pub fn invert_matrix(a: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = a.len();
    let mut work: Vec<Vec<Scalar>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one() } else { zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        let inv = work[col][col].recip();
        for x in work[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let f = work[r][col].clone();
                let (src, dst) = if r < col {
                    let (lo, hi) = work.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = work.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
    }
    Some(work.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + &row[k] * &b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn identity_matrix(n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { one() } else { zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("-3/6"), Some(frac(-1, 2)));
        assert_eq!(parse_scalar("7"), Some(int(7)));
        assert_eq!(parse_scalar("1/0"), None);
        assert_eq!(format_scalar(&frac(4, -6)), "-2/3");
        assert_eq!(format_scalar(&int(5)), "5/1");
    }

    #[test]
    fn matrix_inverse() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = invert_matrix(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity_matrix(2));
        assert!(invert_matrix(&[vec![int(1), int(2)], vec![int(2), int(4)]]).is_none());
    }
}
