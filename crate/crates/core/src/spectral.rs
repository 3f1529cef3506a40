//! Symmetric matrices, cyclic Jacobi eigenvalues and the Pucci extremal
//! operators.
//!
//! Sign conventions follow the operator `F(x, u, Du, D²u)` being nonincreasing
//! in the Hessian:
//!
//! * `P⁺(X) = -λ Σ_{e ≥ 0} e - Λ Σ_{e < 0} e = -λ Tr(X⁺) + Λ Tr(X⁻)`,
//! * `P⁻(X) = -Λ Σ_{e ≥ 0} e - λ Σ_{e < 0} e = -Λ Tr(X⁺) + λ Tr(X⁻)`.

use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Real symmetric `n × n` matrix; only the upper triangle is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymmetricMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for SymmetricMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymmetricMatrix::from_rows(&rows)
    }
}

impl From<SymmetricMatrix> for Vec<Vec<f64>> {
    fn from(m: SymmetricMatrix) -> Self {
        m.to_rows()
    }
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, upper: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Row-major input; off-diagonal pairs must agree to `1e-12` relative to
    /// the largest entry and are averaged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("matrix is not square ({n} rows)")));
        }
        let scale = rows.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Domain(format!("non-finite entry at ({i}, {j})")));
                }
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i}, {j}): {a} vs {b}")));
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    /// `a a^T`.
    pub fn outer(a: &[f64]) -> Self {
        let n = a.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, a[i] * a[j]);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, upper: self.upper.iter().map(|v| c * v).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "order mismatch");
        Self { n: self.n, upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + c * b).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.upper.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Dense row-major product `self * other`.
    pub fn product(&self, other: &Self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    /// Eigenvalues ascending, with the matching orthonormal eigenvectors
    /// stored as columns of a row-major `n × n` array.
    pub fn eigen(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if !self.is_finite() {
            return Err(Error::Domain(alloc::string::String::from("matrix has a non-finite entry")));
        }
        let n = self.n;
        let mut a: Vec<f64> = (0..n * n).map(|k| self.get(k / n, k % n)).collect();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let frob: f64 = libm::sqrt(a.iter().map(|v| v * v).sum::<f64>());
        let mut converged = n < 2;
        for _sweep in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[i * n + j]).sum();
            if libm::sqrt(off) <= 1e-15 * frob || off == 0.0 {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("Jacobi sweeps did not converge (n = {n})")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let mut vectors = vec![0.0; n * n];
        for (col, &i) in order.iter().enumerate() {
            for k in 0..n {
                vectors[k * n + col] = v[k * n + i];
            }
        }
        Ok((values, vectors))
    }
}

/// Ascending eigenvalues.
pub fn eigenvalues(x: &SymmetricMatrix) -> Result<Vec<f64>> {
    x.eigen().map(|(values, _)| values)
}

/// `X = X⁺ - X⁻` with `X⁺, X⁻ ≥ 0` and `X⁺ X⁻ = 0`.
pub fn split_signed_parts(x: &SymmetricMatrix) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    let n = x.order();
    let (values, vectors) = x.eigen().map_err(|e| match e {
        Error::Domain(m) => Error::Domain(m),
        other => Error::Numerical(format!("{other}")),
    })?;
    let mut plus = SymmetricMatrix::zeros(n);
    let mut minus = SymmetricMatrix::zeros(n);
    for (k, &e) in values.iter().enumerate() {
        let col: Vec<f64> = (0..n).map(|i| vectors[i * n + k]).collect();
        let part = SymmetricMatrix::outer(&col);
        if e >= 0.0 {
            plus = plus.add_scaled(e, &part);
        } else {
            minus = minus.add_scaled(-e, &part);
        }
    }
    Ok((plus, minus))
}

/// Ellipticity constants `0 < λ ≤ Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipticityRepr", into = "EllipticityRepr")]
pub struct EllipticityPair {
    lambda: f64,
    big_lambda: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipticityRepr {
    lambda: f64,
    #[serde(rename = "Lambda")]
    big_lambda: f64,
}

impl TryFrom<EllipticityRepr> for EllipticityPair {
    type Error = Error;
    fn try_from(r: EllipticityRepr) -> Result<Self> {
        EllipticityPair::new(r.lambda, r.big_lambda)
    }
}

impl From<EllipticityPair> for EllipticityRepr {
    fn from(e: EllipticityPair) -> Self {
        EllipticityRepr { lambda: e.lambda, big_lambda: e.big_lambda }
    }
}

impl EllipticityPair {
    pub fn new(lambda: f64, big_lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && big_lambda >= lambda && big_lambda.is_finite()) {
            return Err(Error::Domain(format!("need 0 < λ ≤ Λ < ∞, got λ = {lambda}, Λ = {big_lambda}")));
        }
        Ok(Self { lambda, big_lambda })
    }

    /// The pair `(min{1, p⁻ - 1}, max{1, p⁺ - 1})` of the variable-exponent
    /// p-Laplacian.
    pub fn for_variable_exponent(p_minus: f64, p_plus: f64) -> Result<Self> {
        Self::new((p_minus - 1.0).min(1.0), (p_plus - 1.0).max(1.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PucciSign {
    Plus,
    Minus,
}

/// Pucci operator from a list of eigenvalues. Eigenvalues with
/// `|e| < 1e-13 * scale` count as nonnegative.
pub fn pucci_from_eigenvalues(values: &[f64], scale: f64, ell: &EllipticityPair, sign: PucciSign) -> f64 {
    let floor = 1e-13 * scale;
    let (mut pos, mut neg) = (0.0, 0.0);
    for &e in values {
        if e >= 0.0 || e.abs() < floor {
            pos += e;
        } else {
            neg += e;
        }
    }
    match sign {
        PucciSign::Plus => -ell.lambda * pos - ell.big_lambda * neg,
        PucciSign::Minus => -ell.big_lambda * pos - ell.lambda * neg,
    }
}

pub fn pucci(x: &SymmetricMatrix, ell: &EllipticityPair, sign: PucciSign) -> Result<f64> {
    let values = eigenvalues(x)?;
    Ok(pucci_from_eigenvalues(&values, x.max_norm(), ell, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalues(&SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap(), vec![1.0, 2.0, 3.0]);
        let swap = eigenvalues(&sym(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((swap[0] + 1.0).abs() < 1e-15 && (swap[1] - 1.0).abs() < 1e-15);
        assert_eq!(eigenvalues(&SymmetricMatrix::zeros(4)).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let mut m = SymmetricMatrix::zeros(2);
        m.set(0, 1, f64::NAN);
        assert!(matches!(eigenvalues(&m), Err(Error::Domain(_))));
        assert!(EllipticityPair::new(2.0, 1.0).is_err());
        assert!(EllipticityPair::new(0.0, 1.0).is_err());
    }

    #[test]
    fn split_examples() {
        let (p, m) = split_signed_parts(&SymmetricMatrix::diagonal(&[2.0, -3.0])).unwrap();
        assert_eq!(p.to_rows(), vec![vec![2.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(m.to_rows(), vec![vec![0.0, 0.0], vec![0.0, 3.0]]);
        let pd = sym(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let (p, m) = split_signed_parts(&pd).unwrap();
        assert!(p.add_scaled(-1.0, &pd).max_norm() < 1e-14);
        assert!(m.max_norm() < 1e-14);
        let (p, m) = split_signed_parts(&sym(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-14 && (m.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pucci_examples() {
        let ell = EllipticityPair::new(1.0, 2.0).unwrap();
        let i2 = SymmetricMatrix::identity(2);
        assert_eq!(pucci(&i2, &ell, PucciSign::Plus).unwrap(), -2.0);
        assert_eq!(pucci(&i2, &ell, PucciSign::Minus).unwrap(), -4.0);
        let d = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        assert_eq!(pucci(&d, &ell, PucciSign::Plus).unwrap(), 1.0);
    }

    #[test]
    fn json_is_row_major() {
        let m = sym(&[&[1.0, 2.0], &[2.0, 3.0]]);
        let rows: Vec<Vec<f64>> = m.clone().into();
        assert_eq!(rows, vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(SymmetricMatrix::try_from(rows).unwrap(), m);
    }

    fn arb_matrix() -> impl Strategy<Value = SymmetricMatrix> {
        (2usize..=5).prop_flat_map(|n| {
            proptest::collection::vec(-10.0f64..10.0, n * (n + 1) / 2).prop_map(move |upper| SymmetricMatrix { n, upper })
        })
    }

    fn arb_ell() -> impl Strategy<Value = EllipticityPair> {
        (0.1f64..3.0, 1.0f64..4.0).prop_map(|(l, f)| EllipticityPair::new(l, l * f).unwrap())
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs(x in arb_matrix()) {
            let n = x.order();
            let (values, vectors) = x.eigen().unwrap();
            let norm = x.max_norm().max(1e-300);
            for i in 0..n {
                for j in 0..n {
                    let r: f64 = (0..n).map(|k| vectors[i * n + k] * values[k] * vectors[j * n + k]).sum();
                    prop_assert!((r - x.get(i, j)).abs() <= 1e-12 * norm);
                }
            }
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn signed_parts_are_orthogonal(x in arb_matrix()) {
            let (p, m) = split_signed_parts(&x).unwrap();
            let norm = x.max_norm();
            prop_assert!(p.add_scaled(-1.0, &m).add_scaled(-1.0, &x).max_norm() <= 1e-12 * norm.max(1.0));
            prop_assert!(p.product(&m).iter().all(|v| v.abs() <= 1e-10 * norm * norm + 1e-300));
            prop_assert!(eigenvalues(&p).unwrap()[0] >= -1e-12 * norm);
            prop_assert!(eigenvalues(&m).unwrap()[0] >= -1e-12 * norm);
            // Pucci values agree with the trace formulas on the parts
            let ell = EllipticityPair::new(0.7, 1.9).unwrap();
            let plus = pucci(&x, &ell, PucciSign::Plus).unwrap();
            let minus = pucci(&x, &ell, PucciSign::Minus).unwrap();
            prop_assert!((plus - (-0.7 * p.trace() + 1.9 * m.trace())).abs() <= 1e-10 * norm.max(1.0));
            prop_assert!((minus - (-1.9 * p.trace() + 0.7 * m.trace())).abs() <= 1e-10 * norm.max(1.0));
        }

        #[test]
        fn pucci_ordering_homogeneity_duality(x in arb_matrix(), ell in arb_ell(), c in 0.0f64..5.0) {
            let tol = 1e-10 * x.max_norm().max(1.0);
            let plus = pucci(&x, &ell, PucciSign::Plus).unwrap();
            let minus = pucci(&x, &ell, PucciSign::Minus).unwrap();
            prop_assert!(minus <= plus + tol);
            let cx = x.scaled(c);
            prop_assert!((pucci(&cx, &ell, PucciSign::Plus).unwrap() - c * plus).abs() <= c * tol + tol);
            prop_assert!((pucci(&cx, &ell, PucciSign::Minus).unwrap() - c * minus).abs() <= c * tol + tol);
            let neg = x.scaled(-1.0);
            prop_assert!((plus + pucci(&neg, &ell, PucciSign::Minus).unwrap()).abs() <= tol);
            let iso = EllipticityPair::new(ell.lambda(), ell.lambda()).unwrap();
            let a = pucci(&x, &iso, PucciSign::Plus).unwrap();
            let b = pucci(&x, &iso, PucciSign::Minus).unwrap();
            prop_assert!((a - b).abs() <= tol);
        }
    }
}
