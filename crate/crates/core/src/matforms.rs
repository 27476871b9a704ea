//! Matrices of exterior forms and the analytic functional calculus on them.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::exterior::ExteriorForm;
use crate::germ::AnalyticGerm;

/// Default highest Taylor index used by the series evaluations.
pub const DEFAULT_SERIES_ORDER: usize = 16;

/// A value together with an estimate of the series truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated<T> {
    pub value: T,
    pub tail: f64,
}

impl<T> Truncated<T> {
    pub fn new(value: T, tail: f64) -> Self {
        Truncated { value, tail }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Truncated<U> {
        Truncated { value: f(self.value), tail: self.tail }
    }
}

/// Square matrix of exterior forms sharing one coframe dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    n: usize,
    dim: usize,
    e: Vec<ExteriorForm>,
}

impl FormMatrix {
    pub fn zeros(n: usize, dim: usize) -> Self {
        FormMatrix { n, dim, e: vec![ExteriorForm::zero(dim); n * n] }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        let mut m = Self::zeros(n, dim);
        for i in 0..n {
            m.e[i * n + i] = ExteriorForm::scalar(dim, 1.0);
        }
        m
    }

    /// Builds a matrix from rows, checking squareness and a common coframe dimension.
    pub fn from_rows(rows: Vec<Vec<ExteriorForm>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty form matrix".into()));
        }
        let dim = rows[0].first().map(|f| f.dim()).unwrap_or(1);
        let mut e = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            for f in row {
                check_dim(dim, f.dim())?;
                e.push(f);
            }
        }
        Ok(FormMatrix { n, dim, e })
    }

    /// Degree-0 matrix from real entries.
    pub fn from_scalars(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| ExteriorForm::scalar(dim, v)).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &ExteriorForm {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: ExteriorForm) {
        assert_eq!(f.dim(), self.dim, "coframe dimension mismatch");
        self.e[i * self.n + j] = f;
    }

    /// Sets entry (i, j) to `f` and (j, i) to −f.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, f: ExteriorForm) {
        self.set(i, j, f);
        self.set(j, i, -f);
    }

    pub fn entries(&self) -> &[ExteriorForm] {
        &self.e
    }

    pub fn map(&self, f: impl Fn(&ExteriorForm) -> ExteriorForm) -> Self {
        FormMatrix { n: self.n, dim: self.dim, e: self.e.iter().map(f).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|f| f.scale(k))
    }

    pub fn degree_component(&self, k: usize) -> Self {
        self.map(|f| f.degree_component(k))
    }

    /// The real matrix of degree-0 parts.
    pub fn scalar_part(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).scalar_part()).collect()).collect()
    }

    pub fn is_scalar(&self) -> bool {
        self.e.iter().all(|f| f.is_homogeneous(0))
    }

    pub fn is_even(&self) -> bool {
        self.e.iter().all(|f| f.is_even())
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().fold(0.0, |m, f| m.max(f.max_abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n || self.dim != other.dim {
            return f64::INFINITY;
        }
        self.e.iter().zip(&other.e).fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    /// Largest |A_ij + A_ji| over all entries and coefficients.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((*self.get(i, j) + *self.get(j, i)).max_abs());
            }
        }
        d
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        check_dim(self.n, other.n)?;
        check_dim(self.dim, other.dim)
    }

    pub(crate) fn check_antisymmetric(&self, what: &str) -> Result<()> {
        let d = self.antisymmetry_defect();
        if d > 1e-12 * self.max_abs().max(1.0) {
            return Err(Error::InvalidArgument(format!("{what} is not antisymmetric (defect {d:e})")));
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n, self.dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let b = other.get(j, k);
                    if !b.is_zero() {
                        out.e[i * n + k].add_wedge(1.0, a, b);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> ExteriorForm {
        (0..self.n).fold(ExteriorForm::zero(self.dim), |acc, i| acc + *self.get(i, i))
    }

    /// `self += k · other`.
    fn axpy(&mut self, k: f64, other: &Self) {
        for (a, b) in self.e.iter_mut().zip(&other.e) {
            a.axpy(k, b);
        }
    }
}

impl Add for &FormMatrix {
    type Output = FormMatrix;
    fn add(self, rhs: &FormMatrix) -> FormMatrix {
        self.check_same_shape(rhs).expect("form matrix shape mismatch");
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &FormMatrix {
    type Output = FormMatrix;
    fn sub(self, rhs: &FormMatrix) -> FormMatrix {
        self.check_same_shape(rhs).expect("form matrix shape mismatch");
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &FormMatrix {
    type Output = FormMatrix;
    fn neg(self) -> FormMatrix {
        self.scale(-1.0)
    }
}

/// Matrix product. Panics on shape mismatch; use [`FormMatrix::mat_mul`] to get an error.
impl Mul for &FormMatrix {
    type Output = FormMatrix;
    fn mul(self, rhs: &FormMatrix) -> FormMatrix {
        self.mat_mul(rhs).expect("form matrix shape mismatch")
    }
}

/// Spectral radius of the degree-0 part: exact for antisymmetric matrices up to
/// size 4, the Frobenius norm (an upper bound) otherwise.
pub fn spectral_radius(m: &FormMatrix) -> f64 {
    let a = m.scalar_part();
    let n = m.size();
    let antisym = (0..n).all(|i| (0..n).all(|j| (a[i][j] + a[j][i]).abs() <= 1e-14 * (a[i][j].abs() + 1.0)));
    if antisym && n <= 4 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += a[i][j] * a[i][j];
            }
        }
        if n < 4 {
            // One rotation plane (plus a kernel in the 3×3 case).
            return s.sqrt();
        }
        // Eigenvalues ±iλ with λ² roots of z² − s z + Pf².
        let pf = a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2];
        let disc = (s * s - 4.0 * pf * pf).max(0.0);
        return ((s + disc.sqrt()) / 2.0).sqrt();
    }
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_radius(f: &AnalyticGerm, m: &FormMatrix) -> Result<f64> {
    let rho = spectral_radius(m);
    if !(rho < f.radius()) {
        return Err(Error::ConvergenceRadius { rho, radius: f.radius() });
    }
    Ok(rho)
}

fn check_order(f: &AnalyticGerm, order: usize) -> Result<()> {
    if order + 2 >= f.taylor().len() {
        return Err(Error::InvalidArgument(format!(
            "series order {order} exceeds the {} stored coefficients",
            f.taylor().len()
        )));
    }
    Ok(())
}

/// Σ_{k≤K} c_k M^k by Horner's rule. The tail is the larger of the next two
/// terms of the scalar majorant Σ|c_k|ρᵏ.
pub fn apply_germ(f: &AnalyticGerm, m: &FormMatrix, order: usize) -> Result<Truncated<FormMatrix>> {
    check_order(f, order)?;
    let rho = check_radius(f, m)?;
    let n = m.size();
    let id = FormMatrix::identity(n, m.dim());
    let mut acc = id.scale(f.coeff(order));
    for k in (0..order).rev() {
        acc = acc.mul_unchecked(m);
        acc.axpy(f.coeff(k), &id);
    }
    let tail = (f.coeff(order + 1).abs() * rho.powi(order as i32 + 1))
        .max(f.coeff(order + 2).abs() * rho.powi(order as i32 + 2));
    Ok(Truncated::new(acc, tail))
}

/// f^{[2]}(a)*b = Σ_{n≥1} f^{(n+1)}(0)/n! · H_n(a,b), H_n = Σ_q a^q b a^{n−1−q},
/// truncated so that the highest Taylor index used is K.
pub fn star_second(
    f: &AnalyticGerm,
    a: &FormMatrix,
    b: &FormMatrix,
    order: usize,
) -> Result<Truncated<FormMatrix>> {
    a.check_same_shape(b)?;
    if !a.is_scalar() {
        return Err(Error::InvalidArgument("star_second needs a degree-0 first argument".into()));
    }
    check_order(f, order)?;
    let rho = check_radius(f, a)?;
    let mut acc = FormMatrix::zeros(a.size(), a.dim());
    // H_1 = b, H_{n+1} = a·H_n + b·aⁿ.
    let mut h = b.clone();
    let mut a_pow = a.clone();
    for n in 1..order {
        let w = (n + 1) as f64 * f.coeff(n + 1);
        if w != 0.0 {
            acc.axpy(w, &h);
        }
        if n + 1 < order {
            let mut next = a.mul_unchecked(&h);
            next.axpy(1.0, &b.mul_unchecked(&a_pow));
            h = next;
            a_pow = a_pow.mul_unchecked(a);
        }
    }
    let bnorm = b.max_abs() * a.size() as f64;
    let term = |n: usize| (n + 1) as f64 * f.coeff(n + 1).abs() * n as f64 * rho.powi(n as i32 - 1) * bnorm;
    let tail = term(order).max(term(order + 1));
    Ok(Truncated::new(acc, tail))
}

/// exp(Tr f(M)), the exponential truncated at the coframe dimension.
pub fn exp_trace_germ(f: &AnalyticGerm, m: &FormMatrix, order: usize) -> Result<Truncated<ExteriorForm>> {
    let fm = apply_germ(f, m, order)?;
    let tr = fm.value.trace();
    let value = tr.exp();
    let tail = fm.tail * m.size() as f64 * value.max_abs();
    Ok(Truncated::new(value, tail))
}

/// Coefficients [c₀, c₁, …, c_{n−1}, 1] of det(λ·I − M) for a matrix with even-degree
/// entries (which commute), by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &FormMatrix) -> Result<Vec<ExteriorForm>> {
    if !m.is_even() {
        return Err(Error::InvalidArgument("characteristic polynomial needs even-degree entries".into()));
    }
    let n = m.size();
    let dim = m.dim();
    let id = FormMatrix::identity(n, dim);
    let mut coeffs = vec![ExteriorForm::zero(dim); n + 1];
    coeffs[n] = ExteriorForm::scalar(dim, 1.0);
    let mut mk = FormMatrix::zeros(n, dim);
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −Tr(M·M_k)/k.
        let mut next = m.mul_unchecked(&mk);
        for i in 0..n {
            let d = *next.get(i, i) + coeffs[n - k + 1] * *id.get(i, i);
            next.set(i, i, d);
        }
        mk = next;
        coeffs[n - k] = m.mul_unchecked(&mk).trace().scale(-1.0 / k as f64);
    }
    Ok(coeffs)
}
