//! Inhomogeneous exterior forms over a fixed orthonormal coframe e¹..eⁿ, n ≤ 4.
//!
//! A form is stored densely: coefficient `c[m]` belongs to the basis monomial
//! whose indices are the set bits of `m` (bit 0 is e¹).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{check_dim, Error, Result};

pub const MAX_DIM: usize = 4;
const SLOTS: usize = 1 << MAX_DIM;

/// Sign of eᵃ ∧ eᵇ relative to the sorted monomial e^{a|b}, or 0 when they overlap.
const fn sign_table() -> [[i8; SLOTS]; SLOTS] {
    let mut t = [[0i8; SLOTS]; SLOTS];
    let mut a = 0;
    while a < SLOTS {
        let mut b = 0;
        while b < SLOTS {
            if a & b == 0 {
                // Moving each index of b past the indices of a that are larger than it.
                let mut swaps = 0;
                let mut j = 0;
                while j < MAX_DIM {
                    if b & (1 << j) != 0 {
                        swaps += (a >> (j + 1)).count_ones();
                    }
                    j += 1;
                }
                t[a][b] = if swaps % 2 == 0 { 1 } else { -1 };
            }
            b += 1;
        }
        a += 1;
    }
    t
}

static SIGN: [[i8; SLOTS]; SLOTS] = sign_table();

/// Strictly increasing list of coframe indices, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(u8);

impl MultiIndex {
    /// Builds a multi-index from 1-based indices, which must be strictly increasing.
    pub fn new(dim: usize, indices: &[usize]) -> Result<Self> {
        check_dimension(dim)?;
        let mut mask = 0u8;
        let mut last = 0;
        for &i in indices {
            if i <= last || i > dim {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {indices:?} is not strictly increasing within 1..={dim}"
                )));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(MultiIndex(mask))
    }

    pub fn from_mask(mask: u8) -> Self {
        MultiIndex(mask & (SLOTS as u8 - 1))
    }

    pub fn mask(self) -> usize {
        self.0 as usize
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|j| self.0 & (1 << j) != 0).map(|j| j + 1).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

fn check_dimension(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("coframe dimension {dim} not in 1..={MAX_DIM}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorForm {
    dim: u8,
    c: [f64; SLOTS],
}

impl ExteriorForm {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "coframe dimension {dim} out of range");
        ExteriorForm { dim: dim as u8, c: [0.0; SLOTS] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut f = Self::zero(dim);
        f.c[0] = value;
        f
    }

    /// `coeff · e^{i₁} ∧ … ∧ e^{i_k}` for arbitrary (possibly unsorted) 1-based indices.
    /// Repeated indices give zero; unsorted indices are sorted with the permutation sign.
    pub fn monomial(dim: usize, coeff: f64, indices: &[usize]) -> Result<Self> {
        check_dimension(dim)?;
        if indices.iter().any(|&i| i == 0 || i > dim) {
            return Err(Error::InvalidArgument(format!("index out of range in {indices:?}")));
        }
        let mut idx = indices.to_vec();
        let mut sign = 1.0;
        for i in 0..idx.len() {
            for j in 0..idx.len() - 1 - i {
                if idx[j] > idx[j + 1] {
                    idx.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        let mut f = Self::zero(dim);
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Ok(f);
        }
        let m = MultiIndex::new(dim, &idx)?;
        f.c[m.mask()] = sign * coeff;
        Ok(f)
    }

    /// The 1-form eⁱ.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, 1.0, &[i]).expect("basis index out of range")
    }

    /// `coeff · e^{ij…}` with indices known to be valid; panics otherwise.
    pub fn e(dim: usize, coeff: f64, indices: &[usize]) -> Self {
        Self::monomial(dim, coeff, indices).expect("invalid monomial")
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    fn slots(&self) -> usize {
        1 << self.dim
    }

    pub fn coeff(&self, m: MultiIndex) -> f64 {
        self.c[m.mask()]
    }

    /// Coefficient of the monomial with the given sorted 1-based indices.
    pub fn get(&self, indices: &[usize]) -> f64 {
        MultiIndex::new(self.dim(), indices).map(|m| self.coeff(m)).unwrap_or(0.0)
    }

    pub fn set(&mut self, m: MultiIndex, value: f64) {
        assert!(m.mask() < self.slots(), "multi-index {m} exceeds dimension {}", self.dim);
        self.c[m.mask()] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of the top-degree monomial e^{1…n}.
    pub fn top(&self) -> f64 {
        self.c[self.slots() - 1]
    }

    /// Nonzero terms in increasing mask order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        (0..self.slots())
            .filter(move |&m| self.c[m] != 0.0)
            .map(move |m| (MultiIndex(m as u8), self.c[m]))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Whether all terms have degree `k`.
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms().all(|(m, _)| m.degree() == k)
    }

    /// Whether all nonzero terms have even degree.
    pub fn is_even(&self) -> bool {
        self.terms().all(|(m, _)| m.degree() % 2 == 0)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &Self) -> Self {
        let s = self.slots();
        let mut out = Self::zero(self.dim());
        for a in 0..s {
            let ca = self.c[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..s {
                let sg = SIGN[a][b];
                if sg == 0 || other.c[b] == 0.0 {
                    continue;
                }
                out.c[a | b] += sg as f64 * ca * other.c[b];
            }
        }
        out
    }

    /// `self += k · a ∧ b`, avoiding a temporary.
    pub(crate) fn add_wedge(&mut self, k: f64, a: &Self, b: &Self) {
        let s = self.slots();
        for i in 0..s {
            let ca = a.c[i];
            if ca == 0.0 {
                continue;
            }
            for j in 0..s {
                let sg = SIGN[i][j];
                if sg == 0 || b.c[j] == 0.0 {
                    continue;
                }
                self.c[i | j] += k * sg as f64 * ca * b.c[j];
            }
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut() {
            *v *= k;
        }
        out
    }

    /// `self += k · other`.
    pub fn axpy(&mut self, k: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "coframe dimension mismatch");
        for (v, w) in self.c.iter_mut().zip(other.c.iter()) {
            *v += k * w;
        }
    }

    pub fn degree_component(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim());
        for m in 0..self.slots() {
            if (m as u32).count_ones() as usize == k {
                out.c[m] = self.c[m];
            }
        }
        out
    }

    /// Drops coefficients with magnitude below `threshold`.
    pub fn pruned(&self, threshold: f64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut() {
            if v.abs() < threshold {
                *v = 0.0;
            }
        }
        out
    }

    /// Exponential of a form: e^{c₀}·Σ_{k≤n} N^k/k! with N the nilpotent part.
    pub fn exp(&self) -> Self {
        let mut nil = *self;
        nil.c[0] = 0.0;
        let one = Self::scalar(self.dim(), 1.0);
        let mut acc = one;
        let mut pow = one;
        for k in 1..=self.dim() {
            pow = pow.wedge_unchecked(&nil).scale(1.0 / k as f64);
            acc = acc + pow;
        }
        acc.scale(self.c[0].exp())
    }

    /// Largest absolute coefficient difference; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        (*self - *other).max_abs()
    }
}

/// Exact coefficient-wise sum Σ kᵢ·ωᵢ. An empty input yields `None` dimension and is rejected.
pub fn linear_combine(terms: &[(f64, ExteriorForm)]) -> Result<ExteriorForm> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidArgument("linear_combine needs at least one term".into()))?;
    let dim = first.1.dim();
    let mut out = ExteriorForm::zero(dim);
    for (k, f) in terms {
        check_dim(dim, f.dim())?;
        out.axpy(*k, f);
    }
    Ok(out)
}

impl Add for ExteriorForm {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.axpy(1.0, &rhs);
        self
    }
}

impl AddAssign for ExteriorForm {
    fn add_assign(&mut self, rhs: Self) {
        self.axpy(1.0, &rhs);
    }
}

impl Sub for ExteriorForm {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.axpy(-1.0, &rhs);
        self
    }
}

impl Neg for ExteriorForm {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for ExteriorForm {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

/// Wedge product. Panics on dimension mismatch; use [`ExteriorForm::wedge`] to get an error.
impl Mul for ExteriorForm {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "coframe dimension mismatch");
        self.wedge_unchecked(&rhs)
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), m.indices()));
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, v)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.mask() == 0 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}·{m}")?;
            }
        }
        Ok(())
    }
}
