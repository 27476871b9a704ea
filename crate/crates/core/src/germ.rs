//! Analytic germs at 0: Taylor coefficients plus scalar evaluators on the imaginary axis.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Number of Taylor coefficients kept for every germ.
pub const TAYLOR_LEN: usize = 64;

/// Below this |x| the imaginary-axis evaluators sum the Taylor series instead of
/// the closed forms, which cancel badly near 0.
const SERIES_SWITCH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GermKind {
    /// (x/2)/tanh(x/2).
    LGenus,
    /// ½·log((x/2)/tanh(x/2)).
    LLog,
    /// (x/2)/sinh(x/2).
    AHatGenus,
    /// ½·log((x/2)/sinh(x/2)).
    AHatLog,
    /// exp(−x).
    ExpNeg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGerm {
    kind: GermKind,
    /// Number of derivatives taken of the base function.
    shift: usize,
    taylor: Vec<f64>,
}

impl AnalyticGerm {
    fn build(kind: GermKind) -> Self {
        let taylor = match kind {
            GermKind::LGenus => l_genus_series(),
            GermKind::LLog => half_log(&l_genus_series()),
            GermKind::AHatGenus => a_hat_series(),
            GermKind::AHatLog => half_log(&a_hat_series()),
            GermKind::ExpNeg => {
                let mut c = vec![1.0; TAYLOR_LEN];
                for k in 1..TAYLOR_LEN {
                    c[k] = -c[k - 1] / k as f64;
                }
                c
            }
        };
        AnalyticGerm { kind, shift: 0, taylor }
    }

    /// f̃(x) = (x/2)/tanh(x/2), the Hirzebruch L-genus germ.
    pub fn l_genus() -> Self {
        Self::build(GermKind::LGenus)
    }

    /// f = ½·log f̃, whose exp-trace gives det^{1/2} f̃.
    pub fn l_log() -> Self {
        Self::build(GermKind::LLog)
    }

    /// (x/2)/sinh(x/2).
    pub fn a_hat_genus() -> Self {
        Self::build(GermKind::AHatGenus)
    }

    pub fn a_hat_log() -> Self {
        Self::build(GermKind::AHatLog)
    }

    pub fn exp_neg() -> Self {
        Self::build(GermKind::ExpNeg)
    }

    pub fn kind(&self) -> GermKind {
        self.kind
    }

    /// Derivative order relative to the base function.
    pub fn shift(&self) -> usize {
        self.shift
    }

    /// c_k = f^{(k)}(0)/k!.
    pub fn taylor(&self) -> &[f64] {
        &self.taylor
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.taylor.get(k).copied().unwrap_or(0.0)
    }

    /// f^{(k)}(0).
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    /// Whether the germ is even, i.e. all odd Taylor coefficients vanish.
    pub fn is_even(&self) -> bool {
        self.parity() == Some(0)
    }

    /// Some(0) for even, Some(1) for odd, None otherwise.
    pub fn parity(&self) -> Option<usize> {
        match self.kind {
            GermKind::ExpNeg => None,
            _ => Some(self.shift % 2),
        }
    }

    /// Radius of convergence of the Taylor series at 0.
    pub fn radius(&self) -> f64 {
        match self.kind {
            // f̃ vanishes at ±2πi, so its log has radius 2π; the genus itself
            // has poles at ±2πi.
            GermKind::LGenus | GermKind::AHatGenus | GermKind::AHatLog => 2.0 * PI,
            // (x/2)/tanh(x/2) vanishes at x = ±iπ.
            GermKind::LLog => PI,
            GermKind::ExpNeg => f64::INFINITY,
        }
    }

    /// The germ f′, obtained by shifting coefficients (k·c_k).
    pub fn derivative(&self) -> Self {
        let taylor = (1..self.taylor.len()).map(|k| k as f64 * self.taylor[k]).collect();
        AnalyticGerm { kind: self.kind, shift: self.shift + 1, taylor }
    }

    /// f(ix) for real x.
    pub fn eval_i(&self, x: f64) -> Complex64 {
        self.eval_i_nth(x, 0)
    }

    /// f′(ix) for real x.
    pub fn eval_i_d1(&self, x: f64) -> Complex64 {
        self.eval_i_nth(x, 1)
    }

    /// f″(ix) for real x.
    pub fn eval_i_d2(&self, x: f64) -> Complex64 {
        self.eval_i_nth(x, 2)
    }

    /// f^{(n)}(ix). Closed forms are used up to the second derivative of the base
    /// function; beyond that, and near 0, the Taylor series is summed.
    pub fn eval_i_nth(&self, x: f64, n: usize) -> Complex64 {
        let order = self.shift + n;
        if self.kind == GermKind::ExpNeg {
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            return Complex64::new(0.0, -x).exp() * sign;
        }
        if order <= 2 && x.abs() >= SERIES_SWITCH {
            // F(x) := f(ix) satisfies F^{(k)}(x) = iᵏ f^{(k)}(ix).
            let fk = closed_real_axis(self.kind, x, order);
            return fk * Complex64::i().powu(order as u32).inv();
        }
        self.series_i(x, n)
    }

    /// Σ_k c_k·k!/(k−n)!·(ix)^{k−n}.
    fn series_i(&self, x: f64, n: usize) -> Complex64 {
        let z = Complex64::new(0.0, x);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (n..self.taylor.len()).rev() {
            let mut w = self.taylor[k];
            for j in 0..n {
                w *= (k - j) as f64;
            }
            acc = acc * z + w;
        }
        acc
    }
}

/// F^{(k)}(x) where F(x) = f(ix) for the base function of `kind`, k ≤ 2.
fn closed_real_axis(kind: GermKind, x: f64, k: usize) -> Complex64 {
    let u = 0.5 * x;
    let (s, c) = u.sin_cos();
    let cot = c / s;
    let csc2 = 1.0 / (s * s);
    let re = |v: f64| Complex64::new(v, 0.0);
    match (kind, k) {
        (GermKind::LGenus, 0) => re(u * cot),
        (GermKind::LGenus, 1) => re(0.5 * (cot - u * csc2)),
        (GermKind::LGenus, 2) => re(0.5 * csc2 * (u * cot - 1.0)),
        (GermKind::LLog, 0) => 0.5 * re(u * cot).ln(),
        (GermKind::LLog, 1) => re(0.5 / x - 0.5 / x.sin()),
        (GermKind::LLog, 2) => re(-0.5 / (x * x) + x.cos() / (2.0 * x.sin().powi(2))),
        (GermKind::AHatGenus, 0) => re(u / s),
        (GermKind::AHatGenus, 1) => re(0.5 * (s - u * c) * csc2),
        (GermKind::AHatGenus, 2) => re(0.25 * (u * s * s - 2.0 * c * (s - u * c)) / (s * s * s)),
        (GermKind::AHatLog, 0) => 0.5 * re(u / s).ln(),
        (GermKind::AHatLog, 1) => re(0.25 * (1.0 / u - cot)),
        (GermKind::AHatLog, 2) => re(0.125 * (csc2 - 1.0 / (u * u))),
        _ => unreachable!("closed forms cover derivatives up to order 2"),
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// q = a / b for power series with b₀ ≠ 0.
fn series_div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut q = vec![0.0; n];
    for k in 0..n {
        let mut acc = a[k];
        for j in 0..k {
            acc -= q[j] * b[k - j];
        }
        q[k] = acc / b[0];
    }
    q
}

/// Coefficients of g(x/2) from those of g.
fn rescale_half(c: &[f64]) -> Vec<f64> {
    let mut p = 1.0;
    c.iter()
        .map(|v| {
            let out = v * p;
            p *= 0.5;
            out
        })
        .collect()
}

/// cosh(u) and sinh(u)/u in powers of u.
fn cosh_and_sinhc() -> (Vec<f64>, Vec<f64>) {
    let mut ch = vec![0.0; TAYLOR_LEN];
    let mut sc = vec![0.0; TAYLOR_LEN];
    for k in (0..TAYLOR_LEN).step_by(2) {
        ch[k] = 1.0 / factorial(k);
        sc[k] = 1.0 / factorial(k + 1);
    }
    (ch, sc)
}

fn l_genus_series() -> Vec<f64> {
    let (ch, sc) = cosh_and_sinhc();
    rescale_half(&series_div(&ch, &sc))
}

fn a_hat_series() -> Vec<f64> {
    let (_, sc) = cosh_and_sinhc();
    let mut one = vec![0.0; TAYLOR_LEN];
    one[0] = 1.0;
    rescale_half(&series_div(&one, &sc))
}

/// ½·log g for a series with g₀ = 1, via (log g)′ = g′/g.
fn half_log(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let dg: Vec<f64> = (0..n).map(|k| if k + 1 < n { (k + 1) as f64 * g[k + 1] } else { 0.0 }).collect();
    let q = series_div(&dg, g);
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = 0.5 * q[k - 1] / k as f64;
    }
    out
}
