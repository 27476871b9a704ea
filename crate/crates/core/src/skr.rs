//! Four-dimensional SKR geometry: profiles, curvature in the adapted frame,
//! the closed L-form and the boundary transgression.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::charforms::{self, ConnectionFamily};
use crate::error::{Error, Result};
use crate::exterior::ExteriorForm;
use crate::germ::AnalyticGerm;
use crate::matforms::{char_poly, FormMatrix, Truncated};
use crate::quadrature::QuadratureSpec;

/// Step for the central difference used when a second derivative is not available.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-5;

/// A smooth function of τ: a polynomial (lowest degree first) or local Lagrange
/// interpolation of tabulated samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileFn {
    Polynomial(Vec<f64>),
    Tabulated { tau: Vec<f64>, values: Vec<f64>, order: usize },
}

impl ProfileFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProfileFn::Polynomial(c) if c.is_empty() => {
                Err(Error::ProfileInvalid("polynomial has no coefficients".into()))
            }
            ProfileFn::Polynomial(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(Error::ProfileInvalid("polynomial coefficient is not finite".into()))
            }
            ProfileFn::Polynomial(_) => Ok(()),
            ProfileFn::Tabulated { tau, values, order } => {
                if tau.len() != values.len() {
                    return Err(Error::ProfileInvalid("tabulated tau and values differ in length".into()));
                }
                if !(1..=7).contains(order) || tau.len() <= *order {
                    return Err(Error::ProfileInvalid(format!(
                        "interpolation order {order} needs 1..=7 and more than {order} samples"
                    )));
                }
                if tau.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::ProfileInvalid("tabulated tau must be strictly increasing".into()));
                }
                if values.iter().chain(tau.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::ProfileInvalid("tabulated sample is not finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ProfileFn::Polynomial(c) => c.iter().rev().fold(0.0, |acc, v| acc * t + v),
            ProfileFn::Tabulated { .. } => self.lagrange(t, false),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            ProfileFn::Polynomial(c) => {
                (1..c.len()).rev().fold(0.0, |acc, k| acc * t + k as f64 * c[k])
            }
            ProfileFn::Tabulated { .. } => self.lagrange(t, true),
        }
    }

    /// Exact second derivative when the representation supplies one.
    pub fn second_derivative(&self, t: f64) -> Option<f64> {
        match self {
            ProfileFn::Polynomial(c) => Some(
                (2..c.len()).rev().fold(0.0, |acc, k| acc * t + (k * (k - 1)) as f64 * c[k]),
            ),
            ProfileFn::Tabulated { .. } => None,
        }
    }

    /// Second derivative, falling back to a central difference of the first.
    pub fn second_derivative_or_fd(&self, t: f64) -> f64 {
        self.second_derivative(t).unwrap_or_else(|| {
            let h = SECOND_DERIVATIVE_STEP;
            (self.derivative(t + h) - self.derivative(t - h)) / (2.0 * h)
        })
    }

    fn lagrange(&self, t: f64, derivative: bool) -> f64 {
        let ProfileFn::Tabulated { tau, values, order } = self else {
            unreachable!("lagrange on a polynomial")
        };
        let m = order + 1;
        // Window of m consecutive nodes centred on t.
        let pos = tau.partition_point(|&x| x < t);
        let start = pos.saturating_sub(m / 2).min(tau.len() - m);
        let xs = &tau[start..start + m];
        let ys = &values[start..start + m];
        let mut acc = 0.0;
        for j in 0..m {
            let basis = if derivative {
                let mut s = 0.0;
                for i in (0..m).filter(|&i| i != j) {
                    let mut p = 1.0 / (xs[j] - xs[i]);
                    for k in (0..m).filter(|&k| k != i && k != j) {
                        p *= (t - xs[k]) / (xs[j] - xs[k]);
                    }
                    s += p;
                }
                s
            } else {
                (0..m).filter(|&k| k != j).fold(1.0, |p, k| p * (t - xs[k]) / (xs[j] - xs[k]))
            };
            acc += ys[j] * basis;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileMode {
    /// φ(τ) and the constant c̄; Q and ψ are derived.
    Irreducible { phi: ProfileFn, c_bar: f64 },
    /// Q(τ) directly; φ ≡ 0.
    Reducible { q: ProfileFn },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkrProfile {
    pub mode: ProfileMode,
    pub a: f64,
    pub base_curv: f64,
    pub tau_min: f64,
    pub base_area: f64,
    pub fiber_period: f64,
}

/// φ, ψ, Q, φ′, ψ′ at one τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived {
    pub phi: f64,
    pub psi: f64,
    pub q: f64,
    pub phi_d: f64,
    pub psi_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureComponents {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: f64,
}

/// Coefficients of √A = α + β e¹² + γ e³⁴ + δ e¹²³⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtA {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SqrtA {
    pub fn form(&self) -> ExteriorForm {
        ExteriorForm::scalar(4, self.alpha)
            + ExteriorForm::e(4, self.beta, &[1, 2])
            + ExteriorForm::e(4, self.gamma, &[3, 4])
            + ExteriorForm::e(4, self.delta, &[1, 2, 3, 4])
    }
}

/// Number of interior points at which positivity of Q is checked.
const POSITIVITY_SAMPLES: usize = 256;

impl SkrProfile {
    pub fn irreducible(phi: ProfileFn, c_bar: f64, a: f64, base_curv: f64, tau_min: f64) -> Result<Self> {
        Self::new(ProfileMode::Irreducible { phi, c_bar }, a, base_curv, tau_min, 1.0, 2.0 * PI)
    }

    pub fn reducible(q: ProfileFn, a: f64, base_curv: f64, tau_min: f64) -> Result<Self> {
        Self::new(ProfileMode::Reducible { q }, a, base_curv, tau_min, 1.0, 2.0 * PI)
    }

    pub fn new(
        mode: ProfileMode,
        a: f64,
        base_curv: f64,
        tau_min: f64,
        base_area: f64,
        fiber_period: f64,
    ) -> Result<Self> {
        let p = SkrProfile { mode, a, base_curv, tau_min, base_area, fiber_period };
        p.validate()?;
        Ok(p)
    }

    pub fn with_topology(mut self, base_area: f64, fiber_period: f64) -> Result<Self> {
        self.base_area = base_area;
        self.fiber_period = fiber_period;
        self.validate()?;
        Ok(self)
    }

    pub fn is_reducible(&self) -> bool {
        matches!(self.mode, ProfileMode::Reducible { .. })
    }

    /// c̄ for irreducible profiles.
    pub fn c_bar(&self) -> Option<f64> {
        match self.mode {
            ProfileMode::Irreducible { c_bar, .. } => Some(c_bar),
            ProfileMode::Reducible { .. } => None,
        }
    }

    /// Horizontal conformal weight: 2|τ − c̄|, or 1 for reducible profiles.
    pub fn horizontal_weight(&self, tau: f64) -> f64 {
        match self.c_bar() {
            Some(c) => 2.0 * (tau - c).abs(),
            None => 1.0,
        }
    }

    fn q_unchecked(&self, tau: f64) -> f64 {
        match &self.mode {
            ProfileMode::Irreducible { phi, c_bar } => 2.0 * (tau - c_bar) * phi.value(tau),
            ProfileMode::Reducible { q } => q.value(tau),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.base_curv, self.tau_min, self.base_area, self.fiber_period];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::ProfileInvalid("profile constants must be finite".into()));
        }
        if self.a == 0.0 {
            return Err(Error::ProfileInvalid("a must be nonzero".into()));
        }
        if !(self.tau_min < 0.0) {
            return Err(Error::ProfileInvalid(format!("tau_min = {} must be negative", self.tau_min)));
        }
        if !(self.base_area > 0.0) || !(self.fiber_period > 0.0) {
            return Err(Error::ProfileInvalid("base_area and fiber_period must be positive".into()));
        }
        match &self.mode {
            ProfileMode::Irreducible { phi, c_bar } => {
                phi.validate()?;
                if !c_bar.is_finite() || (self.tau_min..=0.0).contains(c_bar) {
                    return Err(Error::ProfileInvalid(format!(
                        "c_bar = {c_bar} must lie outside [{}, 0]",
                        self.tau_min
                    )));
                }
            }
            ProfileMode::Reducible { q } => q.validate()?,
        }
        let q0 = self.q_unchecked(0.0);
        if !(q0 > 0.0) {
            return Err(Error::ProfileInvalid(format!("Q(0) = {q0} must be positive")));
        }
        for k in 1..POSITIVITY_SAMPLES {
            let tau = self.tau_min * (1.0 - k as f64 / POSITIVITY_SAMPLES as f64);
            let q = self.q_unchecked(tau);
            if !(q > 0.0) {
                return Err(Error::ProfileInvalid(format!("Q({tau}) = {q} must be positive")));
            }
        }
        Ok(())
    }

    /// `n` equally spaced points from τ_min to 0, both included.
    pub fn tau_grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![0.0],
            _ => (0..n).map(|k| self.tau_min * (1.0 - k as f64 / (n - 1) as f64)).collect(),
        }
    }
}

fn check_tau(p: &SkrProfile, tau: f64) -> Result<()> {
    let slack = 1e-12 * p.tau_min.abs();
    if !(tau >= p.tau_min - slack && tau <= slack) {
        return Err(Error::Domain(format!("tau = {tau} outside [{}, 0]", p.tau_min)));
    }
    Ok(())
}

/// φ, ψ, Q, φ′, ψ′ at τ. For irreducible profiles Q = 2(τ−c̄)φ, ψ = φ + (τ−c̄)φ′
/// and ψ′ = 2φ′ + (τ−c̄)φ″; for reducible ones φ ≡ 0 and ψ = Q′/2.
pub fn derived_functions(p: &SkrProfile, tau: f64) -> Result<Derived> {
    check_tau(p, tau)?;
    let d = match &p.mode {
        ProfileMode::Irreducible { phi, c_bar } => {
            let s = tau - c_bar;
            let f = phi.value(tau);
            let fd = phi.derivative(tau);
            let fdd = phi.second_derivative_or_fd(tau);
            Derived { phi: f, psi: f + s * fd, q: 2.0 * s * f, phi_d: fd, psi_d: 2.0 * fd + s * fdd }
        }
        ProfileMode::Reducible { q } => Derived {
            phi: 0.0,
            psi: 0.5 * q.derivative(tau),
            q: q.value(tau),
            phi_d: 0.0,
            psi_d: 0.5 * q.second_derivative_or_fd(tau),
        },
    };
    if !(d.q > 0.0) {
        return Err(Error::ProfileInvalid(format!("Q({tau}) = {} must be positive", d.q)));
    }
    Ok(d)
}

pub fn curvature_components(p: &SkrProfile, tau: f64) -> Result<CurvatureComponents> {
    let d = derived_functions(p, tau)?;
    Ok(components_from(p, &d))
}

fn components_from(p: &SkrProfile, d: &Derived) -> CurvatureComponents {
    if p.is_reducible() {
        CurvatureComponents { b: -p.base_curv, c: 0.0, d: -d.psi_d, r: 0.0 }
    } else {
        CurvatureComponents {
            b: -(d.phi / d.q).abs() * p.base_curv - 4.0 * d.phi * d.phi / d.q,
            c: -d.phi_d,
            d: -d.psi_d,
            r: -0.5 * d.phi_d,
        }
    }
}

fn e4(c: f64, idx: &[usize]) -> ExteriorForm {
    ExteriorForm::e(4, c, idx)
}

/// The curvature matrix in the adapted orthonormal frame.
pub fn curvature_matrix(cc: &CurvatureComponents) -> FormMatrix {
    let CurvatureComponents { b, c, d, r } = *cc;
    let s = e4(1.0, &[1, 3]) + e4(1.0, &[2, 4]);
    let t = e4(1.0, &[1, 4]) - e4(1.0, &[2, 3]);
    let mut m = FormMatrix::zeros(4, 4);
    m.set_antisymmetric(0, 1, e4(b, &[1, 2]) + e4(c, &[3, 4]));
    m.set_antisymmetric(2, 3, e4(c, &[1, 2]) + e4(d, &[3, 4]));
    m.set_antisymmetric(0, 2, s.scale(r));
    m.set_antisymmetric(0, 3, t.scale(r));
    m.set_antisymmetric(1, 2, t.scale(-r));
    m.set_antisymmetric(1, 3, s.scale(r));
    m
}

/// ∇X = φJ_H + ψJ_V.
pub fn nabla_x_matrix(phi: f64, psi: f64) -> FormMatrix {
    let mut m = FormMatrix::zeros(4, 4);
    m.set_antisymmetric(0, 1, ExteriorForm::scalar(4, phi));
    m.set_antisymmetric(2, 3, ExteriorForm::scalar(4, psi));
    m
}

/// R_𝔤(X) = R − ∇X at τ.
pub fn equivariant_curvature_at(p: &SkrProfile, tau: f64) -> Result<FormMatrix> {
    let d = derived_functions(p, tau)?;
    let cc = components_from(p, &d);
    charforms::equivariant_curvature(&curvature_matrix(&cc), &nabla_x_matrix(d.phi, d.psi))
}

/// A = 2r²(𝐬² + 𝐭²) + 𝐚² + 𝐛² with 𝐚 = φ + b e¹² + c e³⁴, 𝐛 = ψ + c e¹² + d e³⁴.
pub fn a_form(phi: f64, psi: f64, cc: &CurvatureComponents) -> ExteriorForm {
    let CurvatureComponents { b, c, d, r } = *cc;
    let a = ExteriorForm::scalar(4, phi) + e4(b, &[1, 2]) + e4(c, &[3, 4]);
    let bb = ExteriorForm::scalar(4, psi) + e4(c, &[1, 2]) + e4(d, &[3, 4]);
    let s = e4(1.0, &[1, 3]) + e4(1.0, &[2, 4]);
    let t = e4(1.0, &[1, 4]) - e4(1.0, &[2, 3]);
    (s * s + t * t).scale(2.0 * r * r) + a * a + bb * bb
}

pub fn sqrt_a_coeffs(phi: f64, psi: f64, cc: &CurvatureComponents) -> Result<SqrtA> {
    let CurvatureComponents { b, c, d, r } = *cc;
    let a2 = phi * phi + psi * psi;
    if a2 == 0.0 {
        return Err(Error::SingularInput("sqrt(A) needs phi^2 + psi^2 > 0".into()));
    }
    let alpha = a2.sqrt();
    let r2 = r * r;
    Ok(SqrtA {
        alpha,
        beta: (b * phi + c * psi) / alpha,
        gamma: (c * phi + d * psi) / alpha,
        delta: ((c * d - 4.0 * r2) * phi * phi + (b * c - 4.0 * r2) * psi * psi - phi * psi * (b * d + c * c))
            / (alpha * a2),
    })
}

/// f̄(x) = x/(2 tan(x/2)) and its first two derivatives.
fn fbar_derivatives(x: f64) -> Result<[f64; 3]> {
    let k = (x / (2.0 * PI)).round();
    if k != 0.0 && (x - 2.0 * PI * k).abs() < 1e-12 * x.abs().max(1.0) {
        return Err(Error::Domain(format!("f̄ has a pole at alpha = {x}")));
    }
    let g = AnalyticGerm::l_genus();
    // f̃(ix) = f̄(x), so f̄′(x) = i f̃′(ix) and f̄″(x) = −f̃″(ix).
    let v0 = g.eval_i(x).re;
    let v1 = -g.eval_i_d1(x).im;
    let v2 = -g.eval_i_d2(x).re;
    Ok([v0, v1, v2])
}

/// f̄(√A) = f̄(α) + f̄′(α)(βe¹² + γe³⁴ + δe¹²³⁴) + f̄″(α)βγ e¹²³⁴.
pub fn l_form_closed_from(s: &SqrtA) -> Result<ExteriorForm> {
    let [f0, f1, f2] = fbar_derivatives(s.alpha)?;
    Ok(ExteriorForm::scalar(4, f0)
        + e4(f1 * s.beta, &[1, 2])
        + e4(f1 * s.gamma, &[3, 4])
        + e4(f1 * s.delta + f2 * s.beta * s.gamma, &[1, 2, 3, 4]))
}

pub fn l_form_closed(p: &SkrProfile, tau: f64) -> Result<ExteriorForm> {
    let d = derived_functions(p, tau)?;
    let s = sqrt_a_coeffs(d.phi, d.psi, &components_from(p, &d))?;
    l_form_closed_from(&s)
}

/// det^{1/2} f̃(R_𝔤(X)) through the generic germ calculus.
pub fn l_form_generic(p: &SkrProfile, tau: f64, order: usize) -> Result<Truncated<ExteriorForm>> {
    charforms::l_form(&equivariant_curvature_at(p, tau)?, order)
}

/// Coefficients [c₀, …, c₃, 1] of det(λ − R_𝔤(X)) at τ.
pub fn characteristic_polynomial(p: &SkrProfile, tau: f64) -> Result<Vec<ExteriorForm>> {
    char_poly(&equivariant_curvature_at(p, tau)?)
}

/// Everything pulled back to the boundary τ = 0, in a 3-dim coframe.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub phi0: f64,
    pub psi0: f64,
    pub q0: f64,
    /// R₁₂₃₄ = c at τ = 0.
    pub r1234: f64,
    /// R₁₃₂₄ = r at τ = 0.
    pub r1324: f64,
    pub r0_1212: f64,
    pub r0_2323: f64,
    pub theta: FormMatrix,
    pub a1: FormMatrix,
    pub a2: FormMatrix,
    pub a3: FormMatrix,
    nabla_x0: FormMatrix,
    nabla_x1: FormMatrix,
}

impl BoundaryData {
    /// R₂₃₁₄ = −r.
    pub fn r2314(&self) -> f64 {
        -self.r1324
    }

    pub fn k(&self) -> f64 {
        self.phi0 / self.q0.sqrt()
    }

    pub fn l(&self) -> f64 {
        self.psi0 / self.q0.sqrt()
    }

    /// ∇ᵗX: φ₀ on the horizontal block, tψ₀ on the vertical one.
    pub fn nabla_tx(&self, t: f64) -> FormMatrix {
        &self.nabla_x0.scale(1.0 - t) + &self.nabla_x1.scale(t)
    }

    /// ι*Rᵗ = A¹ + tA² + t²A³.
    pub fn curvature_at(&self, t: f64) -> FormMatrix {
        &(&self.a1 + &self.a2.scale(t)) + &self.a3.scale(t * t)
    }

    pub fn family(&self) -> Result<ConnectionFamily> {
        ConnectionFamily::new(
            self.theta.clone(),
            self.nabla_x0.clone(),
            self.nabla_x1.clone(),
            vec![self.a1.clone(), self.a2.clone(), self.a3.clone()],
        )
    }

    /// Same boundary data with Θ replaced by zero (and A³ = Θ² with it).
    pub fn without_theta(&self) -> Self {
        let z = FormMatrix::zeros(4, 3);
        BoundaryData { theta: z.clone(), a3: z, ..self.clone() }
    }
}

fn e3(c: f64, idx: &[usize]) -> ExteriorForm {
    ExteriorForm::e(3, c, idx)
}

pub fn boundary_data(p: &SkrProfile) -> Result<BoundaryData> {
    let d = derived_functions(p, 0.0)?;
    let cc = components_from(p, &d);
    let (r0_1212, r0_2323) = match p.c_bar() {
        Some(cb) => (2.0 * cb.abs() * p.base_curv + 3.0 * d.q / (4.0 * cb * cb), -d.q / (4.0 * cb * cb)),
        None => (p.base_curv, 0.0),
    };
    let sq = d.q.sqrt();
    let (k, l) = (d.phi / sq, d.psi / sq);

    let mut theta = FormMatrix::zeros(4, 3);
    theta.set_antisymmetric(0, 3, e3(k, &[1]));
    theta.set_antisymmetric(1, 3, e3(k, &[2]));
    theta.set_antisymmetric(2, 3, e3(l, &[3]));

    let mut a1 = FormMatrix::zeros(4, 3);
    a1.set_antisymmetric(0, 1, e3(r0_1212, &[1, 2]));
    a1.set_antisymmetric(0, 2, e3(r0_2323, &[1, 3]));
    a1.set_antisymmetric(1, 2, e3(r0_2323, &[2, 3]));

    // Entry (c,4) is Σ_{a<b} R_{abc4} e^{ab}.
    let mut a2 = FormMatrix::zeros(4, 3);
    a2.set_antisymmetric(2, 3, e3(cc.c, &[1, 2]));
    a2.set_antisymmetric(1, 3, e3(cc.r, &[1, 3]));
    a2.set_antisymmetric(0, 3, e3(-cc.r, &[2, 3]));

    let a3 = &theta * &theta;

    let mut nabla_x0 = FormMatrix::zeros(4, 3);
    nabla_x0.set_antisymmetric(0, 1, ExteriorForm::scalar(3, d.phi));
    let mut nabla_x1 = nabla_x0.clone();
    nabla_x1.set_antisymmetric(2, 3, ExteriorForm::scalar(3, d.psi));

    Ok(BoundaryData {
        phi0: d.phi,
        psi0: d.psi,
        q0: d.q,
        r1234: cc.c,
        r1324: cc.r,
        r0_1212,
        r0_2323,
        theta,
        a1,
        a2,
        a3,
        nabla_x0,
        nabla_x1,
    })
}

/// e¹²³ coefficient of the closed-form degree-3 transgression integrand at t.
/// The double series runs over m ≤ K; the tail is the larger of the next two terms.
pub fn transgression_integrand_closed(bd: &BoundaryData, t: f64, order: usize) -> Result<Truncated<f64>> {
    let f = AnalyticGerm::l_log();
    let (phi, psi, q) = (bd.phi0, bd.psi0, bd.q0);
    let tpsi = t * psi;
    let rho = phi.abs().max(tpsi.abs());
    if !(rho < f.radius()) {
        return Err(Error::ConvergenceRadius { rho, radius: f.radius() });
    }
    if 2 * order + 6 >= f.taylor().len() {
        return Err(Error::InvalidArgument(format!("series order {order} too large for the closed formula")));
    }
    let sq = q.sqrt();
    // F(x) = f(ix); P(x) = Im f′(ix); S(x) = f″(ix).
    let big_f = |x: f64| f.eval_i(x).re;
    let p = |x: f64| f.eval_i_d1(x).im;
    let s = |x: f64| f.eval_i_d2(x).re;

    let e = (2.0 * (big_f(phi) + big_f(tpsi))).exp();
    let term1 = -4.0 * psi / sq * p(tpsi) * ((t * t * phi * phi / q - bd.r0_1212) * p(phi) - t * bd.r1234 * p(tpsi));
    let term3 = -2.0 * tpsi / sq * bd.r1234 * s(tpsi);

    let series_term = |m: usize| -> f64 {
        let am = (2 * m + 2) as f64 * f.coeff(2 * m + 2);
        let mk = |k: usize| phi.powi(k as i32) * tpsi.powi((2 * m - k) as i32) + tpsi.powi(k as i32) * phi.powi((2 * m - k) as i32);
        let odd: f64 = (1..2 * m).step_by(2).map(mk).sum();
        let even: f64 = (0..=2 * m).step_by(2).map(mk).sum();
        let sg = if m % 2 == 0 { 1.0 } else { -1.0 };
        am * ((sg * bd.r0_2323 - sg * t * t * phi * psi / q) * odd - sg * t * bd.r2314() * even)
    };
    let series: f64 = (0..=order).map(series_term).sum();
    let term2 = 2.0 * phi / sq * series;
    let tail = 2.0 * phi.abs() / sq * e * series_term(order + 1).abs().max(series_term(order + 2).abs());
    Ok(Truncated::new(e * (term1 + term2 + term3), tail))
}

/// Closed-form pull-back of the degree-3 L-transgression to the boundary, as a multiple of e¹²³.
pub fn transgression_pullback_closed(
    p: &SkrProfile,
    order: usize,
    quad: &QuadratureSpec,
) -> Result<Truncated<ExteriorForm>> {
    let bd = boundary_data(p)?;
    let rule = quad.unit_rule()?;
    let vals = crate::par::try_map(&rule, |&(t, _)| transgression_integrand_closed(&bd, t, order))?;
    let mut acc = 0.0;
    let mut tail = 0.0;
    for ((_, w), v) in rule.iter().zip(&vals) {
        acc += w * v.value;
        tail += w * v.tail;
    }
    Ok(Truncated::new(e3(acc, &[1, 2, 3]), tail))
}

/// The same quantity through the generic degree-3 transgression machinery.
pub fn transgression_pullback_direct(
    p: &SkrProfile,
    order: usize,
    quad: &QuadratureSpec,
) -> Result<Truncated<ExteriorForm>> {
    let bd = boundary_data(p)?;
    charforms::transgression_degree3(&AnalyticGerm::l_log(), &bd.family()?, quad, order)
}
