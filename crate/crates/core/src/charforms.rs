//! Equivariant characteristic forms and their transgressions along a family of connections.

use crate::error::{check_dim, Error, Result};
use crate::exterior::ExteriorForm;
use crate::germ::AnalyticGerm;
use crate::matforms::{apply_germ, exp_trace_germ, star_second, FormMatrix, Truncated};
use crate::par;
use crate::quadrature::QuadratureSpec;

/// ∇ᵗ = ∇⁰ + tΘ, with ∇ᵗX linear in t and Rᵗ given as a polynomial in t.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionFamily {
    theta: FormMatrix,
    nabla_x0: FormMatrix,
    nabla_x1: FormMatrix,
    curvature: Vec<FormMatrix>,
}

impl ConnectionFamily {
    /// `curvature[j]` is the coefficient of tʲ in Rᵗ.
    pub fn new(
        theta: FormMatrix,
        nabla_x0: FormMatrix,
        nabla_x1: FormMatrix,
        curvature: Vec<FormMatrix>,
    ) -> Result<Self> {
        if curvature.is_empty() {
            return Err(Error::InvalidArgument("curvature polynomial has no coefficients".into()));
        }
        theta.check_same_shape(&nabla_x0)?;
        theta.check_same_shape(&nabla_x1)?;
        theta.check_antisymmetric("theta")?;
        for (name, m) in [("nabla X at t=0", &nabla_x0), ("nabla X at t=1", &nabla_x1)] {
            m.check_antisymmetric(name)?;
            if !m.is_scalar() {
                return Err(Error::InvalidArgument(format!("{name} must be degree 0")));
            }
        }
        for c in &curvature {
            theta.check_same_shape(c)?;
            c.check_antisymmetric("curvature")?;
            if !c.entries().iter().all(|f| f.is_homogeneous(2)) {
                return Err(Error::InvalidArgument("curvature entries must be 2-forms".into()));
            }
        }
        Ok(ConnectionFamily { theta, nabla_x0, nabla_x1, curvature })
    }

    pub fn theta(&self) -> &FormMatrix {
        &self.theta
    }

    pub fn nabla_x_at(&self, t: f64) -> FormMatrix {
        &self.nabla_x0.scale(1.0 - t) + &self.nabla_x1.scale(t)
    }

    pub fn curvature_at(&self, t: f64) -> FormMatrix {
        let mut acc = self.curvature.last().expect("nonempty").clone();
        for c in self.curvature.iter().rev().skip(1) {
            acc = &acc.scale(t) + c;
        }
        acc
    }

    /// R_𝔤ᵗ(X) = Rᵗ − ∇ᵗX.
    pub fn equivariant_curvature_at(&self, t: f64) -> FormMatrix {
        &self.curvature_at(t) - &self.nabla_x_at(t)
    }

    /// The same family with ∇ᵗX multiplied by s.
    pub fn with_scaled_x(&self, s: f64) -> Self {
        ConnectionFamily {
            theta: self.theta.clone(),
            nabla_x0: self.nabla_x0.scale(s),
            nabla_x1: self.nabla_x1.scale(s),
            curvature: self.curvature.clone(),
        }
    }

    pub fn size(&self) -> usize {
        self.theta.size()
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }
}

/// R_𝔤(X) = R − ∇X.
pub fn equivariant_curvature(r: &FormMatrix, nabla_x: &FormMatrix) -> Result<FormMatrix> {
    r.check_same_shape(nabla_x)?;
    r.check_antisymmetric("curvature")?;
    nabla_x.check_antisymmetric("nabla X")?;
    if !nabla_x.is_scalar() {
        return Err(Error::InvalidArgument("nabla X must be degree 0".into()));
    }
    Ok(r - nabla_x)
}

/// det^{1/2}((R/2)/tanh(R/2)) computed as exp(Tr ½log f̃(R_𝔤)).
pub fn l_form(rg: &FormMatrix, order: usize) -> Result<Truncated<ExteriorForm>> {
    exp_trace_germ(&AnalyticGerm::l_log(), rg, order)
}

/// det^{1/2}((R/2)/sinh(R/2)).
pub fn a_hat_form(rg: &FormMatrix, order: usize) -> Result<Truncated<ExteriorForm>> {
    exp_trace_germ(&AnalyticGerm::a_hat_log(), rg, order)
}

/// Str exp(−F_𝔤) = Σᵢ gradingᵢ·(exp(−F_𝔤))ᵢᵢ.
pub fn chern_form(fg: &FormMatrix, grading: &[f64], order: usize) -> Result<Truncated<ExteriorForm>> {
    check_dim(fg.size(), grading.len())?;
    let e = apply_germ(&AnalyticGerm::exp_neg(), fg, order)?;
    let mut acc = ExteriorForm::zero(fg.dim());
    for (i, &g) in grading.iter().enumerate() {
        acc.axpy(g, e.value.get(i, i));
    }
    Ok(Truncated::new(acc, e.tail * grading.len() as f64))
}

/// Tβ = Tβ₁∧β₂(1) + β₁(0)∧Tβ₂.
pub fn product_transgression(
    t_beta1: &ExteriorForm,
    beta2_at1: &ExteriorForm,
    beta1_at0: &ExteriorForm,
    t_beta2: &ExteriorForm,
) -> Result<ExteriorForm> {
    Ok(t_beta1.wedge(beta2_at1)? + beta1_at0.wedge(t_beta2)?)
}

fn require_even(f: &AnalyticGerm) -> Result<()> {
    if !f.is_even() {
        return Err(Error::InvalidArgument("the degree-3 transgression formulas need an even germ".into()));
    }
    Ok(())
}

/// ∫₀¹ integrand(t) dt with nodes evaluated in parallel and summed in node order.
fn integrate<F>(quad: &QuadratureSpec, dim: usize, integrand: F) -> Result<Truncated<ExteriorForm>>
where
    F: Fn(f64) -> Result<Truncated<ExteriorForm>> + Sync + Send,
{
    let rule = quad.unit_rule()?;
    let values = par::try_map(&rule, |&(t, _)| integrand(t))?;
    let mut acc = ExteriorForm::zero(dim);
    let mut tail = 0.0;
    for ((_, w), v) in rule.iter().zip(&values) {
        acc.axpy(*w, &v.value);
        tail += w * v.tail;
    }
    Ok(Truncated::new(acc, tail))
}

/// exp(Tr f(R_𝔤ᵗ))·Tr[Θ f′(R_𝔤ᵗ)] at one t.
pub fn transgression_integrand(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    t: f64,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    let rg = fam.equivariant_curvature_at(t);
    let e = exp_trace_germ(f, &rg, order)?;
    let fp = apply_germ(&f.derivative(), &rg, order)?;
    let tr = (fam.theta() * &fp.value).trace();
    let value = e.value * tr;
    let tail = e.tail * tr.max_abs() + e.value.max_abs() * fp.tail * fam.theta().max_abs() * fam.size() as f64;
    Ok(Truncated::new(value, tail))
}

/// ∫₀¹ exp(Tr f(R_𝔤ᵗ))·Tr[Θ f′(R_𝔤ᵗ)] dt.
pub fn transgression(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    quad: &QuadratureSpec,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    integrate(quad, fam.dim(), |t| transgression_integrand(f, fam, t, order))
}

/// exp(Tr f(∇ᵗX))·(Tr[Θf′(∇ᵗX)]·Tr[f′(∇ᵗX)Rᵗ] + Tr[(f^{[2]}(∇ᵗX)*Θ)Rᵗ]) at one t.
pub fn transgression_degree3_integrand(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    t: f64,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    require_even(f)?;
    let nx = fam.nabla_x_at(t);
    let r = fam.curvature_at(t);
    let theta = fam.theta();
    let e = exp_trace_germ(f, &nx, order)?;
    let fp = apply_germ(&f.derivative(), &nx, order)?;
    let st = star_second(f, &nx, theta, order)?;
    let a = (theta * &fp.value).trace();
    let b = (&fp.value * &r).trace();
    let c = (&st.value * &r).trace();
    let value = (e.value * (a * b + c)).degree_component(3);
    let scale = theta.max_abs().max(1.0) * r.max_abs().max(1.0) * (fam.size() * fam.size()) as f64;
    let tail = e.value.max_abs() * scale * (2.0 * fp.tail + st.tail) + e.tail * value.max_abs();
    Ok(Truncated::new(value, tail))
}

pub fn transgression_degree3(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    quad: &QuadratureSpec,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    require_even(f)?;
    integrate(quad, fam.dim(), |t| transgression_degree3_integrand(f, fam, t, order))
}

/// Degree-3 part of exp(Tr f(∇ᵗX))·(1 + Tr[Θf′(∇ᵗX)])·Tr[f′(Θ+∇ᵗX)Rᵗ] at one t.
pub fn transgression_degree3_alt_integrand(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    t: f64,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    require_even(f)?;
    let nx = fam.nabla_x_at(t);
    let r = fam.curvature_at(t);
    let theta = fam.theta();
    let fd = f.derivative();
    let e = exp_trace_germ(f, &nx, order)?;
    let fp = apply_germ(&fd, &nx, order)?;
    let fpt = apply_germ(&fd, &(theta + &nx), order)?;
    let one = ExteriorForm::scalar(fam.dim(), 1.0);
    let a = one + (theta * &fp.value).trace();
    let b = (&fpt.value * &r).trace();
    let value = (e.value * a * b).degree_component(3);
    let scale = theta.max_abs().max(1.0) * r.max_abs().max(1.0) * (fam.size() * fam.size()) as f64;
    let tail = e.value.max_abs() * scale * (fp.tail + fpt.tail) + e.tail * value.max_abs();
    Ok(Truncated::new(value, tail))
}

pub fn transgression_degree3_alt(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    quad: &QuadratureSpec,
    order: usize,
) -> Result<Truncated<ExteriorForm>> {
    require_even(f)?;
    integrate(quad, fam.dim(), |t| transgression_degree3_alt_integrand(f, fam, t, order))
}

/// f″(0)·∫₀¹ Tr[Θ Rᵗ] dt, the X → 0 limit of the degree-3 transgression.
pub fn transgression_degree3_x_zero(
    f: &AnalyticGerm,
    fam: &ConnectionFamily,
    quad: &QuadratureSpec,
) -> Result<ExteriorForm> {
    let f2 = f.derivative_at_zero(2);
    Ok(integrate(quad, fam.dim(), |t| {
        Ok(Truncated::new((fam.theta() * &fam.curvature_at(t)).trace().scale(f2), 0.0))
    })?
    .value)
}
