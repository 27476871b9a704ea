//! Finite-difference Riemannian geometry on an explicit chart of the SKR metric.
//!
//! Coordinates are (τ, s, x, y) with flat base h = dx² + dy². The metric is
//! g = (Q/a²)θ² + dτ²/Q + H·(dx² + dy²), where for irreducible profiles
//! H = 2|τ−c̄| and θ = a(ds + 2σx dy) with σ = sgn(τ−c̄), so dθ = 2aσ dx∧dy;
//! for reducible profiles H = 1 and θ = a ds.
//!
//! Nothing here shares code with the closed curvature formulas: derivatives of the
//! metric are taken numerically from its coefficients alone.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::skr::{ProfileMode, SkrProfile};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartPoint {
    pub tau: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    pub fn new(tau: f64, s: f64, x: f64, y: f64) -> Self {
        ChartPoint { tau, s, x, y }
    }

    fn coords(&self) -> [f64; 4] {
        [self.tau, self.s, self.x, self.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub g: Matrix4<f64>,
}

impl MetricSample {
    /// Positive-definiteness by leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=4).all(|k| self.g.view((0, 0), (k, k)).determinant() > 0.0)
    }
}

/// Γ[k][i][j] = Γᵏᵢⱼ.
pub type Christoffel = [[[f64; 4]; 4]; 4];
/// Four-index array; meaning depends on the producer.
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

fn check_chart(p: &SkrProfile) -> Result<()> {
    if p.base_curv != 0.0 {
        return Err(Error::InvalidArgument(
            "the oracle chart has a flat base; base_curv must be 0".into(),
        ));
    }
    Ok(())
}

/// Q(τ), horizontal weight H(τ) and σ at a chart coordinate.
fn chart_functions(p: &SkrProfile, tau: f64) -> Result<(f64, f64, f64)> {
    let (q, h, sigma) = match &p.mode {
        ProfileMode::Irreducible { phi, c_bar } => {
            let d = tau - c_bar;
            (2.0 * d * phi.value(tau), 2.0 * d.abs(), d.signum())
        }
        ProfileMode::Reducible { q } => (q.value(tau), 1.0, 0.0),
    };
    if !(q > 0.0) {
        return Err(Error::ProfileInvalid(format!("Q({tau}) = {q} must be positive")));
    }
    Ok((q, h, sigma))
}

fn metric_coords(p: &SkrProfile, c: [f64; 4]) -> Result<Matrix4<f64>> {
    let [tau, _, x, _] = c;
    let (q, h, sigma) = chart_functions(p, tau)?;
    let a = p.a;
    let theta = Vector4::new(0.0, a, 0.0, 2.0 * a * sigma * x);
    let mut g = theta * theta.transpose() * (q / (a * a));
    g[(0, 0)] += 1.0 / q;
    g[(2, 2)] += h;
    g[(3, 3)] += h;
    Ok(g)
}

pub fn metric_at(p: &SkrProfile, pt: &ChartPoint) -> Result<MetricSample> {
    check_chart(p)?;
    Ok(MetricSample { g: metric_coords(p, pt.coords())? })
}

fn shifted(c: [f64; 4], l: usize, d: f64) -> [f64; 4] {
    let mut out = c;
    out[l] += d;
    out
}

fn christoffel_coords(p: &SkrProfile, c: [f64; 4], h: f64) -> Result<Christoffel> {
    let g = metric_coords(p, c)?;
    let gi = g
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular metric in chart".into()))?;
    // dg[l] = ∂_l g by central differences.
    let mut dg = [Matrix4::zeros(); 4];
    for (l, d) in dg.iter_mut().enumerate() {
        let gp = metric_coords(p, shifted(c, l, h))?;
        let gm = metric_coords(p, shifted(c, l, -h))?;
        *d = (gp - gm) / (2.0 * h);
    }
    let mut gam = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += gi[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                }
                gam[k][i][j] = 0.5 * s;
            }
        }
    }
    Ok(gam)
}

pub fn christoffel_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<Christoffel> {
    check_chart(p)?;
    check_step(h)?;
    christoffel_coords(p, pt.coords(), h)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
    }
    Ok(())
}

/// Rᵃ_bcd with R(∂_c, ∂_d)∂_b = Rᵃ_bcd ∂_a and R(X,Y) = [∇_X, ∇_Y] − ∇_[X,Y].
pub fn riemann_coord_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<Tensor4> {
    check_chart(p)?;
    check_step(h)?;
    let c = pt.coords();
    let gam = christoffel_coords(p, c, h)?;
    let mut dgam = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        let gp = christoffel_coords(p, shifted(c, l, h), h)?;
        let gm = christoffel_coords(p, shifted(c, l, -h), h)?;
        for a in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    dgam[l][a][i][j] = (gp[a][i][j] - gm[a][i][j]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    let mut v = dgam[cc][a][d][b] - dgam[d][a][cc][b];
                    for e in 0..4 {
                        v += gam[a][cc][e] * gam[e][d][b] - gam[a][d][e] * gam[e][cc][b];
                    }
                    r[a][b][cc][d] = v;
                }
            }
        }
    }
    Ok(r)
}

/// The adapted orthonormal frame as coordinate vectors: e₁ = w/|w|, e₂ = Jw/|w|,
/// e₃ = u/√Q, e₄ = −v/√Q with w = ∂_x, Jw its horizontal rotation, u = ∂_s, v = Q∂_τ.
fn frame_coords(p: &SkrProfile, c: [f64; 4]) -> Result<[Vector4<f64>; 4]> {
    let [tau, _, x, _] = c;
    let (q, h, sigma) = chart_functions(p, tau)?;
    let sh = h.sqrt();
    let sq = q.sqrt();
    Ok([
        Vector4::new(0.0, 0.0, 1.0 / sh, 0.0),
        Vector4::new(0.0, -2.0 * sigma * x / sh, 0.0, 1.0 / sh),
        Vector4::new(0.0, 1.0 / sq, 0.0, 0.0),
        Vector4::new(-sq, 0.0, 0.0, 0.0),
    ])
}

pub fn frame_at(p: &SkrProfile, pt: &ChartPoint) -> Result<[Vector4<f64>; 4]> {
    check_chart(p)?;
    frame_coords(p, pt.coords())
}

/// R_ijkl = ⟨R(e_i, e_j)e_l, e_k⟩ in the adapted frame, so that R_abab is the
/// sectional curvature of the (e_a, e_b) plane.
pub fn riemann_frame_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<Tensor4> {
    let rc = riemann_coord_fd(p, pt, h)?;
    let g = metric_coords(p, pt.coords())?;
    let e = frame_coords(p, pt.coords())?;
    // Lower the first index: R_ebcd = g_ea Rᵃ_bcd.
    let mut low = [[[[0.0; 4]; 4]; 4]; 4];
    for ei in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    low[ei][b][c][d] = (0..4).map(|a| g[(ei, a)] * rc[a][b][c][d]).sum();
                }
            }
        }
    }
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut v = 0.0;
                    for ee in 0..4 {
                        for b in 0..4 {
                            for c in 0..4 {
                                for d in 0..4 {
                                    v += low[ee][b][c][d] * e[k][ee] * e[l][b] * e[i][c] * e[j][d];
                                }
                            }
                        }
                    }
                    out[i][j][k][l] = v;
                }
            }
        }
    }
    Ok(out)
}

/// ν[i][j][k] = g(∇_{e_k} e_i, e_j).
pub fn connection_forms_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<[[[f64; 4]; 4]; 4]> {
    check_chart(p)?;
    check_step(h)?;
    let c = pt.coords();
    let g = metric_coords(p, c)?;
    let gam = christoffel_coords(p, c, h)?;
    let e = frame_coords(p, c)?;
    let mut de = [[Vector4::zeros(); 4]; 4]; // de[l][i] = ∂_l e_i
    for l in 0..4 {
        let ep = frame_coords(p, shifted(c, l, h))?;
        let em = frame_coords(p, shifted(c, l, -h))?;
        for i in 0..4 {
            de[l][i] = (ep[i] - em[i]) / (2.0 * h);
        }
    }
    let mut nu = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            // ∇_{e_k} e_i
            let mut v = Vector4::zeros();
            for a in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += e[k][l] * de[l][i][a];
                    for b in 0..4 {
                        s += gam[a][l][b] * e[k][l] * e[i][b];
                    }
                }
                v[a] = s;
            }
            for j in 0..4 {
                nu[i][j][k] = (v.transpose() * g * e[j])[(0, 0)];
            }
        }
    }
    Ok(nu)
}

/// The complex structure Jᵃ_b assembled from the frame: Je₁ = e₂, Je₃ = e₄.
fn complex_structure(p: &SkrProfile, c: [f64; 4]) -> Result<Matrix4<f64>> {
    let g = metric_coords(p, c)?;
    let e = frame_coords(p, c)?;
    let co: Vec<_> = e.iter().map(|v| (g * v).transpose()).collect();
    Ok(e[1] * co[0] - e[0] * co[1] + e[3] * co[2] - e[2] * co[3])
}

/// max |∇_c Jᵃ_b| over all indices, in the orthonormal frame scale.
pub fn kahler_defect_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<f64> {
    check_chart(p)?;
    check_step(h)?;
    let c = pt.coords();
    let gam = christoffel_coords(p, c, h)?;
    let j = complex_structure(p, c)?;
    let e = frame_coords(p, c)?;
    let g = metric_coords(p, c)?;
    let mut nabla = [Matrix4::zeros(); 4];
    for l in 0..4 {
        let jp = complex_structure(p, shifted(c, l, h))?;
        let jm = complex_structure(p, shifted(c, l, -h))?;
        let mut m = (jp - jm) / (2.0 * h);
        for a in 0..4 {
            for b in 0..4 {
                for d in 0..4 {
                    m[(a, b)] += gam[a][l][d] * j[(d, b)] - gam[d][l][b] * j[(a, d)];
                }
            }
        }
        nabla[l] = m;
    }
    // Frame components g(e_i, (∇_{e_k} J) e_j).
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let dk: Matrix4<f64> = (0..4).map(|l| nabla[l] * e[k][l]).sum();
        for i in 0..4 {
            for jj in 0..4 {
                worst = worst.max((e[i].transpose() * g * dk * e[jj])[(0, 0)].abs());
            }
        }
    }
    Ok(worst)
}

/// |(∇_v v)^⊥| / |v|² with v = Q∂_τ; zero when integral curves of v are pre-geodesics.
pub fn pregeodesic_defect_fd(p: &SkrProfile, pt: &ChartPoint, h: f64) -> Result<f64> {
    check_chart(p)?;
    check_step(h)?;
    let c = pt.coords();
    let v_at = |cc: [f64; 4]| -> Result<Vector4<f64>> {
        let (q, _, _) = chart_functions(p, cc[0])?;
        Ok(Vector4::new(q, 0.0, 0.0, 0.0))
    };
    let v = v_at(c)?;
    let gam = christoffel_coords(p, c, h)?;
    let g = metric_coords(p, c)?;
    let mut acc = Vector4::zeros();
    for l in 0..4 {
        let dv = (v_at(shifted(c, l, h))? - v_at(shifted(c, l, -h))?) / (2.0 * h);
        acc += dv * v[l];
    }
    for a in 0..4 {
        for l in 0..4 {
            for b in 0..4 {
                acc[a] += gam[a][l][b] * v[l] * v[b];
            }
        }
    }
    let vv = (v.transpose() * g * v)[(0, 0)];
    let perp = acc - v * ((acc.transpose() * g * v)[(0, 0)] / vv);
    Ok((perp.transpose() * g * perp)[(0, 0)].sqrt() / vv)
}

/// Largest violation of the algebraic curvature symmetries (both antisymmetries,
/// pair symmetry and the first Bianchi identity).
pub fn symmetry_defect(r: &Tensor4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let v = r[i][j][k][l];
                    worst = worst
                        .max((v + r[j][i][k][l]).abs())
                        .max((v + r[i][j][l][k]).abs())
                        .max((v - r[k][l][i][j]).abs())
                        .max((v + r[j][k][i][l] + r[k][i][j][l]).abs());
                }
            }
        }
    }
    worst
}

/// Largest |R_ijkl| among components with exactly three indices in {3, 4}.
pub fn three_vertical_max(r: &Tensor4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let n = [i, j, k, l].iter().filter(|&&x| x >= 2).count();
                    if n == 3 {
                        worst = worst.max(r[i][j][k][l].abs());
                    }
                }
            }
        }
    }
    worst
}

/// The four-index array R_ijkl read off a curvature matrix: the e^{kl} coefficient
/// of entry (i, j), extended antisymmetrically in (k, l).
pub fn tensor_from_matrix(m: &crate::matforms::FormMatrix) -> Tensor4 {
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in k + 1..4 {
                    let v = m.get(i, j).get(&[k + 1, l + 1]);
                    out[i][j][k][l] = v;
                    out[i][j][l][k] = -v;
                }
            }
        }
    }
    out
}
