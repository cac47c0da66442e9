use std::io::Write;

use serde::Serialize;

use super::{
    dot, first_derivative, grid_max, integrate, sample, second_derivative, volume, GeometrySample,
    ImmersionFamily, Point, QuadratureSpec,
};
use crate::error::{Error, Result};
use crate::exterior::{anti_self_dual_part, KForm, OrientedPlane, Vector};
use crate::g2::{normal_to_selfdual, CoassocFrame, G2Structure, SymTensor2};
use crate::identities::{first_variation_density, secvar_integrand, ShapeData, VariationPointData};
use crate::linalg::Matrix;

/// |ψ(T)/vol − 1| below this counts as coassociative.
const COASSOC_TOL: f64 = 1e-8;

fn vectors(t: &[Point; 4]) -> [Vector<f64>; 4] {
    std::array::from_fn(|a| Vector::new(t[a].to_vec()))
}

fn norm(v: &Point) -> f64 {
    dot(v, v).sqrt()
}

fn calibration_defect(g2: &G2Structure<f64>, s: &GeometrySample) -> Result<f64> {
    Ok((g2.psi_value(&vectors(&s.tangents))? / s.density - 1.0).abs())
}

fn frame_at(g2: &G2Structure<f64>, s: &GeometrySample) -> Result<CoassocFrame<f64>> {
    CoassocFrame::new(g2, OrientedPlane::new(vectors(&s.tangents).to_vec())?)
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// ∇_{E_a} Z in the oriented orthonormal basis E of the tangent plane,
/// as the 4×4 matrix of tangential components (column a is the image of
/// E_a) together with the full vectors.
fn frame_derivatives(
    s: &GeometrySample,
    frame: &CoassocFrame<f64>,
    dz: &[Point; 4],
) -> (Matrix<f64>, Vec<Point>) {
    let onb: Vec<Point> = frame
        .plane()
        .onb()
        .iter()
        .map(|e| std::array::from_fn(|m| e.components()[m]))
        .collect();
    let images: Vec<Point> = onb
        .iter()
        .map(|e| {
            // E = Σ_b c_b T_b with c = g⁻¹ (T·E)
            let te: [f64; 4] = std::array::from_fn(|c| dot(&s.tangents[c], e));
            let mut out = [0.0; 7];
            for b in 0..4 {
                let cb: f64 = (0..4).map(|c| s.metric_inverse[b][c] * te[c]).sum();
                for m in 0..7 {
                    out[m] += cb * dz[b][m];
                }
            }
            out
        })
        .collect();
    let mut mat = Matrix::zeros(4, 4);
    for (a, img) in images.iter().enumerate() {
        for (d, e) in onb.iter().enumerate() {
            mat[(d, a)] = dot(img, e);
        }
    }
    (mat, images)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G2FirstVariation {
    /// ∫ τ₂|Σ⁺ ∧ (Z^⊥⌟φ)|Σ with τ₂ = 0 in the flat model.
    pub tau2_integral: f64,
    /// max over the grid of |ι*ψ / vol − 1|.
    pub calibration_defect_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstVariationReport {
    pub family: String,
    pub volume: f64,
    /// Central difference of Vol(Σ_t) at t = 0.
    pub dvol_fd: f64,
    /// −∫ H·Z^⊥.
    pub h_integral: f64,
    pub mismatch: f64,
    pub relative_mismatch: f64,
    /// Present when Σ₀ is coassociative.
    pub g2: Option<G2FirstVariation>,
}

pub fn first_variation_check(
    fam: &ImmersionFamily,
    q: &QuadratureSpec,
) -> Result<FirstVariationReport> {
    let q = q.validated()?;
    let g2 = G2Structure::<f64>::model();
    let vol0 = volume(fam, 0.0, &q)?;
    let dvol_fd = first_derivative(|t| volume(fam, t, &q), q.h_t, q.richardson)?;
    let h_integral = -integrate(fam, q.n, |u| {
        let s = sample(fam, 0.0, u)?;
        Ok(dot(&s.mean_curvature, &s.normal_part(&s.jet_velocity(fam))) * s.density)
    })?;
    let (defect, _) = grid_max(fam, q.n, |u| calibration_defect(&g2, &sample(fam, 0.0, u)?))?;
    let g2_part = if defect <= COASSOC_TOL {
        let zero = KForm::zero(7, 2);
        let tau2_integral = integrate(fam, q.n, |u| {
            let s = sample(fam, 0.0, u)?;
            let frame = frame_at(&g2, &s)?;
            let zn = Vector::new(s.normal_part(&s.jet_velocity(fam)).to_vec());
            let fv = first_variation_density(&g2, &zero, &zn, &frame)?;
            Ok(fv.density.top_coeff()? * s.density)
        })?;
        Some(G2FirstVariation {
            tau2_integral,
            calibration_defect_max: defect,
        })
    } else {
        None
    };
    Ok(FirstVariationReport {
        family: fam.name().into(),
        volume: vol0,
        dvol_fd,
        h_integral,
        mismatch: (dvol_fd - h_integral).abs(),
        relative_mismatch: relative(dvol_fd, h_integral),
        g2: g2_part,
    })
}

impl GeometrySample {
    /// Z = ∂_t ι_t at this sample's chart point, assuming t = 0.
    fn jet_velocity(&self, fam: &ImmersionFamily) -> Point {
        fam.velocity(0.0, &self.u).val
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondVariationReport {
    pub family: String,
    /// Second central difference of Vol(Σ_t) at t = 0.
    pub d2vol_fd: f64,
    /// ∫ (−|(∇Z)ᵀ|² + |(∇Z)^⊥|²), the flat-space integrand.
    pub integrand_integral: f64,
    pub mismatch: f64,
    pub relative_mismatch: f64,
    pub max_mean_curvature: f64,
    /// ∫ of the coassociative integrand τ₂∧γ_Z − (2Ric(Z,Z) + |Z|²tr Ric|Σ)
    /// with τ₂ = 0, Ric = 0; only for moduli families.
    pub theorem_rhs: Option<f64>,
}

fn require_minimal_normal(fam: &ImmersionFamily, q: &QuadratureSpec) -> Result<f64> {
    let (max_h, _) = grid_max(fam, q.n, |u| Ok(norm(&sample(fam, 0.0, u)?.mean_curvature)))?;
    if max_h > q.minimal_tol {
        return Err(Error::NotMinimal { max_h });
    }
    let (zt, at) = grid_max(fam, q.n, |u| {
        let s = sample(fam, 0.0, u)?;
        let z = s.jet_velocity(fam);
        Ok(norm(&s.tangential_part(&z)) / (1.0 + norm(&z)))
    })?;
    if zt > q.normal_tol {
        return Err(Error::Precondition(format!(
            "variation field is not normal: |Zᵀ| = {zt:.3e} at {at:?}"
        )));
    }
    Ok(max_h)
}

pub fn second_variation_check(
    fam: &ImmersionFamily,
    q: &QuadratureSpec,
) -> Result<SecondVariationReport> {
    let q = q.validated()?;
    let max_h = require_minimal_normal(fam, &q)?;
    let d2vol_fd = second_derivative(|t| volume(fam, t, &q), q.h_t, q.richardson)?;
    let integrand_integral = integrate(fam, q.n, |u| {
        let s = sample(fam, 0.0, u)?;
        let dz = fam.velocity(0.0, u).d1;
        Ok((s.normal_pairing(&dz, &dz) - s.tangential_norm_sq(&dz)) * s.density)
    })?;
    let theorem_rhs = if fam.is_moduli_family() {
        let g2 = G2Structure::<f64>::model();
        Some(integrate(fam, q.n, |u| {
            let s = sample(fam, 0.0, u)?;
            let frame = frame_at(&g2, &s)?;
            let (dz_t, _) = frame_derivatives(&s, &frame, &fam.velocity(0.0, u).d1);
            let z = Vector::new(s.jet_velocity(fam).to_vec());
            let d = VariationPointData::new(
                &g2,
                KForm::zero(7, 2),
                SymTensor2::zero(7),
                z,
                ShapeData::new(frame, dz_t)?,
            )?;
            Ok(secvar_integrand(&g2, &d)?.top_coeff()? * s.density)
        })?)
    } else {
        None
    };
    Ok(SecondVariationReport {
        family: fam.name().into(),
        d2vol_fd,
        integrand_integral,
        mismatch: (d2vol_fd - integrand_integral).abs(),
        relative_mismatch: relative(d2vol_fd, integrand_integral),
        max_mean_curvature: max_h,
        theorem_rhs,
    })
}

/// The terms of the classical f''(0) for normal Z in flat ambient space
/// (the curvature term vanishes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalDensity {
    /// −Σ g(∇_{e_i}e_j, Z)².
    pub second_fundamental: f64,
    /// div_Σ((∇_Z Z)ᵀ), by central differences in the chart.
    pub divergence: f64,
    /// −g(H, (∇_Z Z)^⊥).
    pub h_acceleration: f64,
    /// Σ ((∇_{e_i}Z)·f_j)².
    pub normal_gradient: f64,
    /// g(H, Z)².
    pub h_z: f64,
    pub total: f64,
}

pub fn classical_density_second_derivative(
    fam: &ImmersionFamily,
    q: &QuadratureSpec,
    u: &[f64; 4],
) -> Result<ClassicalDensity> {
    let q = q.validated()?;
    let s = sample(fam, 0.0, u)?;
    let [_, zj, wj] = fam.fields(u);
    let z = zj.val;
    if norm(&s.tangential_part(&z)) > q.normal_tol * (1.0 + norm(&z)) {
        return Err(Error::Precondition(format!(
            "variation field is not normal at {u:?}"
        )));
    }
    let gi = s.metric_inverse;
    let ii: [[f64; 4]; 4] =
        std::array::from_fn(|a| std::array::from_fn(|b| dot(&s.jet.d2[a][b], &z)));
    let mut second_fundamental = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    second_fundamental -= gi[a][c] * gi[b][d] * ii[a][b] * ii[c][d];
                }
            }
        }
    }
    // Y^a = √g g^{ab} (w·T_b); div = (1/√g) ∂_a Y^a
    let flux = |v: &[f64; 4], a: usize| -> Result<f64> {
        let sv = sample(fam, 0.0, v)?;
        let w = fam.fields(v)[2].val;
        Ok(sv.density
            * (0..4)
                .map(|b| sv.metric_inverse[a][b] * dot(&w, &sv.tangents[b]))
                .sum::<f64>())
    };
    let mut divergence = 0.0;
    for a in 0..4 {
        let mut up = *u;
        let mut um = *u;
        up[a] += q.h_u;
        um[a] -= q.h_u;
        divergence += (flux(&up, a)? - flux(&um, a)?) / (2.0 * q.h_u);
    }
    divergence /= s.density;
    let h_acceleration = -dot(&s.mean_curvature, &wj.val);
    let normal_gradient = s.normal_pairing(&zj.d1, &zj.d1);
    let h_z = dot(&s.mean_curvature, &z).powi(2);
    Ok(ClassicalDensity {
        second_fundamental,
        divergence,
        h_acceleration,
        normal_gradient,
        h_z,
        total: second_fundamental + divergence + h_acceleration + normal_gradient + h_z,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub family: String,
    pub u: [f64; 4],
    /// Second central difference of f(t) = √det g(t) / √det g(0).
    pub direct: f64,
    pub classical: ClassicalDensity,
    /// ψ̈ + |C_Z|², on an orthonormal frame.
    pub coassociative: f64,
    /// ψ̈: second t-derivative of ψ on the moving tangent frame.
    pub psi_ddot: f64,
    /// |C_Z|², C_Z = d/dt C(ι_t* e₁, …, ι_t* e₄) by central differences.
    pub c_z_sq: f64,
    pub direct_vs_classical: f64,
    pub direct_vs_coassociative: f64,
    pub classical_vs_coassociative: f64,
}

pub fn density_second_derivative_check(
    fam: &ImmersionFamily,
    q: &QuadratureSpec,
    u: &[f64; 4],
) -> Result<DensityReport> {
    let q = q.validated()?;
    let g2 = G2Structure::<f64>::model();
    let s0 = sample(fam, 0.0, u)?;
    let defect = calibration_defect(&g2, &s0)?;
    if defect > COASSOC_TOL {
        return Err(Error::NotCoassociative(format!(
            "|ψ/vol − 1| = {defect:.3e} at {u:?}"
        )));
    }
    let max_h = norm(&s0.mean_curvature);
    if max_h > q.minimal_tol {
        return Err(Error::NotMinimal { max_h });
    }
    let classical = classical_density_second_derivative(fam, &q, u)?;
    let f0 = s0.density;
    let direct = second_derivative(|t| Ok(sample(fam, t, u)?.density / f0), q.h_t, q.richardson)?;

    let [_, zj, wj] = fam.fields(u);
    let t0 = s0.tangents;
    let psi_with = |repl: &[(usize, Point)]| -> Result<f64> {
        let mut t = t0;
        for (a, v) in repl {
            t[*a] = *v;
        }
        g2.psi_value(&vectors(&t))
    };
    let mut psi_dd = 0.0;
    for a in 0..4 {
        psi_dd += psi_with(&[(a, wj.d1[a])])?;
        for b in a + 1..4 {
            psi_dd += 2.0 * psi_with(&[(a, zj.d1[a]), (b, zj.d1[b])])?;
        }
    }
    let coassoc_at =
        |t: f64| -> Result<Vector<f64>> { g2.coassociator(&vectors(&fam.immersion(t, u).d1)) };
    let c_dot = |h: f64| -> Result<Vector<f64>> {
        Ok((&coassoc_at(h)? - &coassoc_at(-h)?).scale(&(1.0 / (2.0 * h))))
    };
    let cz = if q.richardson {
        let (a, b) = (c_dot(q.h_t / 2.0)?, c_dot(q.h_t)?);
        (&a.scale(&4.0) - &b).scale(&(1.0 / 3.0))
    } else {
        c_dot(q.h_t)?
    };
    let psi_ddot = psi_dd / f0;
    let c_z_sq = cz.norm_sq() / (f0 * f0);
    let coassociative = psi_ddot + c_z_sq;
    Ok(DensityReport {
        family: fam.name().into(),
        u: *u,
        direct,
        direct_vs_classical: (direct - classical.total).abs(),
        direct_vs_coassociative: (direct - coassociative).abs(),
        classical_vs_coassociative: (classical.total - coassociative).abs(),
        classical,
        coassociative,
        psi_ddot,
        c_z_sq,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliReport {
    /// (Z_i⌟φ)|fibre for Z_i = e₁, e₂, e₃.
    pub forms: Vec<String>,
    /// max over the grid of the change of each form from its value at u = 0.
    pub constancy_residual: f64,
    /// max |anti-self-dual part|.
    pub selfdual_residual: f64,
    pub gram: [[f64; 3]; 3],
    /// max |Gram − 2·id|.
    pub gram_residual: f64,
    /// Fibre volumes along a path through the base.
    pub volumes: Vec<f64>,
    pub volume_spread: f64,
    pub calibration_defect_max: f64,
}

/// The flat fibration T⁷ → T³ by coassociative fibres span(e₄…e₇).
pub fn moduli_fibration_demo(q: &QuadratureSpec) -> Result<ModuliReport> {
    let q = q.validated()?;
    let g2 = G2Structure::<f64>::model();
    let fam = ImmersionFamily::AffineFiber {
        direction: [0.3, -0.2, 0.5],
    };
    let normals: Vec<Vector<f64>> = (0..3).map(|i| Vector::basis(7, i)).collect();
    let forms_at = |u: &[f64; 4]| -> Result<Vec<KForm<f64>>> {
        let frame = frame_at(&g2, &sample(&fam, 0.0, u)?)?;
        normals
            .iter()
            .map(|z| normal_to_selfdual(&g2, z, &frame))
            .collect()
    };
    let origin = forms_at(&[0.0; 4])?;
    let (constancy_residual, _) = grid_max(&fam, q.n, |u| {
        let f = forms_at(u)?;
        Ok(f.iter()
            .zip(&origin)
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max))
    })?;
    let mut selfdual_residual: f64 = 0.0;
    for f in &origin {
        selfdual_residual = selfdual_residual.max(anti_self_dual_part(f)?.max_abs());
    }
    let mut gram = [[0.0; 3]; 3];
    let mut gram_residual: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            gram[i][j] = origin[i].inner(&origin[j])?;
            let target = if i == j { 2.0 } else { 0.0 };
            gram_residual = gram_residual.max((gram[i][j] - target).abs());
        }
    }
    let mut volumes = Vec::new();
    let mut calibration_defect_max: f64 = 0.0;
    for step in 0..=10 {
        let t = step as f64 / 10.0;
        volumes.push(volume(&fam, t, &q)?);
        let (d, _) = grid_max(&fam, q.n, |u| calibration_defect(&g2, &sample(&fam, t, u)?))?;
        calibration_defect_max = calibration_defect_max.max(d);
    }
    let lo = volumes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = volumes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ModuliReport {
        forms: origin.iter().map(|f| f.to_string()).collect(),
        constancy_residual,
        selfdual_residual,
        gram,
        gram_residual,
        volumes,
        volume_spread: hi - lo,
        calibration_defect_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub volume: f64,
    pub d_volume: f64,
    pub d2_volume: f64,
}

/// Vol(Σ_t) with its first and second central differences at each t.
pub fn volume_curve(
    fam: &ImmersionFamily,
    q: &QuadratureSpec,
    ts: &[f64],
) -> Result<Vec<CurvePoint>> {
    let q = q.validated()?;
    ts.iter()
        .map(|&t| {
            let v = |s: f64| volume(fam, t + s, &q);
            Ok(CurvePoint {
                t,
                volume: v(0.0)?,
                d_volume: first_derivative(v, q.h_t, q.richardson)?,
                d2_volume: second_derivative(v, q.h_t, q.richardson)?,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[CurvePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,vol,dvol,d2vol")?;
    for r in rows {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            r.t, r.volume, r.d_volume, r.d2_volume
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_first_variation() {
        let fam = ImmersionFamily::Sphere { radius: 1.0 };
        let q = QuadratureSpec::new(16).unwrap();
        let r = first_variation_check(&fam, &q).unwrap();
        let exact = 32.0 * PI * PI / 3.0;
        assert!(((r.h_integral - exact) / exact).abs() < 1e-9);
        assert!(r.relative_mismatch < 1e-5);
        assert!(r.g2.is_none());
    }

    #[test]
    fn affine_and_tangential_first_variation_vanish() {
        let q = QuadratureSpec::new(8).unwrap();
        for name in ["affine-fiber", "tangential"] {
            let r = first_variation_check(&ImmersionFamily::from_name(name).unwrap(), &q).unwrap();
            assert!(r.dvol_fd.abs() < 1e-10, "{name}: {}", r.dvol_fd);
            assert!(r.h_integral.abs() < 1e-12);
            let g = r.g2.unwrap();
            assert_eq!(g.tau2_integral, 0.0);
            assert!(g.calibration_defect_max < 1e-12);
        }
    }

    #[test]
    fn graph_second_variation_matches_gradient_energy() {
        let fam = ImmersionFamily::Graph {
            amplitude: 0.1,
            bend: 0.05,
        };
        let q = QuadratureSpec::new(8).unwrap();
        let r = second_variation_check(&fam, &q).unwrap();
        assert!((r.integrand_integral - 0.03 * PI * PI).abs() < 1e-12);
        assert!(r.mismatch < 1e-4, "{r:?}");
        assert!(r.relative_mismatch < 1e-5, "{r:?}");
        let double = ImmersionFamily::Graph {
            amplitude: 0.2,
            bend: 0.2,
        };
        let r2 = second_variation_check(&double, &q).unwrap();
        assert!((r2.integrand_integral / r.integrand_integral - 4.0).abs() < 1e-12);
        assert!((r2.d2vol_fd / r.d2vol_fd - 4.0).abs() < 1e-4);
        assert!(r.theorem_rhs.is_none());
    }

    #[test]
    fn second_variation_preconditions() {
        let q = QuadratureSpec::new(8).unwrap();
        let sphere =
            second_variation_check(&ImmersionFamily::Sphere { radius: 2.0 }, &q).unwrap_err();
        assert!(matches!(sphere, Error::NotMinimal { max_h } if (max_h - 2.0).abs() < 1e-9));
        let tang = second_variation_check(&ImmersionFamily::from_name("tangential").unwrap(), &q);
        assert!(matches!(tang, Err(Error::Precondition(_))));
    }

    #[test]
    fn moduli_motion_has_zero_second_variation() {
        let q = QuadratureSpec::new(8).unwrap();
        let r = second_variation_check(&ImmersionFamily::from_name("affine-fiber").unwrap(), &q)
            .unwrap();
        assert!(r.d2vol_fd.abs() < 1e-10);
        assert_eq!(r.theorem_rhs, Some(0.0));
    }

    #[test]
    fn classical_density_on_sphere() {
        let r = 1.5;
        let fam = ImmersionFamily::Sphere { radius: r };
        let q = QuadratureSpec::new(8).unwrap();
        let c = classical_density_second_derivative(&fam, &q, &[0.7, 1.2, 2.0, 3.0]).unwrap();
        // f(t) = ((r+t)/r)⁴
        assert!((c.total - 12.0 / (r * r)).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn density_three_ways_on_graph() {
        let fam = ImmersionFamily::from_name("graph").unwrap();
        let q = QuadratureSpec::new(8).unwrap();
        let r = density_second_derivative_check(&fam, &q, &[0.1, 0.35, 0.6, 0.2]).unwrap();
        assert!(r.direct_vs_classical < 1e-4, "{r:?}");
        assert!(r.direct_vs_coassociative < 1e-4, "{r:?}");
        assert!((r.c_z_sq - r.classical.normal_gradient).abs() < 1e-4);
        assert!(r.classical.divergence.abs() > 0.01);
    }

    #[test]
    fn moduli_demo() {
        let r = moduli_fibration_demo(&QuadratureSpec::new(8).unwrap()).unwrap();
        assert_eq!(r.forms[0], "(1)e12 + (1)e34");
        assert!(r.gram_residual < 1e-14);
        assert!(r.volume_spread < 1e-12);
        assert_eq!(r.constancy_residual, 0.0);
    }

    #[test]
    fn csv_uses_plain_decimal_format() {
        let rows = [CurvePoint {
            t: 0.5,
            volume: 1.0,
            d_volume: -0.25,
            d2_volume: 0.0,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,vol,dvol,d2vol\n5e-1,1e0,-2.5e-1,0e0\n"
        );
    }
}
