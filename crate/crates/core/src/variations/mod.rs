//! Numeric harness for volume variations of 4-dimensional immersions in
//! flat R⁷ (or T⁷) carrying the model G₂-structure.
//!
//! Families are explicit curves ι_t with exact chart derivatives, so the
//! mean curvature and the integrands are evaluated without differencing;
//! finite differences in t are reserved for the volume side, which serves
//! as the independent check.

mod checks;
mod family;
mod quadrature;

pub use checks::{
    classical_density_second_derivative, density_second_derivative_check, first_variation_check,
    moduli_fibration_demo, second_variation_check, volume_curve, write_csv, ClassicalDensity,
    CurvePoint, DensityReport, FirstVariationReport, G2FirstVariation, ModuliReport,
    SecondVariationReport,
};
pub use family::{Domain, ImmersionFamily, Jet, Point, REGISTRY};
pub use quadrature::{gauss_legendre, periodic_trapezoid, QuadratureSpec};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::Vector;

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant and inverse of a 4×4 matrix by Gauss–Jordan elimination.
fn invert4(g: &[[f64; 4]; 4]) -> Option<(f64, [[f64; 4]; 4])> {
    let mut a = *g;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for k in 0..4 {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for k in 0..4 {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some((det, inv))
}

/// Induced geometry of ι_t at one chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySample {
    pub u: [f64; 4],
    /// ∂_a ι_t.
    pub tangents: [Point; 4],
    /// First fundamental form g_ab.
    pub metric: [[f64; 4]; 4],
    pub metric_inverse: [[f64; 4]; 4],
    /// √det g, the density of ι_t* vol_t against du.
    pub density: f64,
    /// H = g^{ab} (∂_a∂_b ι_t)^⊥.
    pub mean_curvature: Point,
    /// Orthogonal projector onto the normal space.
    pub normal_projector: [[f64; 7]; 7],
    pub jet: Jet,
}

impl GeometrySample {
    pub fn normal_part(&self, v: &Point) -> Point {
        std::array::from_fn(|m| (0..7).map(|n| self.normal_projector[m][n] * v[n]).sum())
    }

    pub fn tangential_part(&self, v: &Point) -> Point {
        let n = self.normal_part(v);
        std::array::from_fn(|m| v[m] - n[m])
    }

    /// g^{ab} (P x_a)·(P y_b) for vector-valued 1-forms x, y and P the
    /// normal projector.
    pub(crate) fn normal_pairing(&self, x: &[Point; 4], y: &[Point; 4]) -> f64 {
        let xn: Vec<Point> = x.iter().map(|v| self.normal_part(v)).collect();
        let yn: Vec<Point> = y.iter().map(|v| self.normal_part(v)).collect();
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += self.metric_inverse[a][b] * dot(&xn[a], &yn[b]);
            }
        }
        s
    }

    /// g^{ac} g^{bd} (x_a·T_c)(x_b·T_d): the squared tangential norm of x.
    pub(crate) fn tangential_norm_sq(&self, x: &[Point; 4]) -> f64 {
        let m: [[f64; 4]; 4] =
            std::array::from_fn(|a| std::array::from_fn(|c| dot(&x[a], &self.tangents[c])));
        let gi = &self.metric_inverse;
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        s += gi[a][b] * gi[c][d] * m[a][c] * m[b][d];
                    }
                }
            }
        }
        s
    }
}

pub fn sample(fam: &ImmersionFamily, t: f64, u: &[f64; 4]) -> Result<GeometrySample> {
    let jet = fam.immersion(t, u);
    let tangents = jet.d1;
    let metric: [[f64; 4]; 4] =
        std::array::from_fn(|a| std::array::from_fn(|b| dot(&tangents[a], &tangents[b])));
    let scale: f64 = (0..4).map(|a| metric[a][a]).product();
    let degenerate = || Error::DegenerateMetric {
        location: u.to_vec(),
    };
    let (det, inv) = invert4(&metric).ok_or_else(degenerate)?;
    if !(det > 1e-12 * scale) {
        return Err(degenerate());
    }
    let mut proj = [[0.0; 7]; 7];
    for (m, row) in proj.iter_mut().enumerate() {
        row[m] = 1.0;
    }
    for a in 0..4 {
        for b in 0..4 {
            for m in 0..7 {
                for n in 0..7 {
                    proj[m][n] -= inv[a][b] * tangents[a][m] * tangents[b][n];
                }
            }
        }
    }
    let mut s = GeometrySample {
        u: *u,
        tangents,
        metric,
        metric_inverse: inv,
        density: det.sqrt(),
        mean_curvature: [0.0; 7],
        normal_projector: proj,
        jet,
    };
    let mut h = [0.0; 7];
    for a in 0..4 {
        for b in 0..4 {
            let n = s.normal_part(&jet.d2[a][b]);
            for m in 0..7 {
                h[m] += inv[a][b] * n[m];
            }
        }
    }
    s.mean_curvature = h;
    Ok(s)
}

/// Tensor-product quadrature of `f` over the family's chart. The outer
/// axis is split across threads; partial sums are added in axis order.
pub(crate) fn integrate<F>(fam: &ImmersionFamily, n: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64; 4]) -> Result<f64> + Sync,
{
    let axes = fam.axes(n);
    let partial: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut sum = 0.0;
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        let u = [axes[0].0[i0], axes[1].0[i1], axes[2].0[i2], axes[3].0[i3]];
                        let w = axes[0].1[i0] * axes[1].1[i1] * axes[2].1[i2] * axes[3].1[i3];
                        sum += w * f(&u)?;
                    }
                }
            }
            Ok(sum)
        })
        .collect();
    partial.into_iter().sum()
}

/// Largest value of `f` over the quadrature grid.
pub(crate) fn grid_max<F>(fam: &ImmersionFamily, n: usize, f: F) -> Result<(f64, [f64; 4])>
where
    F: Fn(&[f64; 4]) -> Result<f64> + Sync,
{
    let axes = fam.axes(n);
    let partial: Vec<Result<(f64, [f64; 4])>> = (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut best = (f64::NEG_INFINITY, [0.0; 4]);
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        let u = [axes[0].0[i0], axes[1].0[i1], axes[2].0[i2], axes[3].0[i3]];
                        let v = f(&u)?;
                        if v > best.0 {
                            best = (v, u);
                        }
                    }
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, [0.0; 4]);
    for p in partial {
        let p = p?;
        if p.0 > best.0 {
            best = p;
        }
    }
    Ok(best)
}

/// Vol(Σ_t) = ∫ √det g du.
pub fn volume(fam: &ImmersionFamily, t: f64, q: &QuadratureSpec) -> Result<f64> {
    integrate(fam, q.n, |u| Ok(sample(fam, t, u)?.density))
}

/// Mean curvature vector of Σ_t at chart point u.
pub fn mean_curvature(fam: &ImmersionFamily, t: f64, u: &[f64; 4]) -> Result<Vector<f64>> {
    Ok(Vector::new(sample(fam, t, u)?.mean_curvature.to_vec()))
}

/// Central difference of f at 0, optionally Richardson-extrapolated.
pub(crate) fn first_derivative(
    f: impl Fn(f64) -> Result<f64>,
    h: f64,
    richardson: bool,
) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    if richardson {
        Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
    } else {
        d(h)
    }
}

pub(crate) fn second_derivative(
    f: impl Fn(f64) -> Result<f64>,
    h: f64,
    richardson: bool,
) -> Result<f64> {
    let f0 = f(0.0)?;
    let d = |h: f64| -> Result<f64> { Ok((f(h)? - 2.0 * f0 + f(-h)?) / (h * h)) };
    if richardson {
        Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
    } else {
        d(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn affine_fiber_volume_is_one() {
        let fam = ImmersionFamily::from_name("affine-fiber").unwrap();
        let q = QuadratureSpec::new(8).unwrap();
        assert!((volume(&fam, 0.7, &q).unwrap() - 1.0).abs() < 1e-14);
        assert!(
            mean_curvature(&fam, 0.0, &[0.1, 0.2, 0.3, 0.4])
                .unwrap()
                .max_abs()
                < 1e-15
        );
    }

    #[test]
    fn sphere_volume_and_mean_curvature() {
        let r = 1.3;
        let fam = ImmersionFamily::Sphere { radius: r };
        let q = QuadratureSpec::new(32).unwrap();
        let v = volume(&fam, 0.0, &q).unwrap();
        let exact = 8.0 * PI * PI / 3.0 * r.powi(4);
        assert!(((v - exact) / exact).abs() < 1e-6);
        let u = [0.4, 2.1, 1.0, 4.0];
        let h = mean_curvature(&fam, 0.0, &u).unwrap();
        let x = fam.immersion(0.0, &u).val;
        assert!((h.norm_sq().sqrt() - 4.0 / r).abs() < 1e-6);
        // H points inward
        assert!(
            h.components()
                .iter()
                .zip(&x)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                < 0.0
        );
    }

    #[test]
    fn graph_at_zero_is_flat() {
        let fam = ImmersionFamily::from_name("graph").unwrap();
        let q = QuadratureSpec::new(8).unwrap();
        assert!((volume(&fam, 0.0, &q).unwrap() - 1.0).abs() < 1e-14);
        assert!(
            mean_curvature(&fam, 0.0, &[0.3, 0.1, 0.9, 0.5])
                .unwrap()
                .max_abs()
                < 1e-14
        );
    }

    #[test]
    fn degenerate_metric_reports_location() {
        let fam = ImmersionFamily::Sphere { radius: 1.0 };
        let e = sample(&fam, 0.0, &[0.0, 1.0, 1.0, 1.0]).unwrap_err();
        assert_eq!(
            e,
            Error::DegenerateMetric {
                location: vec![0.0, 1.0, 1.0, 1.0]
            }
        );
    }

    #[test]
    fn invert4_matches_identity() {
        let g = [
            [4.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 2.0, 0.1],
            [0.5, 0.0, 0.1, 1.0],
        ];
        let (det, inv) = invert4(&g).unwrap();
        assert!(det > 0.0);
        for i in 0..4 {
            for j in 0..4 {
                let p: f64 = (0..4).map(|k| g[i][k] * inv[k][j]).sum();
                assert!((p - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
