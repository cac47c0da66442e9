use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Point = [f64; 7];

/// Value, first and second chart derivatives of a map into R⁷.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub val: Point,
    pub d1: [Point; 4],
    pub d2: [[Point; 4]; 4],
}

impl Jet {
    pub fn zero() -> Self {
        Self {
            val: [0.0; 7],
            d1: [[0.0; 7]; 4],
            d2: [[[0.0; 7]; 4]; 4],
        }
    }

    /// a + s·b, componentwise.
    pub fn add_scaled(&self, s: f64, b: &Jet) -> Jet {
        let mut out = *self;
        for m in 0..7 {
            out.val[m] += s * b.val[m];
            for a in 0..4 {
                out.d1[a][m] += s * b.d1[a][m];
                for c in 0..4 {
                    out.d2[a][c][m] += s * b.d2[a][c][m];
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// [0,1)⁴ with periodic identifications, embedded in T⁷ = R⁷/Z⁷.
    Torus,
    /// Spherical angles (θ₁, θ₂, θ₃, θ₄) ∈ [0,π]³ × [0,2π).
    Sphere,
}

/// A curve of immersions ι_t = p + t·z + ½t²·w of a 4-dimensional
/// parameter domain into flat R⁷ with the model G₂-structure. The variation
/// field is Z = z at t = 0 and ∇_Z Z = w.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ImmersionFamily {
    /// Coordinate fibres span(e₄…e₇) translated along a constant normal
    /// direction in span(e₁, e₂, e₃).
    AffineFiber { direction: [f64; 3] },
    /// The flat coassociative torus pushed along e₁ by amplitude·f(u), with
    /// tangential and normal acceleration scaled by `bend`.
    Graph { amplitude: f64, bend: f64 },
    /// Round S⁴ ⊂ span(e₁…e₅) of radius `radius + t`.
    Sphere { radius: f64 },
    /// The flat coassociative torus reparametrized by u ↦ u + t·v(u).
    Tangential { amplitude: f64 },
}

pub const REGISTRY: [&str; 4] = ["affine-fiber", "graph", "sphere", "tangential"];

/// c·trig(2π k·u) placed in ambient coordinate `axis`.
struct Wave {
    axis: usize,
    coeff: f64,
    k: [i32; 4],
    cos: bool,
}

impl Wave {
    fn add_to(&self, jet: &mut Jet, u: &[f64; 4]) {
        let s = 2.0 * PI;
        let phase = s * (0..4).map(|a| self.k[a] as f64 * u[a]).sum::<f64>();
        let (sn, cs) = phase.sin_cos();
        // derivatives of sin: cos, −sin; of cos: −sin, −cos
        let (v0, v1, v2) = if self.cos {
            (cs, -sn, -cs)
        } else {
            (sn, cs, -sn)
        };
        let m = self.axis;
        jet.val[m] += self.coeff * v0;
        for a in 0..4 {
            let ka = self.k[a] as f64 * s;
            jet.d1[a][m] += self.coeff * ka * v1;
            for b in 0..4 {
                jet.d2[a][b][m] += self.coeff * ka * self.k[b] as f64 * s * v2;
            }
        }
    }
}

fn waves(list: &[Wave], u: &[f64; 4], scale: f64) -> Jet {
    let mut j = Jet::zero();
    for w in list {
        w.add_to(&mut j, u);
    }
    Jet::zero().add_scaled(scale, &j)
}

/// u ↦ Σ u_a e_{4+a}.
fn fibre(u: &[f64; 4]) -> Jet {
    let mut j = Jet::zero();
    for a in 0..4 {
        j.val[3 + a] = u[a];
        j.d1[a][3 + a] = 1.0;
    }
    j
}

/// Unit S⁴ ⊂ span(e₁…e₅) in spherical angles. Coordinate m is the product
/// over angles k of FACTORS[m][k] ∈ {1, sin, cos}.
fn unit_sphere(u: &[f64; 4]) -> Jet {
    const ONE: u8 = 0;
    const SIN: u8 = 1;
    const COS: u8 = 2;
    const FACTORS: [[u8; 4]; 5] = [
        [COS, ONE, ONE, ONE],
        [SIN, COS, ONE, ONE],
        [SIN, SIN, COS, ONE],
        [SIN, SIN, SIN, COS],
        [SIN, SIN, SIN, SIN],
    ];
    // derivative table: [factor kind][order]
    let table: Vec<[[f64; 3]; 3]> = u
        .iter()
        .map(|&th| {
            let (s, c) = th.sin_cos();
            [[1.0, 0.0, 0.0], [s, c, -s], [c, -s, -c]]
        })
        .collect();
    let eval = |m: usize, orders: [usize; 4]| -> f64 {
        (0..4)
            .map(|k| table[k][FACTORS[m][k] as usize][orders[k]])
            .product()
    };
    let mut j = Jet::zero();
    for m in 0..5 {
        j.val[m] = eval(m, [0; 4]);
        for a in 0..4 {
            let mut o = [0; 4];
            o[a] += 1;
            j.d1[a][m] = eval(m, o);
            for b in 0..4 {
                let mut o2 = o;
                o2[b] += 1;
                j.d2[a][b][m] = eval(m, o2);
            }
        }
    }
    j
}

impl ImmersionFamily {
    /// Registry entry with its default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "affine-fiber" => Ok(Self::AffineFiber {
                direction: [0.6, -0.3, 0.2],
            }),
            "graph" => Ok(Self::Graph {
                amplitude: 0.1,
                bend: 0.05,
            }),
            "sphere" => Ok(Self::Sphere { radius: 1.0 }),
            "tangential" => Ok(Self::Tangential { amplitude: 0.05 }),
            other => Err(Error::Precondition(format!(
                "unknown family `{other}` (known: {})",
                REGISTRY.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::AffineFiber { .. } => "affine-fiber",
            Self::Graph { .. } => "graph",
            Self::Sphere { .. } => "sphere",
            Self::Tangential { .. } => "tangential",
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Self::Sphere { .. } => Domain::Sphere,
            _ => Domain::Torus,
        }
    }

    /// Families moving coassociative fibres through their moduli space.
    pub fn is_moduli_family(&self) -> bool {
        matches!(self, Self::AffineFiber { .. })
    }

    /// The jets of (p, z, w) at chart point u.
    pub fn fields(&self, u: &[f64; 4]) -> [Jet; 3] {
        match self {
            Self::AffineFiber { direction } => {
                let mut z = Jet::zero();
                z.val[..3].copy_from_slice(direction);
                [fibre(u), z, Jet::zero()]
            }
            Self::Graph { amplitude, bend } => {
                // f = sin(2πu₁)cos(2πu₂) + ½ sin(2π(u₃+u₄))
                let f = [
                    Wave {
                        axis: 0,
                        coeff: 0.5,
                        k: [1, 1, 0, 0],
                        cos: false,
                    },
                    Wave {
                        axis: 0,
                        coeff: 0.5,
                        k: [1, -1, 0, 0],
                        cos: false,
                    },
                    Wave {
                        axis: 0,
                        coeff: 0.5,
                        k: [0, 0, 1, 1],
                        cos: false,
                    },
                ];
                let w = [
                    Wave {
                        axis: 3,
                        coeff: 1.0,
                        k: [1, 0, 0, 0],
                        cos: false,
                    },
                    Wave {
                        axis: 1,
                        coeff: 1.0,
                        k: [0, 0, 1, 0],
                        cos: true,
                    },
                ];
                [fibre(u), waves(&f, u, *amplitude), waves(&w, u, *bend)]
            }
            Self::Sphere { radius } => {
                let x = unit_sphere(u);
                [Jet::zero().add_scaled(*radius, &x), x, Jet::zero()]
            }
            Self::Tangential { amplitude } => {
                let v = [
                    Wave {
                        axis: 3,
                        coeff: 1.0,
                        k: [0, 1, 0, 0],
                        cos: false,
                    },
                    Wave {
                        axis: 4,
                        coeff: 1.0,
                        k: [0, 0, 1, 0],
                        cos: true,
                    },
                    Wave {
                        axis: 5,
                        coeff: 1.0,
                        k: [1, 0, 0, 1],
                        cos: false,
                    },
                    Wave {
                        axis: 6,
                        coeff: 1.0,
                        k: [1, 0, 0, 0],
                        cos: true,
                    },
                ];
                [fibre(u), waves(&v, u, *amplitude), Jet::zero()]
            }
        }
    }

    /// Jet of ι_t at u.
    pub fn immersion(&self, t: f64, u: &[f64; 4]) -> Jet {
        let [p, z, w] = self.fields(u);
        p.add_scaled(t, &z).add_scaled(0.5 * t * t, &w)
    }

    /// Jet of ∂_t ι_t at u.
    pub fn velocity(&self, t: f64, u: &[f64; 4]) -> Jet {
        let [_, z, w] = self.fields(u);
        z.add_scaled(t, &w)
    }

    /// Per-axis quadrature nodes and weights.
    pub fn axes(&self, n: usize) -> [(Vec<f64>, Vec<f64>); 4] {
        use super::quadrature::{gauss_legendre, periodic_trapezoid};
        match self.domain() {
            Domain::Torus => std::array::from_fn(|_| periodic_trapezoid(n, 1.0)),
            Domain::Sphere => [
                gauss_legendre(n, 0.0, PI),
                gauss_legendre(n, 0.0, PI),
                gauss_legendre(n, 0.0, PI),
                periodic_trapezoid(n, 2.0 * PI),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(fam: &ImmersionFamily, u: [f64; 4]) {
        let h = 1e-5;
        let j = fam.immersion(0.3, &u);
        for a in 0..4 {
            let mut up = u;
            let mut um = u;
            up[a] += h;
            um[a] -= h;
            let (jp, jm) = (fam.immersion(0.3, &up), fam.immersion(0.3, &um));
            for m in 0..7 {
                assert!(((jp.val[m] - jm.val[m]) / (2.0 * h) - j.d1[a][m]).abs() < 1e-6);
                for b in 0..4 {
                    assert!(((jp.d1[b][m] - jm.d1[b][m]) / (2.0 * h) - j.d2[a][b][m]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn exact_derivatives_match_differences() {
        for name in REGISTRY {
            fd_check(
                &ImmersionFamily::from_name(name).unwrap(),
                [0.31, 1.1, 0.7, 2.3],
            );
        }
    }

    #[test]
    fn sphere_has_radius() {
        let fam = ImmersionFamily::Sphere { radius: 2.0 };
        let j = fam.immersion(0.5, &[0.4, 1.3, 2.0, 5.0]);
        let r: f64 = j.val.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - 2.5).abs() < 1e-14);
    }

    #[test]
    fn unknown_family_lists_registry() {
        let e = ImmersionFamily::from_name("helix").unwrap_err().to_string();
        assert!(e.contains("affine-fiber") && e.contains("tangential"));
    }
}
