use crate::error::{Error, Result};

/// Grid resolution and finite-difference steps for the numeric harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per parameter axis.
    pub n: usize,
    /// Step in the family parameter t.
    pub h_t: f64,
    /// Step in the chart coordinates (used for divergences).
    pub h_u: f64,
    /// Combine steps h and h/2 by Richardson extrapolation.
    pub richardson: bool,
    /// |H| below this counts as minimal.
    pub minimal_tol: f64,
    /// |Zᵀ| below this counts as normal.
    pub normal_tol: f64,
}

impl QuadratureSpec {
    pub fn new(n: usize) -> Result<Self> {
        Self {
            n,
            ..Self::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.n < 8 {
            return Err(Error::Precondition(format!(
                "grid resolution {} is below 8",
                self.n
            )));
        }
        for (name, v) in [
            ("h_t", self.h_t),
            ("h_u", self.h_u),
            ("minimal_tol", self.minimal_tol),
            ("normal_tol", self.normal_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(self)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n: 16,
            h_t: 1e-3,
            h_u: 1e-4,
            richardson: false,
            minimal_tol: 1e-8,
            normal_tol: 1e-10,
        }
    }
}

/// Gauss–Legendre nodes and weights on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Periodic trapezoid nodes i·L/n with equal weights L/n.
pub fn periodic_trapezoid(n: usize, length: f64) -> (Vec<f64>, Vec<f64>) {
    let h = length / n as f64;
    ((0..n).map(|i| i as f64 * h).collect(), vec![h; n])
}
