//! Smooth reference solution of the three-field Stokes system used by the
//! convergence and sliver experiments.

use crate::error::{Error, Result};
use crate::scalar::{Real, Vec2};

/// Divergence-free sin-cos flow with matching stress, pressure and body force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution<T> {
    pub eta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Velocity,
    Pressure,
    Stress,
    BodyForce,
    BoundaryData,
}

impl<T: Real> ManufacturedSolution<T> {
    pub fn new(eta: T) -> Self {
        Self { eta }
    }

    pub fn velocity(&self, x: Vec2<T>) -> Vec2<T> {
        let (px, py) = (T::PI() * x[0], T::PI() * x[1]);
        [-py.sin() * px.cos(), px.sin() * py.cos()]
    }

    pub fn pressure(&self, x: Vec2<T>) -> T {
        let (px, py) = (T::PI() * x[0], T::PI() * x[1]);
        -T::lit(2.0) * self.eta * px.cos() * py.sin()
    }

    pub fn stress(&self, x: Vec2<T>) -> [[T; 2]; 2] {
        let (px, py) = (T::PI() * x[0], T::PI() * x[1]);
        let d = T::lit(2.0) * T::PI() * self.eta * px.sin() * py.sin();
        [[d, T::zero()], [T::zero(), -d]]
    }

    /// Body force in closed form.
    pub fn body_force(&self, x: Vec2<T>) -> Vec2<T> {
        let pi = T::PI();
        let two = T::lit(2.0);
        let eta = self.eta;
        let (sx, cx) = (pi * x[0]).sin_cos();
        let (sy, cy) = (pi * x[1]).sin_cos();
        [
            two * pi * eta * sx * sy - two * pi * pi * eta * sy * cx,
            two * pi * pi * eta * sx * cy - two * pi * eta * cx * cy,
        ]
    }

    /// Dirichlet data: the trace of the velocity.
    pub fn boundary_data(&self, x: Vec2<T>) -> Vec2<T> {
        self.velocity(x)
    }

    /// Velocity gradient `[i][j] = d u_i / d x_j`.
    pub fn velocity_gradient(&self, x: Vec2<T>) -> [[T; 2]; 2] {
        let pi = T::PI();
        let (sx, cx) = (pi * x[0]).sin_cos();
        let (sy, cy) = (pi * x[1]).sin_cos();
        [[pi * sy * sx, -pi * cy * cx], [pi * cx * cy, -pi * sx * sy]]
    }

    pub fn pressure_gradient(&self, x: Vec2<T>) -> Vec2<T> {
        let pi = T::PI();
        let two = T::lit(2.0);
        let (sx, cx) = (pi * x[0]).sin_cos();
        let (sy, cy) = (pi * x[1]).sin_cos();
        [
            two * self.eta * pi * sx * sy,
            -two * self.eta * pi * cx * cy,
        ]
    }

    /// Divergence of the stress, differentiated by hand from `stress`.
    pub fn stress_divergence(&self, x: Vec2<T>) -> Vec2<T> {
        let pi = T::PI();
        let two = T::lit(2.0);
        let (sx, cx) = (pi * x[0]).sin_cos();
        let (sy, cy) = (pi * x[1]).sin_cos();
        let k = two * pi * pi * self.eta;
        [k * cx * sy, -k * sx * cy]
    }

    /// Momentum residual source `-div(stress) + grad(p)`.
    pub fn body_force_from_derivatives(&self, x: Vec2<T>) -> Vec2<T> {
        let div = self.stress_divergence(x);
        let gp = self.pressure_gradient(x);
        [gp[0] - div[0], gp[1] - div[1]]
    }

    /// Component-wise access; vector values are returned as `[x, y]`,
    /// tensors row-major, scalars as a single entry.
    pub fn evaluate(&self, kind: Quantity, x: Vec2<T>) -> Vec<T> {
        match kind {
            Quantity::Velocity => self.velocity(x).to_vec(),
            Quantity::Pressure => vec![self.pressure(x)],
            Quantity::Stress => self.stress(x).iter().flatten().copied().collect(),
            Quantity::BodyForce => self.body_force(x).to_vec(),
            Quantity::BoundaryData => self.boundary_data(x).to_vec(),
        }
    }

    /// Checks the closed-form body force against the differentiated form and
    /// the strong-form identities at the given points.
    pub fn self_check(&self, points: &[Vec2<T>], tol: T) -> Result<()> {
        for &x in points {
            let f = self.body_force(x);
            let g = self.body_force_from_derivatives(x);
            let scale = T::one().max(f[0].abs()).max(f[1].abs());
            if (f[0] - g[0]).abs() > tol * scale || (f[1] - g[1]).abs() > tol * scale {
                return Err(Error::Internal(format!(
                    "body force mismatch at {x:?}: {f:?} vs {g:?}"
                )));
            }
            let du = self.velocity_gradient(x);
            if (du[0][0] + du[1][1]).abs() > tol {
                return Err(Error::Internal(format!("velocity not solenoidal at {x:?}")));
            }
            let s = self.stress(x);
            for i in 0..2 {
                for j in 0..2 {
                    let e = self.eta * (du[i][j] + du[j][i]);
                    if (s[i][j] - e).abs() > tol * scale {
                        return Err(Error::Internal(format!(
                            "stress is not 2 eta eps(u) at {x:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Deterministic low-discrepancy points (Halton bases 2 and 3) in `[lo, hi]^2`.
pub fn halton_points<T: Real>(n: usize, lo: T, hi: T) -> Vec<Vec2<T>> {
    fn radical_inverse(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    (1..=n)
        .map(|i| {
            let a = T::lit(radical_inverse(i, 2));
            let b = T::lit(radical_inverse(i, 3));
            [lo + (hi - lo) * a, lo + (hi - lo) * b]
        })
        .collect()
}
