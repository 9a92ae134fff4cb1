//! The sparsity-promoting potential `f(x) = λ‖x‖₁ + ½‖x‖₂²` and its conjugate.
//!
//! `f` is 1-strongly convex. Its Fenchel conjugate is `f*(x*) = ½‖S_λ(x*)‖₂²`
//! with gradient `∇f*(x*) = S_λ(x*)`, where `S_λ` is componentwise soft
//! shrinkage. Setting `λ = 0` gives the plain quadratic `½‖x‖₂²`, for which
//! every Bregman distance reduces to half the squared Euclidean distance.

use crate::error::{Error, Result};
use crate::vecops::{dot, norm_sq};

/// Soft shrinkage of a single scalar: `max(|v| - λ, 0) · sign(v)`.
#[inline]
pub fn shrink(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Componentwise soft shrinkage `S_λ(x)`.
pub fn soft_shrink(x: &[f64], lambda: f64) -> Vec<f64> {
    x.iter().map(|&v| shrink(v, lambda)).collect()
}

/// In-place variant of [`soft_shrink`] writing into `out`.
pub fn soft_shrink_into(x: &[f64], lambda: f64, out: &mut [f64]) {
    debug_assert_eq!(x.len(), out.len());
    for (o, &v) in out.iter_mut().zip(x) {
        *o = shrink(v, lambda);
    }
}

/// `f(x) = λ‖x‖₁ + ½‖x‖₂²` for a fixed `λ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    lambda: f64,
}

impl Potential {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    /// The quadratic potential `½‖x‖₂²`.
    pub fn quadratic() -> Self {
        Self { lambda: 0.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        self.lambda * l1 + 0.5 * norm_sq(x)
    }

    pub fn conj_value(&self, x_star: &[f64]) -> f64 {
        0.5 * x_star
            .iter()
            .map(|&v| {
                let s = shrink(v, self.lambda);
                s * s
            })
            .sum::<f64>()
    }

    pub fn conj_grad(&self, x_star: &[f64]) -> Vec<f64> {
        soft_shrink(x_star, self.lambda)
    }

    pub fn conj_grad_into(&self, x_star: &[f64], out: &mut [f64]) {
        soft_shrink_into(x_star, self.lambda, out);
    }

    /// `⟨a, ∇f*(x*)⟩` without materializing the gradient.
    #[inline]
    pub fn dot_conj_grad(&self, a: &[f64], x_star: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), x_star.len());
        a.iter()
            .zip(x_star)
            .map(|(ai, &v)| ai * shrink(v, self.lambda))
            .sum()
    }

    /// Picks `x* = x + λ·s ∈ ∂f(x)` with `s_j = sign(x_j)` and `s_j = 0`
    /// where `x_j = 0`.
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .map(|&v| {
                if v > 0.0 {
                    v + self.lambda
                } else if v < 0.0 {
                    v - self.lambda
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Bregman distance `D_f^{x*}(x, y)` evaluated through the conjugate:
    /// `f*(x*) - ⟨x*, y⟩ + f(y)`. Requires `x* ∈ ∂f(x)`.
    pub fn bregman_distance(&self, from: &BregmanPoint, to: &[f64]) -> Result<f64> {
        check_len("bregman target", from.x_star.len(), to.len())?;
        Ok(self.conj_value(&from.x_star) - dot(&from.x_star, to) + self.value(to))
    }

    /// Bregman distance from the definition `f(y) - f(x) - ⟨x*, y - x⟩`.
    pub fn bregman_distance_direct(&self, from: &BregmanPoint, to: &[f64]) -> Result<f64> {
        check_len("bregman target", from.x.len(), to.len())?;
        let inner: f64 = from
            .x_star
            .iter()
            .zip(to.iter().zip(&from.x))
            .map(|(xs, (y, x))| xs * (y - x))
            .sum();
        Ok(self.value(to) - self.value(&from.x) - inner)
    }

    /// Bregman distance from a dual point, with `x = S_λ(x*)` implied.
    ///
    /// Uses the split `½‖x - y‖² + Σ_j (λ|y_j| - (x*_j - x_j) y_j)`. Every
    /// summand is nonnegative because `|x*_j - x_j| ≤ λ`, so the result stays
    /// accurate near zero where the conjugate form suffers cancellation.
    pub fn bregman_from_dual(&self, x_star: &[f64], to: &[f64]) -> Result<f64> {
        check_len("bregman target", x_star.len(), to.len())?;
        let mut quad = 0.0;
        let mut l1_gap = 0.0;
        for (&xs, &y) in x_star.iter().zip(to) {
            let x = shrink(xs, self.lambda);
            let d = x - y;
            quad += d * d;
            l1_gap += self.lambda * y.abs() - (xs - x) * y;
        }
        Ok(0.5 * quad + l1_gap.max(0.0))
    }

    /// `f(x) + f*(x*) - ⟨x, x*⟩`; zero exactly when `x* ∈ ∂f(x)`.
    pub fn fenchel_gap(&self, x: &[f64], x_star: &[f64]) -> f64 {
        self.value(x) + self.conj_value(x_star) - dot(x, x_star)
    }
}

/// A primal point paired with a subgradient of `f` at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct BregmanPoint {
    pub x: Vec<f64>,
    pub x_star: Vec<f64>,
}

impl BregmanPoint {
    /// Tolerance on the Fenchel gap accepted by [`BregmanPoint::new`].
    pub const FENCHEL_TOL: f64 = 1e-10;

    /// Pairs `x` with `x_star`, checking `x_star ∈ ∂f(x)` through the
    /// Fenchel equality.
    pub fn new(p: &Potential, x: Vec<f64>, x_star: Vec<f64>) -> Result<Self> {
        check_len("bregman point", x.len(), x_star.len())?;
        let gap = p.fenchel_gap(&x, &x_star);
        let scale = 1.0 + dot(&x, &x_star).abs();
        if gap.abs() > Self::FENCHEL_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "x_star is not a subgradient of f at x (Fenchel gap {gap:e})"
            )));
        }
        Ok(Self { x, x_star })
    }

    /// The point `(∇f*(x*), x*)`, which always satisfies the invariant.
    pub fn from_dual(p: &Potential, x_star: Vec<f64>) -> Self {
        Self {
            x: p.conj_grad(&x_star),
            x_star,
        }
    }

    /// The point `(x, subgradient(x))`.
    pub fn from_primal(p: &Potential, x: Vec<f64>) -> Self {
        let x_star = p.subgradient(&x);
        Self { x, x_star }
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
