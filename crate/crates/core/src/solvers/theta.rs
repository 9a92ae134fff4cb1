use crate::error::{Error, Result};

/// Generator for the momentum weights `θ_0, θ_1, …`.
///
/// In decaying mode each step applies
/// `θ_{k+1} = (√(θ_k⁴ + 4θ_k²) − θ_k²) / 2`, which keeps
/// `(1 − θ_{k+1}) / θ_{k+1}² = 1 / θ_k²` and makes `θ_k` decrease like
/// `2 / (k + 2/θ_0)`. Constant mode holds `θ_k = θ_0` for every `k`; with
/// `θ_0 = 1/m` it turns the accelerated iteration back into plain
/// Bregman-Kaczmarz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSchedule {
    theta: f64,
    theta0: f64,
    k: u64,
    constant: bool,
}

impl ThetaSchedule {
    pub fn new(theta0: f64) -> Result<Self> {
        Self::validate(theta0)?;
        Ok(Self {
            theta: theta0,
            theta0,
            k: 0,
            constant: false,
        })
    }

    pub fn constant(theta0: f64) -> Result<Self> {
        Self::validate(theta0)?;
        Ok(Self {
            theta: theta0,
            theta0,
            k: 0,
            constant: true,
        })
    }

    /// The default schedule for a system with `rows` rows, starting at `1/rows`.
    pub fn for_rows(rows: usize) -> Self {
        Self::new(1.0 / rows.max(1) as f64).expect("1/m lies in (0, 1]")
    }

    fn validate(theta0: f64) -> Result<()> {
        if theta0 > 0.0 && theta0 <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "theta0 must lie in (0, 1], got {theta0}"
            )))
        }
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// Advances to `θ_{k+1}`.
    #[inline]
    pub fn advance(&mut self) {
        if !self.constant {
            self.theta = next_theta(self.theta);
        }
        self.k += 1;
    }

    /// Closed-form bracket `(lower, upper)` on `θ_k` for the decaying schedule.
    pub fn bounds(theta0: f64, k: u64) -> (f64, f64) {
        let k = k as f64;
        let lower = (2.0 - theta0) / (k + (2.0 - theta0) / theta0);
        let upper = 2.0 / (k + 2.0 / theta0);
        (lower, upper)
    }
}

impl Iterator for ThetaSchedule {
    type Item = f64;

    /// Yields `θ_k` and advances.
    fn next(&mut self) -> Option<f64> {
        let t = self.theta;
        self.advance();
        Some(t)
    }
}

#[inline]
pub fn next_theta(theta: f64) -> f64 {
    let t2 = theta * theta;
    ((t2 * t2 + 4.0 * t2).sqrt() - t2) / 2.0
}
