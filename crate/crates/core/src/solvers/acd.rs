use crate::error::{Error, Result};
use crate::linsys::LinearSystem;
use crate::potentials::Potential;

use super::{RowAction, ThetaSchedule};

/// Accelerated coordinate descent on the dual objective
/// `Ψ(y) = f*(Aᵀy) − bᵀy`.
///
/// This is the dual twin of [`ArbkState`](super::ArbkState): with matching
/// starting points, schedules and row streams, `Aᵀy_k` equals the ARBK dual
/// image `x*_k`. Every step forms the full product `Aᵀv_k`, costing `O(mn)`;
/// it serves as a cross-check, not as a production solver.
#[derive(Debug, Clone, PartialEq)]
pub struct AcdState {
    y: Vec<f64>,
    z: Vec<f64>,
    theta: ThetaSchedule,
    scratch: Vec<f64>,
}

impl AcdState {
    /// Starts from `y_0` with `z_0 = y_0`; `n` is the primal dimension.
    pub fn new(y: Vec<f64>, n: usize, theta: ThetaSchedule) -> Self {
        let z = y.clone();
        Self {
            y,
            z,
            theta,
            scratch: vec![0.0; n],
        }
    }

    pub fn zeros(sys: &LinearSystem, theta: ThetaSchedule) -> Self {
        Self::new(vec![0.0; sys.rows()], sys.cols(), theta)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn theta(&self) -> &ThetaSchedule {
        &self.theta
    }

    pub fn iterations(&self) -> u64 {
        self.theta.k()
    }

    /// `x*_k = Aᵀy_k`
    pub fn x_star(&self, sys: &LinearSystem) -> Vec<f64> {
        sys.apply_transpose(&self.y)
            .expect("dual iterate length matches the system")
    }

    /// Primal iterate `x_k = ∇f*(Aᵀy_k)`.
    pub fn x(&self, sys: &LinearSystem, p: &Potential) -> Vec<f64> {
        p.conj_grad(&self.x_star(sys))
    }

    /// One accelerated coordinate step on coordinate `i`:
    ///
    /// ```text
    /// v    = (1 − θ) y + θ z = y + θ (z − y)
    /// z_i' = z_i − (⟨a_i, ∇f*(Aᵀv)⟩ − b_i) / (mθ‖a_i‖²)
    /// y'   = v + mθ (z' − z)
    /// ```
    pub fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        sys.check_row(i)?;
        if self.y.len() != sys.rows() || self.scratch.len() != sys.cols() {
            return Err(Error::DimensionMismatch {
                what: "acd iterate",
                expected: sys.rows(),
                found: self.y.len(),
            });
        }
        let theta = self.theta.theta();
        let m_theta = sys.rows() as f64 * theta;

        // y becomes v = y + θ(z − y).
        for (v, &z) in self.y.iter_mut().zip(&self.z) {
            *v += theta * (z - *v);
        }
        sys.apply_transpose_into(&self.y, &mut self.scratch)?;
        let inner = p.dot_conj_grad(sys.row(i), &self.scratch);

        let gamma = (inner - sys.rhs()[i]) / sys.row_sq_norms()[i];
        if gamma != 0.0 {
            self.z[i] -= gamma / m_theta;
            self.y[i] -= gamma;
        }
        self.theta.advance();
        Ok(())
    }
}

impl RowAction for AcdState {
    fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        AcdState::step(self, sys, p, i)
    }

    fn dual_image(&self, sys: &LinearSystem) -> Vec<f64> {
        self.x_star(sys)
    }

    fn iterations(&self) -> u64 {
        self.theta.k()
    }
}
