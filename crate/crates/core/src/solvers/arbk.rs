use crate::error::{Error, Result};
use crate::linsys::LinearSystem;
use crate::potentials::Potential;
use crate::vecops::axpy;

use super::{RowAction, ThetaSchedule};

/// Iterate of the accelerated randomized Bregman-Kaczmarz method (ARBK).
///
/// Holds the dual image `x*_k`, the auxiliary sequence `t_k` and the
/// momentum schedule. The coupling point `c_k = (1 − θ_k) x*_k + θ_k t_k` is
/// formed in place at the start of each step and never outlives it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArbkState {
    x_star: Vec<f64>,
    t: Vec<f64>,
    theta: ThetaSchedule,
}

impl ArbkState {
    /// Starts from `x*_0` with `t_0 = x*_0`.
    pub fn new(x_star: Vec<f64>, theta: ThetaSchedule) -> Self {
        let t = x_star.clone();
        Self { x_star, t, theta }
    }

    pub fn zeros(n: usize, theta: ThetaSchedule) -> Self {
        Self::new(vec![0.0; n], theta)
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn theta(&self) -> &ThetaSchedule {
        &self.theta
    }

    pub fn iterations(&self) -> u64 {
        self.theta.k()
    }

    /// Primal iterate `x_k = ∇f*(x*_k)`.
    pub fn x(&self, p: &Potential) -> Vec<f64> {
        p.conj_grad(&self.x_star)
    }

    /// One ARBK step on row `i`:
    ///
    /// ```text
    /// c      = (1 − θ) x* + θ t = x* + θ (t − x*)
    /// γ      = (⟨a_i, ∇f*(c)⟩ − b_i) / ‖a_i‖²
    /// t'     = t − γ / (mθ) · a_i
    /// x*'    = c + mθ (t' − t) = c − γ a_i
    /// ```
    ///
    /// followed by a schedule advance. Only row `i` of the matrix is read.
    pub fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        sys.check_row(i)?;
        if self.x_star.len() != sys.cols() {
            return Err(Error::DimensionMismatch {
                what: "arbk iterate",
                expected: sys.cols(),
                found: self.x_star.len(),
            });
        }
        let theta = self.theta.theta();
        let m_theta = sys.rows() as f64 * theta;
        let a_i = sys.row(i);

        // x* becomes c = x* + θ(t − x*).
        let mut inner = 0.0;
        for ((c, &t), &a) in self.x_star.iter_mut().zip(&self.t).zip(a_i) {
            *c += theta * (t - *c);
            inner += a * crate::potentials::shrink(*c, p.lambda());
        }

        let gamma = (inner - sys.rhs()[i]) / sys.row_sq_norms()[i];
        if gamma != 0.0 {
            axpy(-gamma / m_theta, a_i, &mut self.t);
            axpy(-gamma, a_i, &mut self.x_star);
        }
        self.theta.advance();
        Ok(())
    }
}

impl RowAction for ArbkState {
    fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        ArbkState::step(self, sys, p, i)
    }

    fn dual_image(&self, _sys: &LinearSystem) -> Vec<f64> {
        self.x_star.clone()
    }

    fn iterations(&self) -> u64 {
        self.theta.k()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::dot;

    fn system() -> LinearSystem {
        LinearSystem::from_rows(
            &[
                vec![1.0, -2.0, 0.5],
                vec![0.0, 3.0, 1.0],
                vec![2.0, 1.0, -1.0],
            ],
            vec![1.0, 2.0, -0.5],
        )
        .unwrap()
    }

    #[test]
    fn update_is_parallel_to_row() {
        let sys = system();
        let p = Potential::new(0.3).unwrap();
        let mut s = ArbkState::new(vec![0.4, -0.1, 0.9], ThetaSchedule::for_rows(3));
        s.step(&sys, &p, 0).unwrap();
        s.step(&sys, &p, 2).unwrap();
        let theta = s.theta().theta();
        let c: Vec<f64> = s
            .x_star()
            .iter()
            .zip(s.t())
            .map(|(x, t)| (1.0 - theta) * x + theta * t)
            .collect();
        let before = s.clone();
        s.step(&sys, &p, 1).unwrap();
        let diff: Vec<f64> = s.x_star().iter().zip(&c).map(|(a, b)| a - b).collect();
        let a1 = sys.row(1);
        // diff ∥ a_1  ⇔  diff − (⟨diff,a⟩/‖a‖²) a = 0
        let coef = dot(&diff, a1) / sys.row_sq_norms()[1];
        for (d, a) in diff.iter().zip(a1) {
            assert!((d - coef * a).abs() < 1e-14);
        }
        assert_eq!(s.iterations(), before.iterations() + 1);
    }

    #[test]
    fn consistent_row_at_coupling_point_leaves_t() {
        // With x* = t the coupling point is x*; choose b so row 0 is satisfied there.
        let p = Potential::quadratic();
        let x0 = vec![0.5, 0.25, -1.0];
        let a0 = [1.0, -2.0, 0.5];
        let b0 = dot(&a0, &x0);
        let sys =
            LinearSystem::from_rows(&[a0.to_vec(), vec![0.0, 3.0, 1.0]], vec![b0, 0.0]).unwrap();
        let mut s = ArbkState::new(x0.clone(), ThetaSchedule::for_rows(2));
        s.step(&sys, &p, 0).unwrap();
        assert_eq!(s.t(), &x0[..]);
        for (a, b) in s.x_star().iter().zip(&x0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_row() {
        let sys = system();
        let p = Potential::quadratic();
        let mut s = ArbkState::zeros(3, ThetaSchedule::for_rows(3));
        assert!(s.step(&sys, &p, 3).is_err());
        let mut wrong = ArbkState::zeros(2, ThetaSchedule::for_rows(3));
        assert!(wrong.step(&sys, &p, 0).is_err());
    }
}
