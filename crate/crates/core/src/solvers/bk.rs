use crate::error::{Error, Result};
use crate::linsys::LinearSystem;
use crate::potentials::Potential;
use crate::vecops::{axpy, dot};

use super::RowAction;

/// Iterate of the randomized Bregman-Kaczmarz method.
///
/// Keeps `x = ∇f*(x*)` after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct BkState {
    x_star: Vec<f64>,
    x: Vec<f64>,
    k: u64,
}

impl BkState {
    pub fn new(p: &Potential, x_star: Vec<f64>) -> Self {
        let x = p.conj_grad(&x_star);
        Self { x_star, x, k: 0 }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x_star: vec![0.0; n],
            x: vec![0.0; n],
            k: 0,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn iterations(&self) -> u64 {
        self.k
    }

    /// One Bregman projection onto the hyperplane of row `i`:
    /// `x* ← x* − ((⟨a_i, x⟩ − b_i) / ‖a_i‖²) a_i`, then `x ← S_λ(x*)`.
    pub fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        sys.check_row(i)?;
        if self.x_star.len() != sys.cols() {
            return Err(Error::DimensionMismatch {
                what: "bk iterate",
                expected: sys.cols(),
                found: self.x_star.len(),
            });
        }
        let a_i = sys.row(i);
        let r = dot(a_i, &self.x) - sys.rhs()[i];
        if r != 0.0 {
            axpy(-r / sys.row_sq_norms()[i], a_i, &mut self.x_star);
            p.conj_grad_into(&self.x_star, &mut self.x);
        }
        self.k += 1;
        Ok(())
    }
}

impl RowAction for BkState {
    fn step(&mut self, sys: &LinearSystem, p: &Potential, i: usize) -> Result<()> {
        BkState::step(self, sys, p, i)
    }

    fn dual_image(&self, _sys: &LinearSystem) -> Vec<f64> {
        self.x_star.clone()
    }

    fn iterations(&self) -> u64 {
        self.k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrinkage_absorbs_first_step() {
        let sys = LinearSystem::from_rows(&[vec![1.0, 1.0]], vec![2.0]).unwrap();
        let p = Potential::new(2.0).unwrap();
        let mut s = BkState::zeros(2);
        s.step(&sys, &p, 0).unwrap();
        assert_eq!(s.x_star(), &[1.0, 1.0]);
        assert_eq!(s.x(), &[0.0, 0.0]);
    }

    #[test]
    fn quadratic_step_projects_exactly() {
        let sys = LinearSystem::from_rows(
            &[vec![0.3, -1.2, 2.0], vec![1.0, 1.0, 1.0]],
            vec![0.7, -3.0],
        )
        .unwrap();
        let p = Potential::quadratic();
        let mut s = BkState::new(&p, vec![1.0, 2.0, -0.5]);
        for i in [0, 1, 0] {
            s.step(&sys, &p, i).unwrap();
            let resid = dot(sys.row(i), s.x()) - sys.rhs()[i];
            assert!(resid.abs() <= 1e-10 * (1.0 + sys.rhs()[i].abs()));
        }
    }

    #[test]
    fn consistent_row_is_a_fixed_point() {
        let sys = LinearSystem::from_rows(&[vec![1.0, 2.0]], vec![5.0]).unwrap();
        let p = Potential::quadratic();
        let mut s = BkState::new(&p, vec![1.0, 2.0]);
        let before = s.clone();
        s.step(&sys, &p, 0).unwrap();
        assert_eq!(s.x_star(), before.x_star());
        assert_eq!(s.x(), before.x());
    }

    #[test]
    fn rejects_bad_row() {
        let sys = LinearSystem::from_rows(&[vec![1.0, 2.0]], vec![5.0]).unwrap();
        let p = Potential::quadratic();
        let mut s = BkState::zeros(2);
        assert!(matches!(
            s.step(&sys, &p, 1),
            Err(Error::IndexOutOfRange { index: 1, rows: 1 })
        ));
    }
}
