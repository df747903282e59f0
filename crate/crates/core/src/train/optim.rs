//! Adam and plain SGD parameter updates.

use crate::error::{Error, Result};
use crate::nd::DenseMatrix;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// Adam with the standard bias correction. Moment accumulators are kept per
/// parameter matrix in registration order.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<DenseMatrix>,
    v: Vec<DenseMatrix>,
    step_count: u64,
}

impl AdamState {
    pub fn new(shapes: &[(usize, usize)]) -> Self {
        AdamState {
            m: shapes.iter().map(|&(r, c)| DenseMatrix::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| DenseMatrix::zeros(r, c)).collect(),
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn step(
        &mut self,
        lr: f64,
        weight_decay: f64,
        params: &mut [&mut DenseMatrix],
        grads: &[DenseMatrix],
    ) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Validation(format!(
                "adam state tracks {} parameters, got {} params / {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        self.step_count += 1;
        let bc1 = 1.0 - BETA1.powi(self.step_count as i32);
        let bc2 = 1.0 - BETA2.powi(self.step_count as i32);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            if p.shape() != g.shape() || p.shape() != m.shape() {
                return Err(Error::dim("adam step", p.shape(), g.shape()));
            }
            for i in 0..p.data().len() {
                let grad = g.data()[i] + weight_decay * p.data()[i];
                let mi = BETA1 * m.data()[i] + (1.0 - BETA1) * grad;
                let vi = BETA2 * v.data()[i] + (1.0 - BETA2) * grad * grad;
                m.data_mut()[i] = mi;
                v.data_mut()[i] = vi;
                let m_hat = mi / bc1;
                let v_hat = vi / bc2;
                p.data_mut()[i] -= lr * m_hat / (v_hat.sqrt() + EPS);
            }
        }
        Ok(())
    }
}

/// One plain (momentum-free) gradient-descent step.
pub fn sgd_step(
    lr: f64,
    weight_decay: f64,
    params: &mut [&mut DenseMatrix],
    grads: &[DenseMatrix],
) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::Validation(format!(
            "sgd got {} params / {} grads",
            params.len(),
            grads.len()
        )));
    }
    for (p, g) in params.iter_mut().zip(grads) {
        if p.shape() != g.shape() {
            return Err(Error::dim("sgd step", p.shape(), g.shape()));
        }
        for i in 0..p.data().len() {
            let grad = g.data()[i] + weight_decay * p.data()[i];
            p.data_mut()[i] -= lr * grad;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scalar reimplementation of the published update rule, stepped by hand.
    struct ScalarAdamOracle {
        m: f64,
        v: f64,
        t: u64,
    }

    impl ScalarAdamOracle {
        fn new() -> Self {
            ScalarAdamOracle { m: 0.0, v: 0.0, t: 0 }
        }

        fn step(&mut self, lr: f64, x: f64, g: f64) -> f64 {
            self.t += 1;
            self.m = BETA1 * self.m + (1.0 - BETA1) * g;
            self.v = BETA2 * self.v + (1.0 - BETA2) * g * g;
            let m_hat = self.m / (1.0 - BETA1.powi(self.t as i32));
            let v_hat = self.v / (1.0 - BETA2.powi(self.t as i32));
            x - lr * m_hat / (v_hat.sqrt() + EPS)
        }
    }

    #[test]
    fn adam_matches_hand_stepped_oracle_for_three_steps() {
        let mut state = AdamState::new(&[(1, 1)]);
        let mut param = DenseMatrix::filled(1, 1, 2.0);
        let mut oracle = ScalarAdamOracle::new();
        let mut expected = 2.0;
        for g in [0.5, -1.25, 0.75] {
            let grad = DenseMatrix::filled(1, 1, g);
            state.step(0.01, 0.0, &mut [&mut param], &[grad]).unwrap();
            expected = oracle.step(0.01, expected, g);
            assert!(
                (param.get(0, 0) - expected).abs() < 1e-15,
                "step {} diverged",
                state.step_count()
            );
        }
    }

    #[test]
    fn adam_first_step_direction() {
        // With m̂ = m/(1-β₁) and v̂ = v/(1-β₂), the first update collapses to
        // -lr · g / (|g| + ε) entrywise: a sign step of magnitude ≈ lr.
        let mut state = AdamState::new(&[(1, 2)]);
        let mut param = DenseMatrix::zeros(1, 2);
        let grad = DenseMatrix::from_rows(&[vec![0.3, -4.0]]).unwrap();
        state.step(0.01, 0.0, &mut [&mut param], &[grad.clone()]).unwrap();
        for i in 0..2 {
            let g = grad.get(0, i);
            let expected = -0.01 * g / (g.abs() + EPS);
            assert!((param.get(0, i) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sgd_zero_lr_leaves_params_unchanged() {
        let mut p = DenseMatrix::filled(2, 2, 1.5);
        let before = p.clone();
        let g = DenseMatrix::filled(2, 2, 3.0);
        sgd_step(0.0, 0.0, &mut [&mut p], &[g]).unwrap();
        assert!(p.bits_eq(&before));
    }

    #[test]
    fn sgd_descends() {
        let mut p = DenseMatrix::filled(1, 1, 1.0);
        let g = DenseMatrix::filled(1, 1, 2.0);
        sgd_step(0.1, 0.0, &mut [&mut p], &[g]).unwrap();
        assert!((p.get(0, 0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn weight_decay_pulls_toward_zero() {
        let mut p = DenseMatrix::filled(1, 1, 1.0);
        let g = DenseMatrix::zeros(1, 1);
        sgd_step(0.1, 0.5, &mut [&mut p], &[g]).unwrap();
        assert!((p.get(0, 0) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut state = AdamState::new(&[(1, 1)]);
        let mut p = DenseMatrix::zeros(1, 2);
        let g = DenseMatrix::zeros(1, 2);
        assert!(state.step(0.1, 0.0, &mut [&mut p], &[g]).is_err());
    }
}
