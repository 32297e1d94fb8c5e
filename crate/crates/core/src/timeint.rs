//! Newmark time stepping for `M Ẍ + C Ẋ + K X = F(t)`.

use crate::error::Result;
use crate::sparse::{factorize, Factorization, SparseMatrix};

/// Courant bound `cfl · dx / c_1p`.
pub fn cfl_dt(dx: f64, c_1p: f64, cfl: f64) -> f64 {
    cfl * dx / c_1p
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewmarkState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub t: f64,
    pub step: usize,
}

impl NewmarkState {
    pub fn zeros(n: usize) -> Self {
        NewmarkState {
            x: vec![0.0; n],
            v: vec![0.0; n],
            a: vec![0.0; n],
            t: 0.0,
            step: 0,
        }
    }
}

/// Average-acceleration Newmark with a once-factorized effective matrix.
pub struct Newmark<'a> {
    m: &'a SparseMatrix,
    c: &'a SparseMatrix,
    pub dt: f64,
    pub beta: f64,
    pub gamma: f64,
    keff: Factorization,
    scratch: Vec<f64>,
}

impl<'a> Newmark<'a> {
    pub const BETA: f64 = 0.25;
    pub const GAMMA: f64 = 0.5;

    pub fn new(m: &'a SparseMatrix, c: &'a SparseMatrix, k: &SparseMatrix, dt: f64) -> Result<Self> {
        Self::with_parameters(m, c, k, dt, Self::BETA, Self::GAMMA)
    }

    pub fn with_parameters(m: &'a SparseMatrix, c: &'a SparseMatrix, k: &SparseMatrix, dt: f64, beta: f64, gamma: f64) -> Result<Self> {
        let keff = SparseMatrix::linear_combination(&[
            (1.0, k),
            (gamma / (beta * dt), c),
            (1.0 / (beta * dt * dt), m),
        ]);
        Ok(Newmark {
            m,
            c,
            dt,
            beta,
            gamma,
            keff: factorize(&keff)?,
            scratch: vec![0.0; m.nrows()],
        })
    }

    /// Advances `state` by one step with the load `f_next` at `t + dt`.
    pub fn step(&mut self, state: &mut NewmarkState, f_next: &[f64]) {
        let (dt, beta, gamma) = (self.dt, self.beta, self.gamma);
        let n = state.x.len();
        let x_pred: Vec<f64> = (0..n)
            .map(|i| state.x[i] + dt * state.v[i] + dt * dt * (0.5 - beta) * state.a[i])
            .collect();
        let v_pred: Vec<f64> = (0..n).map(|i| state.v[i] + dt * (1.0 - gamma) * state.a[i]).collect();

        let cm = 1.0 / (beta * dt * dt);
        let cc = gamma / (beta * dt);
        let mut rhs = f_next.to_vec();
        self.m.matvec_into(&x_pred, &mut self.scratch);
        for i in 0..n {
            rhs[i] += cm * self.scratch[i];
        }
        let c_arg: Vec<f64> = (0..n).map(|i| cc * x_pred[i] - v_pred[i]).collect();
        self.c.matvec_into(&c_arg, &mut self.scratch);
        for i in 0..n {
            rhs[i] += self.scratch[i];
        }
        self.keff.solve_in_place(&mut rhs);

        for i in 0..n {
            let a = cm * (rhs[i] - x_pred[i]);
            state.v[i] = v_pred[i] + gamma * dt * a;
            state.a[i] = a;
        }
        state.x = rhs;
        state.step += 1;
        state.t = state.step as f64 * dt;
    }
}
