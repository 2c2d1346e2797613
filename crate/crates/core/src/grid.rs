use crate::phase::{PhaseLabel, PiecewiseLinearPhi};

/// Uniform grid on [0, 1] with x_j = (j-1) h, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub h: f64,
    pub u: Vec<f64>,
    pub t: f64,
}

impl GridState {
    pub fn new(u: Vec<f64>, t: f64) -> Self {
        let h = 1.0 / (u.len() - 1) as f64;
        Self { h, u, t }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Position of the 0-based node i.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn phi_values(&self, phi: &PiecewiseLinearPhi) -> Vec<f64> {
        self.u.iter().map(|&u| phi.eval(u)).collect()
    }

    pub fn phases(&self, phi: &PiecewiseLinearPhi) -> Vec<PhaseLabel> {
        self.u.iter().map(|&u| phi.classify(u)).collect()
    }

    pub fn mass(&self) -> f64 {
        self.u.iter().sum()
    }
}

/// J = 2^k + 1 points, h = 2^-k.
pub fn points_for_exponent(k: u32) -> usize {
    (1usize << k) + 1
}
