//! Symmetric 2x2 tensors with the double-dot metric.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Symmetric tensor stored by its three independent components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymTensor2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };
    pub const IDENTITY: SymTensor2 = SymTensor2 {
        xx: 1.0,
        xy: 0.0,
        yy: 1.0,
    };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymTensor2 { xx, xy, yy }
    }

    /// `½(a⊗b + b⊗a)`
    pub fn sym_outer(a: [f64; 2], b: [f64; 2]) -> Self {
        SymTensor2 {
            xx: a[0] * b[0],
            xy: 0.5 * (a[0] * b[1] + a[1] * b[0]),
            yy: a[1] * b[1],
        }
    }

    /// `σ:τ = Σ σ_ij τ_ij`, so the off-diagonal entry counts twice.
    pub fn ddot(&self, other: &SymTensor2) -> f64 {
        self.xx * other.xx + 2.0 * self.xy * other.xy + self.yy * other.yy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn norm_sq(&self) -> f64 {
        self.ddot(self)
    }

    /// Plate moment map `(1-κ)τ + κ tr(τ) I`.
    pub fn moment(&self, kappa: f64) -> SymTensor2 {
        let t = kappa * self.trace();
        SymTensor2 {
            xx: (1.0 - kappa) * self.xx + t,
            xy: (1.0 - kappa) * self.xy,
            yy: (1.0 - kappa) * self.yy + t,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.xx, self.xy, self.yy]
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        SymTensor2::new(c[0], c[1], c[2])
    }

    pub fn lerp(a: &SymTensor2, b: &SymTensor2, t: f64) -> SymTensor2 {
        *a * (1.0 - t) + *b * t
    }
}

impl Add for SymTensor2 {
    type Output = SymTensor2;
    fn add(self, o: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl AddAssign for SymTensor2 {
    fn add_assign(&mut self, o: SymTensor2) {
        self.xx += o.xx;
        self.xy += o.xy;
        self.yy += o.yy;
    }
}

impl Sub for SymTensor2 {
    type Output = SymTensor2;
    fn sub(self, o: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }
}

impl Neg for SymTensor2 {
    type Output = SymTensor2;
    fn neg(self) -> SymTensor2 {
        SymTensor2::new(-self.xx, -self.xy, -self.yy)
    }
}

impl Mul<f64> for SymTensor2 {
    type Output = SymTensor2;
    fn mul(self, s: f64) -> SymTensor2 {
        SymTensor2::new(self.xx * s, self.xy * s, self.yy * s)
    }
}

/// Pointwise 3x3 weight on `(xx, xy, yy)` coefficients such that
/// `σ ↦ Σ W_ab σ_a τ_b` equals `(1-κ)σ:τ + κ tr σ tr τ`.
pub fn moment_weight(kappa: f64) -> [[f64; 3]; 3] {
    [
        [1.0, 0.0, kappa],
        [0.0, 2.0 * (1.0 - kappa), 0.0],
        [kappa, 0.0, 1.0],
    ]
}

/// Weight for the plain double-dot product on `(xx, xy, yy)` coefficients.
pub const DDOT_WEIGHT: [f64; 3] = [1.0, 2.0, 1.0];
