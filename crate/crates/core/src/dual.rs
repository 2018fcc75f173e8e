//! Forward-mode dual numbers carrying a full gradient.
//!
//! A [`Dual`] tracks a value together with its partial derivatives against
//! all ambient coordinates, so one evaluation pass yields the exact
//! differential of a composite expression. A gradient of length zero
//! degenerates to plain value arithmetic, which the evaluators use for
//! value-only calls.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    value: f64,
    grad: Vec<f64>,
}

impl Dual {
    pub fn constant(value: f64, grad_dim: usize) -> Self {
        Self {
            value,
            grad: vec![0.0; grad_dim],
        }
    }

    /// The coordinate variable y^idx: unit derivative in slot idx.
    pub fn variable(value: f64, idx: usize, grad_dim: usize) -> Self {
        let mut grad = vec![0.0; grad_dim];
        grad[idx] = 1.0;
        Self { value, grad }
    }

    /// Assemble a dual from an externally computed value and gradient.
    pub fn seeded(value: f64, grad: Vec<f64>) -> Self {
        Self { value, grad }
    }

    /// Seed a full coordinate point with the identity gradient basis.
    pub fn seed_point(coords: &[f64]) -> Vec<Dual> {
        let dim = coords.len();
        coords
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::variable(v, i, dim))
            .collect()
    }

    /// Wrap a coordinate point as constants (value-only evaluation).
    pub fn wrap_point(coords: &[f64]) -> Vec<Dual> {
        coords.iter().map(|&v| Dual::constant(v, 0)).collect()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }

    fn map_grad(&self, factor: f64) -> Vec<f64> {
        self.grad.iter().map(|g| factor * g).collect()
    }

    fn zip_grad(&self, other: &Dual, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        debug_assert_eq!(self.grad.len(), other.grad.len());
        self.grad
            .iter()
            .zip(&other.grad)
            .map(|(&a, &b)| f(a, b))
            .collect()
    }

    pub fn exp(&self) -> Dual {
        let e = self.value.exp();
        Dual {
            value: e,
            grad: self.map_grad(e),
        }
    }

    pub fn ln(&self) -> Dual {
        Dual {
            value: self.value.ln(),
            grad: self.map_grad(1.0 / self.value),
        }
    }

    pub fn sqrt(&self) -> Dual {
        let s = self.value.sqrt();
        Dual {
            value: s,
            grad: self.map_grad(0.5 / s),
        }
    }

    pub fn powi(&self, p: i32) -> Dual {
        let dv = f64::from(p) * self.value.powi(p - 1);
        Dual {
            value: self.value.powi(p),
            grad: self.map_grad(dv),
        }
    }

    pub fn recip(&self) -> Dual {
        let inv = 1.0 / self.value;
        Dual {
            value: inv,
            grad: self.map_grad(-inv * inv),
        }
    }

    pub fn scale(&self, t: f64) -> Dual {
        Dual {
            value: t * self.value,
            grad: self.map_grad(t),
        }
    }
}

impl Add for &Dual {
    type Output = Dual;
    fn add(self, rhs: &Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            grad: self.zip_grad(rhs, |a, b| a + b),
        }
    }
}

impl Sub for &Dual {
    type Output = Dual;
    fn sub(self, rhs: &Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            grad: self.zip_grad(rhs, |a, b| a - b),
        }
    }
}

impl Mul for &Dual {
    type Output = Dual;
    // product rule on the derivative part
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(&a, &b)| a * rhs.value + self.value * b)
                .collect(),
        }
    }
}

impl Div for &Dual {
    type Output = Dual;
    fn div(self, rhs: &Dual) -> Dual {
        let inv = 1.0 / rhs.value;
        Dual {
            value: self.value * inv,
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(&a, &b)| (a - self.value * inv * b) * inv)
                .collect(),
        }
    }
}

impl Neg for &Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            grad: self.map_grad(-1.0),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Dual {
            type Output = Dual;
            fn $method(self, rhs: Dual) -> Dual {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Dual> for Dual {
            type Output = Dual;
            fn $method(self, rhs: &Dual) -> Dual {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        -&self
    }
}
