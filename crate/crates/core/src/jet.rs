//! Forward-mode jets built from nested multivariate dual numbers.
//!
//! A [`Dual<T>`] carries a value and its partial derivatives with respect to a
//! set of seed variables. Nesting (`Dual<Dual<f64>>`, ...) raises the
//! derivative order: two levels give values, gradients and Hessians in one
//! evaluation, which is what curvature assembly needs. Four levels exist so
//! that metrics *derived* from Christoffel symbols (tangent-bundle and
//! pullback metrics) can themselves be pushed through the two-level kernel.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and every dual tower level.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    /// Principal (fully value-level) part; used for pivoting and domain checks.
    fn re(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
}

/// First-order multivariate dual number over `T`.
///
/// An empty `dx` marks a constant and broadcasts against any seed width, so
/// `Scalar::from_f64` needs no variable count.
#[derive(Clone, PartialEq)]
pub struct Dual<T> {
    pub val: T,
    pub dx: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(val: T) -> Self {
        Dual {
            val,
            dx: Vec::new(),
        }
    }

    /// Variable number `i` out of `n` seeds.
    pub fn variable(val: T, i: usize, n: usize) -> Self {
        let mut dx = vec![T::zero(); n];
        dx[i] = T::one();
        Dual { val, dx }
    }

    pub fn grad(&self, i: usize) -> T {
        self.dx.get(i).cloned().unwrap_or_else(T::zero)
    }

    fn zip(a: &[T], b: &[T], f: impl Fn(&T, &T) -> T) -> Vec<T> {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => Vec::new(),
            (true, false) => b.iter().map(|y| f(&T::zero(), y)).collect(),
            (false, true) => a.iter().map(|x| f(x, &T::zero())).collect(),
            (false, false) => {
                assert_eq!(a.len(), b.len(), "mixed seed widths in dual arithmetic");
                a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
            }
        }
    }

    fn chain(&self, val: T, slope: T) -> Self {
        Dual {
            val,
            dx: self.dx.iter().map(|d| slope.clone() * d.clone()).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({:?}; {:?})", self.val, self.dx)
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            val: self.val.clone() + rhs.val.clone(),
            dx: Self::zip(&self.dx, &rhs.dx, |a, b| a.clone() + b.clone()),
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            val: self.val.clone() - rhs.val.clone(),
            dx: Self::zip(&self.dx, &rhs.dx, |a, b| a.clone() - b.clone()),
        }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)] // product rule
    fn mul(self, rhs: Self) -> Self {
        let dx = Self::zip(&self.dx, &rhs.dx, |a, b| {
            a.clone() * rhs.val.clone() + self.val.clone() * b.clone()
        });
        Dual {
            val: self.val * rhs.val,
            dx,
        }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = T::one() / rhs.val.clone();
        let val = self.val.clone() * inv.clone();
        // (a/b)' = (a' - (a/b) b') / b
        let dx = Self::zip(&self.dx, &rhs.dx, |a, b| {
            (a.clone() - val.clone() * b.clone()) * inv.clone()
        });
        Dual { val, dx }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            val: -self.val,
            dx: self.dx.into_iter().map(|d| -d).collect(),
        }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_f64(c: f64) -> Self {
        Dual::constant(T::from_f64(c))
    }
    fn re(&self) -> f64 {
        self.val.re()
    }
    fn sin(&self) -> Self {
        self.chain(self.val.sin(), self.val.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.val.cos(), -self.val.sin())
    }
    fn sqrt(&self) -> Self {
        let root = self.val.sqrt();
        let slope = T::from_f64(0.5) / root.clone();
        self.chain(root, slope)
    }
    fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        self.chain(self.val.ln(), T::one() / self.val.clone())
    }
}

pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;
pub type D4 = Dual<D3>;

/// Seed `u` as first-order variables: the result tracks one derivative level
/// on top of whatever `T` already carries.
pub fn seed_first<T: Scalar>(u: &[T]) -> Vec<Dual<T>> {
    let n = u.len();
    u.iter()
        .enumerate()
        .map(|(i, ui)| Dual::variable(ui.clone(), i, n))
        .collect()
}

/// Seed `u` as second-order variables (two nested levels with matching seeds),
/// so an evaluation yields value, gradient and Hessian of the map.
pub fn seed_second<T: Scalar>(u: &[T]) -> Vec<Dual<Dual<T>>> {
    let n = u.len();
    u.iter()
        .enumerate()
        .map(|(i, ui)| {
            let inner = Dual::variable(ui.clone(), i, n);
            let mut dx = vec![Dual::constant(T::zero()); n];
            dx[i] = Dual::constant(T::one());
            Dual { val: inner, dx }
        })
        .collect()
}
