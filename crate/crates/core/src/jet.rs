//! Second-order jets: a value together with its first and second derivative
//! with respect to one variable, propagated through ring operations.
//!
//! The element type only needs to be a (possibly non-commutative) ring, so the
//! same type carries scalar jets and jets of whole matrices. Products use the
//! Leibniz rule `(fg)'' = f''g + 2f'g' + fg''` with operand order preserved.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S> {
    pub value: S,
    pub d1: S,
    pub d2: S,
}

impl<S> Jet<S> {
    pub const fn new(value: S, d1: S, d2: S) -> Self {
        Self { value, d1, d2 }
    }

    /// Applies `f` to every slot.
    pub fn map<U>(self, mut f: impl FnMut(S) -> U) -> Jet<U> {
        Jet::new(f(self.value), f(self.d1), f(self.d2))
    }

    pub fn as_array(&self) -> [&S; 3] {
        [&self.value, &self.d1, &self.d2]
    }
}

impl<S: Zero + Copy> Jet<S> {
    /// A quantity that does not depend on the jet variable.
    pub fn constant(value: S) -> Self {
        Self::new(value, S::zero(), S::zero())
    }

    /// Keeps derivatives up to `order`, zeroing the rest.
    pub fn truncate(self, order: u8) -> Self {
        match order {
            0 => Self::constant(self.value),
            1 => Self::new(self.value, self.d1, S::zero()),
            _ => self,
        }
    }
}

impl<S: Copy + Add<Output = S>> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl<S: Copy + Add<Output = S>> AddAssign for Jet<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Copy + Sub<Output = S>> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl<S: Copy + Neg<Output = S>> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2)
    }
}

impl<S: Copy + Add<Output = S> + Mul<Output = S>> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let cross = self.d1 * rhs.d1;
        Self::new(
            self.value * rhs.value,
            self.d1 * rhs.value + self.value * rhs.d1,
            self.d2 * rhs.value + cross + cross + self.value * rhs.d2,
        )
    }
}

impl<S: Copy + Zero> Zero for Jet<S> {
    fn zero() -> Self {
        Self::constant(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.d1.is_zero() && self.d2.is_zero()
    }
}

impl<S: Copy> Jet<S> {
    /// Multiplies every slot by a scalar of a (possibly different) type.
    pub fn scale<K: Copy>(self, k: K) -> Self
    where
        S: Mul<K, Output = S>,
    {
        Self::new(self.value * k, self.d1 * k, self.d2 * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule_matches_polynomial_derivatives() {
        // f = 1 + 2z + z^2 at z = 0.5 -> f = 2.25, f' = 3, f'' = 2
        // g = z^3          at z = 0.5 -> g = 0.125, g' = 0.75, g'' = 3
        let f = Jet::new(2.25_f64, 3.0, 2.0);
        let g = Jet::new(0.125_f64, 0.75, 3.0);
        let h = f * g;
        // fg = z^3 + 2z^4 + z^5
        let z: f64 = 0.5;
        assert_relative_eq!(h.value, z.powi(3) + 2.0 * z.powi(4) + z.powi(5));
        assert_relative_eq!(h.d1, 3.0 * z.powi(2) + 8.0 * z.powi(3) + 5.0 * z.powi(4));
        assert_relative_eq!(h.d2, 6.0 * z + 24.0 * z.powi(2) + 20.0 * z.powi(3));
    }

    #[test]
    fn truncation_zeroes_higher_slots() {
        let j = Jet::new(1.0_f64, 2.0, 3.0);
        assert_eq!(j.truncate(0), Jet::new(1.0, 0.0, 0.0));
        assert_eq!(j.truncate(1), Jet::new(1.0, 2.0, 0.0));
        assert_eq!(j.truncate(2), j);
    }
}
