//! Dense real-coefficient polynomials, ascending powers. Internal support for
//! quasi-polynomial arithmetic; not part of the public API.

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly<T> {
    /// `coeffs[k]` multiplies `lambda^k`; trailing zeros trimmed, never empty.
    pub coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly {
            coeffs: vec![T::zero()],
        }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == T::zero() {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(T::zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == T::zero())
    }

    /// Degree after trimming; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + Complex::new(c, T::zero());
        }
        acc
    }

    /// Sum of |c_k| rho^k: an upper bound for |p| on |z| <= rho, used as a
    /// relative scale for residual tests.
    pub fn abs_eval(&self, rho: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * rho + c.abs();
        }
        acc
    }

    pub fn derivative(&self) -> Poly<T> {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_usize(k).unwrap())
            .collect();
        Poly::new(coeffs)
    }

    pub fn add(&self, other: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_else(T::zero);
                let b = other.coeffs.get(k).copied().unwrap_or_else(T::zero);
                a + b
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn neg(&self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }

    pub fn sub(&self, other: &Poly<T>) -> Poly<T> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly<T>) -> Poly<T> {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn eval_and_derivative() {
        // p = 1 + 2l + 3l^2
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
        let dp = p.derivative();
        assert_eq!(dp.coeffs, vec![2.0, 6.0]);
        assert_eq!(p.eval(c(0.0, 1.0)), c(-2.0, 2.0)); // 1 + 2i + 3(-1)
    }

    #[test]
    fn arithmetic_and_trim() {
        let p = Poly::new(vec![1.0, 1.0]);
        let q = Poly::new(vec![-1.0, -1.0, 0.0]);
        assert_eq!(q.coeffs.len(), 2); // trailing zero trimmed
        let s = p.add(&q);
        assert!(s.is_zero());
        assert_eq!(s.degree(), 0);
        let m = p.mul(&Poly::new(vec![1.0, -1.0]));
        assert_eq!(m.coeffs, vec![1.0, 0.0, -1.0]); // (1+l)(1-l) = 1 - l^2
    }

    #[test]
    fn abs_eval_bounds_modulus() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        let rho = 1.5;
        let bound = p.abs_eval(rho);
        for &(re, im) in &[(1.5, 0.0), (0.0, 1.5), (-1.06, 1.06)] {
            assert!(p.eval(c(re, im)).norm() <= bound + 1e-12);
        }
    }
}
