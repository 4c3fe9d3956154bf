//! Truncated univariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients `f(x0), f'(x0), f''(x0)/2, ...`
//! up to order four. It is enough to push exact derivatives through the
//! cutoff functions (`exp(-1/s)` style bumps, square roots, logarithms)
//! without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;
const N: usize = ORDER + 1;
const FACTORIAL: [f64; N] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; N],
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = value;
        Jet { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * FACTORIAL[k]
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut d = [0.0; N];
        for (k, v) in d.iter_mut().enumerate() {
            *v = self.derivative(k);
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn exp(self) -> Self {
        let mut g = [0.0; N];
        g[0] = self.c[0].exp();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * g[k - j];
            }
            g[k] = acc / k as f64;
        }
        Jet { c: g }
    }

    pub fn ln(self) -> Self {
        let f0 = self.c[0];
        let mut l = [0.0; N];
        l[0] = f0.ln();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - acc / k as f64) / f0;
        }
        Jet { c: l }
    }

    pub fn sqrt(self) -> Self {
        let mut s = [0.0; N];
        s[0] = self.c[0].sqrt();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..k {
                acc += s[j] * s[k - j];
            }
            s[k] = (self.c[k] - acc) / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    pub fn recip(self) -> Self {
        let f0 = self.c[0];
        let mut r = [0.0; N];
        r[0] = 1.0 / f0;
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * r[k - j];
            }
            r[k] = -acc / f0;
        }
        Jet { c: r }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}
