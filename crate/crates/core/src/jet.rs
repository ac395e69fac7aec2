//! Truncated Taylor arithmetic for exact derivatives of closed-form expressions.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest derivative order carried.
pub const ORDER: usize = 5;
const N: usize = ORDER + 1;

/// Taylor coefficients `c[k] = f^{(k)}(x0) / k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; N],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Jet { c }
    }

    /// The identity function at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.c[k] * f
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn exp(self) -> Self {
        // f' = f u'  =>  k f_k = sum_{j=1..k} j u_j f_{k-j}
        let mut f = [0.0; N];
        f[0] = self.c[0].exp();
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * f[k - j];
            }
            f[k] = s / k as f64;
        }
        Jet { c: f }
    }

    /// Returns (sin u, cos u).
    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..N {
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 1..=k {
                let ju = j as f64 * self.c[j];
                a += ju * c[k - j];
                b -= ju * s[k - j];
            }
            s[k] = a / k as f64;
            c[k] = b / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn recip(self) -> Self {
        let mut r = [0.0; N];
        r[0] = 1.0 / self.c[0];
        for k in 1..N {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s * r[0];
        }
        Jet { c: r }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
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
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, v: f64) -> Jet {
        self.c[0] += v;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, v: f64) -> Jet {
        self.scale(v)
    }
}
