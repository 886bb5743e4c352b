//! Helpers shared by the integration tests: a small power-series
//! implementation kept independent of the library, used as an oracle.

#![allow(dead_code)]


/// Dense truncated power series over the integers, kept independent of the
/// library's series type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ps(pub Vec<i128>);

impl Ps {
    pub fn zero(cap: usize) -> Ps {
        Ps(vec![0; cap + 1])
    }

    pub fn one(cap: usize) -> Ps {
        Ps::mono(cap, 0, 1)
    }

    pub fn mono(cap: usize, d: usize, c: i128) -> Ps {
        let mut p = Ps::zero(cap);
        if d <= cap {
            p.0[d] = c;
        }
        p
    }

    pub fn from(cap: usize, terms: &[(usize, i128)]) -> Ps {
        let mut p = Ps::zero(cap);
        for &(d, c) in terms {
            if d <= cap {
                p.0[d] += c;
            }
        }
        p
    }

    pub fn cap(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, o: &Ps) -> Ps {
        Ps(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Ps) -> Ps {
        Ps(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, o: &Ps) -> Ps {
        let n = self.0.len();
        let mut out = vec![0; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] += self.0[i] * o.0[j];
            }
        }
        Ps(out)
    }

    /// Inverse of a series with constant term 1.
    pub fn inv(&self) -> Ps {
        assert_eq!(self.0[0], 1);
        let n = self.0.len();
        let mut out = vec![0i128; n];
        out[0] = 1;
        for d in 1..n {
            out[d] = -(1..=d).map(|i| self.0[i] * out[d - i]).sum::<i128>();
        }
        Ps(out)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }
}

/// Coefficients of a library series as `i64`.
pub fn ints(s: &wedgecalc::GradedSeries) -> Vec<i64> {
    s.coeffs.iter().map(|c| i64::try_from(c).expect("small coefficient")).collect()
}
