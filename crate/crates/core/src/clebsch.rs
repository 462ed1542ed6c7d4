//! Exact Clebsch-Gordan coefficients from the Racah sum in rational arithmetic.
//!
//! Angular momenta are passed doubled (`2j`, `2m`) so half-integers stay integral.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) struct Factorials(Vec<BigInt>);

impl Factorials {
    pub(crate) fn new(max: usize) -> Self {
        let mut f = vec![BigInt::one()];
        for k in 1..=max {
            let next = &f[k - 1] * BigInt::from(k);
            f.push(next);
        }
        Self(f)
    }

    fn get(&self, n: i64) -> &BigInt {
        &self.0[n as usize]
    }
}

/// `⟨j1 m1; j2 m2 | J M⟩` with every argument doubled.
pub(crate) fn clebsch_gordan(f: &Factorials, j1: i64, m1: i64, j2: i64, m2: i64, jj: i64, mm: i64) -> f64 {
    if m1 + m2 != mm || m1.abs() > j1 || m2.abs() > j2 || mm.abs() > jj {
        return 0.0;
    }
    if jj > j1 + j2 || jj < (j1 - j2).abs() {
        return 0.0;
    }
    if (j1 + j2 - jj) % 2 != 0 || (j1 - m1) % 2 != 0 || (j2 - m2) % 2 != 0 || (jj - mm) % 2 != 0 {
        return 0.0;
    }
    let a = (j1 + j2 - jj) / 2;
    let e = (jj + j1 - j2) / 2;
    let g = (jj - j1 + j2) / 2;
    let (j1m, j1p) = ((j1 - m1) / 2, (j1 + m1) / 2);
    let (j2m, j2p) = ((j2 - m2) / 2, (j2 + m2) / 2);
    let (jm, jp) = ((jj - mm) / 2, (jj + mm) / 2);
    let mp = (j1 + j2 + jj) / 2 + 1;
    // squared prefactor
    let num = BigInt::from(jj + 1)
        * f.get(e)
        * f.get(g)
        * f.get(a)
        * f.get(jp)
        * f.get(jm)
        * f.get(j1m)
        * f.get(j1p)
        * f.get(j2m)
        * f.get(j2p);
    let pref2 = BigRational::new(num, f.get(mp).clone());

    // k runs over values keeping every factorial argument non-negative
    let t1 = (jj - j2 + m1) / 2; // J - j2 + m1
    let t2 = (jj - j1 - m2) / 2; // J - j1 - m2
    let kmin = 0.max(-t1).max(-t2);
    let kmax = a.min(j1m).min(j2p);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = f.get(k) * f.get(a - k) * f.get(j1m - k) * f.get(j2p - k) * f.get(t1 + k) * f.get(t2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let squared = &sum * &sum * pref2;
    sign * squared.to_f64().unwrap_or(f64::NAN).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let f = Factorials::new(40);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // two spin-1/2 into the triplet and singlet
        assert!((clebsch_gordan(&f, 1, 1, 1, -1, 2, 0) - s).abs() < 1e-15);
        assert!((clebsch_gordan(&f, 1, 1, 1, -1, 0, 0) - s).abs() < 1e-15);
        assert!((clebsch_gordan(&f, 1, -1, 1, 1, 0, 0) + s).abs() < 1e-15);
        assert_eq!(clebsch_gordan(&f, 1, 1, 1, 1, 2, 2), 1.0);
        // ⟨1 1; 1 -1 | 2 0⟩ = 1/√6
        assert!((clebsch_gordan(&f, 2, 2, 2, -2, 4, 0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        // selection rules
        assert_eq!(clebsch_gordan(&f, 2, 2, 2, 0, 4, 0), 0.0);
        assert_eq!(clebsch_gordan(&f, 2, 2, 2, 0, 8, 2), 0.0);
    }

    #[test]
    fn orthonormal_columns() {
        let f = Factorials::new(60);
        let (j1, j2) = (5, 4); // 5/2 ⊗ 2
        for jj in ((j1 - j2).abs()..=j1 + j2).step_by(2) {
            for jp in ((j1 - j2).abs()..=j1 + j2).step_by(2) {
                let mm = jj.min(jp);
                let mut acc = 0.0;
                for m1 in (-j1..=j1).step_by(2) {
                    let m2 = mm - m1;
                    acc += clebsch_gordan(&f, j1, m1, j2, m2, jj, mm) * clebsch_gordan(&f, j1, m1, j2, m2, jp, mm);
                }
                let expected = if jj == jp { 1.0 } else { 0.0 };
                assert!((acc - expected).abs() < 1e-13, "J={jj} J'={jp}: {acc}");
            }
        }
    }
}
