//! Random populations and brute-force oracles shared by the integration
//! tests. Oracles use only textbook definitions, never the library kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sacurv::newton::Operator;
use sacurv::{Matrix, Rational, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    Rational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// `A = diag(ε) S` with `S` symmetric, so `diag(ε) A` is symmetric.
pub fn random_self_adjoint(rng: &mut impl Rng, dim: usize) -> Operator<Rational> {
    let signature: Vec<i64> = (0..dim)
        .map(|_| if rng.gen_bool(0.3) { -1 } else { 1 })
        .collect();
    let mut s = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = small_rational(rng);
            s[(i, j)] = v.clone();
            s[(j, i)] = v;
        }
    }
    let eps = Matrix::diagonal(
        &signature
            .iter()
            .map(|&e| Rational::from_i64(e))
            .collect::<Vec<_>>(),
    );
    Operator::with_signature(eps.matmul(&s), &signature).unwrap()
}

/// Self-adjoint for a Gram matrix that is degenerate along slot 0: column 0
/// vanishes, row 0 is arbitrary.
pub fn random_with_radical(rng: &mut impl Rng, dim: usize) -> Operator<Rational> {
    let inner = random_self_adjoint(rng, dim - 1);
    let mut a = Matrix::zeros(dim, dim);
    for j in 1..dim {
        a[(0, j)] = small_rational(rng);
        for i in 1..dim {
            a[(i, j)] = inner.entries()[(i - 1, j - 1)].clone();
        }
    }
    let mut g = Matrix::zeros(dim, dim);
    for i in 1..dim {
        g[(i, i)] = inner.gram()[(i - 1, i - 1)].clone();
    }
    Operator::new(a, g).unwrap().with_radical_slot(0)
}

/// The mixed population used by the operator-level criteria.
pub fn population(seed: u64, count: usize) -> Vec<Operator<Rational>> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            let dim = 1 + k % 9;
            if dim >= 2 && k % 3 == 0 {
                random_with_radical(&mut r, dim)
            } else {
                random_self_adjoint(&mut r, dim)
            }
        })
        .collect()
}

pub fn random_spectrum(rng: &mut impl Rng, max_len: usize) -> Vec<Rational> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| small_rational(rng)).collect()
}

/// `σ_r` by summing products over all `r`-subsets.
pub fn sigma_brute(values: &[Rational], r: usize) -> Rational {
    let n = values.len();
    if r > n {
        return Rational::from_i64(0);
    }
    let mut total = Rational::from_i64(0);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize == r {
            let mut p = Rational::from_i64(1);
            for (i, v) in values.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    p = p * v.clone();
                }
            }
            total = total + p;
        }
    }
    total
}

/// `σ_r` of `values` with index `skip` removed, by brute force.
pub fn sigma_brute_deleted(values: &[Rational], r: usize, skip: usize) -> Rational {
    let rest: Vec<Rational> = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, v)| v.clone())
        .collect();
    sigma_brute(&rest, r)
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(m: &Matrix<Rational>) -> Rational {
    let n = m.rows();
    let mut a = m.to_rows();
    let mut d = Rational::from_i64(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != Rational::from_i64(0)) else {
            return Rational::from_i64(0);
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pivot = a[c][c].clone();
        d = d * pivot.clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / pivot.clone();
            for k in c..n {
                let v = a[c][k].clone() * f.clone();
                a[r][k] = a[r][k].clone() - v;
            }
        }
    }
    d
}

/// Coefficients `[c_0, ..., c_m]` of `det(tI - A) = Σ c_k t^k`, by evaluating
/// the determinant at `t = 0..=m` and solving the Vandermonde system.
pub fn char_poly(a: &Matrix<Rational>) -> Vec<Rational> {
    let m = a.rows();
    let points: Vec<Rational> = (0..=m as i64).map(Rational::from_i64).collect();
    let values: Vec<Rational> = points
        .iter()
        .map(|t| det(&(&Matrix::scalar_identity(m, t.clone()) - a)))
        .collect();
    let vander = Matrix::from_fn(m + 1, m + 1, |i, j| points[i].powi(j as u32));
    vander.inverse().unwrap().mul_vec(&values)
}

/// `S_r` read off the characteristic polynomial: `c_{m-r} = (-1)^r S_r`.
pub fn curvatures_oracle(a: &Matrix<Rational>) -> Vec<Rational> {
    let m = a.rows();
    let c = char_poly(a);
    (0..=m)
        .map(|r| {
            let v = c[m - r].clone();
            if r % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// `Σ_{α=0}^{r} (-1)^α S_α A^{r-α}` with oracle curvatures and naive powers.
pub fn newton_oracle(a: &Matrix<Rational>, r: usize) -> Matrix<Rational> {
    newton_oracle_with(a, &curvatures_oracle(a), r)
}

/// [`newton_oracle`] with curvatures supplied by the caller.
pub fn newton_oracle_with(a: &Matrix<Rational>, s: &[Rational], r: usize) -> Matrix<Rational> {
    let m = a.rows();
    let mut out = Matrix::zeros(m, m);
    for alpha in 0..=r.min(m) {
        let mut pow = Matrix::identity(m);
        for _ in 0..r - alpha {
            pow = pow.matmul(a);
        }
        let coeff = if alpha % 2 == 0 {
            s[alpha].clone()
        } else {
            -s[alpha].clone()
        };
        out = &out + &pow.scale(&coeff);
    }
    out
}
