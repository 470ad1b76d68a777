//! Shared oracles and generators for the integration suites.
//!
//! Everything here is deliberately independent of the library's eigensolver
//! and LP paths: eigenvalues come from the characteristic polynomial via
//! Faddeev-LeVerrier plus Sturm bisection, inputs from a seeded RNG.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

/// Prints the one-line verdict for an acceptance criterion and panics on
/// failure so the suite stays red.
#[allow(dead_code)]
pub fn criterion(name: &str, result: Result<(), String>) {
    match result {
        Ok(()) => println!("PASS  {name}"),
        Err(msg) => {
            println!("FAIL  {name}: {msg}");
            panic!("{name}: {msg}");
        }
    }
}

/// Random Hermitian matrix with entries scaled to keep the spectrum O(1).
#[allow(dead_code)]
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> Array2<Complex64> {
    let scale = 1.0 / n as f64;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0) * scale, 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(
                rng.gen_range(-1.0..1.0) * scale,
                rng.gen_range(-1.0..1.0) * scale,
            );
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random unitary built from complex plane rotations.
#[allow(dead_code)]
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Array2<Complex64> {
    let mut u = Array2::<Complex64>::eye(n);
    for _ in 0..(3 * n * n) {
        let p = rng.gen_range(0..n);
        let mut q = rng.gen_range(0..n);
        while q == p {
            q = rng.gen_range(0..n);
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, s) = (theta.cos(), theta.sin());
        let e = Complex64::new(phi.cos(), phi.sin());
        // Columns p and q mix through [[c, s e], [-s conj(e), c]].
        for row in 0..n {
            let a = u[(row, p)];
            let b = u[(row, q)];
            u[(row, p)] = a * c - b * e.conj() * s;
            u[(row, q)] = a * e * s + b * c;
        }
    }
    u
}

/// Eigenvalues (descending) of a Hermitian matrix via its characteristic
/// polynomial: Faddeev-LeVerrier coefficients, Sturm-sequence isolation,
/// plain bisection refinement.
#[allow(dead_code)]
pub fn charpoly_eigenvalues(m: &Array2<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());

    // p(x) = x^n + a_{n-1} x^{n-1} + ... + a_0, coefficients stored
    // lowest-degree first.
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut mk = Array2::<Complex64>::zeros((n, n));
    for k in 1..=n {
        let mut next = m.dot(&mk);
        let shift = coeffs[n - k + 1];
        for i in 0..n {
            next[(i, i)] += Complex64::new(shift, 0.0);
        }
        mk = next;
        let product = m.dot(&mk);
        let trace: Complex64 = (0..n).map(|i| product[(i, i)]).sum();
        coeffs[n - k] = -trace.re / k as f64;
    }

    let chain = sturm_chain(&coeffs);
    let bound = 1.0
        + (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);

    let mut roots = Vec::with_capacity(n);
    let total = count_roots(&chain, -bound, bound);
    let mut stack = vec![(-bound, bound, total)];
    while let Some((lo, hi, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            roots.push(bisect_root(&coeffs, lo, hi));
            continue;
        }
        if hi - lo < 1e-12 {
            // Numerically degenerate cluster; emit the midpoint.
            let mid = 0.5 * (lo + hi);
            roots.extend(std::iter::repeat(mid).take(count));
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let left = count_roots(&chain, lo, mid);
        stack.push((lo, mid, left));
        stack.push((mid, hi, count - left));
    }
    assert_eq!(roots.len(), n, "oracle lost roots");
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_degree(p: &[f64]) -> usize {
    p.iter().rposition(|&c| c != 0.0).unwrap_or(0)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Remainder of `a / b`, rescaled to unit max coefficient. Positive scaling
/// preserves Sturm sign sequences.
fn poly_rem(mut a: Vec<f64>, b: &[f64]) -> Vec<f64> {
    let db = poly_degree(b);
    let lead = b[db];
    loop {
        let da = poly_degree(&a);
        if da < db || (da == 0 && a[0] == 0.0) {
            break;
        }
        let factor = a[da] / lead;
        for i in 0..=db {
            a[da - db + i] -= factor * b[i];
        }
        a[da] = 0.0;
        if da == 0 {
            break;
        }
    }
    a.truncate(poly_degree(&a) + 1);
    let max = a.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    if max > 0.0 {
        for c in a.iter_mut() {
            *c /= max;
        }
    }
    a
}

fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
    let mut chain = vec![p.to_vec(), poly_derivative(p)];
    loop {
        let last = &chain[chain.len() - 1];
        if poly_degree(last) == 0 {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let mut rem = poly_rem(prev.to_vec(), last);
        for c in rem.iter_mut() {
            *c = -*c;
        }
        if rem.iter().all(|&c| c == 0.0) {
            break;
        }
        chain.push(rem);
    }
    chain
}

fn sign_variations(chain: &[Vec<f64>], x: f64) -> usize {
    let mut variations = 0;
    let mut last_sign = 0i8;
    for p in chain {
        let v = poly_eval(p, x);
        let sign = if v > 1e-300 {
            1
        } else if v < -1e-300 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                variations += 1;
            }
            last_sign = sign;
        }
    }
    variations
}

fn count_roots(chain: &[Vec<f64>], lo: f64, hi: f64) -> usize {
    sign_variations(chain, lo).saturating_sub(sign_variations(chain, hi))
}

fn bisect_root(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = poly_eval(p, lo);
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = poly_eval(p, mid);
        if fmid == 0.0 {
            return mid;
        }
        if (flo < 0.0) == (fmid < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
