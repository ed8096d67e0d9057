//! Heat kernels exp(tA) of symmetric rate matrices and the entropy
//! H(B) = Σ −b log b of their entries.

use crate::error::{invalid, Error, Result};
use crate::rng::{self, streams};
use crate::stats::KahanSum;
use crate::trimming::big_to_f64;
use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, Zero};
use rand::Rng;
use std::fmt::Write as _;

const STRUCTURE_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-12;
/// Decreases of H smaller than this are treated as rounding.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Symmetric, nonnegative off the diagonal, zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    a: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<GeneratorMatrix> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return invalid("generator must be square and nonempty");
        }
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                let x = a[(i, j)];
                if !x.is_finite() {
                    return invalid(format!("entry ({i}, {j}) is not finite"));
                }
                if (x - a[(j, i)]).abs() > STRUCTURE_TOL {
                    return invalid(format!("not symmetric at ({i}, {j})"));
                }
                if i != j && x < 0.0 {
                    return invalid(format!("negative rate at ({i}, {j})"));
                }
                row += x;
            }
            if row.abs() > STRUCTURE_TOL {
                return invalid(format!("row {i} sums to {row}"));
            }
        }
        Ok(GeneratorMatrix { a })
    }

    /// Builds the generator from symmetric off-diagonal rates, filling the
    /// diagonal with minus the row sums.
    pub fn from_rates(rates: &DMatrix<f64>) -> Result<GeneratorMatrix> {
        let n = rates.nrows();
        let mut a = rates.clone();
        for i in 0..n {
            a[(i, i)] = 0.0;
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
            a[(i, i)] = -s;
        }
        GeneratorMatrix::new(a)
    }

    /// Off-diagonal rates independently 0 with probability 0.3, otherwise
    /// uniform on (0, 1).
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<GeneratorMatrix> {
        let mut rates = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let c = if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() };
                rates[(i, j)] = c;
                rates[(j, i)] = c;
            }
        }
        GeneratorMatrix::from_rates(&rates)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Adds `step` to the rate between `i` and `j`, compensating the
    /// diagonal.
    pub fn perturbed(&self, i: usize, j: usize, step: f64) -> Result<GeneratorMatrix> {
        if i == j || i >= self.n() || j >= self.n() {
            return invalid(format!("({i}, {j}) is not an off-diagonal pair"));
        }
        let mut rates = self.a.clone();
        rates[(i, j)] += step;
        rates[(j, i)] += step;
        GeneratorMatrix::from_rates(&rates)
    }
}

/// exp(tA) by symmetric eigendecomposition; entries in [−1e−12, 0) are
/// clamped to 0.
pub fn heat_kernel(a: &GeneratorMatrix, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time {t} must be a nonnegative real"));
    }
    let n = a.n();
    let eig = SymmetricEigen::try_new(a.a.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence {
        residual: f64::NAN,
        iterations: 10_000,
    })?;
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (t * l).exp()));
    let mut b = v * d * v.transpose();
    for i in 0..n {
        for j in 0..n {
            let x = b[(i, j)];
            if (-CLAMP_TOL..0.0).contains(&x) {
                b[(i, j)] = 0.0;
            }
        }
    }
    // Symmetrize away eigensolver asymmetry.
    let bt = b.transpose();
    Ok((b + bt) * 0.5)
}

/// H(B) = Σ −b log b with 0 log 0 = 0.
pub fn matrix_entropy(b: &DMatrix<f64>) -> Result<f64> {
    let mut s = KahanSum::default();
    for &x in b.iter() {
        if x < -CLAMP_TOL || x.is_nan() {
            return invalid(format!("entry {x} is negative"));
        }
        if x > 0.0 {
            s.add(-x * x.ln());
        }
    }
    Ok(s.value())
}

/// Fractional bits of the fixed-point re-verification.
const FIXED_BITS: u32 = 256;

fn to_fixed(x: f64) -> BigInt {
    let (mantissa, exp, sign) = x.integer_decode();
    let m = BigInt::from(mantissa) * BigInt::from(sign);
    let shift = exp as i64 + FIXED_BITS as i64;
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn from_fixed(x: &BigInt) -> f64 {
    big_to_f64(&BigRational::new(x.clone(), BigInt::one() << FIXED_BITS as usize))
}

type FixedMatrix = Vec<Vec<BigInt>>;

fn fixed_mul(a: &FixedMatrix, b: &FixedMatrix) -> FixedMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum::<BigInt>() >> FIXED_BITS as usize)
                .collect()
        })
        .collect()
}

/// exp(tA) in 256-bit fixed point: Taylor series of tA/2^s with
/// ‖tA/2^s‖_∞ ≤ 1/2, then s squarings. Independent of the eigensolver.
pub fn heat_kernel_fixed(a: &GeneratorMatrix, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time {t} must be a nonnegative real"));
    }
    let n = a.n();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a.a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t;
    let mut s = 0usize;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let tf = to_fixed(t);
    let scaled: FixedMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (to_fixed(a.a[(i, j)]) * &tf) >> (FIXED_BITS as usize + s))
                .collect()
        })
        .collect();
    let one = BigInt::one() << FIXED_BITS as usize;
    let identity: FixedMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut sum = identity.clone();
    let mut term = identity;
    // 0.5^k / k! drops below 2^−256 well before k = 60.
    for k in 1..=60u32 {
        term = fixed_mul(&term, &scaled);
        let kk = BigInt::from(k);
        term.iter_mut().flatten().for_each(|x| *x = &*x / &kk);
        if term.iter().flatten().all(|x| x.abs() <= BigInt::one()) {
            break;
        }
        for (row, trow) in sum.iter_mut().zip(&term) {
            for (x, y) in row.iter_mut().zip(trow) {
                *x += y;
            }
        }
    }
    for _ in 0..s {
        sum = fixed_mul(&sum, &sum);
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let x = from_fixed(&sum[i][j]);
        if (-CLAMP_TOL..0.0).contains(&x) {
            0.0
        } else {
            x
        }
    }))
}

/// One comparison: H(exp(t(A + step·E_ij))) − H(exp(tA)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub trial: usize,
    pub t: f64,
    pub pair: (usize, usize),
    pub h: f64,
    pub dh: f64,
}

/// A decrease of H that survived fixed-point re-verification.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub trial: usize,
    pub t: f64,
    pub pair: (usize, usize),
    pub step: f64,
    pub a: DMatrix<f64>,
    pub h_before: f64,
    pub h_after: f64,
}

impl Violation {
    /// Text dump that reproduces the counterexample.
    pub fn certificate(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# entropy monotonicity counterexample").unwrap();
        writeln!(out, "n {}", self.a.nrows()).unwrap();
        writeln!(out, "t {:?}", self.t).unwrap();
        writeln!(out, "pair {} {}", self.pair.0, self.pair.1).unwrap();
        writeln!(out, "step {:?}", self.step).unwrap();
        writeln!(out, "h_before {:?}", self.h_before).unwrap();
        writeln!(out, "h_after {:?}", self.h_after).unwrap();
        for i in 0..self.a.nrows() {
            let row: Vec<String> = (0..self.a.ncols()).map(|j| format!("{:?}", self.a[(i, j)])).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub step: f64,
    pub trials: usize,
    pub rows: Vec<ProbeRow>,
    /// Candidates below −[`VIOLATION_TOL`] that re-verification rejected.
    pub rejected_candidates: usize,
    pub violations: Vec<Violation>,
    /// Trials where H(exp(tA)) decreased along the t grid beyond the
    /// tolerance; reported only.
    pub time_decreases: usize,
}

/// Random A ∈ 𝒜_n and a random pair per trial; compares H before and after
/// raising that pair's rate by `step` at every t in the grid.
pub fn monotonicity_probe(n: usize, trials: usize, t_grid: &[f64], step: f64, seed: u64) -> Result<EntropyReport> {
    if !(2..=8).contains(&n) {
        return invalid(format!("n = {n} outside 2..=8"));
    }
    if !(step >= 0.0 && step.is_finite()) {
        return invalid(format!("step {step} must be nonnegative"));
    }
    if t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return invalid("times must be nonnegative reals");
    }
    type TrialOut = (Vec<ProbeRow>, usize, Vec<Violation>, bool);
    let per_trial = rng::par_map(trials, |trial| -> Result<TrialOut> {
        let mut rng = rng::stream_rng(seed, streams::ENTROPY, trial as u64);
        let a = GeneratorMatrix::random(n, &mut rng)?;
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let pair = (i.min(j), i.max(j));
        let b = a.perturbed(pair.0, pair.1, step)?;
        let mut rows = Vec::with_capacity(t_grid.len());
        let mut rejected = 0;
        let mut violations = Vec::new();
        let mut prev_h = f64::NEG_INFINITY;
        let mut time_decrease = false;
        for &t in t_grid {
            let h = matrix_entropy(&heat_kernel(&a, t)?)?;
            let dh = matrix_entropy(&heat_kernel(&b, t)?)? - h;
            if dh < -VIOLATION_TOL {
                let h0 = matrix_entropy(&heat_kernel_fixed(&a, t)?)?;
                let h1 = matrix_entropy(&heat_kernel_fixed(&b, t)?)?;
                if h1 - h0 < -VIOLATION_TOL {
                    violations.push(Violation {
                        trial,
                        t,
                        pair,
                        step,
                        a: a.matrix().clone(),
                        h_before: h0,
                        h_after: h1,
                    });
                } else {
                    rejected += 1;
                }
            }
            time_decrease |= h < prev_h - VIOLATION_TOL;
            prev_h = h;
            rows.push(ProbeRow { trial, t, pair, h, dh });
        }
        Ok((rows, rejected, violations, time_decrease))
    });
    let mut report = EntropyReport {
        n,
        t_grid: t_grid.to_vec(),
        step,
        trials,
        rows: Vec::with_capacity(trials * t_grid.len()),
        rejected_candidates: 0,
        violations: Vec::new(),
        time_decreases: 0,
    };
    for r in per_trial {
        let (rows, rejected, violations, dec) = r?;
        report.rows.extend(rows);
        report.rejected_candidates += rejected;
        report.violations.extend(violations);
        report.time_decreases += usize::from(dec);
    }
    Ok(report)
}

/// Binary entropy in nats.
pub fn binary_entropy(q: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    f(q) + f(1.0 - q)
}

/// H(exp(tA)) for A = [[−a, a], [a, −a]]: 2·h((1 − e^{−2at})/2).
pub fn two_state_entropy(a: f64, t: f64) -> f64 {
    2.0 * binary_entropy(-(-2.0 * a * t).exp_m1() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_state(a: f64) -> GeneratorMatrix {
        GeneratorMatrix::new(DMatrix::from_row_slice(2, 2, &[-a, a, a, -a])).unwrap()
    }

    #[test]
    fn rejects_invalid_generators() {
        assert!(GeneratorMatrix::new(DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.5, -0.5])).is_err());
        assert!(GeneratorMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).is_err());
        assert!(GeneratorMatrix::new(DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, 0.0])).is_err());
        assert!(heat_kernel(&two_state(1.0), -1.0).is_err());
    }

    #[test]
    fn identity_at_time_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = GeneratorMatrix::random(5, &mut rng).unwrap();
        let b = heat_kernel(&a, 0.0).unwrap();
        assert!((b - DMatrix::<f64>::identity(5, 5)).abs().max() < 1e-14);
        assert_eq!(matrix_entropy(&DMatrix::<f64>::identity(5, 5)).unwrap(), 0.0);
    }

    #[test]
    fn uniform_matrix_entropy() {
        for n in 2..6 {
            let b = DMatrix::from_element(n, n, 1.0 / n as f64);
            assert!((matrix_entropy(&b).unwrap() - n as f64 * (n as f64).ln()).abs() < 1e-12);
        }
        assert!(matrix_entropy(&DMatrix::from_row_slice(1, 2, &[-0.1, 1.1])).is_err());
    }

    #[test]
    fn two_state_closed_form() {
        for &a in &[0.1, 1.0, 3.7] {
            for &t in &[0.0, 0.01, 0.5, 2.0, 10.0] {
                let b = heat_kernel(&two_state(a), t).unwrap();
                let q = (1.0 - (-2.0 * a * t).exp()) / 2.0;
                assert!((b[(0, 1)] - q).abs() < 1e-12);
                assert!((b[(0, 0)] - (1.0 - q)).abs() < 1e-12);
                let h = matrix_entropy(&b).unwrap();
                assert!((h - two_state_entropy(a, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fixed_point_kernel_agrees_with_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let a = GeneratorMatrix::random(5, &mut rng).unwrap();
            for &t in &[0.1, 1.0, 10.0] {
                let e = heat_kernel(&a, t).unwrap();
                let f = heat_kernel_fixed(&a, t).unwrap();
                assert!((e - &f).abs().max() < 1e-12);
                let rows = f.column_sum();
                assert!(rows.iter().all(|&s| (s - 1.0).abs() < 1e-14));
            }
        }
        let q = heat_kernel_fixed(&two_state(1.0), 1.0).unwrap()[(0, 1)];
        assert!((q - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-16);
    }

    #[test]
    fn zero_step_gives_zero_difference() {
        let r = monotonicity_probe(4, 50, &[0.1, 1.0], 0.0, 3).unwrap();
        assert!(r.rows.iter().all(|row| row.dh == 0.0));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn two_state_probe_is_monotone() {
        let r = monotonicity_probe(2, 500, &[0.1, 1.0, 10.0], 1e-3, 4).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.rejected_candidates, 0);
        assert_eq!(r.rows.len(), 1500);
    }

    #[test]
    fn certificate_lists_matrix() {
        let v = Violation {
            trial: 0,
            t: 1.0,
            pair: (0, 1),
            step: 1e-3,
            a: two_state(1.0).matrix().clone(),
            h_before: 1.0,
            h_after: 0.5,
        };
        let text = v.certificate();
        assert!(text.contains("n 2"));
        assert!(text.lines().last().unwrap().starts_with("1.0 -1.0"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernels_are_doubly_stochastic(seed in 0u64..1_000_000, n in 2usize..8, t in 0.0f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = GeneratorMatrix::random(n, &mut rng).unwrap();
            let b = heat_kernel(&a, t).unwrap();
            for i in 0..n {
                prop_assert!((b.row(i).sum() - 1.0).abs() < 1e-10);
                prop_assert!((b.column(i).sum() - 1.0).abs() < 1e-10);
            }
            prop_assert!(b.iter().all(|&x| x >= 0.0));
            prop_assert!(matrix_entropy(&b).unwrap() >= 0.0);
        }
    }
}
