use bakernmr::qstate::*;
use bakernmr::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn random_hermitian(d: usize, vals: &[f64]) -> Mat {
    let mut m = Mat::zeros(d, d);
    let mut it = vals.iter().copied().cycle();
    for i in 0..d {
        m[(i, i)] = c(it.next().unwrap(), 0.0);
        for j in i + 1..d {
            let z = c(it.next().unwrap(), it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// exp(-i h t) by a long Taylor series with scaling and squaring.
fn taylor_expm(h: &Mat, t: f64) -> Mat {
    let d = h.nrows();
    let a = h * c(0.0, -t);
    let norm = max_abs(&a) * d as f64;
    let s = (norm.max(1.0).log2().ceil() as i32 + 1).max(0);
    let a = a / c(2f64.powi(s), 0.0);
    let mut term = identity(d);
    let mut sum = identity(d);
    for k in 1..40 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn random_unitary(d: usize, vals: &[f64]) -> UnitaryOperator {
    expm_hermitian(&HermitianOperator::new(random_hermitian(d, vals)).unwrap(), 1.0)
}

fn mixed_state(d: usize, vals: &[f64], weights: &[f64]) -> DensityMatrix {
    let u = random_unitary(d, vals);
    let total: f64 = weights.iter().take(d).sum();
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { c(weights[i] / total, 0.0) } else { c(0.0, 0.0) });
    DensityMatrix::new(u.matrix() * diag * u.matrix().adjoint()).unwrap()
}

#[test]
fn paulis_anticommute_and_square_to_one() {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    for p in [&x, &y, &z] {
        assert!(max_abs(&(p * p - identity(2))) < 1e-15);
    }
    assert!(max_abs(&(&x * &y - &z * c(0.0, 1.0))) < 1e-15);
    assert!(max_abs(&(&x * &y + &y * &x)) < 1e-15);
}

#[test]
fn kron_is_most_significant_first() {
    let zero = StateVector::basis(2, 0).unwrap();
    let one = StateVector::basis(2, 1).unwrap();
    // |1>|0>|0> has index 4
    let s = StateVector::product(&[one, zero.clone(), zero]).unwrap();
    assert_eq!(s.amplitudes()[4], c(1.0, 0.0));
}

#[test]
fn embed_matches_explicit_kron() {
    let x = pauli_x();
    let z = pauli_z();
    let i2 = identity(2);
    let order = ["a", "b", "c"];
    let got = embed(&x, &["b"], &order).unwrap();
    let want = kron_all(&[i2.clone(), x.clone(), i2.clone()]).unwrap();
    assert!(max_abs(&(got - want)) < 1e-15);

    // two targets listed out of register order
    let xz = kron(&x, &z).unwrap();
    let got = embed(&xz, &["c", "a"], &order).unwrap();
    let want = kron_all(&[z, i2, x]).unwrap();
    assert!(max_abs(&(got - want)) < 1e-15);
}

#[test]
fn embed_rejects_bad_labels() {
    let order = ["a", "b"];
    assert!(matches!(embed(&pauli_x(), &["q"], &order), Err(Error::UnknownLabel(_))));
    let xx = kron(&pauli_x(), &pauli_x()).unwrap();
    assert!(matches!(embed(&xx, &["a", "a"], &order), Err(Error::DuplicateLabel(_))));
    assert!(matches!(embed(&xx, &["a"], &order), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn dft_entries_match_definition() {
    let f = dft_matrix(8).unwrap();
    for k in 0..8 {
        for j in 0..8 {
            let ang = 2.0 * std::f64::consts::PI * (k * j) as f64 / 8.0;
            let want = c(ang.cos(), ang.sin()) / c(8f64.sqrt(), 0.0);
            assert!((f.matrix()[(k, j)] - want).norm() < 1e-14);
        }
    }
}

#[test]
fn dft_squared_is_index_reversal() {
    for d in [2, 4, 8, 16] {
        let f = dft_matrix(d).unwrap();
        let f2 = f.matrix() * f.matrix();
        for k in 0..d {
            for j in 0..d {
                let want = if (k + j) % d == 0 { 1.0 } else { 0.0 };
                assert!((f2[(k, j)] - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn entropy_of_known_spectra() {
    assert!((DensityMatrix::maximally_mixed(8).entropy_bits().unwrap() - 3.0).abs() < 1e-12);
    assert!(StateVector::basis(4, 2).unwrap().projector().entropy_bits().unwrap().abs() < 1e-12);
    let s = entropy_from_eigenvalues(&[0.5, 0.25, 0.25, 0.0]).unwrap();
    assert!((s - 1.5).abs() < 1e-15);
    // tiny negative round-off is tolerated, real negativity is not
    assert!(entropy_from_eigenvalues(&[1.0, -1e-12]).is_ok());
    assert!(matches!(entropy_from_eigenvalues(&[1.1, -0.1]), Err(Error::NegativeEigenvalue(_))));
}

#[test]
fn density_matrix_validation() {
    let bad_trace = identity(2);
    assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::TraceNotOne(_))));
    let mut nh = identity(2) / c(2.0, 0.0);
    nh[(0, 1)] = c(0.1, 0.0);
    assert!(matches!(DensityMatrix::new(nh), Err(Error::NotHermitian(_))));
    let neg = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
    assert!(matches!(DensityMatrix::new(neg), Err(Error::NegativeEigenvalue(_))));
    assert!(DensityMatrix::new(DMatrix::zeros(2, 3)).is_err());
}

#[test]
fn unitary_validation() {
    let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(UnitaryOperator::new(m), Err(Error::NotUnitary(_))));
    assert!(UnitaryOperator::new(hadamard()).is_ok());
}

#[test]
fn state_vector_validation() {
    let v = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(StateVector::new(v.clone()), Err(Error::NotNormalized(_))));
    let s = StateVector::normalized(v).unwrap();
    assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
    assert!(StateVector::basis(4, 4).is_err());
}

#[test]
fn distance_ignores_global_phase() {
    let u = random_unitary(4, &[0.3, -1.2, 0.7, 2.0, 0.1, -0.4]);
    let v = UnitaryOperator::new(u.matrix() * c(0.6, 0.8)).unwrap();
    assert!(phase_invariant_distance(&u, &v).unwrap() < 1e-14);
    let w = UnitaryOperator::new(hadamard()).unwrap();
    assert!(phase_invariant_distance(&UnitaryOperator::identity(2), &w).unwrap() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_agrees_with_taylor(vals in prop::collection::vec(-3.0f64..3.0, 16), t in -2.0f64..2.0) {
        let h = random_hermitian(4, &vals);
        let u = expm_hermitian(&HermitianOperator::new(h.clone()).unwrap(), t);
        prop_assert!(max_abs(&(u.matrix() - taylor_expm(&h, t))) < 1e-10);
        prop_assert!(u.deviation() < 1e-12);
    }

    #[test]
    fn expm_semigroup(vals in prop::collection::vec(-3.0f64..3.0, 16), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let h = HermitianOperator::new(random_hermitian(4, &vals)).unwrap();
        let lhs = expm_hermitian(&h, s).then(&expm_hermitian(&h, t));
        let rhs = expm_hermitian(&h, s + t);
        prop_assert!(max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-12);
    }

    #[test]
    fn dft_fourth_power_is_identity(d in 1usize..33) {
        let f = dft_matrix(d).unwrap();
        let f4 = f.matrix() * f.matrix() * f.matrix() * f.matrix();
        prop_assert!(max_abs(&(f4 - identity(d))) < 1e-12);
        prop_assert!(f.deviation() < 1e-12);
    }

    #[test]
    fn entropy_invariant_under_conjugation(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        b in prop::collection::vec(-2.0f64..2.0, 16),
        w in prop::collection::vec(0.01f64..1.0, 4),
    ) {
        let rho = mixed_state(4, &a, &w);
        let u = random_unitary(4, &b);
        let s0 = rho.entropy_bits().unwrap();
        let s1 = rho.conjugate(&u).unwrap().entropy_bits().unwrap();
        prop_assert!((s0 - s1).abs() < 1e-10);
        let total: f64 = w.iter().sum();
        let shannon: f64 = w.iter().map(|x| x / total).map(|p| -p * p.log2()).sum();
        prop_assert!((s0 - shannon).abs() < 1e-10);
    }

    #[test]
    fn purity_and_trace_bounds(a in prop::collection::vec(-2.0f64..2.0, 16), w in prop::collection::vec(0.0f64..1.0, 4)) {
        prop_assume!(w.iter().sum::<f64>() > 1e-3);
        let rho = mixed_state(4, &a, &w);
        let p = rho.purity();
        prop_assert!(p >= 0.25 - 1e-12 && p <= 1.0 + 1e-12);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let s = rho.entropy_bits().unwrap();
        prop_assert!(s >= -1e-12 && s <= 2.0 + 1e-12);
    }

    #[test]
    fn kron_mixed_product(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        b in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let (p, q) = (random_hermitian(2, &a), random_hermitian(2, &b));
        let (r, s) = (random_hermitian(2, &b[3..]), random_hermitian(2, &a[5..]));
        let lhs = kron(&p, &q).unwrap() * kron(&r, &s).unwrap();
        let rhs = kron(&(&p * &r), &(&q * &s)).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }
}

#[test]
fn nan_entries_fail_validation() {
    let mut m = identity(2) / c(2.0, 0.0);
    m[(0, 1)] = c(f64::NAN, 0.0);
    assert!(max_abs(&m).is_nan());
    assert!(DensityMatrix::new(m.clone()).is_err());
    assert!(UnitaryOperator::new(m.clone()).is_err());
    assert!(HermitianOperator::new(m).is_err());
    assert!(StateVector::new(DVector::from_vec(vec![c(f64::NAN, 0.0), c(0.0, 0.0)])).is_err());
    assert!(entropy_from_eigenvalues(&[f64::NAN]).is_err());
}
