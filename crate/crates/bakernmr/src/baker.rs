//! Gates on indexed qubits and the quantum baker's map.
//!
//! Qubit 0 is the least significant. Gate sequences are stored in execution
//! order: the first element acts first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::qstate::{self, kron, C64, Mat, StateVector, UnitaryOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    Hadamard(usize),
    /// e^{i theta} on basis states with a_m = a_n = 1.
    Phase(usize, usize, f64),
    Swap(usize, usize),
}

impl GateSpec {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange { index: q, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            GateSpec::Hadamard(m) => check(m),
            GateSpec::Phase(m, n, theta) => {
                check(m)?;
                check(n)?;
                if m == n {
                    return Err(Error::RepeatedQubit(m));
                }
                if !theta.is_finite() {
                    return Err(Error::NonFiniteAngle);
                }
                Ok(())
            }
            GateSpec::Swap(m, n) => {
                check(m)?;
                check(n)?;
                if m == n {
                    return Err(Error::RepeatedQubit(m));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateSpec::Hadamard(m) => write!(f, "A {m}"),
            GateSpec::Phase(m, n, t) => write!(f, "B {m} {n} {t:.16e}"),
            GateSpec::Swap(m, n) => write!(f, "S {m} {n}"),
        }
    }
}

/// Bits a_{N-1} ... a_0, stored most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty);
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse { line: 0, msg: "bits must be 0 or 1".into() });
        }
        Ok(Self { bits })
    }

    pub fn from_index(value: usize, n: usize) -> Result<Self> {
        if n == 0 || (n < usize::BITS as usize && value >> n != 0) {
            return Err(Error::InvalidDimension(value));
        }
        Self::new((0..n).rev().map(|k| ((value >> k) & 1) as u8).collect())
    }

    /// All 2^n strings in index order.
    pub fn all(n: usize) -> Vec<BitString> {
        (0..1usize << n).map(|v| Self::from_index(v, n).unwrap()).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// a_k, with k = 0 the least significant bit.
    pub fn bit(&self, k: usize) -> u8 {
        self.bits[self.bits.len() - 1 - k]
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapVariant {
    Full,
    Simplified,
}

pub fn gate_unitary(g: &GateSpec, n_qubits: usize) -> Result<UnitaryOperator> {
    g.validate(n_qubits)?;
    let dim = 1usize << n_qubits;
    let m = match *g {
        GateSpec::Hadamard(q) => {
            // register labels listed most significant first
            let order: Vec<usize> = (0..n_qubits).rev().collect();
            qstate::embed(&qstate::hadamard(), &[q], &order)?
        }
        GateSpec::Phase(a, b, theta) => {
            let mut m = qstate::identity(dim);
            let ph = C64::from_polar(1.0, theta);
            for j in 0..dim {
                if (j >> a) & 1 == 1 && (j >> b) & 1 == 1 {
                    m[(j, j)] = ph;
                }
            }
            m
        }
        GateSpec::Swap(a, b) => {
            let mut m = Mat::zeros(dim, dim);
            for j in 0..dim {
                let (ba, bb) = ((j >> a) & 1, (j >> b) & 1);
                let k = (j & !((1 << a) | (1 << b))) | (ba << b) | (bb << a);
                m[(k, j)] = C64::new(1.0, 0.0);
            }
            m
        }
    };
    Ok(UnitaryOperator::from_matrix_unchecked(m))
}

/// Product of a gate list in execution order.
pub fn sequence_product(gates: &[GateSpec], n_qubits: usize) -> Result<UnitaryOperator> {
    let mut u = UnitaryOperator::identity(1 << n_qubits);
    for g in gates {
        u = u.then(&gate_unitary(g, n_qubits)?);
    }
    Ok(u)
}

/// F_N^{-1} (I (x) F_{N-1}), identity on the most significant qubit.
pub fn baker_unitary(n_qubits: usize) -> Result<UnitaryOperator> {
    if n_qubits < 2 {
        return Err(Error::Unsupported(format!("baker map needs at least 2 qubits, got {n_qubits}")));
    }
    let d = 1usize << n_qubits;
    let f_inv = qstate::dft_matrix(d)?.adjoint();
    let half = qstate::dft_matrix(d / 2)?;
    let right = kron(&qstate::identity(2), half.matrix())?;
    Ok(UnitaryOperator::from_matrix_unchecked(f_inv.matrix() * right))
}

fn require_three(n_qubits: usize) -> Result<()> {
    if n_qubits != 3 {
        return Err(Error::Unsupported(format!("gate sequence given for 3 qubits only, got {n_qubits}")));
    }
    Ok(())
}

/// The 11-gate decomposition of the three-qubit baker's map.
pub fn baker_gate_sequence(n_qubits: usize) -> Result<Vec<GateSpec>> {
    use GateSpec::*;
    require_three(n_qubits)?;
    Ok(vec![
        Hadamard(1),
        Phase(0, 1, FRAC_PI_2),
        Hadamard(0),
        Swap(0, 1),
        Hadamard(2),
        Phase(1, 2, -FRAC_PI_2),
        Hadamard(1),
        Phase(0, 2, -FRAC_PI_4),
        Phase(0, 1, -FRAC_PI_2),
        Hadamard(0),
        Swap(0, 2),
    ])
}

/// Controlled rotations from the top qubit, a Hadamard on it, then a cyclic
/// shift of the register.
pub fn simplified_baker_gate_sequence(n_qubits: usize) -> Result<Vec<GateSpec>> {
    use GateSpec::*;
    require_three(n_qubits)?;
    Ok(vec![
        Phase(2, 0, -FRAC_PI_2),
        Phase(2, 1, -FRAC_PI_4),
        Hadamard(2),
        Swap(2, 0),
        Swap(2, 1),
    ])
}

/// (|0> + e^{i phi}|1>)/sqrt 2
fn phase_qubit(phi: f64) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = DVector::from_vec(vec![C64::new(s, 0.0), C64::from_polar(s, phi)]);
    StateVector::new(v).expect("normalized by construction")
}

fn basis_qubit(b: u8) -> StateVector {
    StateVector::basis(2, b as usize).expect("valid basis index")
}

/// Binary fraction 0.b_1 b_2 ... for the given bits.
fn binary_fraction(bits: &[u8]) -> f64 {
    bits.iter().enumerate().map(|(i, &b)| b as f64 * 0.5f64.powi(i as i32 + 1)).sum()
}

fn fraction_qubit(bits: &[u8]) -> StateVector {
    phase_qubit(-2.0 * PI * binary_fraction(bits))
}

/// a_k for k in the given order.
fn pick(bits: &BitString, ks: impl Iterator<Item = usize>) -> Vec<u8> {
    ks.map(|k| bits.bit(k)).collect()
}

pub fn shift_domain_state(bits: &BitString, variant: MapVariant) -> Result<StateVector> {
    let n = bits.len();
    let mut factors = vec![basis_qubit(bits.bit(n - 1))];
    for m in 1..n {
        let frac = match variant {
            // 0.a_{m-1} ... a_0
            MapVariant::Full => pick(bits, (0..m).rev()),
            // 0.a_{m-1} ... a_{N-2}
            MapVariant::Simplified => pick(bits, (m - 1)..(n - 1)),
        };
        factors.push(fraction_qubit(&frac));
    }
    StateVector::product(&factors)
}

pub fn shift_image_state(bits: &BitString, variant: MapVariant) -> Result<StateVector> {
    let n = bits.len();
    let factors: Vec<StateVector> = (0..n)
        .map(|m| {
            let frac = match variant {
                // 0.a_m ... a_0
                MapVariant::Full => pick(bits, (0..=m).rev()),
                // 0.a_m ... a_{N-1}
                MapVariant::Simplified => pick(bits, m..n),
            };
            fraction_qubit(&frac)
        })
        .collect();
    StateVector::product(&factors)
}

/// Unitary of either map variant for three qubits.
pub fn map_unitary(variant: MapVariant) -> Result<UnitaryOperator> {
    match variant {
        MapVariant::Full => baker_unitary(3),
        MapVariant::Simplified => sequence_product(&simplified_baker_gate_sequence(3)?, 3),
    }
}
