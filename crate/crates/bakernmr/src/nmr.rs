//! Three-spin NMR machine model and pulse-level compiler.
//!
//! Register order is [H, C1, C2] with H the most significant factor.
//! Rotations are X(theta) = exp(i theta X/2), Y(theta) = exp(i theta Y/2);
//! a delay of length t is exp(-i H t). Sequences are in execution order.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qstate::{
    self, expm_from_eigen, phase_invariant_distance, HermitianOperator, Mat, UnitaryOperator, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    H,
    C1,
    C2,
}

pub const REGISTER: [Spin; 3] = [Spin::H, Spin::C1, Spin::C2];

impl Spin {
    pub fn name(self) -> &'static str {
        match self {
            Spin::H => "H",
            Spin::C1 => "C1",
            Spin::C2 => "C2",
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Spin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(Spin::H),
            "C1" => Ok(Spin::C1),
            "C2" => Ok(Spin::C2),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Place a one- or two-spin operator on the register.
pub fn embed_spins(op: &Mat, targets: &[Spin]) -> Result<Mat> {
    qstate::embed(op, targets, &REGISTER)
}

pub fn spin_z(s: Spin) -> Mat {
    embed_spins(&qstate::pauli_z(), &[s]).expect("single spin on register")
}

fn spin_op(op: &Mat, s: Spin) -> Mat {
    embed_spins(op, &[s]).expect("single spin on register")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianVariant {
    /// All couplings including the C1-C2 flip-flop terms.
    Full,
    /// Drops XX and YY between the carbons.
    NoXY,
    /// Also drops the weak H-C2 coupling; diagonal.
    Simplified,
}

impl fmt::Display for HamiltonianVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HamiltonianVariant::Full => "full",
            HamiltonianVariant::NoXY => "noxy",
            HamiltonianVariant::Simplified => "simplified",
        })
    }
}

impl FromStr for HamiltonianVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "noxy" => Ok(Self::NoXY),
            "simplified" => Ok(Self::Simplified),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// How coupling magnitudes become angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyConvention {
    /// Use the magnitudes as rad/s.
    Angular,
    /// Treat them as Hz and multiply by 2 pi.
    Cycles,
}

impl FrequencyConvention {
    pub fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Angular => 1.0,
            FrequencyConvention::Cycles => 2.0 * PI,
        }
    }
}

impl fmt::Display for FrequencyConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyConvention::Angular => "angular",
            FrequencyConvention::Cycles => "cycles",
        })
    }
}

impl FromStr for FrequencyConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angular" => Ok(Self::Angular),
            "cycles" => Ok(Self::Cycles),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

pub const J1: f64 = 203.0;
pub const J2: f64 = 102.0;
pub const J3: f64 = 10.0;
pub const DELTA: f64 = -905.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianModel {
    pub variant: HamiltonianVariant,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub delta: f64,
    pub convention: FrequencyConvention,
}

impl Default for HamiltonianModel {
    fn default() -> Self {
        Self::measured(HamiltonianVariant::NoXY)
    }
}

impl HamiltonianModel {
    /// Measured trichloroethylene couplings.
    pub fn measured(variant: HamiltonianVariant) -> Self {
        Self { variant, j1: J1, j2: J2, j3: J3, delta: DELTA, convention: FrequencyConvention::Angular }
    }

    /// Simplified Hamiltonian with j2 = j1/2 exactly, under which the pulse
    /// sequences are exact.
    pub fn exact_ratio() -> Self {
        Self { variant: HamiltonianVariant::Simplified, j2: J1 / 2.0, ..Self::measured(HamiltonianVariant::Simplified) }
    }

    pub fn with_convention(mut self, convention: FrequencyConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_variant(mut self, variant: HamiltonianVariant) -> Self {
        self.variant = variant;
        self
    }

    /// Angular-frequency values actually placed in the matrix.
    pub fn j1_rad(&self) -> f64 {
        self.j1 * self.convention.factor()
    }
    pub fn j2_rad(&self) -> f64 {
        self.j2 * self.convention.factor()
    }
    pub fn j3_rad(&self) -> f64 {
        self.j3 * self.convention.factor()
    }
    pub fn delta_rad(&self) -> f64 {
        self.delta * self.convention.factor()
    }

    /// pi / 2 j1
    pub fn tau1(&self) -> f64 {
        PI / (2.0 * self.j1_rad())
    }
}

pub fn hamiltonian_matrix(model: &HamiltonianModel) -> HermitianOperator {
    let z = qstate::pauli_z();
    let x = qstate::pauli_x();
    let y = qstate::pauli_y();
    let zz = z.kronecker(&z);
    let quarter = |v: f64| C64::new(v / 4.0, 0.0);
    let mut h = embed_spins(&zz, &[Spin::H, Spin::C1]).unwrap() * quarter(model.j1_rad());
    h += embed_spins(&zz, &[Spin::C1, Spin::C2]).unwrap() * quarter(model.j2_rad());
    if model.variant == HamiltonianVariant::Full {
        let flip = x.kronecker(&x) + y.kronecker(&y);
        h += embed_spins(&flip, &[Spin::C1, Spin::C2]).unwrap() * quarter(model.j2_rad());
    }
    if model.variant != HamiltonianVariant::Simplified {
        h += embed_spins(&zz, &[Spin::H, Spin::C2]).unwrap() * quarter(model.j3_rad());
    }
    h += spin_z(Spin::C2) * C64::new(model.delta_rad() / 2.0, 0.0);
    HermitianOperator::new(h).expect("Hamiltonian is Hermitian by construction")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse {
    RotX(Spin, f64),
    RotY(Spin, f64),
    /// Free evolution, seconds.
    Delay(f64),
}

impl Pulse {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Pulse::RotX(_, a) | Pulse::RotY(_, a) if !a.is_finite() => Err(Error::NonFiniteAngle),
            Pulse::Delay(t) if !(t >= 0.0) || !t.is_finite() => Err(Error::NegativeDuration(t)),
            _ => Ok(()),
        }
    }
}

/// Unitary of a rotation pulse: cos(a/2) I + i sin(a/2) P on one spin.
pub fn rotation_unitary(pauli: &Mat, spin: Spin, angle: f64) -> UnitaryOperator {
    let p = spin_op(pauli, spin);
    let m = qstate::identity(8) * C64::new((angle / 2.0).cos(), 0.0) + p * C64::new(0.0, (angle / 2.0).sin());
    UnitaryOperator::from_matrix_unchecked(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub name: String,
    pub convention: FrequencyConvention,
    /// Logical-bit to spin assignment before and after the sequence, if any.
    pub labeling: Option<String>,
    pub instructions: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(name: &str, convention: FrequencyConvention, instructions: Vec<Pulse>) -> Self {
        Self { name: name.to_string(), convention, labeling: None, instructions }
    }

    pub fn empty(name: &str) -> Self {
        Self::new(name, FrequencyConvention::Angular, Vec::new())
    }

    pub fn total_delay(&self) -> f64 {
        self.instructions
            .iter()
            .map(|p| if let Pulse::Delay(t) = p { *t } else { 0.0 })
            .sum()
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.instructions.iter().try_for_each(Pulse::validate)
    }

    /// Append another sequence to run after this one.
    pub fn extend(&mut self, other: &PulseSequence) {
        self.instructions.extend_from_slice(&other.instructions);
    }

    /// Number of distinct delay durations, compared bitwise.
    pub fn distinct_delays(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in &self.instructions {
            if let Pulse::Delay(t) = *p {
                if !out.iter().any(|u| u.to_bits() == t.to_bits()) {
                    out.push(t);
                }
            }
        }
        out
    }
}

pub fn pulse_unitary(p: &Pulse, model: &HamiltonianModel) -> Result<UnitaryOperator> {
    p.validate()?;
    Ok(match *p {
        Pulse::RotX(s, a) => rotation_unitary(&qstate::pauli_x(), s, a),
        Pulse::RotY(s, a) => rotation_unitary(&qstate::pauli_y(), s, a),
        Pulse::Delay(t) => qstate::expm_hermitian(&hamiltonian_matrix(model), t),
    })
}

/// Noiseless product of a sequence, first instruction applied first.
pub fn sequence_unitary(seq: &PulseSequence, model: &HamiltonianModel) -> Result<UnitaryOperator> {
    seq.validate()?;
    let (vals, vecs) = hamiltonian_matrix(model).eigen();
    let mut u = UnitaryOperator::identity(8);
    for p in &seq.instructions {
        let step = match *p {
            Pulse::Delay(t) => expm_from_eigen(&vals, &vecs, t),
            _ => pulse_unitary(p, model)?,
        };
        u = u.then(&step);
    }
    Ok(u)
}

// ---- ideal gate-level targets on physical spins ----

/// exp(i theta Z/2) on one spin; what the three-pulse z-rotations produce.
pub fn z_rotation(s: Spin, theta: f64) -> UnitaryOperator {
    let mut m = Mat::zeros(2, 2);
    m[(0, 0)] = C64::from_polar(1.0, theta / 2.0);
    m[(1, 1)] = C64::from_polar(1.0, -theta / 2.0);
    UnitaryOperator::from_matrix_unchecked(spin_op(&m, s))
}

pub fn spin_hadamard(s: Spin) -> UnitaryOperator {
    UnitaryOperator::from_matrix_unchecked(spin_op(&qstate::hadamard(), s))
}

pub fn spin_swap(a: Spin, b: Spin) -> Result<UnitaryOperator> {
    Ok(UnitaryOperator::from_matrix_unchecked(embed_spins(&qstate::swap2(), &[a, b])?))
}

/// Phase gate as realized by refocused coupling:
/// exp(i theta (Z_a + Z_b + Z_a Z_b)/4). Up to a global phase this puts
/// e^{i theta} on the state with both spins in |0>.
pub fn nmr_phase_gate(a: Spin, b: Spin, theta: f64) -> Result<UnitaryOperator> {
    if a == b {
        return Err(Error::DuplicateLabel(a.to_string()));
    }
    let za = spin_z(a);
    let zb = spin_z(b);
    let diag = &za + &zb + &za * &zb;
    let m = Mat::from_fn(8, 8, |i, j| {
        if i == j {
            C64::from_polar(1.0, theta * diag[(i, i)].re / 4.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(UnitaryOperator::from_matrix_unchecked(m))
}

/// Product of unitaries written left to right as operators (rightmost acts first).
pub fn operator_product(ops: &[UnitaryOperator]) -> UnitaryOperator {
    ops.iter().fold(UnitaryOperator::identity(8), |acc, u| &acc * u)
}

/// S_{C1H} A_{C1} B_{C1C2}(-pi/4) B_{C1H}(-pi/2)
pub fn ideal_t_odd() -> UnitaryOperator {
    use Spin::*;
    operator_product(&[
        spin_swap(C1, H).unwrap(),
        spin_hadamard(C1),
        nmr_phase_gate(C1, C2, -FRAC_PI_4).unwrap(),
        nmr_phase_gate(C1, H, -FRAC_PI_2).unwrap(),
    ])
}

/// S_{C1C2} A_{C1} B_{C1H}(-pi/4) B_{C1C2}(-pi/2)
pub fn ideal_t_even() -> UnitaryOperator {
    use Spin::*;
    operator_product(&[
        spin_swap(C1, C2).unwrap(),
        spin_hadamard(C1),
        nmr_phase_gate(C1, H, -FRAC_PI_4).unwrap(),
        nmr_phase_gate(C1, C2, -FRAC_PI_2).unwrap(),
    ])
}

/// S01 S02 A0 B02(-pi/4) B01(-pi/2) with logical bits placed on the given
/// spins. The odd steps use bits (C1, H, C2); even steps (C1, C2, H).
pub fn labeled_simplified_map(bits: [Spin; 3]) -> Result<UnitaryOperator> {
    let [b0, b1, b2] = bits;
    Ok(operator_product(&[
        spin_swap(b0, b1)?,
        spin_swap(b0, b2)?,
        spin_hadamard(b0),
        nmr_phase_gate(b0, b2, -FRAC_PI_4)?,
        nmr_phase_gate(b0, b1, -FRAC_PI_2)?,
    ]))
}

/// Full baker's map with the two outer bit-0/1 swaps absorbed, bits 0, 1, 2
/// on H, C1, C2.
pub fn ideal_full_baker() -> UnitaryOperator {
    use Spin::*;
    operator_product(&[
        spin_swap(C1, C2).unwrap(),
        spin_hadamard(C1),
        nmr_phase_gate(H, C1, -FRAC_PI_2).unwrap(),
        nmr_phase_gate(C1, C2, -FRAC_PI_4).unwrap(),
        spin_hadamard(H),
        spin_swap(H, C1).unwrap(),
        nmr_phase_gate(C1, C2, -FRAC_PI_2).unwrap(),
        spin_hadamard(C2),
        spin_hadamard(C1),
        nmr_phase_gate(H, C1, FRAC_PI_2).unwrap(),
        spin_hadamard(H),
    ])
}

/// exp(-4 i delta tau4 Z_C2)
pub fn ideal_t_regular(model: &HamiltonianModel) -> UnitaryOperator {
    let tau4 = 21.0 * model.tau1() / 16.0;
    z_rotation(Spin::C2, -8.0 * model.delta_rad() * tau4)
}

// ---- building blocks ----

fn x(s: Spin, a: f64) -> Pulse {
    Pulse::RotX(s, a)
}
fn y(s: Spin, a: f64) -> Pulse {
    Pulse::RotY(s, a)
}
fn u(t: f64) -> Pulse {
    Pulse::Delay(t)
}

/// Convert a right-to-left written product into execution order.
fn from_written(mut written: Vec<Pulse>) -> Vec<Pulse> {
    written.reverse();
    written
}

/// Three-pulse z-rotation, realizing exp(i angle Z/2) up to phase.
pub fn z_rotation_pulses(spin: Spin, angle: f64, variant: u8) -> Result<PulseSequence> {
    let s = spin;
    let written = match variant {
        1 => vec![x(s, -FRAC_PI_2), y(s, angle), x(s, FRAC_PI_2)],
        2 => vec![x(s, FRAC_PI_2), y(s, -angle), x(s, -FRAC_PI_2)],
        3 => vec![y(s, FRAC_PI_2), x(s, angle), y(s, -FRAC_PI_2)],
        4 => vec![y(s, -FRAC_PI_2), x(s, -angle), y(s, FRAC_PI_2)],
        v => return Err(Error::Unsupported(format!("z-rotation variant {v}"))),
    };
    Ok(PulseSequence::new("z_rotation", FrequencyConvention::Angular, from_written(written)))
}

pub fn hadamard_pulses(spin: Spin, variant: u8) -> Result<PulseSequence> {
    let s = spin;
    let written = match variant {
        1 => vec![y(s, FRAC_PI_2), x(s, PI)],
        2 => vec![x(s, -PI), y(s, -FRAC_PI_2)],
        v => return Err(Error::Unsupported(format!("Hadamard variant {v}"))),
    };
    Ok(PulseSequence::new("hadamard", FrequencyConvention::Angular, from_written(written)))
}

/// Coupled neighbour pairs; C1 sits in the middle of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pair {
    C1H,
    C1C2,
}

impl Pair {
    pub fn from_spins(a: Spin, b: Spin) -> Result<Self> {
        use Spin::*;
        match (a, b) {
            (C1, H) | (H, C1) => Ok(Pair::C1H),
            (C1, C2) | (C2, C1) => Ok(Pair::C1C2),
            _ => Err(Error::NotNeighbors(a.to_string(), b.to_string())),
        }
    }

    pub fn spins(self) -> (Spin, Spin) {
        match self {
            Pair::C1H => (Spin::C1, Spin::H),
            Pair::C1C2 => (Spin::C1, Spin::C2),
        }
    }

    /// The spin whose couplings must be refocused.
    pub fn spectator(self) -> Spin {
        match self {
            Pair::C1H => Spin::C2,
            Pair::C1C2 => Spin::H,
        }
    }
}

/// Refocused phase gate B(-theta) for theta > 0, in the
/// exp(i phi (Z_i + Z_j + Z_i Z_j)/4) form. theta = 0 gives an empty sequence.
pub fn phase_gate_pulses(pair: Pair, theta: f64, model: &HamiltonianModel) -> Result<PulseSequence> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    if theta < 0.0 {
        return Err(Error::Unsupported(format!(
            "phase gate pulses realize B(-theta) with theta > 0, got theta = {theta}"
        )));
    }
    let name = match pair {
        Pair::C1H => "phase_c1h",
        Pair::C1C2 => "phase_c1c2",
    };
    let mut seq = PulseSequence::new(name, model.convention, Vec::new());
    if theta == 0.0 {
        return Ok(seq);
    }
    let j = match pair {
        Pair::C1H => model.j1_rad(),
        Pair::C1C2 => model.j2_rad(),
    };
    let tau = theta / (2.0 * j);
    let spec = pair.spectator();
    seq.instructions.extend([u(tau), x(spec, PI), u(tau), x(spec, PI)]);
    let (a, b) = pair.spins();
    let mut zb = -theta / 2.0;
    if pair == Pair::C1C2 {
        // undo the offset precession of C2 accumulated over both delays
        zb += 2.0 * model.delta_rad() * tau;
    }
    seq.extend(&z_rotation_pulses(a, -theta / 2.0, 1)?);
    seq.extend(&z_rotation_pulses(b, zb, 1)?);
    Ok(seq)
}

/// C = A_target B(pi) A_target. With the refocused phase gate the control is
/// active on |0>, and the result carries an extra Z on the control (which
/// cancels in `swap_pulses`).
pub fn cnot_pulses(target: Spin, control: Spin, model: &HamiltonianModel) -> Result<PulseSequence> {
    let pair = Pair::from_spins(target, control)?;
    let mut seq = PulseSequence::new("cnot", model.convention, Vec::new());
    seq.extend(&hadamard_pulses(target, 1)?);
    seq.extend(&phase_gate_pulses(pair, PI, model)?);
    seq.extend(&hadamard_pulses(target, 1)?);
    Ok(seq)
}

/// S = C_ab C_ba C_ab
pub fn swap_pulses(a: Spin, b: Spin, model: &HamiltonianModel) -> Result<PulseSequence> {
    Pair::from_spins(a, b)?;
    let mut seq = PulseSequence::new("swap", model.convention, Vec::new());
    seq.extend(&cnot_pulses(a, b, model)?);
    seq.extend(&cnot_pulses(b, a, model)?);
    seq.extend(&cnot_pulses(a, b, model)?);
    Ok(seq)
}

// ---- the canned map sequences ----

pub const ODD_LABELING: &str = "in: bit0=C1 bit1=H bit2=C2; out: bit0=C1 bit1=C2 bit2=H";
pub const EVEN_LABELING: &str = "in: bit0=C1 bit1=C2 bit2=H; out: bit0=C1 bit1=H bit2=C2";

fn canned(name: &str, model: &HamiltonianModel, labeling: Option<&str>, written: Vec<Pulse>) -> PulseSequence {
    PulseSequence {
        name: name.to_string(),
        convention: model.convention,
        labeling: labeling.map(str::to_string),
        instructions: from_written(written),
    }
}

/// Odd step of the simplified map, 7 tau1 of delay.
pub fn t_odd(model: &HamiltonianModel) -> PulseSequence {
    use Spin::*;
    let t1 = model.tau1();
    let d = model.delta_rad();
    canned(
        "t_odd",
        model,
        Some(ODD_LABELING),
        vec![
            x(H, -3.0 * FRAC_PI_2), y(H, -FRAC_PI_2), y(C1, FRAC_PI_2), x(C1, -FRAC_PI_2),
            y(C1, -FRAC_PI_2), u(t1), x(C2, PI), u(t1), x(H, -3.0 * FRAC_PI_2),
            x(C1, -3.0 * FRAC_PI_2), y(H, -FRAC_PI_2), y(C1, -FRAC_PI_2),
            u(t1), x(C2, PI), u(t1), x(H, -3.0 * FRAC_PI_2), x(C1, -3.0 * FRAC_PI_2),
            y(H, -FRAC_PI_2), y(C1, -FRAC_PI_2), u(t1),
            x(C2, PI), u(t1), x(C2, FRAC_PI_2),
            y(C2, d * t1 - FRAC_PI_8),
            x(C2, FRAC_PI_2), x(H, -5.0 * FRAC_PI_4), y(H, -FRAC_PI_2), x(C1, -11.0 * FRAC_PI_8),
            y(C1, -FRAC_PI_2), u(t1),
        ],
    )
}

fn t_even_written(model: &HamiltonianModel, corrected: bool) -> Vec<Pulse> {
    use Spin::*;
    let t1 = model.tau1();
    let t2 = 2.0 * t1;
    let t3 = t1 / 2.0;
    let d = model.delta_rad();
    // the two refocusing pulses of the inner CNOTs and the closing y pair
    let (refocus, close) = if corrected { (H, -FRAC_PI_2) } else { (C1, FRAC_PI_2) };
    vec![
        x(C2, 2.0 * d * t2 - 3.0 * FRAC_PI_2), y(C2, close),
        y(C1, close), x(C1, FRAC_PI_2), y(C1, FRAC_PI_2), u(t2), x(H, PI),
        u(t2), x(C1, -3.0 * FRAC_PI_2), x(C2, 2.0 * d * t2 - 3.0 * FRAC_PI_2),
        y(C1, -FRAC_PI_2), y(C2, -FRAC_PI_2), u(t2), x(refocus, PI), u(t2),
        x(C1, -3.0 * FRAC_PI_2), x(C2, 2.0 * d * t2 - 3.0 * FRAC_PI_2),
        y(C1, -FRAC_PI_2), y(C2, -FRAC_PI_2), u(t2), x(refocus, PI), u(t2),
        x(H, FRAC_PI_2), y(H, -FRAC_PI_8), x(H, -FRAC_PI_2), x(C2, 4.0 * d * t3 - 5.0 * FRAC_PI_4),
        y(C2, -FRAC_PI_2), x(C1, -11.0 * FRAC_PI_8),
        y(C1, -FRAC_PI_2), u(3.0 * t3 / 2.0),
        x(H, PI), u(5.0 * t3 / 2.0),
    ]
}

/// Even step of the simplified map, 14 tau1 of delay.
///
/// Differs from `t_even_uncorrected` in four pulses: the inner CNOTs
/// refocus with X_H(pi) rather than X_C1(pi), and the closing Y_C1, Y_C2
/// rotations are by -pi/2.
pub fn t_even(model: &HamiltonianModel) -> PulseSequence {
    canned("t_even", model, Some(EVEN_LABELING), t_even_written(model, true))
}

/// Uncorrected even step: the four pulses fixed in `t_even` left as they
/// were first written. Does not realize the even map.
pub fn t_even_uncorrected(model: &HamiltonianModel) -> PulseSequence {
    canned("t_even_uncorrected", model, Some(EVEN_LABELING), t_even_written(model, false))
}

/// Regular comparison map: eight refocused delays of tau4 = 21 tau1 / 16.
pub fn t_regular(model: &HamiltonianModel) -> PulseSequence {
    let tau4 = 21.0 * model.tau1() / 16.0;
    let mut ins = Vec::with_capacity(16);
    for _ in 0..8 {
        ins.push(u(tau4));
        ins.push(x(Spin::C1, PI));
    }
    PulseSequence {
        name: "t_regular".into(),
        convention: model.convention,
        labeling: None,
        instructions: ins,
    }
}

/// Pulse realization of the full baker's map, bits 0, 1, 2 on H, C1, C2,
/// with tau = tau1 / 2.
pub fn full_baker(model: &HamiltonianModel) -> PulseSequence {
    use Spin::*;
    let tau = model.tau1() / 2.0;
    let d = model.delta_rad();
    canned(
        "full_baker",
        model,
        Some("bit0=H bit1=C1 bit2=C2; outer S01 swaps absorbed"),
        vec![
            y(C1, FRAC_PI_2), x(H, PI), x(C1, PI), u(4.0 * tau), x(H, PI), u(4.0 * tau),
            y(C2, FRAC_PI_2), x(C2, 8.0 * tau * d), y(C2, 8.0 * tau * d - FRAC_PI_2),
            x(C1, FRAC_PI_2), x(C2, FRAC_PI_2), u(4.0 * tau), x(H, PI), u(4.0 * tau),
            y(C1, FRAC_PI_2), y(C2, FRAC_PI_2), x(C1, PI), x(C2, PI), u(4.0 * tau),
            x(H, PI), u(4.0 * tau), x(C1, -FRAC_PI_2), x(C2, -FRAC_PI_2), y(C1, -3.0 * FRAC_PI_4),
            x(C1, FRAC_PI_2), y(C2, 8.0 * d * tau - FRAC_PI_2), x(C2, -FRAC_PI_2),
            u(tau), x(C2, PI), u(tau), x(C1, FRAC_PI_2), x(H, FRAC_PI_2), y(H, FRAC_PI_4),
            x(H, FRAC_PI_2), y(C1, FRAC_PI_8), x(C1, -FRAC_PI_2), u(tau),
            x(H, PI), u(tau), x(C2, FRAC_PI_2), y(C2, FRAC_PI_8 - 2.0 * d * tau), x(C2, FRAC_PI_2),
            u(2.0 * tau), x(C2, PI), u(2.0 * tau), x(C1, FRAC_PI_2),
            x(H, FRAC_PI_2), u(2.0 * tau), x(C2, PI), u(2.0 * tau), x(H, -3.0 * FRAC_PI_2),
            y(H, -FRAC_PI_2), x(C1, -3.0 * FRAC_PI_2), y(C1, -FRAC_PI_2), u(2.0 * tau),
            x(C2, PI), u(2.0 * tau), y(H, FRAC_PI_2), u(2.0 * tau), x(H, PI), u(2.0 * tau),
            y(C2, FRAC_PI_2), x(C2, 4.0 * d * tau - FRAC_PI_4), x(C1, -FRAC_PI_2),
            y(C1, -FRAC_PI_4), x(C1, -5.0 * FRAC_PI_4), y(C1, -FRAC_PI_2), u(3.0 * tau),
            x(C2, PI), u(3.0 * tau), y(H, FRAC_PI_2), x(H, FRAC_PI_4),
        ],
    )
}

/// Canned sequence by name: t_odd, t_even, t_even_uncorrected, t_regular, full_baker.
pub fn named_sequence(name: &str, model: &HamiltonianModel) -> Result<PulseSequence> {
    match name {
        "t_odd" => Ok(t_odd(model)),
        "t_even" => Ok(t_even(model)),
        "t_even_uncorrected" => Ok(t_even_uncorrected(model)),
        "t_regular" => Ok(t_regular(model)),
        "full_baker" => Ok(full_baker(model)),
        other => Err(Error::UnknownLabel(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub name: String,
    pub distance: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify_sequence(
    seq: &PulseSequence,
    target: &UnitaryOperator,
    model: &HamiltonianModel,
    tol: f64,
) -> Result<VerifyReport> {
    let got = sequence_unitary(seq, model)?;
    let distance = phase_invariant_distance(&got, target)?;
    Ok(VerifyReport { name: seq.name.clone(), distance, tolerance: tol, pass: distance < tol })
}

// ---- text format ----

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One instruction per line in execution order, preceded by `#` headers.
pub fn dump(seq: &PulseSequence) -> String {
    let mut out = format!(
        "# name={} convention={} total_delay={}\n# order=execution\n",
        seq.name,
        seq.convention,
        fmt_f64(seq.total_delay())
    );
    if let Some(l) = &seq.labeling {
        out.push_str(&format!("# labeling={l}\n"));
    }
    for p in &seq.instructions {
        let line = match *p {
            Pulse::RotX(s, a) => format!("X {s} {}", fmt_f64(a)),
            Pulse::RotY(s, a) => format!("Y {s} {}", fmt_f64(a)),
            Pulse::Delay(t) => format!("U {}", fmt_f64(t)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<PulseSequence> {
    let mut seq = PulseSequence::empty("");
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(l) = rest.strip_prefix("labeling=") {
                seq.labeling = Some(l.to_string());
            } else if rest.starts_with("name=") {
                saw_header = true;
                for kv in rest.split_whitespace() {
                    let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("bad header field {kv}")))?;
                    match k {
                        "name" => seq.name = v.to_string(),
                        "convention" => seq.convention = v.parse().map_err(|_| err(format!("bad convention {v}")))?,
                        "total_delay" => {}
                        _ => return Err(err(format!("unknown header key {k}"))),
                    }
                }
            }
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number {s}")));
        let pulse = match parts.as_slice() {
            ["X", s, a] => Pulse::RotX(s.parse().map_err(|_| err(format!("bad spin {s}")))?, num(a)?),
            ["Y", s, a] => Pulse::RotY(s.parse().map_err(|_| err(format!("bad spin {s}")))?, num(a)?),
            ["U", t] => Pulse::Delay(num(t)?),
            _ => return Err(err(format!("cannot parse instruction '{line}'"))),
        };
        pulse.validate().map_err(|e| err(e.to_string()))?;
        seq.instructions.push(pulse);
    }
    if !saw_header {
        return Err(Error::Parse { line: 0, msg: "missing '# name=...' header".into() });
    }
    Ok(seq)
}
