//! Dephasing master equation with instantaneous pulses.
//!
//! d rho/dt = -i[H, rho] + sum_k Gamma_k (Z_k rho Z_k - rho)
//!
//! Delays are integrated exactly by exponentiating the 64x64 generator (or by
//! fixed-step RK4 as a cross-check); pulses act by unitary conjugation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nmr::{self, hamiltonian_matrix, HamiltonianModel, Pulse, PulseSequence, Spin, REGISTER};
use crate::qstate::{self, DensityMatrix, Mat, StateVector, UnitaryOperator, C64};

const DIM: usize = 8;

/// Per-spin dephasing rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub gamma_h: f64,
    pub gamma_c1: f64,
    pub gamma_c2: f64,
}

impl NoiseModel {
    pub fn new(gamma_h: f64, gamma_c1: f64, gamma_c2: f64) -> Result<Self> {
        for g in [gamma_h, gamma_c1, gamma_c2] {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(Error::NegativeRate(g));
            }
        }
        Ok(Self { gamma_h, gamma_c1, gamma_c2 })
    }

    /// From the 1/Gamma times in seconds.
    pub fn from_times(t_h: f64, t_c1: f64, t_c2: f64) -> Result<Self> {
        Self::new(1.0 / t_h, 1.0 / t_c1, 1.0 / t_c2)
    }

    pub fn none() -> Self {
        Self { gamma_h: 0.0, gamma_c1: 0.0, gamma_c2: 0.0 }
    }

    pub fn rate(&self, s: Spin) -> f64 {
        match s {
            Spin::H => self.gamma_h,
            Spin::C1 => self.gamma_c1,
            Spin::C2 => self.gamma_c2,
        }
    }

    pub fn total(&self) -> f64 {
        self.gamma_h + self.gamma_c1 + self.gamma_c2
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self { gamma_h: self.gamma_h * f, gamma_c1: self.gamma_c1 * f, gamma_c2: self.gamma_c2 * f }
    }
}

/// sum_k Gamma_k (Z_k rho Z_k - rho)
pub fn dissipator(rho: &Mat, noise: &NoiseModel) -> Mat {
    let mut out = Mat::zeros(rho.nrows(), rho.ncols());
    for s in REGISTER {
        let g = noise.rate(s);
        if g == 0.0 {
            continue;
        }
        let z = nmr::spin_z(s);
        out += (&z * rho * &z - rho) * C64::new(g, 0.0);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    SuperoperatorExpm,
    /// Fixed-step fourth-order Runge-Kutta; `step` is the largest step in seconds.
    Rk4 { step: f64 },
}

/// Propagator of a delay, acting on column-stacked density matrices.
pub type Superoperator = DMatrix<C64>;

#[derive(Debug)]
pub struct EvolutionEngine {
    pub model: HamiltonianModel,
    pub noise: NoiseModel,
    pub method: Method,
    h: Mat,
    eig_vals: Vec<f64>,
    eig_vecs: Mat,
    cache: Mutex<HashMap<u64, Arc<Superoperator>>>,
}

impl EvolutionEngine {
    pub fn new(model: HamiltonianModel, noise: NoiseModel, method: Method) -> Result<Self> {
        NoiseModel::new(noise.gamma_h, noise.gamma_c1, noise.gamma_c2)?;
        if let Method::Rk4 { step } = method {
            if !(step > 0.0) {
                return Err(Error::NegativeDuration(step));
            }
        }
        let herm = hamiltonian_matrix(&model);
        let (eig_vals, eig_vecs) = herm.eigen();
        Ok(Self {
            model,
            noise,
            method,
            h: herm.matrix().clone(),
            eig_vals,
            eig_vecs,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Exact propagators, the default.
    pub fn exact(model: HamiltonianModel, noise: NoiseModel) -> Result<Self> {
        Self::new(model, noise, Method::SuperoperatorExpm)
    }

    /// RK4 with step tau1 / 200.
    pub fn rk4(model: HamiltonianModel, noise: NoiseModel) -> Result<Self> {
        let step = model.tau1() / 200.0;
        Self::new(model, noise, Method::Rk4 { step })
    }

    pub fn hamiltonian(&self) -> &Mat {
        &self.h
    }

    /// Generator L with vec(d rho/dt) = L vec(rho), column stacking.
    pub fn generator(&self) -> Superoperator {
        let id = qstate::identity(DIM);
        let mut l = (id.kronecker(&self.h) - self.h.transpose().kronecker(&id)) * C64::new(0.0, -1.0);
        let id64 = qstate::identity(DIM * DIM);
        for s in REGISTER {
            let g = self.noise.rate(s);
            if g == 0.0 {
                continue;
            }
            let z = nmr::spin_z(s);
            l += (z.transpose().kronecker(&z) - &id64) * C64::new(g, 0.0);
        }
        l
    }

    /// The map rho -> rho(t) over a delay, memoized per duration.
    pub fn delay_propagator(&self, t: f64) -> Result<Arc<Superoperator>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::NegativeDuration(t));
        }
        let key = t.to_bits();
        if let Some(p) = self.cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(match self.method {
            Method::SuperoperatorExpm => (self.generator() * C64::new(t, 0.0)).exp(),
            Method::Rk4 { step } => self.rk4_superoperator(t, step),
        });
        // a concurrent insert for the same key computed the identical value
        let mut cache = self.cache.lock().unwrap();
        Ok(Arc::clone(cache.entry(key).or_insert(p)))
    }

    fn rk4_superoperator(&self, t: f64, max_step: f64) -> Superoperator {
        let n = (t / max_step).ceil().max(1.0) as usize;
        let h = t / n as f64;
        let l = self.generator();
        // one RK4 step of a linear system is a fixed polynomial in h L
        let hl = &l * C64::new(h, 0.0);
        let id = qstate::identity(DIM * DIM);
        let hl2 = &hl * &hl;
        let hl3 = &hl2 * &hl;
        let hl4 = &hl3 * &hl;
        let step = &id + &hl + hl2 * C64::new(0.5, 0.0) + hl3 * C64::new(1.0 / 6.0, 0.0) + hl4 * C64::new(1.0 / 24.0, 0.0);
        // step^n by repeated squaring
        let mut out = id;
        let mut base = step;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Direct RK4 integration of the density matrix, without building the
    /// superoperator.
    pub fn rk4_evolve(&self, rho: &Mat, t: f64, max_step: f64) -> Mat {
        let n = (t / max_step).ceil().max(1.0) as usize;
        let h = t / n as f64;
        let rhs = |r: &Mat| -> Mat { (&self.h * r - r * &self.h) * C64::new(0.0, -1.0) + dissipator(r, &self.noise) };
        let mut r = rho.clone();
        let half = C64::new(h / 2.0, 0.0);
        let full = C64::new(h, 0.0);
        for _ in 0..n {
            let k1 = rhs(&r);
            let k2 = rhs(&(&r + &k1 * half));
            let k3 = rhs(&(&r + &k2 * half));
            let k4 = rhs(&(&r + &k3 * full));
            r += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        }
        r
    }

    pub fn apply_delay(&self, rho: &Mat, t: f64) -> Result<Mat> {
        let p = self.delay_propagator(t)?;
        let v = DVector::from_column_slice(rho.as_slice());
        let out = p.as_ref() * v;
        Ok(Mat::from_column_slice(DIM, DIM, out.as_slice()))
    }

    /// exp(-i H t) from the cached eigendecomposition.
    pub fn free_unitary(&self, t: f64) -> UnitaryOperator {
        qstate::expm_from_eigen(&self.eig_vals, &self.eig_vecs, t)
    }
}

/// Run a pulse sequence on a density matrix.
pub fn run_sequence(rho0: &DensityMatrix, seq: &PulseSequence, engine: &EvolutionEngine) -> Result<DensityMatrix> {
    if rho0.dim() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: rho0.dim() });
    }
    seq.validate()?;
    let mut rho = rho0.matrix().clone();
    for p in &seq.instructions {
        match *p {
            Pulse::Delay(t) => {
                rho = engine.apply_delay(&rho, t)?;
                DensityMatrix::from_matrix_unchecked(rho.clone())?.validate()?;
            }
            _ => {
                let u = nmr::pulse_unitary(p, &engine.model)?;
                rho = u.matrix() * rho * u.matrix().adjoint();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// (rho + Z_s rho Z_s) / 2
pub fn apply_perturbation(rho: &DensityMatrix, spin: Spin) -> Result<DensityMatrix> {
    let z = nmr::spin_z(spin);
    let m = rho.matrix();
    DensityMatrix::from_matrix_unchecked((m + &z * m * &z) * C64::new(0.5, 0.0))
}

/// exp(i pi Z_s / 2) = i Z_s
pub fn perturbation_unitary(spin: Spin) -> UnitaryOperator {
    nmr::z_rotation(spin, std::f64::consts::PI)
}

/// Trajectory average with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct TrajectoryEstimate {
    pub mean: DensityMatrix,
    /// Standard error of the real parts.
    pub se_re: DMatrix<f64>,
    /// Standard error of the imaginary parts.
    pub se_im: DMatrix<f64>,
    pub n_traj: usize,
}

const CHUNK: usize = 256;

struct Sums {
    sum: Mat,
    sq_re: DMatrix<f64>,
    sq_im: DMatrix<f64>,
}

impl Sums {
    fn zero() -> Self {
        Self { sum: Mat::zeros(DIM, DIM), sq_re: DMatrix::zeros(DIM, DIM), sq_im: DMatrix::zeros(DIM, DIM) }
    }

    fn add_projector(&mut self, psi: &DVector<C64>) {
        let p = psi * psi.adjoint();
        for (k, z) in p.iter().enumerate() {
            self.sq_re[k] += z.re * z.re;
            self.sq_im[k] += z.im * z.im;
        }
        self.sum += p;
    }

    fn merge(&mut self, o: &Sums) {
        self.sum += &o.sum;
        self.sq_re += &o.sq_re;
        self.sq_im += &o.sq_im;
    }
}

/// Quantum-jump unraveling: during delays each spin suffers Z kicks as a
/// Poisson process of rate Gamma_s; between kicks the evolution is exp(-iHt).
///
/// Trajectory k draws from stream k of a ChaCha8 generator seeded with
/// `seed`, so results do not depend on how work is split across threads.
pub fn trajectory_stats(
    psi0: &StateVector,
    seq: &PulseSequence,
    engine: &EvolutionEngine,
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryEstimate> {
    if n_traj == 0 {
        return Err(Error::Empty);
    }
    if psi0.dim() != DIM {
        return Err(Error::DimensionMismatch { expected: DIM, found: psi0.dim() });
    }
    seq.validate()?;
    // precompute everything that does not depend on the random draws
    let steps: Vec<Option<Mat>> = seq
        .instructions
        .iter()
        .map(|p| match p {
            Pulse::Delay(_) => Ok(None),
            _ => nmr::pulse_unitary(p, &engine.model).map(|u| Some(u.into_matrix())),
        })
        .collect::<Result<_>>()?;
    let zdiag: Vec<(f64, Vec<f64>)> = REGISTER
        .iter()
        .map(|&s| (engine.noise.rate(s), nmr::spin_z(s).diagonal().iter().map(|z| z.re).collect()))
        .collect();
    let total = engine.noise.total();
    let v = engine.eig_vecs.clone();
    let vdag = v.adjoint();
    let vals = engine.eig_vals.clone();
    let evolve = |psi: &DVector<C64>, t: f64| -> DVector<C64> {
        let mut w = &vdag * psi;
        for (k, l) in vals.iter().enumerate() {
            w[k] *= C64::from_polar(1.0, -l * t);
        }
        &v * w
    };

    let one = |k: usize| -> DVector<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut psi = psi0.amplitudes().clone();
        for (p, u) in seq.instructions.iter().zip(&steps) {
            match (p, u) {
                (Pulse::Delay(t), _) => {
                    let mut left = *t;
                    while total > 0.0 {
                        let u01: f64 = rng.gen();
                        let wait = -(1.0 - u01).ln() / total;
                        if wait >= left {
                            break;
                        }
                        psi = evolve(&psi, wait);
                        left -= wait;
                        let mut pick = rng.gen::<f64>() * total;
                        for (g, z) in &zdiag {
                            if pick < *g {
                                for (i, zi) in z.iter().enumerate() {
                                    psi[i] *= *zi;
                                }
                                break;
                            }
                            pick -= g;
                        }
                    }
                    psi = evolve(&psi, left);
                }
                (_, Some(m)) => psi = m * psi,
                _ => unreachable!(),
            }
        }
        psi
    };

    let n_chunks = n_traj.div_ceil(CHUNK);
    let partial: Vec<Sums> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = Sums::zero();
            for k in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                s.add_projector(&one(k));
            }
            s
        })
        .collect();
    let mut tot = Sums::zero();
    for p in &partial {
        tot.merge(p);
    }
    let n = n_traj as f64;
    let mean = &tot.sum / C64::new(n, 0.0);
    let se = |sq: &DMatrix<f64>, pick: fn(&C64) -> f64| -> DMatrix<f64> {
        DMatrix::from_fn(DIM, DIM, |i, j| {
            let m = pick(&mean[(i, j)]);
            let var = (sq[(i, j)] / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
            (var / n).sqrt()
        })
    };
    let se_re = se(&tot.sq_re, |z| z.re);
    let se_im = se(&tot.sq_im, |z| z.im);
    Ok(TrajectoryEstimate { mean: DensityMatrix::new(mean)?, se_re, se_im, n_traj })
}

pub fn trajectory_run(
    psi0: &StateVector,
    seq: &PulseSequence,
    engine: &EvolutionEngine,
    n_traj: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    Ok(trajectory_stats(psi0, seq, engine, n_traj, seed)?.mean)
}
