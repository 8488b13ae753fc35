use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, RngCore};
use serde::Serialize;

use super::{BasisPermutation, QsimError, RegisterLayout, MIXED_CAP, PURE_CAP};
use crate::bits::{mask, BitString};
use crate::scalar::{cone, czero, to_c64, Scalar};

/// Smallest eigenvalue a density matrix may have before it is rejected.
const PSD_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    Computational,
    Hadamard,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub register: String,
    pub value: BitString,
    pub probability: f64,
}

/// A pure state vector or a row-major density matrix over a register layout.
#[derive(Clone, Debug)]
pub struct QuantumState<T: Scalar = f64> {
    layout: RegisterLayout,
    kind: StateKind,
    data: Vec<Complex<T>>,
}

fn check_cap(layout: &RegisterLayout, kind: StateKind) -> Result<(), QsimError> {
    let cap = match kind {
        StateKind::Pure => PURE_CAP,
        StateKind::Mixed => MIXED_CAP,
    };
    if layout.total_width() > cap {
        return Err(QsimError::CapExceeded {
            width: layout.total_width(),
            cap,
        });
    }
    Ok(())
}

/// In-place H on one bit of a flat index space.
fn butterfly<T: Scalar>(data: &mut [Complex<T>], bit: u32) {
    let stride = 1usize << bit;
    let s = T::FRAC_1_SQRT_2();
    for block in data.chunks_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = (x + y).scale(s);
            *b = (x - y).scale(s);
        }
    }
}

/// Full-layout index of every sub-layout index, placing each register's bits
/// at its position in `layout`.
fn scatter_table(layout: &RegisterLayout, sub: &RegisterLayout) -> Result<Vec<u64>, QsimError> {
    let shifts = sub
        .registers()
        .iter()
        .map(|r| layout.field(&r.name).map(|(s, _)| s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..sub.dim() as u64)
        .map(|s| {
            sub.unpack_values(s)
                .iter()
                .zip(&shifts)
                .fold(0u64, |acc, (v, sh)| acc | (v << sh))
        })
        .collect())
}

fn hermitian_eigenvalues(dim: usize, entries: impl Fn(usize, usize) -> Complex<f64>) -> Vec<f64> {
    let m = DMatrix::from_fn(dim, dim, entries);
    // Symmetrize to absorb rounding so the solver sees an exactly Hermitian input.
    let h = (&m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

impl<T: Scalar> QuantumState<T> {
    /// Computational basis state with the given register assignment.
    pub fn basis(
        layout: RegisterLayout,
        assignment: &[(&str, BitString)],
    ) -> Result<Self, QsimError> {
        let index = layout.pack(assignment)?;
        Self::basis_index(layout, index)
    }

    pub fn basis_index(layout: RegisterLayout, index: u64) -> Result<Self, QsimError> {
        check_cap(&layout, StateKind::Pure)?;
        if index >= layout.dim() as u64 {
            return Err(QsimError::InvalidState(format!(
                "index {index} out of range for {layout:?}"
            )));
        }
        let mut data = vec![czero(); layout.dim()];
        data[index as usize] = cone();
        Ok(Self {
            layout,
            kind: StateKind::Pure,
            data,
        })
    }

    /// Pure state from explicit amplitudes; rejects vectors off the unit sphere.
    pub fn from_amplitudes(
        layout: RegisterLayout,
        amplitudes: Vec<Complex<T>>,
    ) -> Result<Self, QsimError> {
        check_cap(&layout, StateKind::Pure)?;
        if amplitudes.len() != layout.dim() {
            return Err(QsimError::InvalidState(format!(
                "{} amplitudes for {layout:?}",
                amplitudes.len()
            )));
        }
        let state = Self {
            layout,
            kind: StateKind::Pure,
            data: amplitudes,
        };
        state.validate()?;
        Ok(state)
    }

    /// Mixed state from a row-major density matrix; rejects non-physical input.
    pub fn from_density(
        layout: RegisterLayout,
        entries: Vec<Complex<T>>,
    ) -> Result<Self, QsimError> {
        check_cap(&layout, StateKind::Mixed)?;
        if entries.len() != layout.dim() * layout.dim() {
            return Err(QsimError::InvalidState(format!(
                "{} density entries for {layout:?}",
                entries.len()
            )));
        }
        let state = Self {
            layout,
            kind: StateKind::Mixed,
            data: entries,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Result<Self, QsimError> {
        check_cap(&layout, StateKind::Mixed)?;
        let dim = layout.dim();
        let mut data = vec![czero(); dim * dim];
        let w = T::from_f64_lossy(1.0 / dim as f64);
        for i in 0..dim {
            data[i * dim + i] = Complex::new(w, T::zero());
        }
        Ok(Self {
            layout,
            kind: StateKind::Mixed,
            data,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_pure(&self) -> bool {
        self.kind == StateKind::Pure
    }

    /// Amplitude vector of a pure state.
    pub fn amplitudes(&self) -> Option<&[Complex<T>]> {
        self.is_pure().then_some(self.data.as_slice())
    }

    /// Row-major density matrix entries of a mixed state.
    pub fn density_entries(&self) -> Option<&[Complex<T>]> {
        (!self.is_pure()).then_some(self.data.as_slice())
    }

    /// Density matrix entry `ρ[i][j]`, computed on the fly for pure states.
    pub fn rho(&self, i: usize, j: usize) -> Complex<T> {
        match self.kind {
            StateKind::Pure => self.data[i] * self.data[j].conj(),
            StateKind::Mixed => self.data[i * self.layout.dim() + j],
        }
    }

    /// Probability of the basis index `i`.
    pub fn probability(&self, i: u64) -> f64 {
        let i = i as usize;
        match self.kind {
            StateKind::Pure => to_c64(self.data[i]).norm_sqr(),
            StateKind::Mixed => to_c64(self.data[i * self.layout.dim() + i]).re,
        }
    }

    /// Squared norm (pure) or trace (mixed).
    pub fn total_probability(&self) -> f64 {
        (0..self.layout.dim() as u64)
            .map(|i| self.probability(i))
            .sum()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        match self.kind {
            StateKind::Pure => self.total_probability().powi(2),
            StateKind::Mixed => self.data.iter().map(|z| to_c64(*z).norm_sqr()).sum(),
        }
    }

    /// The basis index carrying all the weight, if the state is a basis state.
    pub fn as_basis_index(&self) -> Option<u64> {
        let tol = T::TOLERANCE;
        (0..self.layout.dim() as u64).find(|&i| (self.probability(i) - 1.0).abs() <= tol)
    }

    /// Checks the physical invariants: unit norm, or Hermitian unit-trace PSD.
    pub fn validate(&self) -> Result<(), QsimError> {
        let tol = T::TOLERANCE;
        let total = self.total_probability();
        if (total - 1.0).abs() > tol {
            return Err(QsimError::InvalidState(format!(
                "norm or trace {total} differs from 1"
            )));
        }
        if self.is_pure() {
            return Ok(());
        }
        let dim = self.layout.dim();
        for i in 0..dim {
            for j in i..dim {
                let d = to_c64(self.rho(i, j)) - to_c64(self.rho(j, i)).conj();
                if d.norm() > tol {
                    return Err(QsimError::InvalidState(format!(
                        "density matrix not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let min = hermitian_eigenvalues(dim, |i, j| to_c64(self.rho(i, j)))
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_SLACK.max(tol) {
            return Err(QsimError::InvalidState(format!(
                "density matrix has eigenvalue {min}"
            )));
        }
        Ok(())
    }

    /// Promotes a pure state to its density matrix.
    pub fn to_mixed(&self) -> Result<Self, QsimError> {
        if !self.is_pure() {
            return Ok(self.clone());
        }
        check_cap(&self.layout, StateKind::Mixed)?;
        let dim = self.layout.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(self.rho(i, j));
            }
        }
        Ok(Self {
            layout: self.layout.clone(),
            kind: StateKind::Mixed,
            data,
        })
    }

    /// Same amplitudes under a different naming of the same bits.
    pub fn relabel(&self, layout: RegisterLayout) -> Result<Self, QsimError> {
        if layout.total_width() != self.layout.total_width() {
            return Err(QsimError::LayoutMismatch(format!(
                "cannot relabel {:?} as {layout:?}",
                self.layout
            )));
        }
        Ok(Self {
            layout,
            ..self.clone()
        })
    }

    pub fn cast<U: Scalar>(&self) -> QuantumState<U> {
        QuantumState {
            layout: self.layout.clone(),
            kind: self.kind,
            data: self
                .data
                .iter()
                .map(|z| {
                    Complex::new(
                        U::from_f64_lossy(z.re.to_f64_lossy()),
                        U::from_f64_lossy(z.im.to_f64_lossy()),
                    )
                })
                .collect(),
        }
    }

    /// `self ⊗ other`; `self` occupies the high bits.
    pub fn tensor(&self, other: &QuantumState<T>) -> Result<Self, QsimError> {
        let layout = self.layout.concat(&other.layout)?;
        if self.is_pure() && other.is_pure() {
            check_cap(&layout, StateKind::Pure)?;
            let mut data = Vec::with_capacity(layout.dim());
            for a in &self.data {
                data.extend(other.data.iter().map(|b| *a * *b));
            }
            return Ok(Self {
                layout,
                kind: StateKind::Pure,
                data,
            });
        }
        check_cap(&layout, StateKind::Mixed)?;
        let (d1, d2) = (self.layout.dim(), other.layout.dim());
        let dim = d1 * d2;
        let mut data = vec![czero(); dim * dim];
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.rho(i1, j1);
                if a == czero() {
                    continue;
                }
                for i2 in 0..d2 {
                    let row = (i1 * d2 + i2) * dim + j1 * d2;
                    for j2 in 0..d2 {
                        data[row + j2] = a * other.rho(i2, j2);
                    }
                }
            }
        }
        Ok(Self {
            layout,
            kind: StateKind::Mixed,
            data,
        })
    }

    /// Applies a basis permutation by index relabeling.
    pub fn apply_permutation(&self, perm: &BasisPermutation) -> Result<Self, QsimError> {
        if perm.input() != &self.layout {
            return Err(QsimError::LayoutMismatch(format!(
                "state {:?} vs permutation input {:?}",
                self.layout,
                perm.input()
            )));
        }
        let dim = self.layout.dim();
        let mut data = vec![czero(); self.data.len()];
        match self.kind {
            StateKind::Pure => {
                for (i, a) in self.data.iter().enumerate() {
                    if *a != czero() {
                        data[perm.map(i as u64) as usize] = *a;
                    }
                }
            }
            StateKind::Mixed => {
                // A zero diagonal entry of a PSD matrix zeroes its row and column.
                let live: Vec<(usize, usize)> = (0..dim)
                    .filter(|&i| self.data[i * dim + i] != czero())
                    .map(|i| (i, perm.map(i as u64) as usize))
                    .collect();
                for &(i, pi) in &live {
                    for &(j, pj) in &live {
                        data[pi * dim + pj] = self.data[i * dim + j];
                    }
                }
            }
        }
        Ok(Self {
            layout: perm.output().clone(),
            kind: self.kind,
            data,
        })
    }

    /// `H^{⊗w}` on one register.
    pub fn hadamard(&self, register: &str) -> Result<Self, QsimError> {
        let (shift, width) = self.layout.field(register)?;
        let mut out = self.clone();
        let n = self.layout.total_width();
        for bit in shift..shift + width {
            butterfly(&mut out.data, bit);
            if !self.is_pure() {
                // ρ is a vector over row‖column bits; H is real so HρH† = HρH.
                butterfly(&mut out.data, bit + n);
            }
        }
        Ok(out)
    }

    /// Reduced state on `keep` (declaration order).
    ///
    /// A pure input whose reduced state is rank one stays pure; otherwise the
    /// result is a density matrix.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self, QsimError> {
        if keep.is_empty() {
            return Err(QsimError::EmptyKeepSet);
        }
        let kept = self.layout.select(keep)?;
        if kept.total_width() == self.layout.total_width() {
            return Ok(self.clone());
        }
        let traced = RegisterLayout::new(
            self.layout
                .registers()
                .iter()
                .filter(|r| !kept.contains(&r.name))
                .map(|r| (r.name.clone(), r.width)),
        )?;
        let ks = scatter_table(&self.layout, &kept)?;
        let ts = scatter_table(&self.layout, &traced)?;
        match self.kind {
            StateKind::Pure => self.trace_pure(kept, &ks, &ts),
            StateKind::Mixed => {
                let dim = self.layout.dim();
                let dk = ks.len();
                let mut data = vec![czero(); dk * dk];
                for (a, &ka) in ks.iter().enumerate() {
                    for (b, &kb) in ks.iter().enumerate() {
                        let mut acc = czero();
                        for &t in &ts {
                            acc = acc + self.data[(ka | t) as usize * dim + (kb | t) as usize];
                        }
                        data[a * dk + b] = acc;
                    }
                }
                Ok(Self {
                    layout: kept,
                    kind: StateKind::Mixed,
                    data,
                })
            }
        }
    }

    fn trace_pure(&self, kept: RegisterLayout, ks: &[u64], ts: &[u64]) -> Result<Self, QsimError> {
        let amp = |k: u64, t: u64| self.data[(k | t) as usize];
        let col_norm = |t: u64| {
            ks.iter()
                .map(|&k| to_c64(amp(k, t)).norm_sqr())
                .sum::<f64>()
        };
        let total = self.total_probability();
        let (best, best_norm) = ts
            .iter()
            .map(|&t| (t, col_norm(t)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        // Rank one iff every column is parallel to the heaviest one.
        let inv = 1.0 / best_norm.sqrt();
        let v: Vec<Complex<f64>> = ks.iter().map(|&k| to_c64(amp(k, best)) * inv).collect();
        let captured: f64 = ts
            .iter()
            .map(|&t| {
                ks.iter()
                    .zip(&v)
                    .map(|(&k, vk)| vk.conj() * to_c64(amp(k, t)))
                    .sum::<Complex<f64>>()
                    .norm_sqr()
            })
            .sum();
        if total - captured <= T::TOLERANCE * 1e-2 {
            let scale = total.sqrt();
            let data = v
                .iter()
                .map(|z| {
                    Complex::new(
                        T::from_f64_lossy(z.re * scale),
                        T::from_f64_lossy(z.im * scale),
                    )
                })
                .collect();
            return Ok(Self {
                layout: kept,
                kind: StateKind::Pure,
                data,
            });
        }
        check_cap(&kept, StateKind::Mixed)?;
        let dk = ks.len();
        let mut data = vec![czero(); dk * dk];
        for &t in ts {
            let col: Vec<Complex<T>> = ks.iter().map(|&k| amp(k, t)).collect();
            for (a, ca) in col.iter().enumerate() {
                if *ca == czero() {
                    continue;
                }
                for (b, cb) in col.iter().enumerate() {
                    data[a * dk + b] = data[a * dk + b] + *ca * cb.conj();
                }
            }
        }
        Ok(Self {
            layout: kept,
            kind: StateKind::Mixed,
            data,
        })
    }

    /// Born distribution of one register's outcomes, indexed by value.
    pub fn outcome_probabilities(
        &self,
        register: &str,
        basis: Basis,
    ) -> Result<Vec<f64>, QsimError> {
        if basis == Basis::Hadamard {
            return self
                .hadamard(register)?
                .outcome_probabilities(register, Basis::Computational);
        }
        let (shift, width) = self.layout.field(register)?;
        let mut probs = vec![0.0; 1usize << width];
        for i in 0..self.layout.dim() as u64 {
            probs[((i >> shift) & mask(width)) as usize] += self.probability(i);
        }
        Ok(probs)
    }

    /// Samples one register and returns the normalized post-measurement state.
    pub fn measure(
        &self,
        register: &str,
        basis: Basis,
        rng: &mut dyn RngCore,
    ) -> Result<(MeasurementOutcome, Self), QsimError> {
        if basis == Basis::Hadamard {
            let (outcome, post) =
                self.hadamard(register)?
                    .measure(register, Basis::Computational, rng)?;
            return Ok((outcome, post.hadamard(register)?));
        }
        let (shift, width) = self.layout.field(register)?;
        let probs = self.outcome_probabilities(register, Basis::Computational)?;
        let u: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut value = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                value = v;
                break;
            }
        }
        let p = probs[value];
        let hit = |i: usize| ((i as u64 >> shift) & mask(width)) as usize == value;
        let mut post = self.clone();
        match self.kind {
            StateKind::Pure => {
                let s = T::from_f64_lossy(1.0 / p.sqrt());
                for (i, a) in post.data.iter_mut().enumerate() {
                    *a = if hit(i) { a.scale(s) } else { czero() };
                }
            }
            StateKind::Mixed => {
                let dim = self.layout.dim();
                let s = T::from_f64_lossy(1.0 / p);
                for (idx, a) in post.data.iter_mut().enumerate() {
                    *a = if hit(idx / dim) && hit(idx % dim) {
                        a.scale(s)
                    } else {
                        czero()
                    };
                }
            }
        }
        let outcome = MeasurementOutcome {
            register: register.to_string(),
            value: BitString::new(value as u64, width).expect("value fits register"),
            probability: p.clamp(0.0, 1.0),
        };
        Ok((outcome, post))
    }

    /// Measures every register in the computational basis and returns the
    /// full basis index. Basis states are read off without consuming `rng`.
    pub fn sample_index(&self, rng: &mut dyn RngCore) -> u64 {
        if let Some(i) = self.as_basis_index() {
            return i;
        }
        let dim = self.layout.dim() as u64;
        let u: f64 = rng.gen::<f64>() * self.total_probability();
        let mut acc = 0.0;
        let mut last = 0;
        for i in 0..dim {
            let p = self.probability(i);
            if p > 0.0 {
                last = i;
                acc += p;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    /// `½‖ρ_a − ρ_b‖₁`.
    pub fn trace_distance(&self, other: &QuantumState<T>) -> Result<f64, QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout, other.layout
            )));
        }
        if self.is_pure() && other.is_pure() {
            let overlap: Complex<f64> = self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| to_c64(*a).conj() * to_c64(*b))
                .sum();
            return Ok((1.0 - overlap.norm_sqr()).max(0.0).sqrt().min(1.0));
        }
        check_cap(&self.layout, StateKind::Mixed)?;
        let eig = hermitian_eigenvalues(self.layout.dim(), |i, j| {
            to_c64(self.rho(i, j)) - to_c64(other.rho(i, j))
        });
        Ok((0.5 * eig.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
    }
}
