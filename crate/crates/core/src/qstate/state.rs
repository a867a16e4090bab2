use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cmatrix::CMatrix;
use super::density::DensityMatrix;
use super::layout::QubitRegisterLayout;
use crate::error::{Error, Result};

/// Tolerance on `U†U = I` for any matrix applied to a state.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Branches lighter than this cannot be post-selected.
pub const NULL_BRANCH: f64 = 1e-15;

/// The pseudorandom generator behind every sampling operation.
pub type SimRng = ChaCha8Rng;

/// Counts per observed outcome bitstring.
pub type Histogram = BTreeMap<String, usize>;

/// Normalized pure state over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: QubitRegisterLayout,
    amps: Vec<Complex64>,
}

/// Result of conditioning a state on one outcome of a register.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    pub register: String,
    pub outcome: String,
    pub probability: f64,
    /// Renormalized branch; the measured register stays in the layout.
    pub collapsed: StateVector,
}

pub fn bitstring(value: usize, width: usize) -> String {
    format!("{value:0width$b}")
}

fn parse_bitstring(outcome: &str, width: usize) -> Result<usize> {
    if outcome.len() != width || !outcome.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidConfig(format!(
            "outcome `{outcome}` is not a {width}-bit string"
        )));
    }
    Ok(usize::from_str_radix(outcome, 2).unwrap_or(0))
}

impl StateVector {
    /// Builds a state from raw amplitudes, renormalizing them exactly.
    pub fn new(layout: QubitRegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::Dimension {
                expected: layout.dim(),
                got: amps.len(),
            });
        }
        if let Some(pos) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { layout, amps })
    }

    pub fn from_real(layout: QubitRegisterLayout, amps: &[f64]) -> Result<Self> {
        Self::new(layout, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(layout: QubitRegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::Dimension {
                expected: layout.dim(),
                got: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn zero(layout: QubitRegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    pub fn layout(&self) -> &QubitRegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Kronecker product with `other`; `other`'s registers follow ours.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(layout.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self { layout, amps })
    }

    /// Appends a fresh register in `|0…0⟩`.
    pub fn with_register(&self, name: &str, width: usize) -> Result<Self> {
        let fresh = QubitRegisterLayout::with_budget(&[(name, width)], self.layout.budget())?;
        self.tensor(&Self::zero(fresh))
    }

    pub(crate) fn positions(&self, registers: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in registers {
            out.extend(self.layout.qubits(name)?);
        }
        for (i, q) in out.iter().enumerate() {
            if out[..i].contains(q) {
                return Err(Error::Layout("target registers overlap".into()));
            }
        }
        Ok(out)
    }

    /// Basis-index offsets of one fiber of `qubits` (first listed qubit is
    /// the fiber's MSB) and the mask those qubits occupy.
    fn fiber_offsets(&self, qubits: &[usize]) -> (Vec<usize>, usize) {
        let masks: Vec<usize> = qubits.iter().map(|&q| self.layout.qubit_mask(q)).collect();
        let k = masks.len();
        let offsets = (0..1usize << k)
            .map(|j| {
                (0..k)
                    .filter(|b| j & (1 << (k - 1 - b)) != 0)
                    .map(|b| masks[b])
                    .sum()
            })
            .collect();
        (offsets, masks.iter().sum())
    }

    /// Calls `f` on every fiber of the listed qubits: the sub-vector obtained
    /// by fixing all other qubits.
    pub(crate) fn for_each_fiber(&mut self, qubits: &[usize], mut f: impl FnMut(&mut [Complex64])) {
        let (offsets, fiber_mask) = self.fiber_offsets(qubits);
        let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for base in (0..self.amps.len()).filter(|b| b & fiber_mask == 0) {
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            f(&mut buf);
            for (slot, off) in buf.iter().zip(&offsets) {
                self.amps[base + off] = *slot;
            }
        }
    }

    fn visit_fibers(&self, qubits: &[usize], mut f: impl FnMut(&[Complex64])) {
        let (offsets, fiber_mask) = self.fiber_offsets(qubits);
        let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for base in (0..self.amps.len()).filter(|b| b & fiber_mask == 0) {
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            f(&buf);
        }
    }

    fn check_unitary(u: &CMatrix, dim: usize) -> Result<()> {
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: u.rows(),
            });
        }
        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::NonUnitary(dev));
        }
        Ok(())
    }

    /// Applies `u` to the concatenated target registers, identity elsewhere.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<Self> {
        let qubits = self.positions(targets)?;
        Self::check_unitary(u, 1 << qubits.len())?;
        let mut out = self.clone();
        let mut tmp = vec![Complex64::new(0.0, 0.0); u.rows()];
        out.for_each_fiber(&qubits, |fiber| {
            u.apply_into(fiber, &mut tmp);
            fiber.copy_from_slice(&tmp);
        });
        Ok(out)
    }

    /// Applies `u` to the targets on the branch where bit `bit` (MSB = 0) of
    /// `control` is 1.
    pub fn apply_controlled(
        &self,
        u: &CMatrix,
        control: (&str, usize),
        targets: &[&str],
    ) -> Result<Self> {
        let (reg, bit) = control;
        let ctrl_range = self.layout.qubits(reg)?;
        if bit >= ctrl_range.len() {
            return Err(Error::Layout(format!("register `{reg}` has no bit {bit}")));
        }
        let ctrl = ctrl_range.start + bit;
        let targets = self.positions(targets)?;
        if targets.contains(&ctrl) {
            return Err(Error::Layout("control overlaps targets".into()));
        }
        let dim = 1 << targets.len();
        Self::check_unitary(u, dim)?;
        let mut qubits = vec![ctrl];
        qubits.extend(targets);
        let mut out = self.clone();
        let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
        out.for_each_fiber(&qubits, |fiber| {
            let active = &mut fiber[dim..];
            u.apply_into(active, &mut tmp);
            active.copy_from_slice(&tmp);
        });
        Ok(out)
    }

    /// Block-diagonal unitary: `blocks[c]` acts on `target` when the control
    /// registers (concatenated) hold value `c`.
    pub fn apply_multiplexed(
        &self,
        controls: &[&str],
        target: &str,
        blocks: &[CMatrix],
    ) -> Result<Self> {
        let ctrl = self.positions(controls)?;
        let tgt = self.positions(&[target])?;
        if tgt.iter().any(|q| ctrl.contains(q)) {
            return Err(Error::Layout("control overlaps target".into()));
        }
        if blocks.len() != 1 << ctrl.len() {
            return Err(Error::Dimension {
                expected: 1 << ctrl.len(),
                got: blocks.len(),
            });
        }
        let dim = 1 << tgt.len();
        for b in blocks {
            Self::check_unitary(b, dim)?;
        }
        let mut qubits = ctrl;
        qubits.extend(tgt);
        let mut out = self.clone();
        let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
        out.for_each_fiber(&qubits, |fiber| {
            for (c, block) in fiber.chunks_mut(dim).zip(blocks) {
                block.apply_into(c, &mut tmp);
                c.copy_from_slice(&tmp);
            }
        });
        Ok(out)
    }

    /// Exchanges registers `a` and `b` on the branch where bit `bit` of
    /// `control` is 1. The swap is a permutation and never materialized.
    pub fn apply_controlled_swap(&self, control: (&str, usize), a: &str, b: &str) -> Result<Self> {
        let (wa, wb) = (self.layout.width(a)?, self.layout.width(b)?);
        if wa != wb {
            return Err(Error::Dimension {
                expected: wa,
                got: wb,
            });
        }
        let (reg, bit) = control;
        let ctrl_range = self.layout.qubits(reg)?;
        if bit >= ctrl_range.len() {
            return Err(Error::Layout(format!("register `{reg}` has no bit {bit}")));
        }
        let ctrl = ctrl_range.start + bit;
        let qa = self.positions(&[a])?;
        let qb = self.positions(&[b])?;
        if qa.contains(&ctrl) || qb.contains(&ctrl) || qa.iter().any(|q| qb.contains(q)) {
            return Err(Error::Layout("controlled swap operands overlap".into()));
        }
        let ctrl_mask = self.layout.qubit_mask(ctrl);
        let masks_a: Vec<usize> = qa.iter().map(|&q| self.layout.qubit_mask(q)).collect();
        let masks_b: Vec<usize> = qb.iter().map(|&q| self.layout.qubit_mask(q)).collect();
        let mut out = self.clone();
        for idx in 0..self.amps.len() {
            if idx & ctrl_mask == 0 {
                continue;
            }
            let mut swapped = idx;
            for (ma, mb) in masks_a.iter().zip(&masks_b) {
                let (ba, bb) = (idx & ma != 0, idx & mb != 0);
                if ba != bb {
                    swapped ^= ma | mb;
                }
            }
            out.amps[swapped] = self.amps[idx];
        }
        Ok(out)
    }

    /// `ρ = tr_rest |ψ⟩⟨ψ|` over the kept register.
    pub fn partial_trace(&self, keep: &str) -> Result<DensityMatrix> {
        let qubits = self.positions(&[keep])?;
        let d = 1 << qubits.len();
        let mut rho = CMatrix::zeros(d, d);
        self.visit_fibers(&qubits, |v| {
            for i in 0..d {
                if v[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let cur = rho.get(i, j);
                    rho.set(i, j, cur + v[i] * v[j].conj());
                }
            }
        });
        Ok(DensityMatrix::from_matrix_unchecked(rho))
    }

    /// Born probability of each value of `register`.
    pub fn marginal(&self, register: &str) -> Result<Vec<f64>> {
        let range = self.layout.qubits(register)?;
        let shift = self.layout.num_qubits() - range.end;
        let mask = (1 << range.len()) - 1;
        let mut probs = vec![0.0; 1 << range.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[(idx >> shift) & mask] += a.norm_sqr();
        }
        Ok(probs)
    }

    fn branch(&self, register: &str, value: usize) -> Result<(Vec<Complex64>, f64)> {
        let range = self.layout.qubits(register)?;
        let width = range.len();
        if value >= 1 << width {
            return Err(Error::Dimension {
                expected: 1 << width,
                got: value,
            });
        }
        let shift = self.layout.num_qubits() - range.end;
        let mask = (1 << width) - 1;
        let mut amps = self.amps.clone();
        let mut mass = 0.0;
        for (idx, a) in amps.iter_mut().enumerate() {
            if (idx >> shift) & mask == value {
                mass += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok((amps, mass))
    }

    /// Deterministic projection onto `outcome` (an MSB-first bitstring).
    pub fn postselect(&self, register: &str, outcome: &str) -> Result<PostSelection> {
        let width = self.layout.width(register)?;
        self.postselect_value(register, parse_bitstring(outcome, width)?)
    }

    pub fn postselect_value(&self, register: &str, value: usize) -> Result<PostSelection> {
        let width = self.layout.width(register)?;
        let (amps, probability) = self.branch(register, value)?;
        if probability < NULL_BRANCH {
            return Err(Error::NullBranch(probability));
        }
        let collapsed = Self::new(self.layout.clone(), amps)?;
        Ok(PostSelection {
            register: register.to_owned(),
            outcome: bitstring(value, width),
            probability,
            collapsed,
        })
    }

    /// Projects `register` onto `value` and drops it from the layout.
    /// Returns the renormalized remainder and the projected mass.
    pub fn project_out(&self, register: &str, value: usize) -> Result<(Self, f64)> {
        let range = self.layout.qubits(register)?;
        let (amps, mass) = self.branch(register, value)?;
        if mass < NULL_BRANCH {
            return Err(Error::NullBranch(mass));
        }
        let layout = self.layout.without(register)?;
        let low_bits = self.layout.num_qubits() - range.end;
        let low_mask = (1 << low_bits) - 1;
        let width = range.len();
        let kept = amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| (idx >> low_bits) & ((1 << width) - 1) == value)
            .map(|(idx, a)| {
                let high = idx >> (low_bits + width);
                ((high << low_bits) | (idx & low_mask), *a)
            });
        let mut out = vec![Complex64::new(0.0, 0.0); layout.dim()];
        for (i, a) in kept {
            out[i] = a;
        }
        Ok((Self::new(layout, out)?, mass))
    }

    /// Draws `shots` measurements of `register` from a generator seeded with
    /// `seed`. Identical seeds give identical histograms.
    pub fn sample(&self, register: &str, shots: usize, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        let width = self.layout.width(register)?;
        let probs = self.marginal(register)?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut rng = SimRng::seed_from_u64(seed);
        let mut counts = vec![0usize; probs.len()];
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
            counts[k] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c > 0)
            .map(|(v, c)| (bitstring(v, width), c))
            .collect())
    }

    /// `⟨self|other⟩`; register widths must agree, names may differ.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout.shape() != other.layout.shape() {
            return Err(Error::Layout(format!(
                "shape {:?} differs from {:?}",
                self.layout.shape(),
                other.layout.shape()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}
