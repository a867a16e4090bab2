use std::ops::Range;

use crate::error::{Error, Result};

/// Default ceiling on simulated qubits (2^24 amplitudes, 256 MiB).
pub const DEFAULT_QUBIT_BUDGET: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub width: usize,
}

/// Ordered named registers. The basis index is the concatenation of the
/// per-register bitstrings in declared order, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitRegisterLayout {
    registers: Vec<Register>,
    budget: usize,
}

impl QubitRegisterLayout {
    pub fn new(registers: &[(&str, usize)]) -> Result<Self> {
        Self::with_budget(registers, DEFAULT_QUBIT_BUDGET)
    }

    pub fn with_budget(registers: &[(&str, usize)], budget: usize) -> Result<Self> {
        let layout = Self {
            registers: registers
                .iter()
                .map(|(name, width)| Register {
                    name: (*name).to_owned(),
                    width: *width,
                })
                .collect(),
            budget,
        };
        layout.validate()?;
        Ok(layout)
    }

    fn validate(&self) -> Result<()> {
        for (i, r) in self.registers.iter().enumerate() {
            if r.width == 0 {
                return Err(Error::Layout(format!("register `{}` has width 0", r.name)));
            }
            if self.registers[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::Layout(format!("duplicate register `{}`", r.name)));
            }
        }
        if self.num_qubits() > self.budget {
            return Err(Error::Layout(format!(
                "{} qubits exceed the budget of {}",
                self.num_qubits(),
                self.budget
            )));
        }
        Ok(())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.width)
            .ok_or_else(|| Error::UnknownRegister(name.to_owned()))
    }

    /// Global qubit positions of a register; position 0 is the overall MSB.
    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        let mut start = 0;
        for r in &self.registers {
            if r.name == name {
                return Ok(start..start + r.width);
            }
            start += r.width;
        }
        Err(Error::UnknownRegister(name.to_owned()))
    }

    /// Bit mask (in basis-index space) of a global qubit position.
    pub fn qubit_mask(&self, position: usize) -> usize {
        1 << (self.num_qubits() - 1 - position)
    }

    /// Widths in declared order; two layouts with equal shapes can be compared
    /// amplitude by amplitude.
    pub fn shape(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.width).collect()
    }

    /// Concatenation `self ++ other`; budgets combine by maximum.
    pub fn concat(&self, other: &QubitRegisterLayout) -> Result<Self> {
        let layout = Self {
            registers: self
                .registers
                .iter()
                .chain(&other.registers)
                .cloned()
                .collect(),
            budget: self.budget.max(other.budget),
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn without(&self, name: &str) -> Result<Self> {
        if !self.contains(name) {
            return Err(Error::UnknownRegister(name.to_owned()));
        }
        Ok(Self {
            registers: self
                .registers
                .iter()
                .filter(|r| r.name != name)
                .cloned()
                .collect(),
            budget: self.budget,
        })
    }
}

/// Qubits needed to index `len` items (at least one).
pub fn width_for(len: usize) -> usize {
    len.max(2).next_power_of_two().trailing_zeros() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_follow_declaration_order() {
        let l = QubitRegisterLayout::new(&[("a", 2), ("b", 3)]).unwrap();
        assert_eq!(l.num_qubits(), 5);
        assert_eq!(l.qubits("b").unwrap(), 2..5);
        assert_eq!(l.qubit_mask(0), 0b10000);
        assert_eq!(l.qubit_mask(4), 0b00001);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(QubitRegisterLayout::new(&[("a", 1), ("a", 1)]).is_err());
        assert!(QubitRegisterLayout::new(&[("a", 0)]).is_err());
        assert!(QubitRegisterLayout::new(&[("a", 20), ("b", 5)]).is_err());
        assert!(QubitRegisterLayout::with_budget(&[("a", 3)], 2).is_err());
        let l = QubitRegisterLayout::new(&[("a", 1)]).unwrap();
        assert!(matches!(l.qubits("z"), Err(Error::UnknownRegister(_))));
    }

    #[test]
    fn widths_round_up() {
        assert_eq!(width_for(1), 1);
        assert_eq!(width_for(2), 1);
        assert_eq!(width_for(3), 2);
        assert_eq!(width_for(8), 3);
        assert_eq!(width_for(1000), 10);
    }
}
