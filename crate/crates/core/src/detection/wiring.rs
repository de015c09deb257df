use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multipartite::{MultipartiteOperator, SubsystemShape};
use crate::witnesses::{catalog, WitnessName};

/// Imaginary parts above this are treated as a wiring bug.
pub const IMAGINARY_TOL: f64 = 1e-9;

/// Largest zero-based copy index a label can name; both label forms share it.
const MAX_COPY_INDEX: usize = 998;

/// A subsystem of one copy: `party` 0 is `A`, 1 is `B`, ...; `copy` 0 is the
/// unprimed copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub copy: usize,
    pub party: usize,
}

impl Slot {
    pub const fn new(copy: usize, party: usize) -> Self {
        Self { copy, party }
    }
}

/// Prints `A1`, `B2`, ... with 1-based copy numbers.
impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = (b'A' + self.party as u8) as char;
        write!(f, "{letter}{}", self.copy + 1)
    }
}

/// Parses a slot label.
///
/// Accepted forms are a party letter `A`..`Z` followed by either a 1-based
/// copy number (`A1`, `B12`) or zero or more primes (`A`, `B'`, `C''`).
impl FromStr for Slot {
    type Err = Error;

    fn from_str(label: &str) -> Result<Self> {
        let err = |reason| Error::SlotLabel {
            label: label.chars().take(32).collect(),
            reason,
        };
        let mut chars = label.chars();
        let letter = chars.next().ok_or_else(|| err("empty label"))?;
        if !letter.is_ascii_uppercase() {
            return Err(err("expected a party letter A-Z"));
        }
        let party = (letter as u8 - b'A') as usize;
        let rest = chars.as_str();
        let copy = if rest.is_empty() {
            0
        } else if rest.chars().all(|ch| ch == '\'') {
            if rest.len() > MAX_COPY_INDEX {
                return Err(err("copy number too large"));
            }
            rest.len()
        } else if rest.chars().all(|ch| ch.is_ascii_digit()) {
            if rest.starts_with('0') {
                return Err(err("copy numbers start at 1"));
            }
            if rest.len() > 3 || rest.parse::<usize>().map_or(true, |n| n - 1 > MAX_COPY_INDEX) {
                return Err(err("copy number too large"));
            }
            rest.parse::<usize>().map_err(|_| err("bad copy number"))? - 1
        } else {
            return Err(err("expected a copy number or primes after the party letter"));
        };
        Ok(Slot { copy, party })
    }
}

/// One operator placed on an ordered tuple of slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub label: String,
    pub operator: MultipartiteOperator,
    pub slots: Vec<Slot>,
}

/// Witnesses placed on slots across `copies` copies of an n-party state.
/// Unassigned slots carry the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct WiringSpec {
    copies: usize,
    base_shape: SubsystemShape,
    assignments: Vec<Assignment>,
}

impl WiringSpec {
    pub fn new(copies: usize, base_shape: SubsystemShape, assignments: Vec<Assignment>) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidShape("wiring needs at least one copy".into()));
        }
        let full = base_shape.repeat(copies)?;
        let n = base_shape.len();
        let mut used = vec![false; full.len()];
        for a in &assignments {
            if a.slots.len() != a.operator.num_slots() {
                return Err(Error::InvalidShape(format!(
                    "{} acts on {} slots but {} were given",
                    a.label,
                    a.operator.num_slots(),
                    a.slots.len()
                )));
            }
            for (slot, &local) in a.slots.iter().zip(a.operator.shape().dims()) {
                if slot.copy >= copies || slot.party >= n {
                    return Err(Error::SlotOutOfRange {
                        slot: slot.copy * n + slot.party,
                        slots: full.len(),
                    });
                }
                let g = slot.copy * n + slot.party;
                if used[g] {
                    return Err(Error::SlotCollision(g));
                }
                used[g] = true;
                let expected = base_shape.dims()[slot.party];
                if local != expected {
                    return Err(Error::SlotDimMismatch {
                        slot: g,
                        local,
                        full: expected,
                    });
                }
            }
        }
        Ok(Self {
            copies,
            base_shape,
            assignments,
        })
    }

    /// Wiring of catalog witnesses given as `(name, b, slot labels)`.
    pub fn from_catalog(
        copies: usize,
        base_shape: SubsystemShape,
        entries: &[(WitnessName, Option<f64>, &[&str])],
    ) -> Result<Self> {
        let assignments = entries
            .iter()
            .map(|(name, b, labels)| {
                let spec = catalog(*name, *b)?;
                let slots = labels.iter().map(|l| l.parse()).collect::<Result<Vec<Slot>>>()?;
                Ok(Assignment {
                    label: spec.name,
                    operator: spec.operator,
                    slots,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(copies, base_shape, assignments)
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn base_shape(&self) -> &SubsystemShape {
        &self.base_shape
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn full_shape(&self) -> SubsystemShape {
        self.base_shape.repeat(self.copies).expect("validated in new")
    }

    /// Flat slot index: copies are laid out one after another, parties in
    /// order within each copy (`A B A' B'` for two bipartite copies).
    pub fn global_index(&self, slot: Slot) -> usize {
        slot.copy * self.base_shape.len() + slot.party
    }

    /// The full operator on all `copies * parties` slots.
    pub fn assemble(&self) -> Result<MultipartiteOperator> {
        let full = self.full_shape();
        let mut ops = self.assignments.iter();
        let Some(first) = ops.next() else {
            return Ok(MultipartiteOperator::identity(full));
        };
        let local = ops.try_fold(first.operator.clone(), |acc, a| acc.kron(&a.operator))?;
        let slots: Vec<usize> = self
            .assignments
            .iter()
            .flat_map(|a| a.slots.iter().map(|&s| self.global_index(s)))
            .collect();
        local.embed(&slots, &full)
    }

    /// `Tr(W rho^{(x)k})` for a single-copy state `rho`.
    pub fn expectation(&self, rho: &MultipartiteOperator) -> Result<f64> {
        self.check_state_shape(rho.shape())?;
        let op = self.assemble()?;
        let power = rho.tensor_power(self.copies)?;
        real_part(op.matrix().trace_product(power.matrix())?)
    }

    /// `<psi|^{(x)k} W |psi>^{(x)k}` for a single-copy pure state.
    pub fn expectation_pure(&self, psi: &[Complex64]) -> Result<f64> {
        let op = self.assemble()?;
        self.expectation_pure_with(&op, psi)
    }

    /// Same as [`expectation_pure`](Self::expectation_pure) with a
    /// pre-assembled operator.
    pub fn expectation_pure_with(&self, op: &MultipartiteOperator, psi: &[Complex64]) -> Result<f64> {
        if psi.len() != self.base_shape.total_dim() {
            return Err(Error::DimensionMismatch {
                op: "expectation_pure",
                left: psi.len(),
                right: self.base_shape.total_dim(),
            });
        }
        let mut v = psi.to_vec();
        for _ in 1..self.copies {
            v = crate::linalg::vec_kron(&v, psi);
        }
        real_part(op.matrix().quadratic_form(&v)?)
    }

    fn check_state_shape(&self, shape: &SubsystemShape) -> Result<()> {
        if shape != &self.base_shape {
            return Err(Error::InvalidShape(format!(
                "state shape {:?} does not match wiring base shape {:?}",
                shape.dims(),
                self.base_shape.dims()
            )));
        }
        Ok(())
    }

    /// The same wiring with copy `c` renamed to `perm[c]`.
    pub fn relabel_copies(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.copies {
            return Err(Error::InvalidPermutation(format!(
                "{} entries for {} copies",
                perm.len(),
                self.copies
            )));
        }
        let assignments = self
            .assignments
            .iter()
            .map(|a| Assignment {
                label: a.label.clone(),
                operator: a.operator.clone(),
                slots: a.slots.iter().map(|s| Slot::new(perm[s.copy], s.party)).collect(),
            })
            .collect();
        Self::new(self.copies, self.base_shape.clone(), assignments)
    }

    /// Human-readable form, e.g. `W[A1,B2] V[B1,A2]`.
    pub fn label(&self) -> String {
        self.assignments
            .iter()
            .map(|a| {
                let slots: Vec<String> = a.slots.iter().map(Slot::to_string).collect();
                format!("{}[{}]", a.label, slots.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    #[test]
    fn slot_labels() {
        assert_eq!("A".parse::<Slot>().unwrap(), Slot::new(0, 0));
        assert_eq!("B'".parse::<Slot>().unwrap(), Slot::new(1, 1));
        assert_eq!("C''".parse::<Slot>().unwrap(), Slot::new(2, 2));
        assert_eq!("A3".parse::<Slot>().unwrap(), Slot::new(2, 0));
        assert_eq!(Slot::new(1, 1).to_string(), "B2");
        for bad in ["", "a1", "A0", "A'1", "1A", "A-1", "A1234", "Ä"] {
            assert!(bad.parse::<Slot>().is_err(), "{bad}");
        }
    }

    #[test]
    fn slot_label_limits_agree() {
        let primes = format!("A{}", "'".repeat(998));
        let slot: Slot = primes.parse().unwrap();
        assert_eq!(slot.to_string(), "A999");
        assert_eq!("A999".parse::<Slot>().unwrap(), slot);
        assert!(format!("A{}", "'".repeat(999)).parse::<Slot>().is_err());
    }

    #[test]
    fn single_copy_wiring_is_the_witness() {
        let w = WiringSpec::from_catalog(1, SubsystemShape::qubits(2), &[(WitnessName::W, None, &["A", "B"])]).unwrap();
        let expected = catalog(WitnessName::W, None).unwrap().operator;
        assert_eq!(w.assemble().unwrap(), expected);
    }

    #[test]
    fn empty_wiring_is_identity() {
        let w = WiringSpec::new(2, SubsystemShape::qubits(2), vec![]).unwrap();
        assert_eq!(w.assemble().unwrap().matrix(), &ComplexMatrix::identity(16));
    }

    #[test]
    fn validation_errors() {
        let shape = SubsystemShape::qubits(2);
        let collide = WiringSpec::from_catalog(
            2,
            shape.clone(),
            &[
                (WitnessName::W, None, &["A", "B'"]),
                (WitnessName::V, None, &["B'", "A'"]),
            ],
        );
        assert!(matches!(collide, Err(Error::SlotCollision(3))));
        let out_of_range = WiringSpec::from_catalog(2, shape.clone(), &[(WitnessName::W, None, &["A", "C"])]);
        assert!(matches!(out_of_range, Err(Error::SlotOutOfRange { .. })));
        let third_copy = WiringSpec::from_catalog(2, shape.clone(), &[(WitnessName::W, None, &["A", "B3"])]);
        assert!(third_copy.is_err());
        let arity = WiringSpec::from_catalog(2, shape, &[(WitnessName::WW1, None, &["A", "B"])]);
        assert!(arity.is_err());
    }

    #[test]
    fn state_shape_is_checked() {
        let w = WiringSpec::from_catalog(1, SubsystemShape::qubits(2), &[(WitnessName::W, None, &["A", "B"])]).unwrap();
        let ghz = crate::states::ghz().density();
        assert!(w.expectation(&ghz).is_err());
    }

    #[test]
    fn imaginary_residue_is_an_error() {
        // i Y is anti-Hermitian, so Tr(iY rho) = i <Y> for a state with <Y> = 1
        let iy = MultipartiteOperator::qubits(ComplexMatrix::pauli_y().scale(crate::linalg::I)).unwrap();
        let w = WiringSpec::new(
            1,
            SubsystemShape::qubits(1),
            vec![Assignment {
                label: "iY".into(),
                operator: iy,
                slots: vec![Slot::new(0, 0)],
            }],
        )
        .unwrap();
        let rho_y = MultipartiteOperator::qubits(
            ComplexMatrix::identity(2)
                .add(&ComplexMatrix::pauli_y())
                .unwrap()
                .scale_real(0.5),
        )
        .unwrap();
        assert!(matches!(w.expectation(&rho_y), Err(Error::ImaginaryResidue(_))));
    }
}
