//! Single-photon polarization kets and the two-photon product bases used by
//! the truth-table measurements.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{c, CarrierState, C64, ONE, ZERO};

pub type Ket = [C64; 2];

/// Single-qubit ket by letter: `H V D A R L M N J K T S`.
pub fn ket(label: char) -> Result<Ket> {
    let h = FRAC_1_SQRT_2;
    let (c8, s8) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    let (c58, s58) = ((5.0 * PI / 8.0).cos(), (5.0 * PI / 8.0).sin());
    let e4 = C64::from_polar(h, PI / 4.0);
    Ok(match label {
        'H' => [ONE, ZERO],
        'V' => [ZERO, ONE],
        'D' => [c(h, 0.0), c(h, 0.0)],
        'A' => [c(h, 0.0), c(-h, 0.0)],
        'R' => [c(h, 0.0), c(0.0, h)],
        'L' => [c(h, 0.0), c(0.0, -h)],
        'M' => [c(c8, 0.0), c(s8, 0.0)],
        'N' => [c(s8, 0.0), c(-c8, 0.0)],
        'J' => [c(c58, 0.0), c(s58, 0.0)],
        'K' => [c(s58, 0.0), c(-c58, 0.0)],
        'T' => [c(h, 0.0), e4],
        'S' => [c(h, 0.0), -e4],
        other => return Err(Error::BasisMismatch(format!("unknown polarization `{other}`"))),
    })
}

fn inner(a: &Ket, b: &Ket) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// A labelled two-photon product state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub label: String,
    pub kets: [Ket; 2],
}

impl ProductState {
    /// From a two-letter label such as `"VM"`.
    pub fn parse(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 2 {
            return Err(Error::BasisMismatch(format!("`{label}` is not a two-photon label")));
        }
        Ok(ProductState {
            label: label.to_string(),
            kets: [ket(chars[0])?, ket(chars[1])?],
        })
    }

    pub fn state(&self) -> CarrierState {
        let [a, b] = &self.kets;
        CarrierState::qubits(vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]).expect("4 amplitudes")
    }

    pub fn overlap(&self, other: &ProductState) -> C64 {
        inner(&self.kets[0], &other.kets[0]) * inner(&self.kets[1], &other.kets[1])
    }
}

/// Orthonormal list of two-photon product states.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    pub name: String,
    pub states: Vec<ProductState>,
}

impl BasisSet {
    pub fn new(name: &str, states: Vec<ProductState>) -> Result<Self> {
        for (i, s) in states.iter().enumerate() {
            for (j, t) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (s.overlap(t) - c(want, 0.0)).norm() > 1e-12 {
                    return Err(Error::BasisMismatch(format!(
                        "{name}: states {} and {} are not orthonormal",
                        s.label, t.label
                    )));
                }
            }
        }
        Ok(BasisSet {
            name: name.to_string(),
            states,
        })
    }

    /// Product of two single-photon bases, e.g. `product("HV", "MN")` gives
    /// `HM, HN, VM, VN`.
    pub fn product(first: &str, second: &str) -> Result<Self> {
        let labels: Vec<String> = first
            .chars()
            .flat_map(|a| second.chars().map(move |b| format!("{a}{b}")))
            .collect();
        Self::from_labels(&format!("{first}x{second}"), &labels)
    }

    pub fn from_labels<S: AsRef<str>>(name: &str, labels: &[S]) -> Result<Self> {
        let states = labels
            .iter()
            .map(|l| ProductState::parse(l.as_ref()))
            .collect::<Result<_>>()?;
        Self::new(name, states)
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Catalog lookup: `"AB-CD"` is the product basis `AB ⊗ CD`; a comma list of
/// two-letter labels (e.g. `"HD,HA,VR,VL"`) is taken as given.
pub fn basis(name: &str) -> Result<BasisSet> {
    if name.contains(',') {
        let labels: Vec<&str> = name.split(',').map(str::trim).collect();
        return BasisSet::from_labels(name, &labels);
    }
    match name.split_once('-') {
        Some((a, b)) if a.len() == 2 && b.len() == 2 => BasisSet::product(a, b),
        _ => Err(Error::BasisMismatch(format!("unknown basis `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_pairs_orthonormal() {
        for pair in ["HV", "DA", "RL", "MN", "JK", "TS"] {
            let b = BasisSet::product(pair, "HV");
            assert!(b.is_ok(), "{pair}");
        }
    }

    #[test]
    fn mixed_basis() {
        assert!(basis("HD,HA,VR,VL").is_ok());
        assert!(basis("HD,HA,VT,VS").is_ok());
        assert!(basis("HD,HR,VR,VL").is_err());
    }

    #[test]
    fn m_is_hadamard_eigenstate() {
        use crate::gates::{named_gate, NamedGate};
        let m = ket('M').unwrap();
        let s = CarrierState::qubits(m.to_vec()).unwrap();
        let out = named_gate(NamedGate::H).apply(&s).unwrap();
        assert!(out.distance(&s) < 1e-15);
    }

    #[test]
    fn catalog() {
        let b = basis("HV-MN").unwrap();
        assert_eq!(b.labels(), vec!["HM", "HN", "VM", "VN"]);
        assert!(basis("XY-HV").is_err());
        assert!(basis("nonsense").is_err());
    }
}
