use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CarrierState, C64, ZERO};

/// Desk-scale limits for the sparse representation.
pub const MAX_PHOTONS: usize = 4;
pub const MAX_MODES: usize = 16;

/// Terms below this squared modulus are dropped after each transformation.
const PRUNE: f64 = 1e-32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Pol {
        if bit == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub port: String,
    pub pol: Pol,
}

impl ModeLabel {
    pub fn new(port: impl Into<String>, pol: Pol) -> Self {
        ModeLabel {
            port: port.into(),
            pol,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}", self.pol, self.port)
    }
}

/// Photon-number occupation of every mode, in mode order.
pub type Occupation = Vec<u8>;

/// Sparse superposition of Fock basis states over labelled modes with a
/// fixed total photon number.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    modes: Vec<ModeLabel>,
    photons: usize,
    terms: BTreeMap<Occupation, C64>,
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

impl FockState {
    /// Empty superposition over `modes` carrying `photons` photons per term.
    pub fn new(modes: Vec<ModeLabel>, photons: usize) -> Result<Self> {
        if modes.len() > MAX_MODES {
            return Err(Error::Capacity(format!(
                "{} modes (limit {MAX_MODES})",
                modes.len()
            )));
        }
        if photons > MAX_PHOTONS {
            return Err(Error::Capacity(format!(
                "{photons} photons (limit {MAX_PHOTONS})"
            )));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(m.to_string()));
            }
        }
        Ok(FockState {
            modes,
            photons,
            terms: BTreeMap::new(),
        })
    }

    /// Modes `(port, H), (port, V)` for each port in order.
    pub fn over_ports(ports: &[&str], photons: usize) -> Result<Self> {
        let modes = ports
            .iter()
            .flat_map(|p| [ModeLabel::new(*p, Pol::H), ModeLabel::new(*p, Pol::V)])
            .collect();
        Self::new(modes, photons)
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Distinct ports in mode order.
    pub fn ports(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for m in &self.modes {
            if !out.contains(&m.port.as_str()) {
                out.push(&m.port);
            }
        }
        out
    }

    pub fn has_port(&self, port: &str) -> bool {
        self.modes.iter().any(|m| m.port == port)
    }

    pub fn mode_index(&self, port: &str, pol: Pol) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.port == port && m.pol == pol)
            .ok_or_else(|| Error::UnknownPort(format!("{port} ({pol:?})")))
    }

    /// `(H index, V index)` of a port.
    pub fn port_modes(&self, port: &str) -> Result<(usize, usize)> {
        if !self.has_port(port) {
            return Err(Error::UnknownPort(port.to_string()));
        }
        Ok((self.mode_index(port, Pol::H)?, self.mode_index(port, Pol::V)?))
    }

    /// Accumulate `amp` onto the basis state with the given occupation.
    pub fn add_term(&mut self, occupation: Occupation, amp: C64) -> Result<()> {
        if occupation.len() != self.modes.len() {
            return Err(Error::DimensionMismatch(format!(
                "occupation of length {} for {} modes",
                occupation.len(),
                self.modes.len()
            )));
        }
        let n: usize = occupation.iter().map(|&k| k as usize).sum();
        if n != self.photons {
            return Err(Error::DimensionMismatch(format!(
                "term carries {n} photons, state declares {}",
                self.photons
            )));
        }
        *self.terms.entry(occupation).or_insert(ZERO) += amp;
        Ok(())
    }

    /// Add one photon per listed mode with amplitude `amp`.
    pub fn add_product(&mut self, modes: &[(&str, Pol)], amp: C64) -> Result<()> {
        let mut occ = vec![0u8; self.modes.len()];
        for &(port, pol) in modes {
            occ[self.mode_index(port, pol)?] += 1;
        }
        self.add_term(occ, amp)
    }

    pub fn amplitude(&self, occupation: &[u8]) -> C64 {
        self.terms.get(occupation).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = self.clone();
        for a in out.terms.values_mut() {
            *a *= k;
        }
        out.prune();
        out
    }

    /// Sum of two states over identical modes.
    pub fn superpose(&self, rhs: &FockState) -> Result<Self> {
        if self.modes != rhs.modes || self.photons != rhs.photons {
            return Err(Error::DimensionMismatch("superposing states over different modes".into()));
        }
        let mut out = self.clone();
        for (occ, a) in &rhs.terms {
            *out.terms.entry(occ.clone()).or_insert(ZERO) += a;
        }
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm_sqr() > PRUNE);
    }

    /// Rename a port in place (e.g. a beamsplitter output becoming detector `1'`).
    pub fn relabel_port(&mut self, old: &str, new: &str) -> Result<()> {
        if !self.has_port(old) {
            return Err(Error::UnknownPort(old.to_string()));
        }
        if old != new && self.has_port(new) {
            return Err(Error::DuplicateMode(new.to_string()));
        }
        for m in self.modes.iter_mut().filter(|m| m.port == old) {
            m.port = new.to_string();
        }
        Ok(())
    }

    /// Photons found in a port for the given term.
    pub fn port_count(&self, occupation: &[u8], port: &str) -> Result<usize> {
        let (h, v) = self.port_modes(port)?;
        Ok(occupation[h] as usize + occupation[v] as usize)
    }

    /// Apply a linear map on creation operators: `a_m† ↦ Σ_k image(m)_k a_k†`.
    /// `image` returns the non-zero coefficients for each input mode. Photon
    /// number is conserved; non-unitary images shrink the norm.
    pub fn transform_modes<F>(&self, image: F) -> Self
    where
        F: Fn(usize) -> Vec<(usize, C64)>,
    {
        let images: Vec<Vec<(usize, C64)>> = (0..self.modes.len()).map(&image).collect();
        let mut out = FockState {
            modes: self.modes.clone(),
            photons: self.photons,
            terms: BTreeMap::new(),
        };
        for (occ, &amp) in &self.terms {
            let photons: Vec<usize> = occ
                .iter()
                .enumerate()
                .flat_map(|(m, &k)| std::iter::repeat_n(m, k as usize))
                .collect();
            let norm_in: f64 = occ.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            let mut partial: Vec<(Occupation, C64)> = vec![(vec![0; occ.len()], amp / norm_in)];
            for &m in &photons {
                let mut next = Vec::with_capacity(partial.len() * images[m].len());
                for (o, a) in &partial {
                    for &(k, t) in &images[m] {
                        let mut o2 = o.clone();
                        o2[k] += 1;
                        next.push((o2, a * t));
                    }
                }
                partial = next;
            }
            for (o, a) in partial {
                let norm_out: f64 = o.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
                *out.terms.entry(o).or_insert(ZERO) += a * norm_out;
            }
        }
        out.prune();
        out
    }

    /// Apply an arbitrary map on individual basis terms.
    pub fn map_terms<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Occupation, C64) -> Result<Vec<(Occupation, C64)>>,
    {
        let mut out = FockState {
            modes: self.modes.clone(),
            photons: self.photons,
            terms: BTreeMap::new(),
        };
        for (occ, &amp) in &self.terms {
            for (o, a) in f(occ, amp)? {
                *out.terms.entry(o).or_insert(ZERO) += a;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Post-select on exactly one photon in each listed port (and no photons
    /// elsewhere). Returns the polarization amplitudes as a qubit register in
    /// port order, `H ↦ 0`, `V ↦ 1`. The result is sub-normalized; its squared
    /// norm is the coincidence probability.
    pub fn coincidence_state(&self, ports: &[&str]) -> Result<CarrierState> {
        let idx: Vec<(usize, usize)> = ports
            .iter()
            .map(|p| self.port_modes(p))
            .collect::<Result<_>>()?;
        let k = ports.len();
        let mut amps = vec![ZERO; 1 << k];
        if k != self.photons {
            return CarrierState::new(vec![2; k], amps);
        }
        'terms: for (occ, &a) in &self.terms {
            let mut bits = 0usize;
            for &(h, v) in &idx {
                let bit = match (occ[h], occ[v]) {
                    (1, 0) => 0,
                    (0, 1) => 1,
                    _ => continue 'terms,
                };
                bits = (bits << 1) | bit;
            }
            amps[bits] += a;
        }
        CarrierState::new(vec![2; k], amps)
    }
}
