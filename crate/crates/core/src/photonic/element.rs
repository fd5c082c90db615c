//! Optical elements acting on [`FockState`]s and ordered circuits of them.
//!
//! Conventions:
//! * BS on ports `(a, b)`: `a† ↦ (a† + b†)/√2`, `b† ↦ (a† − b†)/√2`, per polarization.
//! * PBS on `(a, b)` at axis `θ`: light polarized along `θ` stays in its port,
//!   the orthogonal polarization crosses to the other port. `θ = 0` transmits H
//!   and reflects V; `θ = π/2` does the opposite.
//! * HWP/QWP at `θ`: `R(θ)·diag(1,−1)·R(−θ)` and `R(θ)·diag(1,i)·R(−θ)`.
//! * PolCNOT: ideal two-photon gate flipping the target port's polarization
//!   when the control port holds a V photon; identity when either port is empty.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::fock::{FockState, Pol};
use crate::error::{Error, Result};
use crate::gates;
use crate::io::OperatorJson;
use crate::linalg::{c, Operator, C64, ONE};

#[derive(Clone, Debug, PartialEq)]
pub enum OpticalElement {
    BeamSplitter { a: String, b: String },
    PolarizingBeamSplitter { a: String, b: String, axis: f64 },
    HalfWavePlate { port: String, angle: f64 },
    QuarterWavePlate { port: String, angle: f64 },
    PhaseShift { port: String, phase: f64 },
    Polarizer { port: String, angle: f64 },
    PolCnot { control: String, target: String },
    /// Arbitrary 2×2 polarization map on one port (waveplate stacks, PBS-based
    /// projectors, black-box single-photon operations).
    Jones { port: String, op: Operator },
    /// Joint polarization operation on one photon per listed port. Acts as
    /// identity when every listed port is empty.
    Joint { ports: Vec<String>, op: Operator },
}

impl OpticalElement {
    pub fn bs(a: &str, b: &str) -> Self {
        OpticalElement::BeamSplitter {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn pbs(a: &str, b: &str) -> Self {
        Self::pbs_at(a, b, 0.0)
    }

    pub fn pbs_at(a: &str, b: &str, axis: f64) -> Self {
        OpticalElement::PolarizingBeamSplitter {
            a: a.into(),
            b: b.into(),
            axis,
        }
    }

    pub fn hwp(port: &str, angle: f64) -> Self {
        OpticalElement::HalfWavePlate {
            port: port.into(),
            angle,
        }
    }

    pub fn qwp(port: &str, angle: f64) -> Self {
        OpticalElement::QuarterWavePlate {
            port: port.into(),
            angle,
        }
    }

    pub fn phase(port: &str, phase: f64) -> Self {
        OpticalElement::PhaseShift {
            port: port.into(),
            phase,
        }
    }

    pub fn polarizer(port: &str, angle: f64) -> Self {
        OpticalElement::Polarizer {
            port: port.into(),
            angle,
        }
    }

    pub fn pol_cnot(control: &str, target: &str) -> Self {
        OpticalElement::PolCnot {
            control: control.into(),
            target: target.into(),
        }
    }

    pub fn jones(port: &str, op: Operator) -> Result<Self> {
        if op.dims_in() != [2] || op.dims_out() != [2] {
            return Err(Error::InvalidElement("Jones element needs a 2x2 operator".into()));
        }
        Ok(OpticalElement::Jones {
            port: port.into(),
            op,
        })
    }

    pub fn joint(ports: &[&str], op: Operator) -> Result<Self> {
        if !op.is_qubit_operator() || op.n_carriers() != ports.len() {
            return Err(Error::DimensionMismatch(format!(
                "joint operation on {} ports needs a square operator on {} qubits",
                ports.len(),
                ports.len()
            )));
        }
        Ok(OpticalElement::Joint {
            ports: ports.iter().map(|p| p.to_string()).collect(),
            op,
        })
    }

    pub fn ports(&self) -> Vec<&str> {
        match self {
            OpticalElement::BeamSplitter { a, b }
            | OpticalElement::PolarizingBeamSplitter { a, b, .. } => vec![a, b],
            OpticalElement::HalfWavePlate { port, .. }
            | OpticalElement::QuarterWavePlate { port, .. }
            | OpticalElement::PhaseShift { port, .. }
            | OpticalElement::Polarizer { port, .. }
            | OpticalElement::Jones { port, .. } => vec![port],
            OpticalElement::PolCnot { control, target } => vec![control, target],
            OpticalElement::Joint { ports, .. } => ports.iter().map(String::as_str).collect(),
        }
    }

    /// 2×2 polarization map of single-port elements.
    pub fn jones_matrix(&self) -> Option<Operator> {
        match self {
            OpticalElement::HalfWavePlate { angle, .. } => Some(gates::hwp(*angle)),
            OpticalElement::QuarterWavePlate { angle, .. } => Some(gates::qwp(*angle)),
            OpticalElement::PhaseShift { phase, .. } => {
                Some(Operator::qubits_identity(1).scale(C64::from_polar(1.0, *phase)))
            }
            OpticalElement::Polarizer { angle, .. } => Some(gates::polarizer(*angle)),
            OpticalElement::Jones { op, .. } => Some(op.clone()),
            _ => None,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            OpticalElement::BeamSplitter { .. } => "BS",
            OpticalElement::PolarizingBeamSplitter { .. } => "PBS",
            OpticalElement::HalfWavePlate { .. } => "HWP",
            OpticalElement::QuarterWavePlate { .. } => "QWP",
            OpticalElement::PhaseShift { .. } => "PhaseShift",
            OpticalElement::Polarizer { .. } => "Polarizer",
            OpticalElement::PolCnot { .. } => "PolCNOT",
            OpticalElement::Jones { .. } => "Jones",
            OpticalElement::Joint { .. } => "Joint",
        }
    }
}

type PolImages = [(usize, Vec<(usize, C64)>); 2];

fn pol_images(state: &FockState, port: &str, m: &Operator) -> Result<PolImages> {
    let (h, v) = state.port_modes(port)?;
    let idx = [h, v];
    let col = |p: usize| -> Vec<(usize, C64)> {
        (0..2)
            .map(|q| (idx[q], m.entry(q, p)))
            .filter(|(_, t)| t.norm_sqr() > 0.0)
            .collect()
    };
    Ok([(h, col(0)), (v, col(1))])
}

/// Apply one element to a state.
pub fn apply_element(state: &FockState, element: &OpticalElement) -> Result<FockState> {
    for p in element.ports() {
        if !state.has_port(p) {
            return Err(Error::UnknownPort(p.to_string()));
        }
    }
    match element {
        OpticalElement::BeamSplitter { a, b } => {
            if a == b {
                return Err(Error::InvalidElement("BS needs two distinct ports".into()));
            }
            let (ah, av) = state.port_modes(a)?;
            let (bh, bv) = state.port_modes(b)?;
            let s = c(FRAC_1_SQRT_2, 0.0);
            Ok(state.transform_modes(|m| match m {
                x if x == ah => vec![(ah, s), (bh, s)],
                x if x == bh => vec![(ah, s), (bh, -s)],
                x if x == av => vec![(av, s), (bv, s)],
                x if x == bv => vec![(av, s), (bv, -s)],
                x => vec![(x, ONE)],
            }))
        }
        OpticalElement::PolarizingBeamSplitter { a, b, axis } => {
            if a == b {
                return Err(Error::InvalidElement("PBS needs two distinct ports".into()));
            }
            let keep = gates::polarizer(*axis);
            let cross = gates::polarizer(*axis + std::f64::consts::FRAC_PI_2);
            let (ah, av) = state.port_modes(a)?;
            let (bh, bv) = state.port_modes(b)?;
            let (ai, bi) = ([ah, av], [bh, bv]);
            Ok(state.transform_modes(|m| {
                let (own, other, p) = if let Some(p) = ai.iter().position(|&x| x == m) {
                    (ai, bi, p)
                } else if let Some(p) = bi.iter().position(|&x| x == m) {
                    (bi, ai, p)
                } else {
                    return vec![(m, ONE)];
                };
                let mut out = Vec::with_capacity(4);
                for q in 0..2 {
                    let t = keep.entry(q, p);
                    if t.norm_sqr() > 0.0 {
                        out.push((own[q], t));
                    }
                    let t = cross.entry(q, p);
                    if t.norm_sqr() > 0.0 {
                        out.push((other[q], t));
                    }
                }
                out
            }))
        }
        OpticalElement::HalfWavePlate { port, .. }
        | OpticalElement::QuarterWavePlate { port, .. }
        | OpticalElement::PhaseShift { port, .. }
        | OpticalElement::Polarizer { port, .. }
        | OpticalElement::Jones { port, .. } => {
            let m = element.jones_matrix().expect("single-port element");
            let [(h, hi), (v, vi)] = pol_images(state, port, &m)?;
            Ok(state.transform_modes(|x| {
                if x == h {
                    hi.clone()
                } else if x == v {
                    vi.clone()
                } else {
                    vec![(x, ONE)]
                }
            }))
        }
        OpticalElement::PolCnot { control, target } => {
            if control == target {
                return Err(Error::InvalidElement("PolCNOT needs two distinct ports".into()));
            }
            let (ch, cv) = state.port_modes(control)?;
            let (th, tv) = state.port_modes(target)?;
            state.map_terms(|occ, amp| {
                let nc = occ[ch] as usize + occ[cv] as usize;
                let nt = occ[th] as usize + occ[tv] as usize;
                if nt > 1 {
                    return Err(Error::MultiPhotonPort {
                        port: target.clone(),
                        photons: nt,
                    });
                }
                if nc > 1 {
                    return Err(Error::MultiPhotonPort {
                        port: control.clone(),
                        photons: nc,
                    });
                }
                let mut o = occ.clone();
                if nc == 1 && nt == 1 && occ[cv] == 1 {
                    o.swap(th, tv);
                }
                Ok(vec![(o, amp)])
            })
        }
        OpticalElement::Joint { ports, op } => {
            let idx: Vec<(usize, usize)> = ports
                .iter()
                .map(|p| state.port_modes(p))
                .collect::<Result<_>>()?;
            let k = idx.len();
            state.map_terms(|occ, amp| {
                let counts: Vec<usize> = idx
                    .iter()
                    .map(|&(h, v)| occ[h] as usize + occ[v] as usize)
                    .collect();
                if counts.iter().all(|&n| n == 0) {
                    return Ok(vec![(occ.clone(), amp)]);
                }
                if counts.iter().any(|&n| n != 1) {
                    return Err(Error::InvalidElement(format!(
                        "joint operation on {ports:?} needs one photon per port or vacuum, found {counts:?}"
                    )));
                }
                let col = idx
                    .iter()
                    .fold(0usize, |acc, &(_, v)| (acc << 1) | occ[v] as usize);
                let mut out = Vec::with_capacity(1 << k);
                for row in 0..(1usize << k) {
                    let t = op.entry(row, col);
                    if t.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut o = occ.clone();
                    for (q, &(h, v)) in idx.iter().enumerate() {
                        let bit = (row >> (k - 1 - q)) & 1;
                        o[h] = (bit == 0) as u8;
                        o[v] = (bit == 1) as u8;
                    }
                    out.push((o, amp * t));
                }
                Ok(out)
            })
        }
    }
}

/// Ordered list of elements plus the ports watched by detectors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OpticalCircuit {
    pub elements: Vec<OpticalElement>,
    pub detection_ports: Vec<String>,
}

impl OpticalCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, element: OpticalElement) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn with_detectors(mut self, ports: &[&str]) -> Self {
        self.detection_ports = ports.iter().map(|p| p.to_string()).collect();
        self
    }

    /// Every referenced port exists in the state's mode set.
    pub fn validate(&self, state: &FockState) -> Result<()> {
        for p in self
            .elements
            .iter()
            .flat_map(|e| e.ports())
            .chain(self.detection_ports.iter().map(String::as_str))
        {
            if !state.has_port(p) {
                return Err(Error::UnknownPort(p.to_string()));
            }
        }
        Ok(())
    }

    pub fn run(&self, state: &FockState) -> Result<FockState> {
        self.validate(state)?;
        self.elements
            .iter()
            .try_fold(state.clone(), |s, e| apply_element(&s, e))
    }

    pub fn to_json(&self) -> String {
        let spec = CircuitSpec {
            elements: self.elements.iter().map(ElementSpec::from).collect(),
            detection_ports: self.detection_ports.clone(),
        };
        serde_json::to_string_pretty(&spec).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CircuitSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(OpticalCircuit {
            elements: spec
                .elements
                .into_iter()
                .map(OpticalElement::try_from)
                .collect::<Result<_>>()?,
            detection_ports: spec.detection_ports,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitSpec {
    elements: Vec<ElementSpec>,
    #[serde(default)]
    detection_ports: Vec<String>,
}

/// Wire form of an element: `{kind, ports, angle}` plus `op` for operator elements.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementSpec {
    pub kind: String,
    pub ports: Vec<String>,
    #[serde(default)]
    pub angle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<OperatorJson>,
}

impl From<&OpticalElement> for ElementSpec {
    fn from(e: &OpticalElement) -> Self {
        let angle = match e {
            OpticalElement::PolarizingBeamSplitter { axis, .. } => *axis,
            OpticalElement::HalfWavePlate { angle, .. }
            | OpticalElement::QuarterWavePlate { angle, .. }
            | OpticalElement::Polarizer { angle, .. } => *angle,
            OpticalElement::PhaseShift { phase, .. } => *phase,
            _ => 0.0,
        };
        let op = match e {
            OpticalElement::Jones { op, .. } | OpticalElement::Joint { op, .. } => Some(op.into()),
            _ => None,
        };
        ElementSpec {
            kind: e.kind_name().into(),
            ports: e.ports().iter().map(|p| p.to_string()).collect(),
            angle,
            op,
        }
    }
}

impl TryFrom<ElementSpec> for OpticalElement {
    type Error = Error;

    fn try_from(s: ElementSpec) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if s.ports.len() != n {
                return Err(Error::InvalidElement(format!(
                    "{} addresses {n} port(s), got {}",
                    s.kind,
                    s.ports.len()
                )));
            }
            Ok(())
        };
        let op = || -> Result<Operator> {
            s.op
                .clone()
                .ok_or_else(|| Error::InvalidElement(format!("{} needs an `op` matrix", s.kind)))
                .and_then(Operator::try_from)
        };
        let p = &s.ports;
        match s.kind.as_str() {
            "BS" => {
                want(2)?;
                Ok(OpticalElement::bs(&p[0], &p[1]))
            }
            "PBS" => {
                want(2)?;
                Ok(OpticalElement::pbs_at(&p[0], &p[1], s.angle))
            }
            "HWP" => {
                want(1)?;
                Ok(OpticalElement::hwp(&p[0], s.angle))
            }
            "QWP" => {
                want(1)?;
                Ok(OpticalElement::qwp(&p[0], s.angle))
            }
            "PhaseShift" => {
                want(1)?;
                Ok(OpticalElement::phase(&p[0], s.angle))
            }
            "Polarizer" => {
                want(1)?;
                Ok(OpticalElement::polarizer(&p[0], s.angle))
            }
            "PolCNOT" => {
                want(2)?;
                Ok(OpticalElement::pol_cnot(&p[0], &p[1]))
            }
            "Jones" => {
                want(1)?;
                OpticalElement::jones(&p[0], op()?)
            }
            "Joint" => {
                let refs: Vec<&str> = p.iter().map(String::as_str).collect();
                OpticalElement::joint(&refs, op()?)
            }
            other => Err(Error::InvalidElement(format!("unknown element kind `{other}`"))),
        }
    }
}

/// Single-photon transfer matrix of an element restricted to the listed ports
/// (modes ordered `(p0,H), (p0,V), (p1,H), …`). Only defined for linear elements.
pub fn single_photon_matrix(element: &OpticalElement, ports: &[&str]) -> Result<Operator> {
    let n = 2 * ports.len();
    let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
    for (j, port) in ports.iter().enumerate() {
        for pol in [Pol::H, Pol::V] {
            let mut s = FockState::over_ports(ports, 1)?;
            s.add_product(&[(port, pol)], ONE)?;
            let out = apply_element(&s, element)?;
            for (occ, &a) in out.terms() {
                let row = occ.iter().position(|&k| k == 1).expect("one photon");
                m[(row, 2 * j + pol.bit())] = a;
            }
        }
    }
    Operator::square(vec![n], m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single(port: &str, pol: Pol, ports: &[&str]) -> FockState {
        let mut s = FockState::over_ports(ports, 1).unwrap();
        s.add_product(&[(port, pol)], ONE).unwrap();
        s
    }

    #[test]
    fn bs_single_photon() {
        let out = apply_element(&single("a", Pol::H, &["a", "b"]), &OpticalElement::bs("a", "b")).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((out.amplitude(&[1, 0, 0, 0]) - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(&[0, 0, 1, 0]) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hwp_45_flips() {
        let out = apply_element(&single("a", Pol::H, &["a"]), &OpticalElement::hwp("a", PI / 4.0)).unwrap();
        assert!((out.amplitude(&[0, 1]) - ONE).norm() < 1e-15);
    }

    #[test]
    fn pbs_routes_v() {
        let out = apply_element(&single("a", Pol::V, &["a", "b"]), &OpticalElement::pbs("a", "b")).unwrap();
        assert!((out.amplitude(&[0, 0, 0, 1]) - ONE).norm() < 1e-15);
        let out = apply_element(&single("a", Pol::H, &["a", "b"]), &OpticalElement::pbs("a", "b")).unwrap();
        assert!((out.amplitude(&[1, 0, 0, 0]) - ONE).norm() < 1e-15);
        let out = apply_element(&single("a", Pol::H, &["a", "b"]), &OpticalElement::pbs_at("a", "b", PI / 2.0)).unwrap();
        assert!((out.amplitude(&[0, 0, 1, 0]) - ONE).norm() < 1e-15);
    }

    #[test]
    fn pol_cnot_flips_on_v() {
        let mut s = FockState::over_ports(&["c", "t"], 2).unwrap();
        s.add_product(&[("c", Pol::V), ("t", Pol::H)], ONE).unwrap();
        let out = apply_element(&s, &OpticalElement::pol_cnot("c", "t")).unwrap();
        assert!((out.amplitude(&[0, 1, 0, 1]) - ONE).norm() < 1e-15);
        let mut s = FockState::over_ports(&["c", "t", "u"], 2).unwrap();
        s.add_product(&[("c", Pol::V), ("u", Pol::H)], ONE).unwrap();
        let out = apply_element(&s, &OpticalElement::pol_cnot("c", "t")).unwrap();
        assert_eq!(out, s, "empty target port is left alone");
    }

    #[test]
    fn pol_cnot_rejects_multiphoton_target() {
        let mut s = FockState::over_ports(&["c", "t"], 3).unwrap();
        s.add_product(&[("c", Pol::V), ("t", Pol::H), ("t", Pol::V)], ONE).unwrap();
        assert!(matches!(
            apply_element(&s, &OpticalElement::pol_cnot("c", "t")),
            Err(Error::MultiPhotonPort { .. })
        ));
    }

    #[test]
    fn unknown_port() {
        let s = single("a", Pol::H, &["a"]);
        assert!(matches!(
            apply_element(&s, &OpticalElement::hwp("zz", 0.0)),
            Err(Error::UnknownPort(_))
        ));
    }

    #[test]
    fn polarizer_reduces_norm() {
        let mut s = FockState::over_ports(&["a"], 1).unwrap();
        s.add_product(&[("a", Pol::H)], c(FRAC_1_SQRT_2, 0.0)).unwrap();
        s.add_product(&[("a", Pol::V)], c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let out = apply_element(&s, &OpticalElement::polarizer("a", 0.0)).unwrap();
        assert!((out.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn linear_elements_unitary_on_single_excitation() {
        let ports = ["a", "b"];
        for e in [
            OpticalElement::bs("a", "b"),
            OpticalElement::pbs("a", "b"),
            OpticalElement::pbs_at("a", "b", 0.37),
            OpticalElement::hwp("a", 0.2),
            OpticalElement::qwp("b", 1.1),
            OpticalElement::phase("a", 0.9),
        ] {
            let m = single_photon_matrix(&e, &ports).unwrap();
            assert!(m.is_unitary(), "{e:?}");
        }
    }

    #[test]
    fn circuit_json_roundtrip() {
        let mut circ = OpticalCircuit::new();
        circ.push(OpticalElement::pbs("a", "b"))
            .push(OpticalElement::hwp("a", 0.3))
            .push(OpticalElement::jones("b", gates::proj_h()).unwrap());
        let circ = circ.with_detectors(&["a", "b"]);
        let back = OpticalCircuit::from_json(&circ.to_json()).unwrap();
        assert_eq!(back, circ);
        assert!(OpticalCircuit::from_json(r#"{"elements":[{"kind":"BS","ports":["a"]}]}"#).is_err());
    }
}
