use alloc::vec::Vec;

use crate::turbine::{derivs_4state, steady_state_pitch, CoefficientSurface, Inputs, PlantState4, TurbineParams};
use crate::{Error, Result};

/// Equilibrium used as a linearization point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatingPoint {
    pub index: usize,
    pub wind: f64,
    pub state: [f64; 4],
    pub pitch: f64,
    pub generator_torque: f64,
}

impl OperatingPoint {
    pub fn plant_state(&self) -> PlantState4 {
        PlantState4::from_array(self.state)
    }

    pub fn inputs(&self) -> Inputs {
        Inputs { pitch: self.pitch, generator_torque: self.generator_torque }
    }
}

/// Equally spaced grid of full-load equilibria at rated speed and torque.
pub fn build_grid(
    params: &TurbineParams,
    surface: &CoefficientSurface,
    v_lo: f64,
    v_hi: f64,
    n_points: usize,
) -> Result<Vec<OperatingPoint>> {
    if n_points == 0 {
        return Err(Error::InvalidParameter { name: "n_points", reason: "grid needs at least one node".into() });
    }
    let ordered = if n_points == 1 { v_lo <= v_hi } else { v_lo < v_hi };
    if !(params.v_rated <= v_lo && ordered && v_hi <= params.v_cut_out) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: alloc::format!("need v_rated <= {v_lo} < {v_hi} <= v_cut_out"),
        });
    }
    let bases = params.bases();
    let state = PlantState4 {
        rotor_speed: params.rated_rotor_speed,
        generator_speed: params.rated_rotor_speed * params.gear_ratio,
        torsion: params.rated_torsion(),
        generator_torque: params.rated_generator_torque,
    };
    let mut out = Vec::with_capacity(n_points);
    for index in 0..n_points {
        let wind = if n_points == 1 {
            v_lo
        } else {
            v_lo + (v_hi - v_lo) * index as f64 / (n_points - 1) as f64
        };
        let pitch = steady_state_pitch(wind, params, surface)?;
        let op = OperatingPoint {
            index,
            wind,
            state: state.to_array(),
            pitch,
            generator_torque: params.rated_generator_torque,
        };
        let d = derivs_4state(state, op.inputs(), wind, params.torque_actuator_tau, surface, params)?;
        let residual = d
            .to_array()
            .iter()
            .zip(bases.state4())
            .map(|(r, b)| (r / b).abs())
            .fold(0.0, f64::max);
        if residual >= 1e-6 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: alloc::format!("node at {wind} m/s is not an equilibrium (residual {residual:e})"),
            });
        }
        out.push(op);
    }
    Ok(out)
}

/// Triangular membership functions on sorted premise nodes; the premise is
/// clamped to the end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipGrid {
    nodes: Vec<f64>,
}

impl MembershipGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "nodes",
                reason: "premise nodes must be non-empty and strictly increasing".into(),
            });
        }
        Ok(Self { nodes })
    }

    pub fn from_points(points: &[OperatingPoint]) -> Result<Self> {
        Self::new(points.iter().map(|p| p.wind).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interval index `k` and weight `s` of node `k + 1`; `h_k = 1 - s`.
    fn locate(&self, z: f64) -> (usize, f64) {
        let n = self.nodes.len();
        if n == 1 || z <= self.nodes[0] || z.is_nan() {
            return (0, 0.0);
        }
        if z >= self.nodes[n - 1] {
            return (n - 2, 1.0);
        }
        let k = self.nodes.partition_point(|&v| v <= z) - 1;
        let s = (z - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]);
        (k, s)
    }

    pub fn weights(&self, z: f64) -> Vec<f64> {
        let mut h = alloc::vec![0.0; self.nodes.len()];
        self.weights_into(z, &mut h);
        h
    }

    pub fn weights_into(&self, z: f64, h: &mut [f64]) {
        h.fill(0.0);
        let (k, s) = self.locate(z);
        if self.nodes.len() == 1 {
            h[0] = 1.0;
            return;
        }
        h[k] = 1.0 - s;
        h[k + 1] += s;
    }

    /// Ordered pairs whose membership supports overlap.
    pub fn active_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        let support = |i: usize| {
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.nodes[i - 1] };
            let hi = if i + 1 == n { f64::INFINITY } else { self.nodes[i + 1] };
            (lo, hi)
        };
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = support(i);
                let (c, d) = support(j);
                if a.max(c) < b.min(d) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
