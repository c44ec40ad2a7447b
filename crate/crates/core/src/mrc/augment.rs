use alloc::vec::Vec;

use super::ReferenceModel;
use crate::linalg::Mat;
use crate::ts::PerUnitModel;
use crate::{Error, Result};

/// Plant, reference model and tracking integrators stacked as `x̄ = [x; x^r; x_I]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedModel {
    pub a: Mat,
    pub b: Mat,
    pub e: Mat,
    pub c: Mat,
    pub f: Mat,
    pub plant_states: usize,
    pub reference_states: usize,
    pub integrators: usize,
}

impl AugmentedModel {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn reference_indices(&self) -> Vec<usize> {
        (self.plant_states..self.plant_states + self.reference_states).collect()
    }

    /// Plant and integrator coordinates, the part whose poles the controller places.
    pub fn shaped_indices(&self) -> Vec<usize> {
        (0..self.plant_states).chain(self.plant_states + self.reference_states..self.states()).collect()
    }

    pub fn closed_loop(&self, gain: &Mat) -> Mat {
        &self.a - &self.b * gain
    }
}

/// Stacks each plant with the reference model. The disturbance and feedthrough
/// channels of the plant are taken as zero, so only `E^r` enters `Ē`.
pub fn augment(plants: &[PerUnitModel], reference: &ReferenceModel) -> Result<Vec<AugmentedModel>> {
    plants
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let (n, m) = (p.a.nrows(), p.b.ncols());
            let (l, q) = (reference.states(), reference.c.nrows());
            let w = reference.e.ncols();
            if p.c.nrows() != q || p.c.ncols() != n || p.b.nrows() != n {
                return Err(Error::Dimension(alloc::format!(
                    "submodel {index}: output count {} does not match reference {q}",
                    p.c.nrows()
                )));
            }
            let big = n + l + q;
            let mut a = Mat::zeros(big, big);
            a.view_mut((0, 0), (n, n)).copy_from(&p.a);
            a.view_mut((n, n), (l, l)).copy_from(&reference.a);
            a.view_mut((n + l, 0), (q, n)).copy_from(&(-&p.c));
            a.view_mut((n + l, n), (q, l)).copy_from(&reference.c);
            let mut b = Mat::zeros(big, m);
            b.view_mut((0, 0), (n, m)).copy_from(&p.b);
            let mut e = Mat::zeros(big, w);
            e.view_mut((n, 0), (l, w)).copy_from(&reference.e);
            e.view_mut((n + l, 0), (q, w)).copy_from(&reference.f);
            let mut c = Mat::zeros(q, big);
            c.view_mut((0, 0), (q, n)).copy_from(&(-&p.c));
            c.view_mut((0, n), (q, l)).copy_from(&reference.c);
            Ok(AugmentedModel {
                a,
                b,
                e,
                c,
                f: reference.f.clone(),
                plant_states: n,
                reference_states: l,
                integrators: q,
            })
        })
        .collect()
}
