//! Model reference control synthesis: reference models, the augmented TS
//! system, the LMI problem, gain extraction and closed-loop checks.

mod augment;
mod lmi;
mod reference;
mod spec;
mod synthesis;
mod verify;

pub use augment::{augment, AugmentedModel};
pub use lmi::{assemble_lmis, LmiFamily, MrcLmi};
pub use reference::{build_reference_model, ReferenceKind, ReferenceModel};
pub use spec::{ConeConvention, DRegion, SynthesisSpec};
pub use synthesis::{combine_gains, design_plants, synthesize, Design, GainSchedule, ScheduleKind, Synthesis};
pub use verify::{
    hinf_norm, verify_dregion, vertex_hinf, EigenReport, PairSpectrum, RegionViolation, REFERENCE_POLE_TOL,
};
