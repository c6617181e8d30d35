//! Scheduling, user association and channel allocation for base stations
//! powered only by harvested energy.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: instances, the radio layer and random scenario generation.
//! * [`scsb`]: the optimal single-BS, single-channel scheduler with its
//!   rescheduling step, the feasibility checker and the non-preemptive
//!   transform.
//! * [`common`]: the faster optimal solver for common deadlines.
//! * [`multi`]: greedy multi-BS association and multi-channel heuristics.
//! * [`oracle`]: exact branch-and-bound, Moore–Hodgson and LP export, used
//!   as ground truth for everything above.
//!
//! User, BS and channel indices are zero-based in the Rust API. Anything
//! meant for people (JSON grids, text renderings, LP variable names) is
//! one-based, with `0` meaning an idle slot.

pub mod common;
pub mod error;
pub mod model;
pub mod multi;
pub mod oracle;
pub mod scsb;
pub mod validate;

pub use error::{Error, Result};
pub use model::{Dims, GenerationParams, Instance, RadioModel, UserRequest};
pub use multi::AssociationOutcome;
pub use scsb::{EnergyLedger, EnergyMode, Schedule, ScheduleOutcome};
