//! Packet-level discrete-event simulation of packet trimming in switches.
//!
//! A run wires senders, a 64-port switch model and pull-pacing receivers to
//! one event queue:
//!
//! ```
//! use trimsim::harness::{run_scenario, Scenario};
//! use trimsim::switch::SwitchVariant;
//!
//! let mut s = Scenario::build_incast(4, 1).unwrap().with_variant(SwitchVariant::Ideal);
//! s.duration = trimsim::SimTime::from_us(50);
//! let m = run_scenario(&s).unwrap();
//! assert!(m.total_trims() > 0);
//! ```

pub mod error;
pub mod event;
pub mod harness;
pub mod meter;
pub mod packet;
pub mod policy;
pub mod sim;
pub mod switch;
pub mod transport;

pub use error::{Error, Result};
pub use sim::{Rate, SimTime};
