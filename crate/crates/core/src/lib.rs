//! Cost-generic logic optimization of XOR-AND-Inverter Graphs.
//!
//! The crate is organized bottom-up:
//!
//! * [`xag`]: the network data structure,
//! * [`tt`]: truth tables and window simulation,
//! * [`cost`]: the cost-function framework and built-in costs,
//! * [`window`]: cuts, windows and divisor collection,
//! * [`resyn`]: enumeration of replacement circuits,
//! * [`opt`]: the greedy resubstitution pass,
//! * [`io`]: AIGER and native `.xag` files,
//! * [`verify`]: equivalence checking and reference oracles,
//! * [`gen`]: random and hand-built networks for tests and benchmarks.

pub mod cost;
pub mod gen;
pub mod io;
pub mod opt;
pub mod resyn;
pub mod tt;
pub mod verify;
pub mod window;
pub mod xag;
