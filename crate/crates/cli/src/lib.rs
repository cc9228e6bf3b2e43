//! Certificate files, the command implementations behind the `nonjordan`
//! binary, and an independent checker for stored certificates.

pub mod run;
pub mod search;
pub mod verify;
pub mod wire;
