//! Experiment drivers: builtin models, random parameterizations, ROC and
//! orientation-accuracy studies, the spectrum counterexample and file I/O.

pub mod builtins;
pub mod random;
pub mod counterexample;
pub mod io;
pub mod roc;
pub mod study;
