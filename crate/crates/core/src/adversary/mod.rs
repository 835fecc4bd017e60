//! Eve: attacks on travelling qubits and the diagnostics that bound what
//! she can learn.

mod attack;
mod leakage;
mod monogamy;
mod probe;

pub use attack::{apply_attack, AttackContext, AttackModel, BasisPolicy, Eavesdropper, EveRecord};
pub use leakage::{eve_leakage, leakage_for_access, EveAccess, MAX_SCRAMBLED_QUBITS};
pub use monogamy::{ckw_monogamy, MonogamyReport};
pub use probe::{
    controlled_interaction, duality_tradeoff, duality_tradeoff_mixed, probe_interaction,
    DualityReport, ProbeOps,
};
