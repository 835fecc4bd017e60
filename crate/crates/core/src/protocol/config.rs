use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::qlinalg::{
    c, hermitian_family, random::random_basis, verify_orthogonal_family, BasisDocument, BasisSet,
    CMatrix, Permutation, StateVec, UnitaryFamily, MAX_BASIS_DIM, TOL,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Single transmission scrambled by particle permutation, BB84 decoys.
    Dsqc,
    /// `n` rounds, one qubit of every block per round, BB84 decoys.
    Qsdc,
    /// As `Dsqc` with Bell-pair decoys checked in the Bell basis.
    #[serde(alias = "dsqc-gv")]
    DsqcGv,
    /// As `Qsdc` with Bell-pair decoys checked in the Bell basis.
    #[serde(alias = "qsdc-gv")]
    QsdcGv,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Dsqc, Variant::Qsdc, Variant::DsqcGv, Variant::QsdcGv];

    /// True for the multi-round variants that need no order disclosure.
    pub fn is_multi_round(self) -> bool {
        matches!(self, Variant::Qsdc | Variant::QsdcGv)
    }

    pub fn uses_bell_decoys(self) -> bool {
        matches!(self, Variant::DsqcGv | Variant::QsdcGv)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Dsqc => "dsqc",
            Variant::Qsdc => "qsdc",
            Variant::DsqcGv => "dsqc-gv",
            Variant::QsdcGv => "qsdc-gv",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "dsqc" => Ok(Variant::Dsqc),
            "qsdc" => Ok(Variant::Qsdc),
            "dsqc-gv" => Ok(Variant::DsqcGv),
            "qsdc-gv" => Ok(Variant::QsdcGv),
            other => Err(Error::ConfigInvalid(format!("unknown variant {other:?}"))),
        }
    }
}

/// Everything Alice and Bob agree on before a run.
///
/// The family is indexed by message value: `family.op(v)` sends the
/// initial state `|a_anchor⟩` to `|b_v⟩ = |a_perm(v)⟩`.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    variant: Variant,
    copies: usize,
    basis: BasisSet,
    anchor: usize,
    output_perm: Permutation,
    family: UnitaryFamily,
    delta: f64,
    seed: u64,
}

impl ProtocolConfig {
    /// Anchor 0, identity output relabeling, the Hermitian family, δ = 0.
    pub fn new(variant: Variant, basis: BasisSet, copies: usize) -> Result<Self> {
        let dim = basis.dim();
        let family = hermitian_family(&basis, 0)?;
        let config = Self {
            variant,
            copies,
            basis,
            anchor: 0,
            output_perm: Permutation::identity(dim),
            family,
            delta: 0.0,
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    /// Moves the initial state to `|a_anchor⟩` and rebuilds the Hermitian family.
    pub fn with_anchor(mut self, anchor: usize) -> Result<Self> {
        self.anchor = anchor;
        self.family = hermitian_family(&self.basis, anchor)?.reindexed(&self.output_perm)?;
        self.validate()?;
        Ok(self)
    }

    /// Relabels the output basis and rebuilds the Hermitian family to match.
    pub fn with_output_perm(mut self, perm: Permutation) -> Result<Self> {
        if perm.len() != self.basis.dim() {
            return Err(Error::LengthMismatch {
                expected: self.basis.dim(),
                found: perm.len(),
            });
        }
        self.family = hermitian_family(&self.basis, self.anchor)?.reindexed(&perm)?;
        self.output_perm = perm;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the encoding family. `family.op(v)` must map the anchor
    /// state onto `|b_v⟩` up to phase.
    pub fn with_family(mut self, family: UnitaryFamily) -> Result<Self> {
        self.family = family;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_copies(mut self, copies: usize) -> Result<Self> {
        self.copies = copies;
        self.validate()?;
        Ok(self)
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::ConfigInvalid(msg));
        let dim = self.basis.dim();
        if dim > MAX_BASIS_DIM {
            return Err(Error::TooLarge(dim));
        }
        if self.copies == 0 {
            return invalid("copies must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.delta) {
            return invalid(format!("threshold δ = {} outside [0, 1)", self.delta));
        }
        if self.anchor >= dim {
            return invalid(format!("anchor {} out of range for M = {dim}", self.anchor));
        }
        if self.output_perm.len() != dim {
            return invalid("output permutation length differs from M".into());
        }
        if self.family.dim() != dim || self.family.anchor() != self.anchor {
            return invalid("encoding family does not match basis and anchor".into());
        }
        if !verify_orthogonal_family(&self.family, &self.basis) {
            return invalid("encoding family is not orthogonal on the anchor state".into());
        }
        let initial = self.basis.vector(self.anchor);
        for v in 0..dim {
            let image = initial.apply(self.family.op(v))?;
            let target = self.basis.vector(self.output_perm.apply(v));
            if (1.0 - image.overlap(target)).abs() > TOL {
                return invalid(format!("family op {v} does not reach output state {v}"));
            }
        }
        Ok(())
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Qubits per code block.
    pub fn n(&self) -> usize {
        self.basis.qubit_count()
    }

    /// Number of code blocks, N.
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn message_len(&self) -> usize {
        self.n() * self.copies
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn initial_state(&self) -> &StateVec {
        self.basis.vector(self.anchor)
    }

    pub fn output_perm(&self) -> &Permutation {
        &self.output_perm
    }

    /// `{|b_j⟩ = |a_perm(j)⟩}`.
    pub fn output_basis(&self) -> BasisSet {
        self.basis
            .relabel(&self.output_perm)
            .expect("validated permutation length")
    }

    pub fn family(&self) -> &UnitaryFamily {
        &self.family
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ConfigDocument>(text)?.into_config()
    }

    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            variant: self.variant,
            n: Some(self.n()),
            copies: self.copies,
            basis: BasisChoice::Document(BasisDocument::from_basis(&self.basis)),
            anchor: self.anchor,
            output_perm: Some(self.output_perm.clone()),
            family: FamilyChoice::Explicit(
                self.family
                    .ops()
                    .iter()
                    .map(|op| {
                        op.row_iter()
                            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                            .collect()
                    })
                    .collect(),
            ),
            delta: self.delta,
            seed: self.seed,
        }
    }
}

/// JSON form of [`ProtocolConfig`].
///
/// ```json
/// {"variant": "dsqc", "n": 2, "copies": 4, "basis": "bell", "anchor": 0,
///  "output_perm": [0, 1, 2, 3], "family": "hermitian", "delta": 0.0, "seed": 7}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub variant: Variant,
    /// Qubits per block; required for size-generic basis presets.
    #[serde(default)]
    pub n: Option<usize>,
    pub copies: usize,
    #[serde(default)]
    pub basis: BasisChoice,
    #[serde(default)]
    pub anchor: usize,
    #[serde(default)]
    pub output_perm: Option<Permutation>,
    #[serde(default)]
    pub family: FamilyChoice,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisChoice {
    /// `computational`, `bell`, `ghz` or `random` (seeded from the config seed).
    Preset(String),
    Document(BasisDocument),
}

impl Default for BasisChoice {
    fn default() -> Self {
        BasisChoice::Preset("computational".into())
    }
}

impl BasisChoice {
    pub fn resolve(&self, n: Option<usize>, seed: u64) -> Result<BasisSet> {
        match self {
            BasisChoice::Document(doc) => doc.clone().into_basis(),
            BasisChoice::Preset(name) => basis_preset(name, n, seed),
        }
    }
}

/// Named bases. `bell` is two qubits; `computational`, `ghz` and `random`
/// take their size from `n`.
pub fn basis_preset(name: &str, n: Option<usize>, seed: u64) -> Result<BasisSet> {
    let need_n = || {
        n.filter(|&n| n >= 1 && (1usize << n.min(63)) <= MAX_BASIS_DIM)
            .ok_or_else(|| Error::ConfigInvalid(format!("basis {name:?} needs 1 ≤ n ≤ 8")))
    };
    let basis = match name {
        "computational" | "z" => BasisSet::computational(need_n()?),
        "bell" => BasisSet::bell(),
        "ghz" => BasisSet::ghz(need_n()?),
        "random" => random_basis(need_n()?, &mut ChaCha8Rng::seed_from_u64(seed)),
        other => return Err(Error::ConfigInvalid(format!("unknown basis preset {other:?}"))),
    };
    if let Some(n) = n {
        if basis.qubit_count() != n {
            return Err(Error::ConfigInvalid(format!(
                "basis {name:?} has {} qubits but n = {n}",
                basis.qubit_count()
            )));
        }
    }
    Ok(basis)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyChoice {
    /// Only `hermitian` is recognized.
    Named(String),
    /// One row-major matrix of `[re, im]` pairs per message value.
    Explicit(Vec<Vec<Vec<[f64; 2]>>>),
}

impl Default for FamilyChoice {
    fn default() -> Self {
        FamilyChoice::Named("hermitian".into())
    }
}

impl ConfigDocument {
    pub fn into_config(self) -> Result<ProtocolConfig> {
        let basis = self.basis.resolve(self.n, self.seed)?;
        if let Some(n) = self.n {
            if basis.qubit_count() != n {
                return Err(Error::ConfigInvalid(format!(
                    "basis has {} qubits but n = {n}",
                    basis.qubit_count()
                )));
            }
        }
        let dim = basis.dim();
        let mut config = ProtocolConfig::new(self.variant, basis, self.copies)?
            .with_seed(self.seed)
            .with_delta(self.delta)?;
        if let Some(perm) = self.output_perm {
            config = config.with_output_perm(perm)?;
        }
        config = config.with_anchor(self.anchor)?;
        match self.family {
            FamilyChoice::Named(name) if name == "hermitian" => Ok(config),
            FamilyChoice::Named(other) => {
                Err(Error::ConfigInvalid(format!("unknown family {other:?}")))
            }
            FamilyChoice::Explicit(ops) => {
                let ops = ops
                    .iter()
                    .map(|rows| {
                        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                            return Err(Error::DimensionMismatch {
                                expected: dim,
                                found: rows.len(),
                            });
                        }
                        Ok(CMatrix::from_fn(dim, dim, |r, col| {
                            let [re, im] = rows[r][col];
                            c(re, im)
                        }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let anchor = config.anchor();
                config.with_family(UnitaryFamily::new(ops, anchor)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = ProtocolConfig::new(Variant::Dsqc, BasisSet::bell(), 3).unwrap();
        assert_eq!(cfg.n(), 2);
        assert_eq!(cfg.message_len(), 6);
        assert_eq!(cfg.delta(), 0.0);
    }

    #[test]
    fn rejects_bad_delta_and_copies() {
        let cfg = ProtocolConfig::new(Variant::Dsqc, BasisSet::bell(), 3).unwrap();
        assert!(cfg.clone().with_delta(1.0).is_err());
        assert!(cfg.clone().with_delta(-0.1).is_err());
        assert!(cfg.with_copies(0).is_err());
    }

    #[test]
    fn rejects_non_orthogonal_family() {
        let cfg = ProtocolConfig::new(Variant::Dsqc, BasisSet::computational(1), 1).unwrap();
        let id = CMatrix::identity(2, 2);
        let family = UnitaryFamily::new(vec![id.clone(), id], 0).unwrap();
        assert!(matches!(cfg.with_family(family), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn anchor_and_permutation_rebuild_the_family() {
        let cfg = ProtocolConfig::new(Variant::Qsdc, BasisSet::bell(), 1)
            .unwrap()
            .with_output_perm(Permutation::cycle(4))
            .unwrap()
            .with_anchor(2)
            .unwrap();
        assert_eq!(cfg.family().anchor(), 2);
        cfg.validate().unwrap();
    }

    #[test]
    fn json_document() {
        let text = r#"{"variant": "dsqc-gv", "copies": 2, "basis": "bell",
                       "output_perm": [1, 0, 3, 2], "delta": 0.05, "seed": 9}"#;
        let cfg = ProtocolConfig::from_json(text).unwrap();
        assert_eq!(cfg.variant(), Variant::DsqcGv);
        assert_eq!(cfg.n(), 2);
        assert_eq!(cfg.seed(), 9);
        let round = serde_json::to_string(&cfg.to_document()).unwrap();
        let again = ProtocolConfig::from_json(&round).unwrap();
        assert_eq!(again.output_perm(), cfg.output_perm());
        assert_eq!(again.basis(), cfg.basis());
    }

    #[test]
    fn json_rejects_mismatched_n() {
        let text = r#"{"variant": "dsqc", "n": 3, "copies": 2, "basis": "bell"}"#;
        assert!(ProtocolConfig::from_json(text).is_err());
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("qsdc_gv".parse::<Variant>().unwrap(), Variant::QsdcGv);
    }
}
