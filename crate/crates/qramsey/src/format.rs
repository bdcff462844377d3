//! JSON encodings of inputs and results. Rationals are bit-strings, interval
//! ends are bit-strings or `"-inf"` / `"+inf"`.

use std::collections::BTreeSet;

use qramsey_core::colorings::{ConstantColoring, Counterexample, PairColoring, RandomColoring, TableColoring};
use qramsey_core::diagforge::Opponent;
use qramsey_core::disjsel::IntervalFamily;
use qramsey_core::fairness::{
    Candidate, IndexSet, MType, MValuation, Matrix, Predicate, RequirementSpec, StageRecord, Var, Witness,
    WitnessEnum,
};
use qramsey_core::{Endpoint, Interval, QPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("bad point {0:?}: {1}")]
    Point(String, qramsey_core::qspace::QSpaceError),
    #[error("bad interval: {0}")]
    Interval(qramsey_core::qspace::QSpaceError),
    #[error("{0}")]
    Invalid(String),
}

pub fn parse_point(s: &str) -> Result<QPoint, FormatError> {
    s.parse().map_err(|e| FormatError::Point(s.to_owned(), e))
}

pub fn parse_points(v: &[String]) -> Result<Vec<QPoint>, FormatError> {
    v.iter().map(|s| parse_point(s)).collect()
}

pub fn point_strings<'a, I: IntoIterator<Item = &'a QPoint>>(pts: I) -> Vec<String> {
    pts.into_iter().map(ToString::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDto {
    pub lo: String,
    pub hi: String,
}

fn endpoint_str(e: Endpoint) -> String {
    e.to_string()
}

fn parse_endpoint(s: &str) -> Result<Endpoint, FormatError> {
    match s {
        "-inf" => Ok(Endpoint::NegInf),
        "+inf" => Ok(Endpoint::PosInf),
        _ => parse_point(s).map(Endpoint::At),
    }
}

impl From<Interval> for IntervalDto {
    fn from(i: Interval) -> IntervalDto {
        IntervalDto { lo: endpoint_str(i.lo()), hi: endpoint_str(i.hi()) }
    }
}

impl IntervalDto {
    pub fn parse(&self) -> Result<Interval, FormatError> {
        Interval::new(parse_endpoint(&self.lo)?, parse_endpoint(&self.hi)?).map_err(FormatError::Interval)
    }
}

/// A pair coloring, as read from a file or named on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColoringSpec {
    Counterexample,
    /// Seeded random colors on pairs within `budget`; falls back to the
    /// run's seed and budget when omitted.
    Random {
        seed: Option<u64>,
        budget: Option<u64>,
    },
    Constant {
        color: u8,
    },
    /// Explicit colors for listed pairs, `default` elsewhere.
    Table {
        default: u8,
        entries: Vec<(String, String, u8)>,
    },
}

impl ColoringSpec {
    /// Builtin names accepted by `--coloring`.
    pub fn builtin(name: &str) -> Option<ColoringSpec> {
        match name {
            "counterexample" => Some(ColoringSpec::Counterexample),
            "random" => Some(ColoringSpec::Random { seed: None, budget: None }),
            "const0" => Some(ColoringSpec::Constant { color: 0 }),
            "const1" => Some(ColoringSpec::Constant { color: 1 }),
            _ => None,
        }
    }

    pub fn build(&self, seed: Option<u64>, budget: u64) -> Result<Box<dyn PairColoring>, FormatError> {
        let invalid = |e: qramsey_core::colorings::ColoringError| FormatError::Invalid(e.to_string());
        Ok(match self {
            ColoringSpec::Counterexample => Box::new(Counterexample),
            ColoringSpec::Random { seed: s, budget: b } => {
                let seed = s.or(seed).ok_or_else(|| FormatError::Invalid("random coloring needs a seed".into()))?;
                Box::new(RandomColoring::new(2, seed, b.unwrap_or(budget)).map_err(invalid)?)
            }
            ColoringSpec::Constant { color } => Box::new(ConstantColoring::new(2, *color).map_err(invalid)?),
            ColoringSpec::Table { default, entries } => {
                let mut t = TableColoring::new(2, *default).map_err(invalid)?;
                for (x, y, c) in entries {
                    t.insert(parse_point(x)?, parse_point(y)?, *c).map_err(invalid)?;
                }
                Box::new(t)
            }
        })
    }
}

pub fn families_to_dto(fams: &[IntervalFamily]) -> Vec<Vec<IntervalDto>> {
    fams.iter().map(|f| f.members().iter().map(|&i| i.into()).collect()).collect()
}

pub fn families_from_dto(dto: &[Vec<IntervalDto>]) -> Result<Vec<IntervalFamily>, FormatError> {
    dto.iter()
        .enumerate()
        .map(|(e, members)| {
            let members = members.iter().map(IntervalDto::parse).collect::<Result<Vec<_>, _>>()?;
            IntervalFamily::new(members, e).map_err(|err| FormatError::Invalid(err.to_string()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpponentSpec {
    Script(Vec<String>),
    Generator { kind: String, seed: u64 },
}

impl OpponentSpec {
    pub fn build(&self) -> Result<Opponent, FormatError> {
        match self {
            OpponentSpec::Script(pts) => {
                Opponent::script(parse_points(pts)?).map_err(|e| FormatError::Invalid(e.to_string()))
            }
            OpponentSpec::Generator { kind, seed } if kind == "dense-walk" => Ok(Opponent::DenseWalk { seed: *seed }),
            OpponentSpec::Generator { kind, .. } => Err(FormatError::Invalid(format!("unknown opponent kind {kind:?}"))),
        }
    }
}

/// Input of the `diag` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub level: usize,
    pub opponents: Vec<OpponentSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDto {
    pub rows: Vec<Vec<String>>,
    pub cols: usize,
}

impl MatrixDto {
    pub fn parse(&self) -> Result<Matrix, FormatError> {
        let rows = self.rows.iter().map(|r| parse_points(r)).collect::<Result<Vec<_>, _>>()?;
        Matrix::new(rows, self.cols).map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

impl From<&Matrix> for MatrixDto {
    fn from(m: &Matrix) -> MatrixDto {
        MatrixDto { rows: m.entries().iter().map(point_strings).collect(), cols: m.cols() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IndexSetDto {
    All,
    Finite { indices: Vec<u64> },
    Residue { modulus: u64, residue: u64 },
}

impl From<&IndexSetDto> for IndexSet {
    fn from(d: &IndexSetDto) -> IndexSet {
        match d {
            IndexSetDto::All => IndexSet::All,
            IndexSetDto::Finite { indices } => IndexSet::Finite(indices.iter().copied().collect()),
            IndexSetDto::Residue { modulus, residue } => IndexSet::Residue { modulus: *modulus, residue: *residue },
        }
    }
}

impl From<&IndexSet> for IndexSetDto {
    fn from(s: &IndexSet) -> IndexSetDto {
        match s {
            IndexSet::All => IndexSetDto::All,
            IndexSet::Finite(set) => IndexSetDto::Finite { indices: set.iter().copied().collect() },
            IndexSet::Residue { modulus, residue } => IndexSetDto::Residue { modulus: *modulus, residue: *residue },
        }
    }
}

/// `{"r": j}` or `{"s": [i, k]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarDto {
    R(usize),
    S([usize; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationDto {
    pub r: Vec<Vec<String>>,
    pub s: Vec<Vec<Vec<String>>>,
}

impl From<&MValuation> for ValuationDto {
    fn from(v: &MValuation) -> ValuationDto {
        ValuationDto {
            r: v.r().iter().map(point_strings).collect(),
            s: v.s().iter().map(|row| row.iter().map(point_strings).collect()).collect(),
        }
    }
}

fn point_set(v: &[String]) -> Result<BTreeSet<QPoint>, FormatError> {
    Ok(parse_points(v)?.into_iter().collect())
}

impl ValuationDto {
    pub fn parse(&self, m: &Matrix) -> Result<MValuation, FormatError> {
        let r = self.r.iter().map(|b| point_set(b)).collect::<Result<_, _>>()?;
        let s = self
            .s
            .iter()
            .map(|row| row.iter().map(|b| point_set(b)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        MValuation::new(m, r, s).map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PredicateDto {
    ConstTrue,
    ConstFalse,
    HitsSet { vars: Vec<VarDto>, set: IndexSetDto },
    HitsEveryCell { set: IndexSetDto },
    CustomTable { valuations: Vec<ValuationDto> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDto {
    #[serde(rename = "type")]
    pub mtype: Vec<IntervalDto>,
    pub valuation: ValuationDto,
}

impl From<&Witness> for WitnessDto {
    fn from(w: &Witness) -> WitnessDto {
        WitnessDto {
            mtype: w.mtype.parts().iter().map(|&i| i.into()).collect(),
            valuation: (&w.valuation).into(),
        }
    }
}

impl WitnessDto {
    pub fn parse(&self, m: &Matrix) -> Result<Witness, FormatError> {
        let parts = self.mtype.iter().map(IntervalDto::parse).collect::<Result<Vec<_>, _>>()?;
        let mtype = MType::new(m, parts).map_err(|e| FormatError::Invalid(e.to_string()))?;
        Ok(Witness { mtype, valuation: self.valuation.parse(m)? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessEnumDto {
    Saturating { max_window: u64 },
    Table { witnesses: Vec<WitnessDto> },
}

impl Default for WitnessEnumDto {
    fn default() -> WitnessEnumDto {
        WitnessEnumDto::Saturating { max_window: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementDto {
    pub matrix: MatrixDto,
    pub predicate: PredicateDto,
    #[serde(default)]
    pub witnesses: WitnessEnumDto,
}

impl RequirementDto {
    pub fn parse(&self) -> Result<RequirementSpec, FormatError> {
        let matrix = self.matrix.parse()?;
        let predicate = match &self.predicate {
            PredicateDto::ConstTrue => Predicate::ConstTrue,
            PredicateDto::ConstFalse => Predicate::ConstFalse,
            PredicateDto::HitsSet { vars, set } => Predicate::HitsSet {
                vars: vars
                    .iter()
                    .map(|v| match *v {
                        VarDto::R(j) => Var::R(j),
                        VarDto::S([i, k]) => Var::S(i, k),
                    })
                    .collect(),
                set: set.into(),
            },
            PredicateDto::HitsEveryCell { set } => Predicate::HitsEveryCell { set: set.into() },
            PredicateDto::CustomTable { valuations } => Predicate::CustomTable(
                valuations.iter().map(|v| v.parse(&matrix)).collect::<Result<_, _>>()?,
            ),
        };
        let witnesses = match &self.witnesses {
            WitnessEnumDto::Saturating { max_window } => WitnessEnum::Saturating { max_window: *max_window },
            WitnessEnumDto::Table { witnesses } => {
                WitnessEnum::Table(witnesses.iter().map(|w| w.parse(&matrix)).collect::<Result<_, _>>()?)
            }
        };
        Ok(RequirementSpec { matrix, predicate, witnesses })
    }
}

impl From<&RequirementSpec> for RequirementDto {
    fn from(r: &RequirementSpec) -> RequirementDto {
        let predicate = match &r.predicate {
            Predicate::ConstTrue => PredicateDto::ConstTrue,
            Predicate::ConstFalse => PredicateDto::ConstFalse,
            Predicate::HitsSet { vars, set } => PredicateDto::HitsSet {
                vars: vars
                    .iter()
                    .map(|v| match *v {
                        Var::R(j) => VarDto::R(j),
                        Var::S(i, k) => VarDto::S([i, k]),
                    })
                    .collect(),
                set: set.into(),
            },
            Predicate::HitsEveryCell { set } => PredicateDto::HitsEveryCell { set: set.into() },
            Predicate::CustomTable(vals) => PredicateDto::CustomTable { valuations: vals.iter().map(Into::into).collect() },
        };
        let witnesses = match &r.witnesses {
            WitnessEnum::Saturating { max_window } => WitnessEnumDto::Saturating { max_window: *max_window },
            WitnessEnum::Table(ws) => WitnessEnumDto::Table { witnesses: ws.iter().map(Into::into).collect() },
        };
        RequirementDto { matrix: (&r.matrix).into(), predicate, witnesses }
    }
}

pub fn parse_requirements(dto: &[RequirementDto]) -> Result<Vec<RequirementSpec>, FormatError> {
    dto.iter().map(RequirementDto::parse).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDto {
    pub stage: usize,
    pub requirement: Option<usize>,
    pub bound_before: u64,
    pub bound_after: u64,
    pub witness: Option<WitnessDto>,
    pub rows: Vec<IntervalDto>,
    pub added0: Vec<u64>,
    pub added1: Vec<u64>,
}

impl From<&StageRecord> for StageDto {
    fn from(r: &StageRecord) -> StageDto {
        StageDto {
            stage: r.stage,
            requirement: r.requirement,
            bound_before: r.bound_before,
            bound_after: r.bound_after,
            witness: r.witness.as_ref().map(Into::into),
            rows: r.rows.iter().map(|&i| i.into()).collect(),
            added0: r.added0.clone(),
            added1: r.added1.clone(),
        }
    }
}

impl StageDto {
    /// Witnesses are read against the matrix of the requirement they serve.
    pub fn parse(&self, reqs: &[RequirementSpec]) -> Result<StageRecord, FormatError> {
        let witness = match (&self.witness, self.requirement) {
            (None, _) => None,
            (Some(w), Some(k)) if k < reqs.len() => Some(w.parse(&reqs[k].matrix)?),
            (Some(_), _) => {
                return Err(FormatError::Invalid(format!("stage {} has a witness but no requirement", self.stage)))
            }
        };
        Ok(StageRecord {
            stage: self.stage,
            requirement: self.requirement,
            bound_before: self.bound_before,
            bound_after: self.bound_after,
            witness,
            rows: self.rows.iter().map(IntervalDto::parse).collect::<Result<_, _>>()?,
            added0: self.added0.clone(),
            added1: self.added1.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDto {
    pub name: String,
    pub points: Vec<String>,
}

impl CandidateDto {
    pub fn parse(&self) -> Result<Candidate, FormatError> {
        Ok(Candidate { name: self.name.clone(), points: parse_points(&self.points)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_round_trip() {
        let i = Interval::between("0".parse().unwrap(), QPoint::ROOT).unwrap();
        let dto = IntervalDto::from(i);
        assert_eq!(dto, IntervalDto { lo: "0".into(), hi: "".into() });
        assert_eq!(dto.parse().unwrap(), i);
        assert_eq!(IntervalDto::from(Interval::WHOLE).parse().unwrap(), Interval::WHOLE);
    }

    #[test]
    fn coloring_spec_json() {
        let spec: ColoringSpec = serde_json::from_str(r#"{"kind":"random","seed":3}"#).unwrap();
        assert_eq!(spec, ColoringSpec::Random { seed: Some(3), budget: None });
        let t: ColoringSpec =
            serde_json::from_str(r#"{"kind":"table","default":1,"entries":[["0","1",0]]}"#).unwrap();
        let f = t.build(None, 16).unwrap();
        assert_eq!(f.color("0".parse().unwrap(), "1".parse().unwrap()).unwrap(), 0);
        assert!(ColoringSpec::Random { seed: None, budget: None }.build(None, 16).is_err());
    }

    #[test]
    fn requirement_json() {
        let src = r#"{"matrix":{"rows":[[""]],"cols":1},
            "predicate":{"kind":"hits-set","vars":[{"r":0},{"s":[0,1]}],"set":{"kind":"residue","modulus":2,"residue":0}}}"#;
        let dto: RequirementDto = serde_json::from_str(src).unwrap();
        let req = dto.parse().unwrap();
        assert_eq!(req.matrix.rows(), 1);
        assert_eq!(RequirementDto::from(&req), dto);
    }

    #[test]
    fn opponent_json() {
        let o: Vec<OpponentSpec> = serde_json::from_str(r#"[["0","1"],{"kind":"dense-walk","seed":4}]"#).unwrap();
        assert!(matches!(o[0].build().unwrap(), Opponent::Script(_)));
        assert_eq!(o[1].build().unwrap(), Opponent::DenseWalk { seed: 4 });
    }
}
