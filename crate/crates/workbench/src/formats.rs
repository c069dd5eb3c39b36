//! On-disk formats. Every file is a JSON object carrying `schema_version`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use signed_iwasawa_core::chern::{FrobeniusExponents, FrobeniusTable, ResidueGenerator, Variable};
use signed_iwasawa_core::coprimality::ExternalFacts;
use signed_iwasawa_core::iwasawa::{IwasawaElement1, IwasawaElement2};
use signed_iwasawa_core::modsym::{builtin_curve, CurveData};
use signed_iwasawa_core::padic::PadicScalar;

use crate::error::{input, Result, WorkbenchError};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(v: u32, what: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return input(format!("{what}: unsupported schema_version {v} (expected {SCHEMA_VERSION})"));
    }
    Ok(())
}

/// Reads a JSON argument given inline (starting with `{`) or as a path.
pub fn read_json_arg<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| WorkbenchError::Input(format!("cannot read {arg}: {e}")))?
    };
    Ok(serde_json::from_str(&text)?)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    pub schema_version: u32,
    pub label: String,
    pub a_invariants: [i64; 5],
    pub conductor: u64,
}

impl CurveFile {
    pub fn to_curve(&self) -> Result<CurveData> {
        check_version(self.schema_version, "curve")?;
        Ok(CurveData::new(&self.label, self.a_invariants, self.conductor)?)
    }

    pub fn from_curve(c: &CurveData) -> Self {
        Self { schema_version: SCHEMA_VERSION, label: c.label.clone(), a_invariants: c.a_invariants, conductor: c.conductor }
    }
}

/// A curve given as a built-in label (`32a1`) or a curve file / inline JSON.
pub fn resolve_curve(spec: &str) -> Result<CurveData> {
    if let Some(c) = builtin_curve(spec) {
        return Ok(c);
    }
    if spec.trim_start().starts_with('{') || Path::new(spec).exists() {
        return read_json_arg::<CurveFile>(spec)?.to_curve();
    }
    input(format!("unknown curve {spec}: not a built-in label or a readable curve file"))
}

/// Coefficients are integers or `"a/b"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Coefficient::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
            Coefficient::Text(s) => {
                let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| WorkbenchError::Input(format!("bad coefficient {s:?}")));
                match s.split_once('/') {
                    Some((n, d)) => {
                        let d = parse(d)?;
                        if d == BigInt::from(0) {
                            return input(format!("zero denominator in {s:?}"));
                        }
                        Ok(BigRational::new(parse(n)?, d))
                    }
                    None => Ok(BigRational::from_integer(parse(s)?)),
                }
            }
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_integer() {
            if let Ok(n) = i64::try_from(q.to_integer()) {
                return Coefficient::Int(n);
            }
        }
        Coefficient::Text(q.to_string())
    }
}

/// A one-variable element `sum c_i X^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub schema_version: u32,
    pub p: u64,
    pub precision: i64,
    #[serde(default)]
    pub trunc_degree: Option<usize>,
    pub coefficients: Vec<Coefficient>,
}

impl SeriesFile {
    pub fn to_element(&self) -> Result<IwasawaElement1> {
        check_version(self.schema_version, "series")?;
        let coeffs = self.coefficients.iter().map(Coefficient::to_rational).collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return input("series has no coefficients");
        }
        let d = self.trunc_degree.unwrap_or(coeffs.len() - 1 + 8).max(coeffs.len() - 1);
        Ok(IwasawaElement1::from_rationals(self.p, &coeffs, self.precision, d)?)
    }

    pub fn from_element(f: &IwasawaElement1) -> Self {
        let mut coefficients: Vec<Coefficient> = f.coeffs().iter().map(|c| scalar_coefficient(c)).collect();
        while coefficients.len() > 1 && coefficients.last() == Some(&Coefficient::Int(0)) {
            coefficients.pop();
        }
        Self {
            schema_version: SCHEMA_VERSION,
            p: f.prime(),
            precision: f.precision(),
            trunc_degree: Some(f.trunc_degree()),
            coefficients,
        }
    }
}

fn scalar_coefficient(c: &PadicScalar) -> Coefficient {
    if c.is_zero() {
        Coefficient::Int(0)
    } else {
        Coefficient::from_rational(&c.to_rational())
    }
}

/// A two-variable element as sparse terms `[i, j, c]` for `c S^i T^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element2File {
    pub schema_version: u32,
    pub p: u64,
    pub precision: i64,
    pub trunc_degree: usize,
    pub terms: Vec<(usize, usize, i64)>,
}

impl Element2File {
    pub fn to_element(&self) -> Result<IwasawaElement2> {
        check_version(self.schema_version, "two-variable element")?;
        Ok(IwasawaElement2::from_terms(self.p, &self.terms, self.precision, self.trunc_degree)?)
    }
}

/// A vertical prime `(p, P)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFile {
    pub schema_version: u32,
    pub p: u64,
    /// `"S"` or `"T"`.
    pub main: String,
    /// `coeffs[j][i]` is the coefficient of `main^j other^i`.
    pub coeffs: Vec<Vec<u64>>,
}

impl PrimeFile {
    pub fn to_generator(&self) -> Result<ResidueGenerator> {
        check_version(self.schema_version, "prime")?;
        let main = match self.main.as_str() {
            "S" | "s" => Variable::S,
            "T" | "t" => Variable::T,
            other => return input(format!("main variable must be S or T, got {other}")),
        };
        Ok(ResidueGenerator::new(self.p, main, self.coeffs.clone(), None)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusEntry {
    pub ell: u64,
    #[serde(default)]
    pub place: u8,
    pub exponents: FrobeniusExponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusFile {
    pub schema_version: u32,
    pub places: Vec<FrobeniusEntry>,
}

impl FrobeniusFile {
    pub fn to_table(&self) -> Result<FrobeniusTable> {
        check_version(self.schema_version, "frobenius")?;
        let mut t = FrobeniusTable::new();
        for e in &self.places {
            if t.insert((e.ell, e.place), e.exponents).is_some() {
                return input(format!("duplicate Frobenius data for ell = {}, place {}", e.ell, e.place));
            }
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFile {
    pub schema_version: u32,
    pub primes: Vec<u64>,
}

/// One row of the reference table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSpec {
    pub curve: CurveFile,
    pub discriminant: i64,
    pub p: u64,
    #[serde(default)]
    pub facts: ExternalFacts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplesFile {
    pub schema_version: u32,
    pub rows: Vec<RowSpec>,
}

impl ExamplesFile {
    pub fn validate(&self) -> Result<()> {
        check_version(self.schema_version, "examples")?;
        for r in &self.rows {
            r.curve.to_curve()?;
        }
        Ok(())
    }
}

/// The six rows of the reference table with their curve facts.
pub const BUILTIN_EXAMPLES: &str = include_str!("../data/table1_rows.json");

pub fn builtin_examples() -> ExamplesFile {
    serde_json::from_str(BUILTIN_EXAMPLES).expect("embedded examples parse")
}
