//! Symbols to Mazur-Tate elements to signed series, and the per-row report.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use signed_iwasawa_core::arith::ipow;
use signed_iwasawa_core::coprimality::{conjecture_b_report, shadow_products, ConjectureBReport, ExternalFacts, ShadowReport};
use signed_iwasawa_core::iwasawa::{InvariantProfile, Sign};
use signed_iwasawa_core::modsym::{CurveData, EigenSymbol, TwistedSymbol};
use signed_iwasawa_core::signed::{
    birch_points, check_supersingular, reconstruct_signed, reinterpolation_failures, LevelRecord, MazurTateElement,
    Provenance, SignedLSeries,
};

use crate::cache::{CacheStatus, SymbolCache};
use crate::config::{FieldSpec, RunConfig};
use crate::error::{Result, WorkbenchError};
use crate::formats::{CurveFile, RowSpec, SeriesFile};

/// Eigensymbols shared across rows: disk cache plus an in-process memo.
#[derive(Debug, Default)]
pub struct SymbolStore {
    cache: SymbolCache,
    memo: Mutex<BTreeMap<(String, u64, bool), EigenSymbol>>,
}

impl SymbolStore {
    pub fn new(cache: SymbolCache) -> Self {
        Self { cache, memo: Mutex::default() }
    }

    pub fn from_config(cfg: &RunConfig) -> Self {
        Self::new(SymbolCache::new(cfg.cache_dir.clone()))
    }

    /// Cache status goes to stderr so that reports stay byte-identical.
    pub fn get(&self, curve: &CurveData, sign: Sign) -> Result<(EigenSymbol, CacheStatus)> {
        let key = (curve.label.clone(), curve.conductor, sign == Sign::Plus);
        if let Some(s) = self.memo.lock().unwrap().get(&key) {
            return Ok((s.clone(), CacheStatus::Hit));
        }
        let (symbol, status) = self.cache.eigensymbol(curve, sign)?;
        if status != CacheStatus::Disabled {
            eprintln!("cache {}: {} level {} sign {}", status_word(status), curve.label, curve.conductor, sign.symbol());
        }
        self.memo.lock().unwrap().insert(key, symbol.clone());
        Ok((symbol, status))
    }

    /// The symbol whose twist by `d` carries the + sign.
    pub fn twisted(&self, curve: &CurveData, d: i64) -> Result<TwistedSymbol> {
        let base_sign = if d < 0 { Sign::Minus } else { Sign::Plus };
        let (base, _) = self.get(curve, base_sign)?;
        Ok(TwistedSymbol::new(&base, d)?)
    }
}

pub fn status_word(s: CacheStatus) -> &'static str {
    match s {
        CacheStatus::Disabled => "disabled",
        CacheStatus::Hit => "hit",
        CacheStatus::Miss => "miss",
        CacheStatus::Replaced => "replaced",
    }
}

/// Mazur-Tate elements of levels `1..=n_max`; symbol values are evaluated
/// in parallel, and the collection order keeps the result deterministic.
pub fn mazur_tate_elements(curve: &CurveData, symbol: &TwistedSymbol, cfg: &RunConfig) -> Result<Vec<MazurTateElement>> {
    check_supersingular(curve, cfg.p)?;
    let provenance = Provenance { label: curve.label.clone(), discriminant: symbol.discriminant, symbol_sign: symbol.sign };
    (1..=cfg.n_max)
        .map(|n| {
            let m = ipow(cfg.p, n + 1) as i64;
            let points = birch_points(cfg.p, n);
            let values = points
                .par_iter()
                .map(|&(a, _)| symbol.value_int(a, m))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(MazurTateElement::from_point_values(cfg.p, n, &points, &values, provenance.clone())?)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Theta {
    pub series: SignedLSeries,
    pub failures: Vec<u32>,
}

pub fn theta(mts: &[MazurTateElement], sign: Sign, cfg: &RunConfig) -> Result<Theta> {
    let series = reconstruct_signed(mts, sign, cfg.n_max, cfg.precision, cfg.trunc_degree)?;
    let failures = reinterpolation_failures(&series, mts)?;
    Ok(Theta { series, failures })
}

/// `(theta^+, theta^-)` of the twist of `curve` by `d` (`d = 1` for the curve itself).
pub fn theta_pair(store: &SymbolStore, curve: &CurveData, d: i64, cfg: &RunConfig) -> Result<(Theta, Theta)> {
    let symbol = store.twisted(curve, d)?;
    let mts = mazur_tate_elements(curve, &symbol, cfg)?;
    let (plus, minus) = rayon::join(|| theta(&mts, Sign::Plus, cfg), || theta(&mts, Sign::Minus, cfg));
    Ok((plus?, minus?))
}

/// `{(2:1/2),(6:1/6)}`: root count and valuation per slope, steepest first.
pub fn slope_text(profile: &InvariantProfile) -> String {
    let parts: Vec<String> = profile.slopes.iter().map(|s| format!("({}:{})", s.count, s.valuation)).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub label: String,
    pub discriminant: i64,
    pub p: u64,
    pub sign: Sign,
    pub mu: i64,
    pub lambda: usize,
    pub slopes: String,
    pub profile: InvariantProfile,
    pub trusted: bool,
    pub levels: Vec<u32>,
    pub reinterpolation_failures: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<LevelRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representative: Option<SeriesFile>,
}

impl SeriesSummary {
    pub fn new(t: &Theta, full: bool) -> Self {
        let s = &t.series;
        Self {
            label: s.label.clone(),
            discriminant: s.discriminant,
            p: s.p,
            sign: s.sign,
            mu: s.profile.mu,
            lambda: s.profile.lambda,
            slopes: slope_text(&s.profile),
            profile: s.profile.clone(),
            trusted: s.trusted,
            levels: s.levels.clone(),
            reinterpolation_failures: t.failures.clone(),
            history: full.then(|| s.history.clone()),
            representative: full.then(|| SeriesFile::from_element(&s.representative)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub curve: CurveFile,
    pub discriminant: i64,
    pub p: u64,
    pub field: FieldSpec,
    pub theta_ek_plus: SeriesSummary,
    pub theta_ek_minus: SeriesSummary,
    pub theta_e_plus: SeriesSummary,
    pub theta_e_minus: SeriesSummary,
    pub conjecture_b: ConjectureBReport,
    pub shadows: ShadowReport,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowOutcome {
    Ok(Box<RowReport>),
    Failed { label: String, discriminant: i64, exit_code: i32, error: String },
}

impl RowOutcome {
    pub fn key(&self) -> (String, i64) {
        match self {
            RowOutcome::Ok(r) => (r.curve.label.clone(), r.discriminant),
            RowOutcome::Failed { label, discriminant, .. } => (label.clone(), *discriminant),
        }
    }
}

/// Per-row run configuration: the row's prime with the shared settings.
fn row_config(row: &RowSpec, cfg: &RunConfig) -> Result<RunConfig> {
    let c = RunConfig { p: row.p, ..cfg.clone() };
    c.validate()?;
    Ok(c)
}

struct Prepared {
    curve: CurveData,
    cfg: RunConfig,
    field: FieldSpec,
}

fn prepare(row: &RowSpec, cfg: &RunConfig) -> Result<Prepared> {
    let curve = row.curve.to_curve()?;
    let cfg = row_config(row, cfg)?;
    let field = FieldSpec::new(row.discriminant, cfg.p, cfg.strict_paper_hypotheses)?;
    check_supersingular(&curve, cfg.p)?;
    Ok(Prepared { curve, cfg, field })
}

fn build_row(
    row: &RowSpec,
    prep: &Prepared,
    base: &(Theta, Theta),
    twisted: &(Theta, Theta),
    facts: ExternalFacts,
) -> Result<RowReport> {
    let e = (&base.0.series, &base.1.series);
    let ek = (&twisted.0.series, &twisted.1.series);
    let conjecture_b = conjecture_b_report(e, ek, facts)?;
    let shadows = shadow_products(e, ek)?;
    let mut notes = Vec::new();
    if !prep.field.p_splits() {
        notes.push(format!(
            "p = {} does not split in Q(sqrt {}); computed without the splitting hypothesis",
            prep.cfg.p, row.discriminant
        ));
    }
    for t in [&twisted.0, &twisted.1, &base.0, &base.1] {
        if !t.failures.is_empty() {
            notes.push(format!(
                "theta^{} of {} twisted by {} fails re-interpolation at levels {:?}",
                t.series.sign.symbol(),
                t.series.label,
                t.series.discriminant,
                t.failures
            ));
        }
    }
    Ok(RowReport {
        curve: row.curve.clone(),
        discriminant: row.discriminant,
        p: prep.cfg.p,
        field: prep.field,
        theta_ek_plus: SeriesSummary::new(&twisted.0, false),
        theta_ek_minus: SeriesSummary::new(&twisted.1, false),
        theta_e_plus: SeriesSummary::new(&base.0, false),
        theta_e_minus: SeriesSummary::new(&base.1, false),
        conjecture_b,
        shadows,
        notes,
    })
}

fn failed(row: &RowSpec, e: &WorkbenchError) -> RowOutcome {
    RowOutcome::Failed {
        label: row.curve.label.clone(),
        discriminant: row.discriminant,
        exit_code: e.exit_code(),
        error: e.to_string(),
    }
}

/// Runs every row; a failing row is recorded and the others continue.
/// Untwisted series are shared between rows over the same curve.
pub fn run_rows(rows: &[RowSpec], cfg: &RunConfig, store: &SymbolStore) -> Vec<RowOutcome> {
    let prepared: Vec<Result<Prepared>> = rows.iter().map(|r| prepare(r, cfg)).collect();

    // symbols first, so that concurrent rows never race on the same entry
    let mut wanted: BTreeMap<(String, u64, bool), &CurveData> = BTreeMap::new();
    for p in prepared.iter().flatten() {
        for plus in [true, false] {
            wanted.entry((p.curve.label.clone(), p.curve.conductor, plus)).or_insert(&p.curve);
        }
    }
    let wanted: Vec<_> = wanted.into_iter().collect();
    wanted.par_iter().for_each(|((_, _, plus), curve)| {
        // failures resurface when the row asks again
        let _ = store.get(curve, if *plus { Sign::Plus } else { Sign::Minus });
    });

    let mut base_keys: BTreeMap<(String, u64, [i64; 5], u64), (&CurveData, &RunConfig)> = BTreeMap::new();
    for p in prepared.iter().flatten() {
        base_keys
            .entry((p.curve.label.clone(), p.curve.conductor, p.curve.a_invariants, p.cfg.p))
            .or_insert((&p.curve, &p.cfg));
    }
    let base_keys: Vec<_> = base_keys.into_iter().collect();
    let bases: BTreeMap<_, _> = base_keys
        .par_iter()
        .map(|(k, (curve, c))| (k.clone(), theta_pair(store, curve, 1, c)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    rows.par_iter()
        .zip(prepared.par_iter())
        .map(|(row, prep)| {
            let prep = match prep {
                Ok(p) => p,
                Err(e) => return failed(row, e),
            };
            let key = (prep.curve.label.clone(), prep.curve.conductor, prep.curve.a_invariants, prep.cfg.p);
            let base = match &bases[&key] {
                Ok(b) => b,
                Err(e) => return failed(row, &WorkbenchError::Compute(format!("untwisted series: {e}"))),
            };
            let result = theta_pair(store, &prep.curve, row.discriminant, &prep.cfg)
                .and_then(|tw| build_row(row, prep, base, &tw, row.facts));
            match result {
                Ok(r) => RowOutcome::Ok(Box::new(r)),
                Err(e) => failed(row, &e),
            }
        })
        .collect()
}
