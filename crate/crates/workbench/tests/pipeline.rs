//! Cache and scheduling must not change any downstream number.

use workbench::config::RunConfig;
use workbench::formats::builtin_examples;
use workbench::pipeline::SymbolStore;
use workbench::table::run_table;

fn config(cache: Option<&std::path::Path>) -> RunConfig {
    RunConfig { n_max: 6, trunc_degree: 728, cache_dir: cache.map(|p| p.to_path_buf()), ..RunConfig::default() }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn cache_hits_and_misses_agree_on_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Some(dir.path()));
    let ex = builtin_examples();
    let cold = run_table(&ex, &[], &cfg, &SymbolStore::from_config(&cfg));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 6);
    let warm = run_table(&ex, &[], &cfg, &SymbolStore::from_config(&cfg));
    let uncached = run_table(&ex, &[], &config(None), &SymbolStore::from_config(&config(None)));
    assert_eq!(cold.rows.len(), 6);
    assert_eq!(cold, warm);
    assert_eq!(cold.rows, uncached.rows);
    assert_eq!(serde_json::to_string(&cold).unwrap(), serde_json::to_string(&warm).unwrap());
}

#[test]
fn serial_and_parallel_runs_agree() {
    let cfg = config(None);
    let ex = builtin_examples();
    let serial = in_pool(1, || run_table(&ex, &[], &cfg, &SymbolStore::from_config(&cfg)));
    let parallel = in_pool(4, || run_table(&ex, &[], &cfg, &SymbolStore::from_config(&cfg)));
    assert_eq!(serial, parallel);
}
