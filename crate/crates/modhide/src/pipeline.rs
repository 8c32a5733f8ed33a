//! End-to-end obfuscation of source files: normalize, rename, run the
//! configured number of passes, and assemble the per-file report.
//!
//! Randomness is layered so reruns are exact: the master seed and the input
//! path fix a file stream, and each pass reseeds from the text it is about
//! to transform. Under the unit lift style the synthesized expressions are
//! seed-independent, which is what makes an N-iteration run byte-identical
//! to N chained single-iteration runs.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::RunConfig;
use crate::moduli::ModulusChain;
use crate::report::{ExcludedRecord, FileReport, SiteRecord};
use crate::{lexer, rewrite, seed, Error, Result};

/// Everything one file's run produced. `report.output` is filled in by the
/// caller once it knows where the text landed.
#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub final_text: String,
    pub final_class: Option<String>,
    /// Text after the normalize/rename stage, before any pass.
    pub normalized_text: String,
    /// Text after each pass, in order; the last equals `final_text`.
    pub iteration_texts: Vec<String>,
    pub report: FileReport,
}

/// Normalize stage as the `normalize` command sees it: layout fix plus the
/// rename that marks a file as reshaped. Untouched layout keeps its name, so
/// feeding a file through repeatedly cannot stack suffixes.
pub fn normalize_source(src: &str, path: &str, cfg: &RunConfig) -> Result<(String, Option<(String, String)>)> {
    let (text, changed) = rewrite::normalize(src, path)?;
    if changed && !cfg.suffix_normalize.is_empty() {
        rewrite::append_class_suffix(&text, path, &cfg.suffix_normalize)
    } else {
        Ok((text, None))
    }
}

/// Runs the full pipeline on one source text.
pub fn obfuscate_source(src: &str, path: &str, cfg: &RunConfig, chain: &ModulusChain) -> Result<FileOutcome> {
    let file_seed = seed::derive(cfg.seed, seed::fnv1a64(path.as_bytes()));
    let (mut text, mut rename) = normalize_source(src, path, cfg)?;
    let normalized_text = text.clone();

    let mut sites = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    let mut iteration_texts = Vec::with_capacity(cfg.iterations as usize);
    for iteration in 1..=cfg.iterations {
        let pass_cfg = rewrite::PassConfig {
            chain,
            style: cfg.style,
            depth_min: cfg.depth_min,
            depth_max: cfg.depth_max,
            schedule: cfg.schedule_for(iteration as usize - 1),
            all_constants: cfg.all_constants,
            suffix: &cfg.suffix_iterate,
            pass_seed: seed::pass_seed(file_seed, &text),
        };
        let pass = rewrite::obfuscate_pass(&text, path, &pass_cfg)?;
        sites.extend(pass.sites.iter().map(|s| SiteRecord::from_rewrite(iteration, s)));
        excluded.extend(pass.excluded.iter().map(|e| ExcludedRecord {
            iteration,
            line: e.line,
            col: e.col,
            value: e.value,
            reason: e.excluded.expect("excluded records carry a reason"),
        }));
        warnings.extend(pass.warnings);
        if let Some((old, new)) = pass.class_rename {
            rename = Some(match rename.take() {
                Some((first, _)) => (first, new),
                None => (old, new),
            });
        }
        text = pass.text;
        iteration_texts.push(text.clone());
    }

    let (total_statements, obfuscated_statements) = crate::analysis::count_statements(&text, path)?;
    let final_class = rewrite::class_decl(&lexer::lex(&text, path)?).map(|d| d.name);
    let report = FileReport {
        program: path.to_string(),
        output: String::new(),
        class_rename: rename,
        iterations: cfg.iterations,
        total_statements,
        obfuscated_statements,
        re_effort: crate::analysis::re_effort(obfuscated_statements, cfg.iterations),
        sites,
        excluded,
        diff_verdict: None,
        timing: None,
        warnings,
    };
    Ok(FileOutcome { final_text: text, final_class, normalized_text, iteration_texts, report })
}

/// Obfuscates many files, up to `cfg.jobs` in parallel, returning outcomes
/// in input order. Per-file seed streams make the result independent of
/// scheduling. The first error (in input order) wins.
pub fn obfuscate_files(
    inputs: &[PathBuf],
    cfg: &RunConfig,
    chain: &ModulusChain,
) -> Result<Vec<FileOutcome>> {
    let slots: Vec<Mutex<Option<Result<FileOutcome>>>> =
        inputs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = (cfg.jobs as usize).min(inputs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = inputs.get(i) else { break };
                let label = path.display().to_string();
                let outcome = std::fs::read_to_string(path)
                    .map_err(Error::from)
                    .and_then(|src| obfuscate_source(&src, &label, cfg, chain));
                *slots[i].lock().expect("no panics hold this lock") = Some(outcome);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("worker threads joined").expect("every slot filled"))
        .collect()
}

/// Writes via a sibling temp file and rename, so readers never see a
/// half-written source.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::expr::LiftStyle;
    use crate::moduli::ChainMode;

    fn unit_cfg(iterations: u32) -> RunConfig {
        RunConfig {
            iterations,
            style: LiftStyle::Unit,
            depth_schedule: vec![vec![10, 6, 12, 5], vec![8, 12, 6, 7]],
            ..RunConfig::default()
        }
    }

    fn chain() -> ModulusChain {
        ModulusChain::build(13, ChainMode::Doubled).unwrap()
    }

    #[test]
    fn two_iteration_run_equals_two_chained_single_runs() {
        let cfg2 = unit_cfg(2);
        let once = obfuscate_source(corpus::LEAPYEARS, "leapyears.java", &cfg2, &chain()).unwrap();

        let first = obfuscate_source(corpus::LEAPYEARS, "leapyears.java", &unit_cfg(1), &chain()).unwrap();
        let second_cfg = RunConfig {
            depth_schedule: vec![vec![8, 12, 6, 7]],
            ..unit_cfg(1)
        };
        let second = obfuscate_source(&first.final_text, "leapyears.java", &second_cfg, &chain()).unwrap();

        assert_eq!(once.final_text, second.final_text);
        assert_eq!(once.final_class.as_deref(), Some("leapyears_mod123123"));
    }

    #[test]
    fn report_carries_counts_effort_and_full_rename() {
        let out = obfuscate_source(corpus::LEAPYEARS, "leapyears.java", &unit_cfg(2), &chain()).unwrap();
        let r = &out.report;
        assert_eq!(r.total_statements, 10);
        assert_eq!(r.obfuscated_statements, 4);
        assert_eq!(r.re_effort, 8);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.class_rename, Some(("leapyears".into(), "leapyears_mod123123".into())));
        assert_eq!(r.sites.len(), 8); // 4 splices + 4 nestings
        assert!(r.sites.iter().all(|s| s.oracle_pass));
        assert_eq!(r.sites.iter().filter(|s| s.iteration == 1).count(), 4);
        assert_eq!(out.iteration_texts.len(), 2);
    }

    #[test]
    fn same_seed_reruns_are_byte_identical_in_random_style() {
        let cfg = RunConfig { iterations: 2, seed: 99, ..RunConfig::default() };
        let a = obfuscate_source(corpus::LEAPYEARS, "x.java", &cfg, &chain()).unwrap();
        let b = obfuscate_source(corpus::LEAPYEARS, "x.java", &cfg, &chain()).unwrap();
        assert_eq!(a.final_text, b.final_text);

        let other_seed = RunConfig { seed: 100, ..cfg.clone() };
        let c = obfuscate_source(corpus::LEAPYEARS, "x.java", &other_seed, &chain()).unwrap();
        assert_ne!(a.final_text, c.final_text);

        let other_path = obfuscate_source(corpus::LEAPYEARS, "y.java", &cfg, &chain()).unwrap();
        assert_ne!(a.final_text, other_path.final_text);
    }

    #[test]
    fn normalize_stage_renames_only_when_layout_changes() {
        let cfg = RunConfig::default();
        // already normalized: byte-identical, name kept, so repeated runs
        // cannot stack suffixes
        let flat = "class plain {\n    int x;\n}\n";
        let (text, rename) = normalize_source(flat, "p.java", &cfg).unwrap();
        assert_eq!(text, flat);
        assert!(rename.is_none());

        let (_, rename) = normalize_source(corpus::LEAPYEARS, "l.java", &cfg).unwrap();
        assert_eq!(rename, Some(("leapyears".into(), "leapyears_mod".into())));

        // loop headers split like any other ';' runs, which marks the file
        let (text, rename) = normalize_source(corpus::SEARCH_RANDOM, "s.java", &cfg).unwrap();
        assert!(text.contains("for (int i = 0;\n"));
        assert_eq!(rename, Some(("search_random".into(), "search_random_mod".into())));
    }

    #[test]
    fn batch_processing_matches_sequential_and_keeps_order(){
        let dir = tempfile::tempdir().unwrap();
        let mut inputs = Vec::new();
        for i in 0..6 {
            let path = dir.path().join(format!("prog{i}.java"));
            std::fs::write(&path, format!("class prog{i} {{ int x = {}; }}\n", 100 + i)).unwrap();
            inputs.push(path);
        }
        let cfg = RunConfig { jobs: 4, seed: 5, ..RunConfig::default() };
        let parallel = obfuscate_files(&inputs, &cfg, &chain()).unwrap();
        let sequential = RunConfig { jobs: 1, ..cfg };
        let serial = obfuscate_files(&inputs, &sequential, &chain()).unwrap();
        for (p, s) in parallel.iter().zip(&serial) {
            assert_eq!(p.final_text, s.final_text);
        }
        for (i, out) in parallel.iter().enumerate() {
            // one-liner input → normalize reflows it, so _mod then 123
            assert_eq!(out.final_class.as_deref(), Some(format!("prog{i}_mod123").as_str()));
        }
    }

    #[test]
    fn missing_input_file_is_an_io_error() {
        let cfg = RunConfig::default();
        let missing = vec![PathBuf::from("definitely/not/here.java")];
        assert!(matches!(
            obfuscate_files(&missing, &cfg, &chain()),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn atomic_write_creates_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.java");
        write_atomic(&path, "one").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "one");
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert!(!path.with_extension("java.tmp").exists());
    }
}
