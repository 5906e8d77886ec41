use effsel::bench;
use effsel::ci::{bootstrap_ci_u_all, ci_cohens_d, ci_cohens_dd, BootstrapConfig};
use effsel::data::{load_generic, load_wdbc, Loaded};
use effsel::effect::{all_effect_sizes, EffectSizes, Measure};
use effsel::learn::{cross_validate, CvConfig, SvmParams};
use effsel::rng::{derive_seed, stream_seed};
use effsel::select::{select_all, select_relief, Selector};
use effsel::Dataset;

use crate::report::{num, opt, Report};
use crate::{Failure, Opts};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn validate(o: &Opts) -> Result<(), Failure> {
    if !(o.alpha > 0.0 && o.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", o.alpha)));
    }
    if o.folds < 2 {
        return Err(usage(format!("--folds must be at least 2, got {}", o.folds)));
    }
    if o.repeats < 1 {
        return Err(usage("--repeats must be at least 1"));
    }
    if !(o.c > 0.0 && o.c.is_finite()) {
        return Err(usage(format!("--c must be positive, got {}", o.c)));
    }
    BootstrapConfig {
        b1: o.b1,
        b2: o.b2,
        seed: o.seed,
    }
    .validate()?;
    selectors(o)?;
    Ok(())
}

fn selectors(o: &Opts) -> Result<Vec<Selector>, Failure> {
    match &o.measure {
        None => Ok(Selector::ALL.to_vec()),
        Some(keys) => {
            let mut out = Vec::new();
            for k in keys {
                let s = Selector::parse(k.trim())
                    .ok_or_else(|| usage(format!("unknown measure `{k}` (expected d, D, u1, u2, u3, common, relief)")))?;
                if !out.contains(&s) {
                    out.push(s);
                }
            }
            // Keep report order independent of flag order.
            out.sort_by_key(|s| Selector::ALL.iter().position(|a| a == s));
            Ok(out)
        }
    }
}

fn load(o: &Opts) -> Result<Dataset, Failure> {
    let path = o.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    let Loaded { dataset, warnings } = match &o.label_column {
        Some(col) => load_generic(path, col, &o.positive)?,
        None => load_wdbc(path)?,
    };
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(dataset)
}

fn provenance(command: &str, o: &Opts) -> String {
    let input = o.input.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string());
    format!(
        "# effsel {} command={command} input={input} seed={} alpha={} folds={} repeats={} b1={} b2={} c={}",
        env!("CARGO_PKG_VERSION"),
        o.seed,
        o.alpha,
        o.folds,
        o.repeats,
        o.b1,
        o.b2,
        o.c
    )
}

pub fn analyze(o: &Opts) -> Result<Report, Failure> {
    let measures: Vec<Measure> = selectors(o)?
        .into_iter()
        .filter_map(|s| match s {
            Selector::Measure(m) => Some(m),
            _ => None,
        })
        .collect();
    if measures.is_empty() {
        return Err(usage("analyze reports d, D, u1, u2 and u3 only"));
    }
    let ds = load(o)?;
    let level = 1.0 - o.alpha;
    let boot_seed = derive_seed(o.seed, "bootstrap");

    let mut header = vec!["feature".to_string(), "higher".to_string()];
    for m in &measures {
        let k = m.key();
        header.extend([k.to_string(), format!("{k}_lo"), format!("{k}_hi")]);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut report = Report::new(provenance("analyze", o), &header);

    for i in 0..ds.n_features() {
        let row = analyze_feature(&ds, i, &measures, level, o, boot_seed).map_err(|e| match e {
            effsel::Error::Degenerate { .. } => Failure::from(e),
            other => match Failure::from(other) {
                Failure::Compute(msg) => Failure::Compute(format!("feature `{}`: {msg}", ds.names()[i])),
                usage => usage,
            },
        })?;
        report.push(row);
    }
    Ok(report)
}

fn analyze_feature(
    ds: &Dataset,
    i: usize,
    measures: &[Measure],
    level: f64,
    o: &Opts,
    boot_seed: u64,
) -> effsel::Result<Vec<String>> {
    let g = ds.group(i)?;
    let es = EffectSizes::of(&g)?;
    let (g, _) = g.oriented();
    let u = if measures.iter().any(|m| m.is_u()) {
        let cfg = BootstrapConfig {
            b1: o.b1,
            b2: o.b2,
            seed: stream_seed(boot_seed, i as u64),
        };
        Some(bootstrap_ci_u_all(&g, &cfg, level)?)
    } else {
        None
    };
    let higher = if es.reversed { "negative" } else { "positive" };
    let mut row = vec![es.feature.clone(), higher.to_string()];
    for &m in measures {
        let iv = match m {
            Measure::D => ci_cohens_d(&g, level)?,
            Measure::DD => ci_cohens_dd(&g, level)?,
            Measure::U1 => u.unwrap()[0],
            Measure::U2 => u.unwrap()[1],
            Measure::U3 => u.unwrap()[2],
        };
        row.extend([num(es.get(m)), num(iv.lo), num(iv.hi)]);
    }
    Ok(row)
}

pub fn select(o: &Opts) -> Result<Report, Failure> {
    let wanted = selectors(o)?;
    let ds = load(o)?;
    let effects = all_effect_sizes(&ds)?;
    let mut results = select_all(&effects)?;
    if wanted.contains(&Selector::Relief) {
        results.push(select_relief(&ds)?);
    }
    let mut report = Report::new(
        provenance("select", o),
        &["selector", "threshold", "op", "decision_rule", "mean", "min", "max", "count", "features", "note"],
    );
    for r in results.iter().filter(|r| wanted.contains(&r.selector)) {
        let (lo, hi) = r.range();
        report.push(vec![
            r.selector.key().to_string(),
            num(r.threshold),
            if r.strict { ">" } else { ">=" }.to_string(),
            opt(r.decision_rule),
            num(r.mean_score()),
            num(lo),
            num(hi),
            r.count().to_string(),
            r.selected().join(";"),
            r.note.clone().unwrap_or_default(),
        ]);
    }
    Ok(report)
}

pub fn evaluate(o: &Opts) -> Result<Report, Failure> {
    let wanted = selectors(o)?;
    let ds = load(o)?;
    let effects = all_effect_sizes(&ds)?;
    let mut results = select_all(&effects)?;
    if wanted.contains(&Selector::Relief) {
        results.push(select_relief(&ds)?);
    }
    let cfg = CvConfig {
        folds: o.folds,
        repeats: o.repeats,
        svm: SvmParams {
            c: o.c,
            ..SvmParams::default()
        },
        seed: derive_seed(o.seed, "cv"),
    };
    let mut report = Report::new(
        provenance("evaluate", o),
        &["selector", "n_features", "tpr", "fpr", "tnr", "acc", "auc"],
    );
    for r in results.iter().filter(|r| wanted.contains(&r.selector)) {
        let idx = r.selected_indices();
        let key = r.selector.key().to_string();
        if idx.is_empty() {
            report.push(vec![key, "0".into(), opt(None), opt(None), opt(None), opt(None), opt(None)]);
            continue;
        }
        let m = cross_validate(&ds, &idx, &cfg)?;
        report.push(vec![
            key,
            m.n_features.to_string(),
            opt(m.tpr),
            opt(m.fpr),
            opt(m.tnr),
            opt(m.acc),
            opt(m.auc),
        ]);
    }
    Ok(report)
}

pub fn bench(o: &Opts) -> Result<Report, Failure> {
    let b = bench::run(&bench::DEFAULT_SIZES, bench::DEFAULT_FEATURES, o.seed)?;
    let mut report = Report::new(
        provenance("bench", o),
        &["n", "features", "effect_ms", "relief_ms", "effect_ratio", "relief_ratio", "effect_linear", "relief_quadratic"],
    );
    let ratios = b.ratios();
    let yes_no = |ok: bool| if ok { "yes" } else { "no" }.to_string();
    for (k, row) in b.rows.iter().enumerate() {
        let (er, rr, el, rq) = match k.checked_sub(1).map(|j| ratios[j]) {
            Some((e, r)) => (
                num(e),
                num(r),
                yes_no(e <= bench::EFFECT_MAX_RATIO),
                yes_no(r >= bench::RELIEF_MIN_RATIO),
            ),
            None => (opt(None), opt(None), opt(None), opt(None)),
        };
        report.push(vec![
            row.n.to_string(),
            b.features.to_string(),
            num(row.effect_secs * 1e3),
            num(row.relief_secs * 1e3),
            er,
            rr,
            el,
            rq,
        ]);
    }
    Ok(report)
}
