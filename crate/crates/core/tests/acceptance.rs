//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    all_option_sets, binomial, brute_force_count, fixture, fixture_path, reference_options, mapped_constraint,
    mapping_model, random_model, single_group_model, tokens, MAPPING_ROWS,
};
use uvl2ivml::oracle::{check_equivalence, enumerate_uvl_configurations, DEFAULT_CAP};
use uvl2ivml::transform::{BindingKind, TransformError};
use uvl2ivml::uvl::GroupKind;
use uvl2ivml::{emit_ivml, parse_ivml_subset, parse_uvl, transform, IvmlType, Mode, Naming, TransformOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

/// The Onlineshop model run through the CLI reproduces the reference project.
fn golden_pair() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let input = fixture_path("onlineshop.uvl");
    let code = uvl2ivml::cli::run(
        [
            "uvl2ivml",
            "transform",
            input.to_str().unwrap(),
            "-o",
            "-",
            "--naming",
            "pretty",
            "--mode",
            "faithful",
            "--project-name",
            "OnlineShop",
            "--enum-name",
            "Platform=PlatformType",
        ],
        &mut out,
        &mut err,
    );
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let text = String::from_utf8(out).unwrap();
    ensure(tokens(&text) == tokens(&fixture("onlineshop.ivml")), || {
        format!("token mismatch:\n{text}")
    })?;
    ensure(text.contains("(includes(UserManagement, UserManagementOptions.Security) <> true)"), || {
        "negated includes not rendered as `<> true`".into()
    })?;
    ensure(!text.contains("size(Review) <="), || "unexpected upper bound on Review".into())?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("token-identical, {:.2?}", start.elapsed()))
}

fn mapping_rows() -> Outcome {
    let start = Instant::now();
    for (row, uvl, ivml) in MAPPING_ROWS {
        let got = mapped_constraint(uvl);
        ensure(got == *ivml, || format!("row {row}: `{uvl}` gave `{got}`, want `{ivml}`"))?;
        parse_ivml_subset(&{
            let model = parse_uvl(&mapping_model(uvl)).unwrap();
            emit_ivml(&transform(&model, &TransformOptions::default()).unwrap().0).unwrap()
        })
        .map_err(|e| format!("row {row}: {e}"))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("{} rows", MAPPING_ROWS.len()))
}

fn elision() -> Outcome {
    let model = parse_uvl(&fixture("onlineshop.uvl")).unwrap();
    let always: Vec<&str> = ["Catalog", "ShoppingBasket", "Responsive", "Design"].into();
    let mut abstract_core = Vec::new();
    for opts in [TransformOptions::default(), reference_options()] {
        let (project, bindings) = transform(&model, &opts).unwrap();
        let parsed = parse_ivml_subset(&emit_ivml(&project).unwrap()).unwrap();
        for name in &always {
            ensure(bindings[*name].kind == BindingKind::AlwaysIncluded, || format!("{name} not elided"))?;
            ensure(parsed.find_variable(name).is_none(), || format!("variable for {name}"))?;
        }
        for f in model.features() {
            if !(f.is_abstract && bindings[&f.name].kind == BindingKind::AlwaysIncluded) {
                continue;
            }
            if !abstract_core.contains(&f.name.as_str()) {
                abstract_core.push(f.name.as_str());
            }
            let var = parsed.find_variable(&f.name);
            match opts.naming {
                // suffix names never reuse a feature name
                Naming::Suffix => ensure(var.is_none(), || format!("variable for {}", f.name))?,
                // pretty names reuse the parent name for its group variable only
                Naming::Pretty => ensure(var.is_none_or(|v| v.ty != IvmlType::Boolean), || {
                    format!("Boolean variable for {}", f.name)
                })?,
            }
        }
    }
    Ok(format!("{} always-included features, {} of them abstract", always.len(), abstract_core.len()))
}

fn strict_onlineshop() -> Outcome {
    const FROZEN: u64 = 4256;
    let start = Instant::now();
    let model = parse_uvl(&fixture("onlineshop.uvl")).unwrap();
    let opts = TransformOptions {
        mode: Mode::Strict,
        ..TransformOptions::default()
    };
    let (project, bindings) = transform(&model, &opts).unwrap();
    let report = check_equivalence(&model, &project, &bindings, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(report.bijective && report.uvl_count == report.ivml_count, || report.to_string())?;
    ensure(report.uvl_count == FROZEN, || format!("count {} != frozen {FROZEN}", report.uvl_count))?;
    within(start, Duration::from_secs(30))?;
    Ok(report.equiv_line())
}

fn random_corpus() -> Outcome {
    let start = Instant::now();
    let mut kinds = [false; 5];
    let mut unsatisfiable = 0;
    for seed in 0..200 {
        let model = random_model(seed, 12);
        for f in model.features() {
            for g in &f.groups {
                kinds[match g.kind {
                    GroupKind::Mandatory => 0,
                    GroupKind::Optional => 1,
                    GroupKind::Alternative => 2,
                    GroupKind::Or => 3,
                    GroupKind::Cardinality { .. } => 4,
                }] = true;
            }
        }
        ensure(model.feature_count() <= 12 && model.constraints.len() <= 3, || format!("seed {seed} too large"))?;
        let expected = brute_force_count(&model);
        for mode in [Mode::Strict, Mode::Faithful] {
            let opts = TransformOptions {
                mode,
                ..TransformOptions::default()
            };
            let (project, bindings) = transform(&model, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
            let r = check_equivalence(&model, &project, &bindings, DEFAULT_CAP).map_err(|e| e.to_string())?;
            ensure(r.uvl_count == expected, || format!("seed {seed}: {} configurations, brute force {expected}", r.uvl_count))?;
            match mode {
                Mode::Strict => ensure(r.bijective, || format!("seed {seed} strict:\n{r}"))?,
                Mode::Faithful => ensure(r.all_images_valid(), || format!("seed {seed} faithful:\n{r}"))?,
            }
        }
        if expected == 0 {
            unsatisfiable += 1;
        }
    }
    ensure(kinds.iter().all(|k| *k), || format!("group kinds covered: {kinds:?}"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("200 models ({unsatisfiable} unsatisfiable), {:.2?}", start.elapsed()))
}

fn round_trip() -> Outcome {
    let mut corpus: Vec<String> = vec![fixture("onlineshop.uvl"), fixture("optional_or.uvl")];
    corpus.extend(MAPPING_ROWS.iter().map(|r| mapping_model(r.1)));
    corpus.extend((0..200).map(|seed| uvl2ivml::uvl::print_uvl(&random_model(seed, 12))));
    let mut options = all_option_sets();
    options.push(reference_options());
    let mut checked = 0;
    for (i, src) in corpus.iter().enumerate() {
        let model = parse_uvl(src).map_err(|e| format!("corpus {i}: {e}"))?;
        for opts in &options {
            let project = match transform(&model, opts) {
                Ok((p, _)) => p,
                Err(TransformError::NameCollision { .. }) if opts.naming == Naming::Pretty => continue,
                Err(e) => return Err(format!("corpus {i}: {e}")),
            };
            let text = emit_ivml(&project).map_err(|e| e.to_string())?;
            let back = parse_ivml_subset(&text).map_err(|e| format!("corpus {i}: {e}"))?;
            ensure(back == project, || format!("corpus {i} differs after round trip:\n{text}"))?;
            checked += 1;
        }
    }
    let reference = parse_ivml_subset(&fixture("onlineshop.ivml")).map_err(|e| e.to_string())?;
    ensure(emit_ivml(&reference).unwrap() == fixture("onlineshop.ivml"), || "reference project re-emits differently".into())?;
    Ok(format!("{} projects", checked + 1))
}

fn closed_forms() -> Outcome {
    let count = |kind, k| enumerate_uvl_configurations(&single_group_model(kind, k), DEFAULT_CAP).unwrap().len() as u64;
    for k in 2..=6u64 {
        let ku = k as usize;
        ensure(count(GroupKind::Or, ku) == (1 << k) - 1, || format!("or k={k}"))?;
        ensure(count(GroupKind::Alternative, ku) == k, || format!("alternative k={k}"))?;
        for lo in 0..=k as u32 {
            for hi in lo.max(1)..=k as u32 {
                let want: u64 = (lo..=hi).map(|i| binomial(k, i.into())).sum();
                let got = count(GroupKind::Cardinality { lo, hi }, ku);
                ensure(got == want, || format!("[{lo}..{hi}] k={k}: {got} != {want}"))?;
            }
        }
    }
    Ok("k = 2..6".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("golden pair", golden_pair),
        ("constraint mapping rows", mapping_rows),
        ("elision of always-included features", elision),
        ("strict-mode equivalence on Onlineshop", strict_onlineshop),
        ("random model property suite", random_corpus),
        ("emit/parse round trip", round_trip),
        ("closed-form counts", closed_forms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
