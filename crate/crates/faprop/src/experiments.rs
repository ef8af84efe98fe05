//! Experiment drivers. Each returns a [`Report`] whose `pass` flag is the verdict.

use faprop_core::bounds::{robustness_profile, theorem2_bound, ProfileSettings};
use faprop_core::certify::{
    summarize_ensemble_rows, CertificateRow, CertifiedQuantity, EnsembleCertifier, EnsembleKind, EnsembleRow,
    EnsembleSweep, PerturbationFamily, ProfileTarget, TruncationCertifier, TruncationSweep,
};
use faprop_core::channels::Channel;
use faprop_core::gibbs::f_g;
use faprop_core::spectra::{fa_report, Verdict};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{EnsembleKindDto, ExperimentConfig, ExperimentKind, FamilyDto, Shape, TargetDto};
use crate::dto::GradingDto;
use crate::error::Result;
use crate::report::{num, Report};

/// Validates `config` for `kind` and runs it on the current rayon pool.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<Report> {
    config.validate(kind)?;
    match kind {
        ExperimentKind::FaCheck => fa_check(config),
        ExperimentKind::FgCurve => fg_curve(config),
        ExperimentKind::TruncationBound => truncation_bound(config),
        ExperimentKind::TruncationCertificate => truncation_certificate(config),
        ExperimentKind::EnsembleCertificate => ensemble_certificate(config),
        ExperimentKind::RobustnessProfile => robustness(config),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn fa_check(config: &ExperimentConfig) -> Result<Report> {
    let spec = config.spectrum.build()?;
    let grading = config.grading.build()?;
    let fa = fa_report(&spec, grading);
    let grading_json = serde_json::to_value(GradingDto::from(&fa.grading_used))?;
    let mut report = Report::new(
        ExperimentKind::FaCheck.name(),
        vec!["verdict", "pairing_energy", "series_terms", "grading", "notes"],
    );
    let row = vec![
        Value::from(verdict_name(fa.verdict)),
        num(fa.pairing_energy),
        Value::from(fa.evidence.terms),
        Value::from(grading_json.to_string()),
        Value::from(fa.notes.clone()),
    ];
    report.push(row.clone());
    report.summary.insert("verdict".into(), Value::from(verdict_name(fa.verdict)));
    report.summary.insert("grading".into(), grading_json);
    report.summary.insert("pairing_energy".into(), num(fa.pairing_energy));
    if fa.verdict != Verdict::Holds {
        report.fail_with(&row);
    }
    Ok(report)
}

fn fg_curve(config: &ExperimentConfig) -> Result<Report> {
    let grading = config.grading.build()?;
    let mut report = Report::new(
        ExperimentKind::FgCurve.name(),
        vec!["energy", "beta", "f_g", "f_g_over_sqrt_energy", "log_partition"],
    );
    for &e in &config.energies {
        let s = f_g(&grading, e)?;
        report.push(vec![num(e), num(s.beta), num(s.entropy), num(s.entropy / e.sqrt()), num(s.log_partition)]);
    }
    Ok(report)
}

fn truncation_bound(config: &ExperimentConfig) -> Result<Report> {
    let spec = config.spectrum.build()?;
    let grading = config.grading.build()?;
    let k = config.class;
    let mut report = Report::new(
        ExperimentKind::TruncationBound.name(),
        vec!["r", "r0", "delta_r", "energy", "f_g", "y"],
    );
    let mut previous: Option<f64> = None;
    for &r in &config.r_grid {
        let b = theorem2_bound(&spec, &grading, r, k.c, k.t, k.d)?;
        let row = vec![
            Value::from(r),
            Value::from(b.r0),
            num(b.delta_r),
            num(b.e_rho),
            b.f_g.map_or(Value::Null, num),
            num(b.y),
        ];
        report.push(row.clone());
        // Y must not grow with r
        if previous.is_some_and(|p| b.y > p * (1.0 + 1e-12)) {
            report.fail_with(&row);
        }
        previous = Some(b.y);
    }
    report.summary.insert("class".into(), json!({"c": k.c, "t": k.t, "d": k.d}));
    report.summary.insert("nonincreasing".into(), Value::from(report.pass));
    Ok(report)
}

fn quantities(config: &ExperimentConfig) -> Vec<CertifiedQuantity> {
    config
        .quantities
        .iter()
        .filter_map(|q| CertifiedQuantity::from_name(q))
        .collect()
}

fn formula(q: CertifiedQuantity, k: usize) -> String {
    let (c, t, d) = q.class_constants(k);
    format!("Y(C={c},T={t:.6},D={d})")
}

/// Seeds `base, base + 1, …` for every shape, run in parallel, rows in input order.
fn per_seed<T, F>(config: &ExperimentConfig, shapes: &[Shape], f: F) -> Result<Vec<(usize, Vec<T>)>>
where
    T: Send,
    F: Fn(usize, u64) -> faprop_core::Result<Vec<T>> + Sync,
{
    let jobs: Vec<(usize, u64)> = (0..shapes.len())
        .flat_map(|s| (0..config.channel_params.n_seeds).map(move |i| (s, config.seed.wrapping_add(i))))
        .collect();
    let out = jobs
        .par_iter()
        .map(|&(s, seed)| f(s, seed).map(|rows| (s, rows)))
        .collect::<faprop_core::Result<Vec<_>>>()?;
    Ok(out)
}

fn truncation_certificate(config: &ExperimentConfig) -> Result<Report> {
    let spectrum = config.spectrum.build()?;
    let grading = config.grading.build()?;
    let shapes = &config.channel_params.shapes;
    let certifiers = shapes
        .iter()
        .map(|s| {
            TruncationCertifier::new(TruncationSweep {
                spectrum: spectrum.clone(),
                grading: grading.clone(),
                dim_in: s.dim_in,
                dim_out: s.dim_out,
                k: s.k,
                r_grid: config.r_grid.clone(),
                quantities: quantities(config),
            })
        })
        .collect::<faprop_core::Result<Vec<_>>>()?;
    let results = per_seed(config, shapes, |s, seed| certifiers[s].rows(seed))?;

    let mut report = Report::new(
        ExperimentKind::TruncationCertificate.name(),
        vec![
            "seed", "k", "dim", "r", "delta_r", "Y", "observed_gap", "pass", "quantity", "dim_out", "formula",
        ],
    );
    let mut worst_margin = f64::INFINITY;
    let mut violations = 0usize;
    for (_, rows) in &results {
        for r in rows {
            let row = certificate_row(r);
            report.push(row.clone());
            worst_margin = worst_margin.min(r.y - r.observed_gap);
            if !r.pass {
                violations += 1;
                report.fail_with(&row);
            }
        }
    }
    report.summary.insert("rows".into(), Value::from(report.rows.len()));
    report.summary.insert("violations".into(), Value::from(violations));
    report.summary.insert("worst_margin".into(), num(worst_margin));
    Ok(report)
}

fn certificate_row(r: &CertificateRow) -> Vec<Value> {
    vec![
        Value::from(r.seed),
        Value::from(r.k),
        Value::from(r.dim_in),
        Value::from(r.r),
        num(r.delta_r),
        num(r.y),
        num(r.observed_gap),
        Value::from(r.pass),
        Value::from(r.quantity.name()),
        Value::from(r.dim_out),
        Value::from(formula(r.quantity, r.k)),
    ]
}

fn ensemble_certificate(config: &ExperimentConfig) -> Result<Report> {
    let spectrum = config.spectrum.build()?;
    let shapes = &config.channel_params.shapes;
    let kind = match config.ensemble {
        EnsembleKindDto::Eigen => EnsembleKind::Eigen,
        EnsembleKindDto::Random { members, seed } => EnsembleKind::Random { members, seed },
    };
    let certifiers = shapes
        .iter()
        .map(|s| {
            EnsembleCertifier::new(EnsembleSweep {
                spectrum: spectrum.clone(),
                dim_in: s.dim_in,
                dim_out: s.dim_out,
                k: s.k,
                kind,
                n_grid: config.n_grid.clone(),
            })
        })
        .collect::<faprop_core::Result<Vec<_>>>()?;
    let results = per_seed(config, shapes, |s, seed| certifiers[s].rows(seed))?;

    let mut report = Report::new(
        ExperimentKind::EnsembleCertificate.name(),
        vec!["dim_in", "dim_out", "k", "seed", "n", "c_n", "d0", "dk", "chi_gap", "privacy_gap"],
    );
    let mut per_shape: Vec<Vec<EnsembleRow>> = vec![Vec::new(); shapes.len()];
    for (s, rows) in results {
        let shape = shapes[s];
        for r in &rows {
            report.push(vec![
                Value::from(shape.dim_in),
                Value::from(shape.dim_out),
                Value::from(shape.k),
                Value::from(r.seed),
                Value::from(r.n),
                num(r.c_n),
                num(r.d0),
                num(r.dk),
                num(r.chi_gap),
                num(r.privacy_gap),
            ]);
        }
        per_shape[s].extend(rows);
    }
    let mut summaries = Vec::new();
    for (shape, rows) in shapes.iter().zip(&per_shape) {
        let sum = summarize_ensemble_rows(rows, config.threshold);
        let table: Vec<Value> = sum
            .rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n, "c_n": num(r.c_n), "d0": num(r.d0), "dk": num(r.dk),
                    "sup_chi_gap": num(r.sup_chi_gap), "sup_privacy_gap": num(r.sup_privacy_gap),
                })
            })
            .collect();
        let entry = json!({
            "dim_in": shape.dim_in, "dim_out": shape.dim_out, "k": shape.k,
            "chi_monotone": sum.chi_monotone, "privacy_monotone": sum.privacy_monotone,
            "final_below": sum.final_below, "pass": sum.pass, "sup_gaps": table,
        });
        if !sum.pass {
            report.pass = false;
            report.counterexamples.push(entry.clone());
        }
        summaries.push(entry);
    }
    report.summary.insert("threshold".into(), num(config.threshold));
    report.summary.insert("shapes".into(), Value::Array(summaries));
    Ok(report)
}

fn robustness(config: &ExperimentConfig) -> Result<Report> {
    let p = &config.robustness;
    let family = match p.family {
        FamilyDto::Dephasing { dim } => PerturbationFamily::Dephasing { dim },
        FamilyDto::Rotation { dim } => PerturbationFamily::Rotation { dim },
        FamilyDto::Depolarizing { dim } => PerturbationFamily::Depolarizing { dim },
    };
    let target = match &p.target {
        TargetDto::MutualInformation { state } => ProfileTarget::MutualInformation(state.build()?),
        TargetDto::CoherentInformation { state } => ProfileTarget::CoherentInformation(state.build()?),
        TargetDto::OutputEntropy { state } => ProfileTarget::OutputEntropy(state.build()?),
        TargetDto::Holevo { ensemble } => ProfileTarget::Holevo(ensemble.build()?),
    };
    let mut settings = ProfileSettings::new(config.grading.build()?, p.energy);
    settings.n_samples = p.n_samples;
    settings.seed = config.seed;
    let phi = Channel::identity(family.dim());
    let profile = robustness_profile(
        &phi,
        |eps| family.channel(eps),
        |c| target.evaluate(c),
        &config.eps_grid,
        &settings,
    )?;
    let mut report = Report::new(ExperimentKind::RobustnessProfile.name(), vec!["eps", "metric", "gap"]);
    for r in &profile.rows {
        report.push(vec![num(r.eps), num(r.metric), num(r.gap)]);
    }
    report.summary.insert("family".into(), Value::from(family.name()));
    report.summary.insert("target".into(), Value::from(target.name()));
    report.summary.insert("verdict".into(), Value::from(if profile.pass { "pass" } else { "fail" }));
    if !profile.pass {
        report.pass = false;
        report.counterexamples = report.rows.iter().map(|r| Value::Object(report.object(r))).collect();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn fa_check_geometric_holds_with_linear() {
        let r = run(ExperimentKind::FaCheck, &cfg("{}")).unwrap();
        assert!(r.pass);
        assert_eq!(r.summary["verdict"], "holds");
        assert_eq!(r.summary["grading"]["kind"], "linear");
    }

    #[test]
    fn fa_check_fails_for_divergent_energy() {
        let r = run(
            ExperimentKind::FaCheck,
            &cfg(r#"{"spectrum":{"kind":"power_log","exponent":2},"grading":{"kind":"linear"}}"#),
        )
        .unwrap();
        assert!(!r.pass);
        assert_eq!(r.counterexamples.len(), 1);
    }

    #[test]
    fn fg_curve_linear_closed_form() {
        let r = run(ExperimentKind::FgCurve, &cfg(r#"{"energies":[2,8]}"#)).unwrap();
        // g_i = i, E = 2: geometric(1/2) is the Gibbs state, F = 2 ln 2
        assert!((r.rows[0][2].as_f64().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-9);
        assert!((r.rows[0][1].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
        assert_eq!(r.rows.len(), 2);
    }

    #[test]
    fn truncation_bound_default_is_nonincreasing() {
        let r = run(ExperimentKind::TruncationBound, &cfg(r#"{"r_grid":[3,10,20]}"#)).unwrap();
        assert!(r.pass);
        assert_eq!(r.rows[0][1], Value::from(3));
        let y: Vec<f64> = r.rows.iter().map(|row| row[5].as_f64().unwrap()).collect();
        assert!(y[0] > y[1] && y[1] > y[2]);
    }

    #[test]
    fn truncation_certificate_small_and_deterministic() {
        let c = cfg(r#"{"channel_params":{"n_seeds":3},"r_grid":[3,5,9],"seed":11}"#);
        let a = run(ExperimentKind::TruncationCertificate, &c).unwrap();
        let b = run(ExperimentKind::TruncationCertificate, &c).unwrap();
        assert!(a.pass, "{:?}", a.counterexamples);
        assert_eq!(a.rows.len(), 2 * 3 * 4 * 3);
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.rows[0][0], Value::from(11u64));
        let seeds: Vec<u64> = a.rows.iter().map(|r| r[0].as_u64().unwrap()).collect();
        assert_eq!(seeds.iter().filter(|&&s| s == 13).count(), 2 * 4 * 3);
    }

    #[test]
    fn ensemble_and_robustness_pass() {
        let e = run(ExperimentKind::EnsembleCertificate, &cfg(r#"{"channel_params":{"n_seeds":4}}"#)).unwrap();
        assert!(e.pass, "{:?}", e.counterexamples);
        let r = run(ExperimentKind::RobustnessProfile, &cfg(r#"{"eps_grid":[0,0.1,0.5]}"#)).unwrap();
        assert!(r.pass, "{:?}", r.rows);
        assert_eq!(r.summary["verdict"], "pass");
    }
}
