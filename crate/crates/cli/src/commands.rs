//! The experiment subcommands. Each resolves its parameters, runs the
//! corresponding library routine, and returns a CSV table plus a JSON
//! summary. All randomized commands require an explicit seed and are
//! bit-reproducible at any worker count.

use crate::config::Resolver;
use crate::error::CliError;
use crate::output::{fmt_f64, fmt_ratio, RunOutput};
use diffset_core::adversary::{
    adversary_trial, bernoulli_rate_scan, success_rate_scan, AvoidanceCertificate,
};
use diffset_core::forms::{
    enumerate_symmetric_forms, gauss_sum, gauss_sum_predicted, rank_census, SymmetricForm,
};
use diffset_core::models::{concentration_experiment, trend_consistent, ModelSpec};
use diffset_core::progressions::{dual_function, inner_with_indicator, DenseSet, Domain};
use diffset_core::{exec, seeds, stats};
use rand::Rng;
use std::fs;

/// Max |computed − p^{−rank/2}| over symmetric forms: every form in
/// dimension n (mode `exhaustive`) or `--trials` random ones (mode
/// `sample`).
pub fn cmd_gauss_sum(r: &Resolver) -> Result<RunOutput, CliError> {
    let field = r.prime()?;
    let n = r.require_usize("n")?;
    let budget = r.budget()?;
    let mode = r.str_or("mode", "exhaustive");

    let mut out = RunOutput::new(vec!["form", "rank", "computed", "predicted", "deviation"]);
    let mut max_deviation: f64 = 0.0;
    let mut push = |out: &mut RunOutput, index: u64, m: &SymmetricForm| -> Result<(), CliError> {
        let computed = gauss_sum(m, budget)?;
        let predicted = gauss_sum_predicted(m);
        let deviation = (computed - predicted).abs();
        max_deviation = max_deviation.max(deviation);
        out.push_row(vec![
            index.to_string(),
            m.rank().to_string(),
            fmt_f64(computed),
            fmt_f64(predicted),
            fmt_f64(deviation),
        ]);
        Ok(())
    };

    match mode.as_str() {
        "exhaustive" => {
            let mut index = 0;
            for m in enumerate_symmetric_forms(field, n, budget)? {
                push(&mut out, index, &m)?;
                index += 1;
            }
        }
        "sample" => {
            let trials = r.u64_or("trials", 100)?;
            let seed = r.seed()?;
            let p = field.modulus();
            for index in 0..trials {
                let mut rng = seeds::trial_rng(seed, &[index]);
                let mut m = SymmetricForm::zero(field, n);
                for i in 0..n {
                    for j in i..n {
                        m.set_entry(i, j, rng.random_range(0..p));
                    }
                }
                push(&mut out, index, &m)?;
            }
        }
        other => {
            return Err(CliError::input(format!(
                "--mode must be exhaustive or sample, got {other:?}"
            )))
        }
    }
    out.summary = serde_json::json!({
        "forms": out.rows.len(),
        "max_deviation": max_deviation,
    });
    Ok(out)
}

fn verify_mode(cert: &AvoidanceCertificate) -> &'static str {
    if cert.triples_found.is_some() {
        "exhaustive"
    } else {
        "algebraic"
    }
}

/// Per-trial construction records for one (p, n, K) cell.
pub fn cmd_adversary(r: &Resolver) -> Result<RunOutput, CliError> {
    let field = r.prime()?;
    let n = r.require_usize("n")?;
    let k = {
        let text = r.require_str("K")?;
        text.parse::<usize>()
            .map_err(|_| CliError::input(format!("--K: cannot parse {text:?} as a count")))?
    };
    let trials = r.u64_or("trials", 100)?;
    let seed = r.seed()?;
    let budget = r.budget()?;

    let certs: Vec<AvoidanceCertificate> = exec::map_indexed(trials as usize, |t| {
        adversary_trial(field, n, k, seeds::derive_seed(seed, &[t as u64]), budget)
    });

    let mut out = RunOutput::new(vec![
        "trial",
        "independent",
        "avoided",
        "quadric_density",
        "verify_mode",
        "rank_m",
    ]);
    let mut independent = 0u64;
    let mut avoided = 0u64;
    let mut density_sum = 0.0;
    let mut density_count = 0u64;
    for (t, cert) in certs.iter().enumerate() {
        if !cert.sound() {
            return Err(CliError::input(format!(
                "soundness violation at trial {t}: independent sample without nonzero witnesses"
            )));
        }
        let is_avoided = cert.verified_avoidance();
        independent += cert.independent as u64;
        avoided += is_avoided as u64;
        let density = match &cert.density {
            Some(d) => {
                density_sum += d.density();
                density_count += 1;
                fmt_f64(d.density())
            }
            None => String::new(),
        };
        let rank = cert.form.as_ref().map(|m| m.rank().to_string()).unwrap_or_default();
        out.push_row(vec![
            t.to_string(),
            cert.independent.to_string(),
            is_avoided.to_string(),
            density,
            verify_mode(cert).to_string(),
            rank,
        ]);
    }
    let (ind_low, ind_high) = stats::wilson_interval(independent, trials, stats::Z_95);
    let (avd_low, avd_high) = stats::wilson_interval(avoided, trials, stats::Z_95);
    out.summary = serde_json::json!({
        "trials": trials,
        "independent": independent,
        "independence_rate": independent as f64 / trials.max(1) as f64,
        "independence_ci95": [ind_low, ind_high],
        "avoided": avoided,
        "avoided_rate": avoided as f64 / trials.max(1) as f64,
        "avoided_ci95": [avd_low, avd_high],
        "mean_density": if density_count > 0 { density_sum / density_count as f64 } else { 0.0 },
    });
    Ok(out)
}

/// Success-rate surface: fixed-size mode over the n×K grid, or Bernoulli
/// mode (`--model bern:c=…`) with σ = min(1, c·n²/p^n).
pub fn cmd_threshold_scan(r: &Resolver) -> Result<RunOutput, CliError> {
    let field = r.prime()?;
    let ns = r.usize_list("n")?;
    let trials = r.u64_or("trials", 100)?;
    let seed = r.seed()?;
    let budget = r.budget()?;
    let model = r.opt_str("model");
    let k_list = r.opt_str("K");

    match (k_list, model) {
        (Some(k_text), None) => {
            let mut ks = Vec::new();
            for part in k_text.split(',') {
                let part = part.trim();
                ks.push(part.parse::<usize>().map_err(|_| {
                    CliError::input(format!("--K: cannot parse {part:?} as a count"))
                })?);
            }
            let cells: Vec<(usize, usize)> =
                ns.iter().flat_map(|&n| ks.iter().map(move |&k| (n, k))).collect();
            let rows = success_rate_scan(field, &cells, trials, seed, budget);
            let mut out = RunOutput::new(vec![
                "n",
                "K",
                "trials",
                "independent",
                "independence_rate",
                "independence_low",
                "independence_high",
                "verified",
                "verified_rate",
                "verified_low",
                "verified_high",
                "mean_density",
            ]);
            for row in &rows {
                out.push_row(vec![
                    row.n.to_string(),
                    row.k.to_string(),
                    row.trials.to_string(),
                    row.independent.to_string(),
                    fmt_f64(row.independent as f64 / row.trials.max(1) as f64),
                    fmt_f64(row.independence_ci.0),
                    fmt_f64(row.independence_ci.1),
                    row.verified.to_string(),
                    fmt_f64(row.verified as f64 / row.trials.max(1) as f64),
                    fmt_f64(row.verified_ci.0),
                    fmt_f64(row.verified_ci.1),
                    fmt_f64(row.mean_density),
                ]);
            }
            out.summary = serde_json::json!({
                "mode": "size",
                "cells": rows.len(),
            });
            Ok(out)
        }
        (None, Some(model_text)) => {
            let Some(c_text) = model_text.strip_prefix("bern:c=") else {
                return Err(CliError::input(format!(
                    "threshold-scan models take the form bern:c=<list>, got {model_text:?}"
                )));
            };
            let mut cs = Vec::new();
            for part in c_text.split(',') {
                let part = part.trim();
                let c: f64 = part.parse().map_err(|_| {
                    CliError::input(format!("--model: cannot parse {part:?} as a number"))
                })?;
                cs.push(c);
            }
            let mut out = RunOutput::new(vec![
                "n",
                "c",
                "sigma",
                "trials",
                "mean_size",
                "independent",
                "independence_rate",
                "independence_low",
                "independence_high",
                "verified",
                "verified_rate",
                "verified_low",
                "verified_high",
                "mean_density",
            ]);
            // One master seed for every c: the per-element uniforms are
            // shared, so S grows pointwise with c and the success surface
            // is monotone trial-by-trial (common random numbers).
            for &c in &cs {
                let rows = bernoulli_rate_scan(field, &ns, c, trials, seed, budget)?;
                for row in &rows {
                    out.push_row(vec![
                        row.n.to_string(),
                        fmt_f64(c),
                        fmt_f64(row.sigma),
                        row.trials.to_string(),
                        fmt_f64(row.mean_size),
                        row.independent.to_string(),
                        fmt_f64(row.independent as f64 / row.trials.max(1) as f64),
                        fmt_f64(row.independence_ci.0),
                        fmt_f64(row.independence_ci.1),
                        row.verified.to_string(),
                        fmt_f64(row.verified as f64 / row.trials.max(1) as f64),
                        fmt_f64(row.verified_ci.0),
                        fmt_f64(row.verified_ci.1),
                        fmt_f64(row.mean_density),
                    ]);
                }
            }
            out.summary = serde_json::json!({
                "mode": "bernoulli",
                "cells": out.rows.len(),
            });
            Ok(out)
        }
        (Some(_), Some(_)) => Err(CliError::input(
            "threshold-scan takes either --K (size mode) or --model bern:c=… — not both",
        )),
        (None, None) => Err(CliError::input(
            "threshold-scan needs --K (size mode) or --model bern:c=… (Bernoulli mode)",
        )),
    }
}

fn parse_domain(r: &Resolver) -> Result<Domain, CliError> {
    let kind = r.require_str("domain")?;
    match kind.as_str() {
        "interval" | "cyclic" => {
            let n = {
                let text = r.require_str("N")?;
                text.parse::<usize>().map_err(|_| {
                    CliError::input(format!("--N: cannot parse {text:?} as a size"))
                })?
            };
            if n == 0 {
                return Err(CliError::input("--N must be at least 1"));
            }
            Ok(if kind == "interval" { Domain::interval(n) } else { Domain::cyclic(n) })
        }
        "vector" => {
            let field = r.prime()?;
            let n = r.require_usize("n")?;
            let budget = r.budget()?;
            // Dense sets materialize the full domain; respect the budget.
            diffset_core::field::vector_count(field, n, budget)?;
            Ok(Domain::vector(field, n))
        }
        other => Err(CliError::input(format!(
            "--domain must be interval, cyclic, or vector, got {other:?}"
        ))),
    }
}

/// Dual-function table F_A(d) for a set file, with exact rational and
/// decimal columns; optionally the inner product with a difference set.
pub fn cmd_dual(r: &Resolver) -> Result<RunOutput, CliError> {
    let domain = parse_domain(r)?;
    let k = r.usize_or("k", 3)?;
    let set_path = r.require_str("set")?;
    let text = fs::read_to_string(&set_path)
        .map_err(|e| CliError::input(format!("cannot read {set_path}: {e}")))?;
    let a = DenseSet::parse_text(domain, &text)
        .map_err(|e| CliError::input(format!("{set_path}: {e}")))?;
    let f = dual_function(&a, k)?;

    let mut out = RunOutput::new(vec!["d", "count", "value", "decimal"]);
    for slot in 0..domain.size() {
        out.push_row(vec![
            domain.difference_label(slot),
            f.count(slot).to_string(),
            fmt_ratio(&f.value(slot)),
            fmt_f64(f.value_f64(slot)),
        ]);
    }
    let mut summary = serde_json::json!({
        "set_size": a.count(),
        "density": a.density(),
        "k": k,
    });
    if let Some(diffs_path) = r.opt_str("diffs") {
        let text = fs::read_to_string(&diffs_path)
            .map_err(|e| CliError::input(format!("cannot read {diffs_path}: {e}")))?;
        let s = DenseSet::parse_text(domain, &text)
            .map_err(|e| CliError::input(format!("{diffs_path}: {e}")))?;
        let inner = inner_with_indicator(&f, &s)?;
        let decimal = *inner.numer() as f64 / *inner.denom() as f64;
        summary["inner"] = serde_json::json!(fmt_ratio(&inner));
        summary["inner_decimal"] = serde_json::json!(decimal);
        summary["diff_set_size"] = serde_json::json!(s.count());
    }
    out.summary = summary;
    Ok(out)
}

/// Tail probabilities of the character-correlation sup across an N
/// schedule, with the fitted exponential reference curve and trend verdict.
pub fn cmd_concentration(r: &Resolver) -> Result<RunOutput, CliError> {
    let model_text = r.require_str("model")?;
    let spec = ModelSpec::parse(&model_text)?;
    let schedule = r.usize_list("N")?;
    let eps = r.f64_or("eps", 0.1)?;
    let trials = r.u64_or("trials", 200)?;
    let seed = r.seed()?;

    let rows = concentration_experiment(&spec, &schedule, eps, trials, seed)?;
    let trend = trend_consistent(&rows);
    let mut out = RunOutput::new(vec![
        "N",
        "sigma",
        "threshold",
        "exceedances",
        "trials",
        "tail",
        "ci_low",
        "ci_high",
        "reference",
    ]);
    for row in &rows {
        out.push_row(vec![
            row.n.to_string(),
            fmt_f64(row.sigma),
            fmt_f64(row.threshold),
            row.exceedances.to_string(),
            row.trials.to_string(),
            fmt_f64(row.tail),
            fmt_f64(row.ci_low),
            fmt_f64(row.ci_high),
            fmt_f64(row.reference),
        ]);
    }
    out.summary = serde_json::json!({
        "model": spec.to_string(),
        "trend_nonincreasing": trend,
        "tails": rows.iter().map(|r| r.tail).collect::<Vec<f64>>(),
    });
    Ok(out)
}

/// Exact rank-census counts (matrices of rank ≤ r) against the p^{2nr}
/// bound; enumerates the p^{n²} matrix space once.
pub fn cmd_census(r: &Resolver) -> Result<RunOutput, CliError> {
    let field = r.prime()?;
    let n = r.require_usize("n")?;
    let budget = r.budget()?;
    let ranks: Vec<usize> = match r.opt_usize("r")? {
        Some(rank) => {
            if rank > n {
                return Err(CliError::input(format!("--r must be at most n = {n}, got {rank}")));
            }
            vec![rank]
        }
        None => (0..=n).collect(),
    };

    let census = rank_census(field, n, budget)?;
    let mut out = RunOutput::new(vec!["r", "count", "bound", "ratio"]);
    let mut max_ratio: f64 = 0.0;
    for rank in ranks {
        let count: u64 = census.iter().take(rank + 1).sum();
        let mut bound: u128 = 1;
        for _ in 0..2 * n * rank {
            bound = bound
                .checked_mul(field.modulus() as u128)
                .ok_or_else(|| CliError::input("rank bound overflows u128".to_string()))?;
        }
        let ratio = count as f64 / bound as f64;
        max_ratio = max_ratio.max(ratio);
        out.push_row(vec![
            rank.to_string(),
            count.to_string(),
            bound.to_string(),
            fmt_f64(ratio),
        ]);
    }
    out.summary = serde_json::json!({
        "matrix_space": format!("{}^{}", field.modulus(), n * n),
        "max_ratio": max_ratio,
    });
    Ok(out)
}

/// Sanity helper shared by inline tests.
#[cfg(test)]
fn resolver_for(
    command: &'static str,
    pairs: &[(&'static str, &str)],
) -> Resolver {
    Resolver::new(
        command,
        pairs.iter().map(|(k, v)| (*k, Some(v.to_string()))).collect(),
        None,
    )
    .unwrap()
}
