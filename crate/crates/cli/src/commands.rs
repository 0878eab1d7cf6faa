use std::path::{Path, PathBuf};

use anyhow::Context;
use discordbench_core::linalg::{fidelity, partial_trace, purity};
use discordbench_core::measures::{concurrence, discord_measuring};
use discordbench_core::multiphoton::{error_fraction, ErrorModelParams};
use discordbench_core::optics::{
    coherence_length_um, coherent_output, delayed_incoherent_output, hom_dip, incoherent_output, overlap,
    SourceParams, DEFAULT_N_MAX,
};
use discordbench_core::tomography::{
    bootstrap_uncertainty, expected_counts, mle_reconstruct, simulate_counts, standard_settings, MleOptions,
    ProjectorSetting, Statistic, TomographyRecord,
};
use discordbench_core::Subsystem;
use serde_json::{json, Value};

use crate::format::{density_json, json_num, matrix_rows, num, CsvTable};
use crate::{Failure, Format, OutputArgs, Side, SourceArgs, StateKind, TomographyKind};

/// Offset separating bootstrap seeds from the seed of the simulated data.
const BOOTSTRAP_SEED_OFFSET: u64 = 1 << 32;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    if out.output.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(&out.output, text)
            .with_context(|| format!("writing {}", out.output.display()))
            .map_err(Failure::Io)
    }
}

fn emit_json(out: &OutputArgs, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.into()))?;
    text.push('\n');
    emit(out, &text)
}

fn source_params(source: &SourceArgs, phi: f64) -> Result<SourceParams, Failure> {
    Ok(SourceParams::new(source.mu, phi, source.lambda0, source.fwhm_lambda)?)
}

fn source_flags(source: &SourceArgs) -> String {
    format!(
        "--mu {} --lambda0 {} --fwhm-lambda {}",
        num(source.mu),
        num(source.lambda0),
        num(source.fwhm_lambda)
    )
}

/// `points` equally spaced values from `min` to `max` inclusive.
fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(usage(format!("--points must be at least 2, got {points}")));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(usage(format!("range must satisfy min < max, got {min}..{max}")));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| if k + 1 == points { max } else { min + step * k as f64 })
        .collect())
}

fn subsystem(side: Side) -> Subsystem {
    match side {
        Side::A => Subsystem::A,
        Side::B => Subsystem::B,
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::A => "a",
        Side::B => "b",
    }
}

pub fn state(
    kind: StateKind,
    phi: Option<f64>,
    delta: Option<f64>,
    source: &SourceArgs,
    measure: Side,
    format: Format,
    out: &OutputArgs,
) -> Result<(), Failure> {
    if phi.is_some() && kind != StateKind::Coherent {
        return Err(usage("--phi applies only to the coherent state"));
    }
    if delta.is_some() && kind != StateKind::Delayed {
        return Err(usage("--delta applies only to the delayed state"));
    }
    let phi = phi.unwrap_or(0.0);
    let delta = delta.unwrap_or(0.0);
    let params = source_params(source, phi)?;
    let (name, rho, extra_flags) = match kind {
        StateKind::Coherent => ("coherent", coherent_output(&params, DEFAULT_N_MAX)?, format!(" --phi {}", num(phi))),
        StateKind::Incoherent => ("incoherent", incoherent_output(&params)?, String::new()),
        StateKind::Delayed => (
            "delayed",
            delayed_incoherent_output(&params, delta)?,
            format!(" --delta {}", num(delta)),
        ),
    };
    let d = discord_measuring(&rho, subsystem(measure))?;
    let c = concurrence(&rho)?;
    let p = purity(&rho);
    let reduced_a = partial_trace(&rho, Subsystem::A)?;
    let reduced_b = partial_trace(&rho, Subsystem::B)?;
    let fmt_name = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let provenance = format!(
        "state {name}{extra_flags} {} --measure {} --format {fmt_name}",
        source_flags(source),
        side_name(measure)
    );

    let mut scalars = vec![
        ("purity", p),
        ("concurrence", c),
        ("discord", d.discord),
        ("mutual_information", d.mutual_information),
        ("classical_correlation", d.classical_correlation),
        ("measurement_theta", d.optimal_measurement.theta()),
        ("measurement_phi", d.optimal_measurement.phi()),
    ];
    if kind == StateKind::Delayed {
        scalars.push(("coherence_length_um", coherence_length_um(&params)));
        scalars.push(("overlap", overlap(&params, delta)));
    }

    match format {
        Format::Json => {
            let mut parameters = json!({
                "mu": json_num(source.mu),
                "lambda0_nm": json_num(source.lambda0),
                "fwhm_lambda_nm": json_num(source.fwhm_lambda),
            });
            match kind {
                StateKind::Coherent => parameters["phi"] = json_num(phi),
                StateKind::Delayed => parameters["delta_um"] = json_num(delta),
                StateKind::Incoherent => {}
            }
            let mut report = json!({
                "command": "state",
                "generated_by": format!("discordbench {provenance}"),
                "kind": name,
                "parameters": parameters,
                "rho": density_json(&rho),
                "measured_subsystem": side_name(measure).to_uppercase(),
                "reduced_a": density_json(&reduced_a),
                "reduced_b": density_json(&reduced_b),
            });
            for (key, value) in &scalars {
                report[*key] = json_num(*value);
            }
            emit_json(out, &report)
        }
        Format::Csv => {
            let mut table = CsvTable::new(&provenance, &["quantity", "value"]);
            let mut rows: Vec<(String, f64)> = scalars.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            rows.extend(matrix_rows("rho", rho.matrix()));
            rows.extend(matrix_rows("reduced_a", reduced_a.matrix()));
            rows.extend(matrix_rows("reduced_b", reduced_b.matrix()));
            for (k, v) in rows {
                table.push(vec![k, num(v)]);
            }
            emit(out, &table.render().map_err(Failure::Io)?)
        }
    }
}

pub fn homdip(source: &SourceArgs, min: f64, max: f64, points: usize, out: &OutputArgs) -> Result<(), Failure> {
    let deltas = grid(min, max, points)?;
    let params = source_params(source, 0.0)?;
    let dip = hom_dip(&params, &deltas)?;
    let provenance = format!(
        "homdip {} --min {} --max {} --points {points}",
        source_flags(source),
        num(min),
        num(max)
    );
    let mut table = CsvTable::new(&provenance, &["delta_um", "coincidence_norm"]);
    table.comment(format!("visibility={} fwhm_um={}", num(dip.visibility), num(dip.fwhm_um)));
    for p in &dip.points {
        table.push(vec![num(p.delta_um), num(p.coincidence_norm)]);
    }
    emit(out, &table.render().map_err(Failure::Io)?)
}

pub fn delay_scan(source: &SourceArgs, min: f64, max: f64, points: usize, out: &OutputArgs) -> Result<(), Failure> {
    if min < 0.0 {
        return Err(usage("delays must be non-negative"));
    }
    let deltas = grid(min, max, points)?;
    let params = source_params(source, 0.0)?;
    let provenance = format!(
        "delay-scan {} --min {} --max {} --points {points}",
        source_flags(source),
        num(min),
        num(max)
    );
    let mut table = CsvTable::new(&provenance, &["delta_um", "purity", "discord"]);
    for d in deltas {
        let rho = delayed_incoherent_output(&params, d)?;
        let disc = discord_measuring(&rho, Subsystem::B)?.discord;
        table.push(vec![num(d), num(purity(&rho)), num(disc)]);
    }
    emit(out, &table.render().map_err(Failure::Io)?)
}

pub struct TomographyRequest {
    pub kind: TomographyKind,
    pub phi: Option<f64>,
    pub mean_total: f64,
    pub seed: u64,
    pub resamples: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub records: Option<PathBuf>,
    pub format: Format,
}

fn read_records(path: &Path) -> Result<Vec<TomographyRecord>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)?;
    let headers = reader
        .headers()
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)?
        .clone();
    if headers.len() != 2 || &headers[0] != "setting" || &headers[1] != "count" {
        return Err(usage(format!("{}: expected header `setting,count`", path.display())));
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::Io)?;
        let setting = ProjectorSetting::from_label(&row[0])?;
        let count: u64 = row[1]
            .parse()
            .map_err(|_| usage(format!("{} record {}: bad count {:?}", path.display(), line + 1, &row[1])))?;
        out.push(TomographyRecord { setting, count });
    }
    Ok(out)
}

fn bootstrap_json(
    records: &[TomographyRecord],
    req: &TomographyRequest,
    statistic: &Statistic,
    value: f64,
    opts: &MleOptions,
) -> Result<(Value, usize, usize), Failure> {
    let s = bootstrap_uncertainty(
        records,
        req.resamples,
        req.seed.wrapping_add(BOOTSTRAP_SEED_OFFSET),
        statistic,
        opts,
    )?;
    Ok((
        json!({"value": json_num(value), "mean": json_num(s.mean), "std": json_num(s.std)}),
        s.failures,
        s.not_converged,
    ))
}

pub fn tomography(req: &TomographyRequest, out: &OutputArgs) -> Result<(), Failure> {
    if req.phi.is_some() && req.kind != TomographyKind::Coherent {
        return Err(usage("--phi applies only to the coherent state"));
    }
    if req.resamples < 2 {
        return Err(usage(format!("--resamples must be at least 2, got {}", req.resamples)));
    }
    let phi = req.phi.unwrap_or(0.0);
    let params = SourceParams::default().with_phi(phi)?;
    let (name, truth) = match req.kind {
        TomographyKind::Coherent => ("coherent", coherent_output(&params, DEFAULT_N_MAX)?),
        TomographyKind::Incoherent => ("incoherent", incoherent_output(&params)?),
    };
    let settings = standard_settings();
    let records = match &req.records {
        Some(path) => read_records(path)?,
        None => simulate_counts(&truth, &settings, req.mean_total, req.seed)?,
    };
    let fmt_name = match req.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let phi_flag = match req.kind {
        TomographyKind::Coherent => format!(" --phi {}", num(phi)),
        TomographyKind::Incoherent => String::new(),
    };
    let source_flag = match &req.records {
        Some(path) => format!(" --records {}", path.display()),
        None => format!(" --mean-total {} --seed {}", num(req.mean_total), req.seed),
    };
    let provenance = format!(
        "tomography {name}{phi_flag}{source_flag} --resamples {} --max-iter {} --tol {} --format {fmt_name}",
        req.resamples,
        req.max_iter,
        num(req.tol)
    );

    if req.format == Format::Csv {
        let mut table = CsvTable::new(&provenance, &["setting", "count"]);
        for r in &records {
            table.push(vec![r.setting.label.clone(), r.count.to_string()]);
        }
        return emit(out, &table.render().map_err(Failure::Io)?);
    }

    let opts = MleOptions {
        max_iter: req.max_iter,
        tol: req.tol,
    };
    let fit = mle_reconstruct(&records, &opts)?;
    let f = fidelity(&fit.rho, &truth)?;
    let c = concurrence(&fit.rho)?;
    let d = discord_measuring(&fit.rho, Subsystem::B)?.discord;
    let (conc, fail_c, nc_c) = bootstrap_json(&records, req, &Statistic::Concurrence, c, &opts)?;
    let (disc, fail_d, nc_d) = bootstrap_json(&records, req, &Statistic::Discord, d, &opts)?;

    let expected: Vec<f64> = if req.records.is_none() {
        expected_counts(&truth, &settings, req.mean_total)
    } else {
        Vec::new()
    };
    let counts: Vec<Value> = records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut entry = json!({"setting": r.setting.label, "count": r.count});
            if let Some(e) = expected.get(k) {
                entry["expected"] = json_num(*e);
            }
            entry
        })
        .collect();
    let mut parameters = json!({"seed": req.seed, "resamples": req.resamples, "max_iter": req.max_iter, "tol": json_num(req.tol)});
    if req.records.is_none() {
        parameters["mean_total"] = json_num(req.mean_total);
    }
    if req.kind == TomographyKind::Coherent {
        parameters["phi"] = json_num(phi);
    }
    let report = json!({
        "command": "tomography",
        "generated_by": format!("discordbench {provenance}"),
        "kind": name,
        "parameters": parameters,
        "true_state": density_json(&truth),
        "counts": counts,
        "reconstructed": density_json(&fit.rho),
        "log_likelihood": json_num(fit.log_likelihood),
        "iterations": fit.iterations,
        "converged": fit.converged,
        "fidelity": json_num(f),
        "concurrence": conc,
        "discord": disc,
        "bootstrap": {
            "method": "parametric: each count redrawn as Poisson(observed count), state re-estimated",
            "resamples": req.resamples,
            "seed": req.seed.wrapping_add(BOOTSTRAP_SEED_OFFSET),
            "failed": fail_c + fail_d,
            "not_converged": nc_c + nc_d,
        },
        "note": "Reconstructions from finite counts put weight on directions where the true state has none, \
                 which biases discord low; values are Monte-Carlo estimates, not exact predictions.",
    });
    emit_json(out, &report)?;
    if !fit.converged {
        return Err(Failure::Numeric(format!(
            "maximum-likelihood fit did not converge in {} iterations (report written)",
            fit.iterations
        )));
    }
    Ok(())
}

pub fn error_curve(mu_min: f64, mu_max: f64, points: usize, n_cut: u32, out: &OutputArgs) -> Result<(), Failure> {
    if mu_min.is_nan() || mu_min <= 0.0 {
        return Err(usage(format!("--mu-min must be positive, got {mu_min}")));
    }
    let mus = grid(mu_min, mu_max, points)?;
    let provenance = format!(
        "error-curve --mu-min {} --mu-max {} --points {points} --n-cut {n_cut}",
        num(mu_min),
        num(mu_max)
    );
    let mut table = CsvTable::new(&provenance, &["mu", "error_fraction"]);
    for mu in mus {
        let e = error_fraction(&ErrorModelParams::new(mu, n_cut)?);
        table.push(vec![num(mu), num(e)]);
    }
    emit(out, &table.render().map_err(Failure::Io)?)
}
