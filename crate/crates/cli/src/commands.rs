use std::path::Path;

use volcur_core::bounds::ratios_upto;
use volcur_core::psd::{gram_matrix, parse_dense, parse_matrix, rbf_kernel};
use volcur_core::sampling::{sample_subsets, DEFAULT_ENUMERATION_CAP};
use volcur_core::spectra::parse_spectrum;
use volcur_core::*;

use crate::output::{emit, Table};
use crate::{Command, KRange, Kernel, Options};

const VERIFY_TOLERANCE: f64 = 1e-9;

pub fn run(command: Command, opts: &Options) -> Result<u8> {
    check_flags(command, opts)?;
    match command {
        Command::Esp => esp(opts),
        Command::Ratio => ratio(opts),
        Command::ExpectedError => expected_error(opts),
        Command::Bounds => bounds(opts),
        Command::Approx => approx(opts),
        Command::Sample => sample(opts),
        Command::Verify => verify(opts),
        Command::Figure => figure(opts),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Rejects flags that the command would silently ignore.
fn check_flags(command: Command, opts: &Options) -> Result<()> {
    let matrix_only = matches!(command, Command::Approx | Command::Sample | Command::Verify);
    let takes_matrix = matrix_only || !matches!(command, Command::Figure);
    if opts.input.is_some() && opts.spectrum.is_some() {
        return Err(invalid("give either --input or --spectrum, not both"));
    }
    if opts.input.is_some() && !takes_matrix {
        return Err(invalid(
            "this command reads a spectrum (--spectrum), not a matrix",
        ));
    }
    if opts.spectrum.is_some() && matrix_only {
        return Err(invalid("this command needs a matrix (--input)"));
    }
    if opts.kernel.is_some() && opts.input.is_none() {
        return Err(invalid("--kernel applies to --input data files"));
    }
    if opts.sigma.is_some() && opts.kernel != Some(Kernel::Rbf) {
        return Err(invalid("--sigma requires --kernel rbf"));
    }
    if opts.majorant.is_some() && !matches!(command, Command::Bounds | Command::Figure) {
        return Err(invalid("--majorant applies to bounds and figure only"));
    }
    if opts.draws.is_some() && !matches!(command, Command::Sample | Command::ExpectedError) {
        return Err(invalid("--draws applies to sample and expected-error only"));
    }
    if opts.draws == Some(0) {
        return Err(invalid("--draws must be positive"));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_matrix(opts: &Options) -> Result<PsdMatrix> {
    let path = opts
        .input
        .as_deref()
        .ok_or_else(|| invalid("missing --input"))?;
    let text = read(path)?;
    match opts.kernel {
        None => parse_matrix(&text),
        Some(Kernel::Gram) => gram_matrix(&parse_dense(&text)?),
        Some(Kernel::Rbf) => {
            let sigma = opts
                .sigma
                .ok_or_else(|| invalid("--kernel rbf needs --sigma"))?;
            rbf_kernel(&parse_dense(&text)?, sigma)
        }
    }
}

fn parse_source(spec: &str) -> Result<SpectrumSource> {
    match spec.strip_prefix("file:") {
        Some(path) => Ok(SpectrumSource::Explicit(parse_spectrum(&read(
            Path::new(path),
        )?)?)),
        None => spec.parse(),
    }
}

/// The spectrum named by --spectrum, or the eigenvalues of the --input matrix.
fn load_source(opts: &Options) -> Result<SpectrumSource> {
    match (&opts.spectrum, &opts.input) {
        (Some(spec), _) => parse_source(spec),
        (None, Some(_)) => Ok(SpectrumSource::Explicit(
            load_matrix(opts)?.spectrum().clone(),
        )),
        (None, None) => Err(invalid("missing --spectrum or --input")),
    }
}

fn load_majorant(opts: &Options, required: bool) -> Result<Option<PiecewiseDyadicSpectrum>> {
    match &opts.majorant {
        None if required => Err(invalid("missing --majorant dyadic:lmax=<int>,base=<f>")),
        None => Ok(None),
        Some(spec) => match spec.parse()? {
            SpectrumSource::Dyadic(d) => Ok(Some(d)),
            _ => Err(invalid("--majorant must be a dyadic spectrum")),
        },
    }
}

fn k_range(opts: &Options) -> Result<KRange> {
    opts.k.ok_or_else(|| invalid("missing --k"))
}

fn single_k(opts: &Options) -> Result<usize> {
    k_range(opts)?
        .single()
        .ok_or_else(|| invalid("this command takes a single --k value"))
}

fn check_below_n(k: KRange, n: usize) -> Result<()> {
    if k.end >= n {
        return Err(invalid(format!(
            "k must be smaller than n = {n}, got {}",
            k.end
        )));
    }
    Ok(())
}

fn finish(table: &Table, opts: &Options) -> Result<u8> {
    emit(&table.render(opts.format)?, opts.out.as_deref())?;
    Ok(0)
}

fn esp(opts: &Options) -> Result<u8> {
    let source = load_source(opts)?;
    let m = k_range(opts)?.end;
    let coeffs = esp::esp_of_source(&source, m)?;
    let mut table = Table::new(&["j", "e_j"]);
    for (j, c) in coeffs.coeffs().iter().enumerate() {
        table.push(vec![j.to_string(), format_ext(*c)]);
    }
    finish(&table, opts)
}

fn ratios(source: &SpectrumSource, k: KRange) -> Result<Vec<f64>> {
    check_below_n(k, source.len())?;
    let all = ratios_upto(source, k.end, usize::MAX)?.expect("uncapped");
    k.iter()
        .map(|j| {
            let r = all[j];
            if r.is_nan() {
                Err(Error::RankDeficient { k: j })
            } else {
                Ok(r)
            }
        })
        .collect()
}

fn ratio(opts: &Options) -> Result<u8> {
    let source = load_source(opts)?;
    let k = k_range(opts)?;
    let values = ratios(&source, k)?;
    let mut table = Table::new(&["k", "ratio"]);
    for (j, r) in k.iter().zip(values) {
        table.push(vec![j.to_string(), format_number(r)]);
    }
    finish(&table, opts)
}

fn expected_error(opts: &Options) -> Result<u8> {
    let k = k_range(opts)?;
    let matrix = match opts.input {
        Some(_) if opts.spectrum.is_none() => Some(load_matrix(opts)?),
        _ => None,
    };
    if opts.draws.is_some() && matrix.is_none() {
        return Err(invalid("--draws needs a matrix (--input) to sample from"));
    }
    let source = match &matrix {
        Some(m) => SpectrumSource::Explicit(m.spectrum().clone()),
        None => load_source(opts)?,
    };
    let values = ratios(&source, k)?;
    let mut header = vec!["k", "expected_error", "optimal_error"];
    if opts.draws.is_some() {
        header.extend(["empirical_mean", "empirical_stderr", "draws"]);
    }
    let mut table = Table::new(&header);
    for (j, r) in k.iter().zip(values) {
        let mut row = vec![
            j.to_string(),
            format_number((j + 1) as f64 * r),
            format_number(source.tail_sum(j)),
        ];
        if let (Some(m), Some(draws)) = (&matrix, opts.draws) {
            let est = empirical_error(m, j, draws, opts.seed)?;
            row.extend([
                format_number(est.mean),
                format_number(est.stderr),
                est.draws.to_string(),
            ]);
        }
        table.push(row);
    }
    finish(&table, opts)
}

fn bounds(opts: &Options) -> Result<u8> {
    let source = load_source(opts)?;
    let k = k_range(opts)?;
    check_below_n(k, source.len())?;
    let options = BoundOptions {
        majorant: load_majorant(opts, false)?,
        ..BoundOptions::default()
    };
    let mut table = Table::new(&BoundReport::CSV_HEADER);
    for j in k.iter() {
        table.push(bound_report(&source, j, &options)?.csv_fields());
    }
    finish(&table, opts)
}

fn approx(opts: &Options) -> Result<u8> {
    let out = opts
        .out
        .as_deref()
        .ok_or_else(|| invalid("approx writes the approximation to --out <path>"))?;
    let m = load_matrix(opts)?;
    let k = single_k(opts)?;
    if k > m.n() {
        return Err(invalid(format!("k must not exceed n = {}, got {k}", m.n())));
    }
    let subset = sample_subset(&eigendecompose(&m), k, opts.seed)?;
    let approx = cur_approximation(&m, &subset)?;
    let error = cur_error_nuclear(&m, &subset)?;
    let expected = if k < m.n() {
        expected_error_exact(m.spectrum(), k)?
    } else {
        0.0
    };
    let optimal = optimal_error(m.spectrum(), k)?;

    let mut matrix = Table::headerless();
    for i in 0..m.n() {
        matrix.push(
            (0..m.n())
                .map(|j| format_number(approx.get(i, j)))
                .collect(),
        );
    }
    emit(&matrix.render(opts.format)?, Some(out))?;

    let mut summary = Table::new(&["subset", "nuclear_error", "expected_error", "optimal_error"]);
    summary.push(vec![
        subset.to_string(),
        format_number(error),
        format_number(expected),
        format_number(optimal),
    ]);
    emit(&summary.render(opts.format)?, None)?;
    Ok(0)
}

fn sample(opts: &Options) -> Result<u8> {
    let m = load_matrix(opts)?;
    let k = single_k(opts)?;
    if k > m.n() {
        return Err(invalid(format!("k must not exceed n = {}, got {k}", m.n())));
    }
    let draws = opts.draws.unwrap_or(1);
    let subsets = sample_subsets(&eigendecompose(&m), k, draws, opts.seed)?;
    let mut table = Table::new(&["draw", "subset", "nuclear_error"]);
    for (d, s) in subsets.iter().enumerate() {
        table.push(vec![
            d.to_string(),
            s.to_string(),
            format_number(cur_error_nuclear(&m, s)?),
        ]);
    }
    finish(&table, opts)
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn verify(opts: &Options) -> Result<u8> {
    // size is limited by the enumeration cap rather than by n itself
    let m = load_matrix(opts)?;
    let k = k_range(opts)?;
    check_below_n(k, m.n())?;
    let sums = invariant_sums(&m, m.n())?;
    let mut table = Table::new(&[
        "k",
        "enumerated",
        "formula",
        "rel_err",
        "normalizer",
        "e_k",
        "normalizer_rel_err",
    ]);
    let mut ok = true;
    for j in k.iter() {
        let brute = sampling::expected_error_bruteforce_capped(&m, j, DEFAULT_ENUMERATION_CAP)?;
        let formula = expected_error_exact(m.spectrum(), j)?;
        let normalizer = enumerate_distribution(&m, j)?.normalizer;
        let (e1, e2) = (rel_err(brute, formula), rel_err(normalizer, sums[j]));
        ok &= e1 < VERIFY_TOLERANCE && e2 < VERIFY_TOLERANCE;
        table.push(vec![
            j.to_string(),
            format_number(brute),
            format_number(formula),
            format_number(e1),
            format_number(normalizer),
            format_number(sums[j]),
            format_number(e2),
        ]);
    }
    finish(&table, opts)?;
    if !ok {
        eprintln!("verify: relative error above {VERIFY_TOLERANCE:e}");
        return Ok(2);
    }
    Ok(0)
}

fn figure(opts: &Options) -> Result<u8> {
    let lambda = load_source(opts)?;
    let mu = load_majorant(opts, true)?.expect("required");
    let k = k_range(opts)?;
    let mut table = Table::new(&FigureRow::CSV_HEADER);
    for row in figure_rows(&lambda, &mu, k.iter())? {
        table.push(row.csv_fields());
    }
    finish(&table, opts)
}
