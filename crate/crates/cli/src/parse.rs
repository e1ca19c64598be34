//! Flag-value parsers: comma lists, start:stop:step grids, and the
//! name:args specs for families, samplers, and densities.

use orbint::convergence::SpectrumSequence;
use orbint::sampling::SamplerVariant;
use orbint::tp::TabulatedDensity;
use orbint::Spectrum;

use crate::CliError;

pub fn parse_float_list(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("bad number {tok:?} in list")))
        })
        .collect()
}

pub fn parse_size_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Invalid(format!("bad size {tok:?} in list")))
        })
        .collect()
}

/// Grid spec `start:stop:step`, inclusive of the endpoint up to roundoff.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Invalid(format!("grid must be start:stop:step, got {text:?}")));
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Invalid(format!("bad grid start {:?}", parts[0])))?;
    let stop: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Invalid(format!("bad grid stop {:?}", parts[1])))?;
    let step: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Invalid(format!("bad grid step {:?}", parts[2])))?;
    if !(step > 0.0) || stop < start {
        return Err(CliError::Invalid(format!("grid {text:?} is empty or descending")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(CliError::Invalid(format!("grid {text:?} has too many points")));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn split_spec(text: &str) -> Result<(&str, &str), CliError> {
    text.split_once(':')
        .ok_or_else(|| CliError::Invalid(format!("expected name:args, got {text:?}")))
}

/// Family spec: `linear:x1,...` `gaussian:g` `wishart:y,frac` `explicit:FILE`.
pub fn parse_family(text: &str) -> Result<SpectrumSequence, CliError> {
    let (name, rest) = split_spec(text)?;
    match name {
        "linear" => {
            let coeffs = parse_float_list(rest)?;
            if coeffs.is_empty() {
                return Err(CliError::Invalid("linear family needs coefficients".into()));
            }
            Ok(SpectrumSequence::linear(&coeffs))
        }
        "gaussian" => {
            let gamma: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad gaussian parameter {rest:?}")))?;
            if gamma < 0.0 {
                return Err(CliError::Invalid("gaussian family needs gamma >= 0".into()));
            }
            Ok(SpectrumSequence::gaussian(gamma))
        }
        "wishart" => {
            let args = parse_float_list(rest)?;
            if args.len() != 2 || !(args[1] > 0.0) {
                return Err(CliError::Invalid(
                    "wishart family takes y,rank_fraction with a positive fraction".into(),
                ));
            }
            Ok(SpectrumSequence::wishart(args[0], args[1]))
        }
        "explicit" => {
            let contents = std::fs::read_to_string(rest.trim())
                .map_err(|e| CliError::Invalid(format!("cannot read manifest {rest:?}: {e}")))?;
            SpectrumSequence::from_manifest(&contents)
                .map_err(|e| CliError::Invalid(format!("manifest: {e}")))
        }
        _ => Err(CliError::Invalid(format!("unknown family {name:?}"))),
    }
}

pub enum SamplerKind {
    Matrix(SamplerVariant),
    Dirichlet { theta: f64, t_values: Vec<f64> },
}

/// Sampler spec: `orbital:l1,...` `gaussian:g` `rank-one:y` `dirac:g`
/// `finite-rank:z:x1,...` `dirichlet:theta:t1,...`.
pub fn parse_sampler(text: &str) -> Result<SamplerKind, CliError> {
    let (name, rest) = split_spec(text)?;
    match name {
        "orbital" => {
            let eigen = parse_float_list(rest)?;
            let spectrum = Spectrum::new(eigen)
                .map_err(|e| CliError::Invalid(format!("orbital sampler: {e}")))?;
            Ok(SamplerKind::Matrix(SamplerVariant::Orbital(spectrum)))
        }
        "gaussian" => {
            let gamma: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad gaussian parameter {rest:?}")))?;
            Ok(SamplerKind::Matrix(SamplerVariant::Gaussian(gamma)))
        }
        "rank-one" => {
            let y: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad rank-one parameter {rest:?}")))?;
            Ok(SamplerKind::Matrix(SamplerVariant::RankOne(y)))
        }
        "dirac" => {
            let gamma: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad dirac parameter {rest:?}")))?;
            Ok(SamplerKind::Matrix(SamplerVariant::Dirac(gamma)))
        }
        "finite-rank" => {
            let (shift_text, weights_text) = split_spec(rest)?;
            let shift: f64 = shift_text
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad finite-rank shift {shift_text:?}")))?;
            let weights = parse_float_list(weights_text)?;
            if weights.is_empty() {
                return Err(CliError::Invalid("finite-rank sampler needs weights".into()));
            }
            Ok(SamplerKind::Matrix(SamplerVariant::FiniteRank { shift, weights }))
        }
        "dirichlet" => {
            let (theta_text, values_text) = split_spec(rest)?;
            let theta: f64 = theta_text
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad dirichlet theta {theta_text:?}")))?;
            let t_values = parse_float_list(values_text)?;
            Ok(SamplerKind::Dirichlet { theta, t_values })
        }
        _ => Err(CliError::Invalid(format!("unknown sampler {name:?}"))),
    }
}

/// Density spec: `normal:g` `exponential:y` `normal-exp:g:y`
/// `exp-pair:y1:y2` `bimodal:g:sep` `csv:FILE`.
pub fn parse_density(text: &str) -> Result<TabulatedDensity, CliError> {
    let (name, rest) = split_spec(text)?;
    let two = |rest: &str| -> Result<(f64, f64), CliError> {
        let (a, b) = split_spec(rest)?;
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("bad density parameter {a:?}")))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("bad density parameter {b:?}")))?;
        Ok((a, b))
    };
    let built = match name {
        "normal" => {
            let gamma: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad normal parameter {rest:?}")))?;
            TabulatedDensity::normal(gamma)
        }
        "exponential" => {
            let y: f64 = rest
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad exponential parameter {rest:?}")))?;
            TabulatedDensity::exponential(y)
        }
        "normal-exp" => {
            let (gamma, y) = two(rest)?;
            TabulatedDensity::normal_exponential(gamma, y)
        }
        "exp-pair" => {
            let (y1, y2) = two(rest)?;
            TabulatedDensity::exponential_pair(y1, y2)
        }
        "bimodal" => {
            let (gamma, sep) = two(rest)?;
            TabulatedDensity::bimodal(gamma, sep)
        }
        "csv" => {
            let contents = std::fs::read_to_string(rest.trim())
                .map_err(|e| CliError::Invalid(format!("cannot read density {rest:?}: {e}")))?;
            TabulatedDensity::from_csv(&contents)
        }
        _ => return Err(CliError::Invalid(format!("unknown density {name:?}"))),
    };
    built.map_err(|e| CliError::Invalid(format!("density: {e}")))
}
