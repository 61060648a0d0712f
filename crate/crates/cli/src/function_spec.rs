//! Built-in function catalog.
//!
//! | spec | meaning |
//! |---|---|
//! | `hermite:i1,...,id` | h_α, exact expansion |
//! | `gaussian:a[,d]` | e^{−a\|x\|²} on ℝ^d (d defaults to 1) |
//! | `rational:cauchy` | 1/(1+x²) on ℝ |
//! | `table:<path>` | piecewise-linear interpolation of `x value` rows, zero outside |
//! | `zero[:d]` | the zero function |
//! | `random:d,N` | seeded random complex expansion, coefficients in [−1,1)² |
//! | `<path>.hexp` | an expansion file |

use std::path::Path;

use hermitex::{analyze, Complex, Expansion, Function, MultiIndex, SampledFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::expansion_file::ExpansionFile;

#[derive(Clone, Debug)]
pub enum Input {
    /// Known by its coefficients.
    Exact(Expansion),
    /// Known by point evaluation.
    Sampled(Function),
}

impl Input {
    pub fn dim(&self) -> usize {
        match self {
            Input::Exact(e) => e.dim(),
            Input::Sampled(f) => f.dim(),
        }
    }

    pub fn sampled(&self) -> Function {
        match self {
            Input::Exact(e) => SampledFunction::from_expansion(e),
            Input::Sampled(f) => f.clone(),
        }
    }

    /// Exact inputs are resized to `degree`; sampled ones are analyzed.
    pub fn expansion(&self, degree: usize, n_quad: usize) -> Result<Expansion, CliError> {
        match self {
            Input::Exact(e) => Ok(e.with_degree(degree)),
            Input::Sampled(f) => Ok(analyze(f, degree, n_quad)?),
        }
    }

    /// The stored degree of an exact input.
    pub fn native_degree(&self) -> Option<usize> {
        match self {
            Input::Exact(e) => Some(e.degree()),
            Input::Sampled(_) => None,
        }
    }
}

fn unknown(spec: &str) -> CliError {
    CliError::UnknownFunctionSpec(spec.to_string())
}

fn numbers<N: std::str::FromStr>(spec: &str, body: &str) -> Result<Vec<N>, CliError> {
    body.split(',').map(|t| t.trim().parse().map_err(|_| unknown(spec))).collect()
}

/// Resolves `spec`. `seed` drives `random:` specs; `slot` separates several
/// random inputs of one command.
pub fn parse_spec(spec: &str, seed: u64, slot: u64) -> Result<Input, CliError> {
    if spec.ends_with(".hexp") {
        return Ok(Input::Exact(ExpansionFile::read(Path::new(spec))?.expansion));
    }
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "hermite" => {
            let alpha: Vec<u32> = numbers(spec, body)?;
            if alpha.is_empty() {
                return Err(unknown(spec));
            }
            hermitex::hermite::check_degree(alpha.iter().map(|&a| a as usize).sum())?;
            Ok(Input::Exact(Expansion::basis(&MultiIndex::new(alpha))))
        }
        "gaussian" => {
            let v: Vec<f64> = numbers(spec, body)?;
            let (a, dim) = match v.as_slice() {
                [a] => (*a, 1),
                [a, d] if d.fract() == 0.0 && *d >= 1.0 => (*a, *d as usize),
                _ => return Err(unknown(spec)),
            };
            if !(a > 0.0 && a.is_finite()) {
                return Err(hermitex::Error::InvalidInput(format!("gaussian rate must be positive, got {a}")).into());
            }
            Ok(Input::Sampled(SampledFunction::gaussian(a, dim)))
        }
        "rational" if body == "cauchy" => Ok(Input::Sampled(SampledFunction::real(1, |x| 1.0 / (1.0 + x[0] * x[0])))),
        "table" if !body.is_empty() => table(Path::new(body)),
        "zero" => {
            let dim = if body.is_empty() { 1 } else { body.parse().map_err(|_| unknown(spec))? };
            if dim == 0 {
                return Err(unknown(spec));
            }
            Ok(Input::Exact(Expansion::zeros(dim, 0)))
        }
        "random" => {
            let v: Vec<usize> = numbers(spec, body)?;
            let [dim, degree] = v.as_slice() else { return Err(unknown(spec)) };
            if *dim == 0 {
                return Err(unknown(spec));
            }
            hermitex::hermite::check_degree(*degree)?;
            Ok(Input::Exact(random_expansion(seed.wrapping_add(slot), *dim, *degree)))
        }
        _ => Err(unknown(spec)),
    }
}

/// Coefficients uniform in [−1,1) + i[−1,1), drawn in graded order.
pub fn random_expansion(seed: u64, dim: usize, degree: usize) -> Expansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Expansion::from_fn(dim, degree, |_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn table(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = || CliError::Parse { line: i + 1, message: format!("expected `x value`, found `{t}`") };
        let mut parts = t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
        let (Some(x), Some(v), None) = (parts.next(), parts.next(), parts.next()) else { return Err(bad()) };
        let (x, v) = (x.parse::<f64>().map_err(|_| bad())?, v.parse::<f64>().map_err(|_| bad())?);
        if let Some(&(prev, _)) = rows.last() {
            if x <= prev {
                return Err(CliError::Parse { line: i + 1, message: "abscissae must increase".into() });
            }
        }
        rows.push((x, v));
    }
    if rows.len() < 2 {
        return Err(CliError::Parse { line: 1, message: "a table needs at least two rows".into() });
    }
    Ok(Input::Sampled(SampledFunction::real(1, move |x| interpolate(&rows, x[0]))))
}

fn interpolate(rows: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (rows[0].0, rows[rows.len() - 1].0);
    if !(first..=last).contains(&x) {
        return 0.0;
    }
    let k = rows.partition_point(|&(xi, _)| xi <= x).clamp(1, rows.len() - 1);
    let ((x0, y0), (x1, y1)) = (rows[k - 1], rows[k]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
