//! WebAssembly bindings for the browser demo. Every entry point takes plain
//! values or a JSON spec and returns a JSON string.

use framecast::cli::{self, Context, DsOptions, FusionOptions, SweepOptions};
use framecast::dynsamp::{GammaVariant, GeometricFamily};
use framecast::DEFAULT_TOL;
use wasm_bindgen::prelude::*;

fn context(input: &str, invocation: &str) -> Context {
    Context {
        invocation: invocation.into(),
        input_digest: cli::digest(input.as_bytes()),
        tol: DEFAULT_TOL,
        seed: 0,
    }
}

fn js(e: framecast::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows of the geometric kernel sweep `a = (1, τ, τ²)` over a τ grid.
pub fn sweep_json(tau_from: f64, tau_to: f64, tau_step: f64) -> framecast::Result<String> {
    let opts = SweepOptions {
        tau_from,
        tau_to,
        tau_step,
        family: GeometricFamily::default(),
    };
    let rows = cli::sweep_rows(&opts, DEFAULT_TOL)?;
    Ok(serde_json::to_string(&rows).expect("rows are finite"))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> framecast::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| framecast::Error::InvalidInput(format!("{what}: {e}")))
}

/// Leakage check for a kernel given as `offset` and comma-separated taps,
/// sampled at the comma-separated window positions `omega`.
pub fn ds_json(
    offset: i64,
    taps: &str,
    window_len: usize,
    omega: &str,
    iterations: usize,
    l1: bool,
) -> framecast::Result<String> {
    let coeffs: Vec<f64> = parse_list(taps, "kernel taps")?;
    let omega: Vec<usize> = parse_list(omega, "sampling set")?;
    let spec = serde_json::json!({
        "kind": "ds",
        "kernel": {"offset": offset, "coeffs": coeffs},
        "window_len": window_len,
        "omega": omega,
        "iterations": iterations,
        "convention": "disjoint",
    })
    .to_string();
    let opts = DsOptions {
        gamma_variant: if l1 { GammaVariant::L1 } else { GammaVariant::L2 },
        ..DsOptions::default()
    };
    let parsed = cli::parse_spec(&spec)?;
    Ok(cli::run_ds(&context(&spec, "ds"), &parsed, &opts)?.to_json())
}

/// Fusion report, including the disjointified family, for coordinate
/// intervals `[start, end)` on `dim` coordinates.
pub fn intervals_json(dim: usize, intervals: &[u32]) -> framecast::Result<String> {
    if !intervals.len().is_multiple_of(2) {
        return Err(framecast::Error::InvalidInput("intervals come in start/end pairs".into()));
    }
    let subsets: Vec<Vec<usize>> = intervals
        .chunks(2)
        .map(|p| (p[0] as usize..p[1] as usize).collect())
        .collect();
    let spec = serde_json::json!({"kind": "projectors", "dim": dim, "subsets": subsets}).to_string();
    let parsed = cli::parse_spec(&spec)?;
    let opts = FusionOptions { band: None, emit_q: true };
    Ok(cli::run_fusion(&context(&spec, "fusion"), &parsed, &opts)?.to_json())
}

#[wasm_bindgen]
pub fn sweep(tau_from: f64, tau_to: f64, tau_step: f64) -> Result<String, JsError> {
    sweep_json(tau_from, tau_to, tau_step).map_err(js)
}

#[wasm_bindgen]
pub fn ds_check(
    offset: i32,
    taps: &str,
    window_len: usize,
    omega: &str,
    iterations: usize,
    l1: bool,
) -> Result<String, JsError> {
    ds_json(offset.into(), taps, window_len, omega, iterations, l1).map_err(js)
}

#[wasm_bindgen]
pub fn interval_fusion(dim: usize, intervals: &[u32]) -> Result<String, JsError> {
    intervals_json(dim, intervals).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;
    use framecast::cli::{Report, ReportBody};

    #[test]
    fn sweep_has_one_row_per_step() {
        let rows: serde_json::Value = serde_json::from_str(&sweep_json(0.1, 0.3, 0.1).unwrap()).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 3);
    }

    #[test]
    fn impulse_kernel_is_certified() {
        let r = Report::from_json(&ds_json(0, "1", 3, "0, 1, 2", 1, false).unwrap()).unwrap();
        assert_eq!(r.outcome, framecast::cli::Outcome::Pass);
    }

    #[test]
    fn sparse_sampling_of_an_impulse_is_not_a_frame() {
        let r = Report::from_json(&ds_json(0, "1", 3, "0, 2", 1, false).unwrap()).unwrap();
        assert_eq!(r.outcome, framecast::cli::Outcome::Fail);
    }

    #[test]
    fn bad_taps_are_reported() {
        assert!(ds_json(0, "1, x", 3, "0", 1, false).is_err());
    }

    #[test]
    fn overlapping_intervals_disjointify() {
        let r = Report::from_json(&intervals_json(6, &[0, 3, 2, 6]).unwrap()).unwrap();
        let ReportBody::Fusion(f) = r.body else { panic!() };
        assert_eq!((f.bounds.lower.value, f.bounds.upper.value), (1.0, 2.0));
        assert_eq!(f.q_family.unwrap().matrices.len(), 2);
    }
}
