//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The numerical work lives in [`demo`] so it can be exercised natively; the
//! exported functions only convert errors into JavaScript exceptions.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: demo::DemoError) -> JsError {
    JsError::new(&e.to_string())
}

/// Eigenvalues `lambda_1..lambda_count`.
#[wasm_bindgen]
pub fn spectrum(alpha: f64, count: usize) -> Result<Vec<f64>, JsError> {
    demo::spectrum(alpha, count).map_err(js)
}

/// `modes` eigenfunctions on `samples` equispaced points of `[0, 1]`, row-major by mode.
#[wasm_bindgen]
pub fn eigenfunctions(alpha: f64, modes: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    demo::eigenfunctions(alpha, modes, samples).map_err(js)
}

/// `|b_1k| lambda_k^{3/2}` for `k = 2..=count`, the scaled first row of the control operator.
#[wasm_bindgen]
pub fn scaled_first_row(alpha: f64, count: usize) -> Result<Vec<f64>, JsError> {
    demo::scaled_first_row(alpha, count).map_err(js)
}

/// Window-controlled and uncontrolled decay from `phi_1 + eps phi_2`.
#[wasm_bindgen]
pub fn stabilize(alpha: f64, modes: usize, windows: usize, window_length: f64, eps: f64) -> Result<Curves, JsError> {
    demo::stabilize(alpha, modes, windows, window_length, eps).map_err(js)
}

/// Sampled decay curves returned by [`stabilize`].
#[wasm_bindgen]
pub struct Curves {
    times: Vec<f64>,
    shifted: Vec<f64>,
    baseline: Vec<f64>,
    log_reductions: Vec<f64>,
}

#[wasm_bindgen]
impl Curves {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    /// `e^{lambda_1 t} ||u - psi_1||` under the window controls.
    #[wasm_bindgen(getter)]
    pub fn shifted(&self) -> Vec<f64> {
        self.shifted.clone()
    }

    /// Same quantity with the control switched off.
    #[wasm_bindgen(getter)]
    pub fn baseline(&self) -> Vec<f64> {
        self.baseline.clone()
    }

    /// `-ln` of the shifted error ratio across each window.
    #[wasm_bindgen(getter)]
    pub fn log_reductions(&self) -> Vec<f64> {
        self.log_reductions.clone()
    }
}
