//! Shared fixtures and cached profiles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use gpvortex::kwong::{self, KwongProfile, RadialProfile};
use gpvortex::linops::{self, PsiSet};
use gpvortex::GridSpec;
use serde::Deserialize;

pub const N: usize = 256;
pub const L: f64 = 16.0;

pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os("GPVORTEX_FIXTURES") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

#[derive(Debug, Deserialize)]
pub struct Isotropic {
    pub lambda0_4: f64,
    pub c_star: f64,
    pub c_star_mass_consistent: f64,
    pub int_psi1_sq: f64,
}

/// Values from the independent scipy shooting oracle.
#[derive(Debug, Deserialize)]
pub struct Oracle {
    pub w0: f64,
    pub a_star: f64,
    pub grad_sq: f64,
    pub half_quartic: f64,
    pub second_moment_x1: f64,
    pub tail_amplitude: f64,
    pub isotropic: Isotropic,
}

pub fn oracle() -> &'static Oracle {
    static O: OnceLock<Oracle> = OnceLock::new();
    O.get_or_init(|| {
        let text = std::fs::read_to_string(fixtures_dir().join("oracle.json")).expect("oracle.json");
        serde_json::from_str(&text).expect("oracle.json parses")
    })
}

/// Frozen constants of this stack at n = 256, L = 16.
pub fn constants() -> &'static serde_json::Value {
    static C: OnceLock<serde_json::Value> = OnceLock::new();
    C.get_or_init(|| {
        let text = std::fs::read_to_string(fixtures_dir().join("constants.json")).expect("constants.json");
        serde_json::from_str(&text).expect("constants.json parses")
    })
}

pub fn frozen(path: &[&str]) -> f64 {
    let mut v = constants();
    for p in path {
        v = &v[*p];
    }
    v.as_f64().unwrap_or_else(|| panic!("missing frozen value {path:?}"))
}

pub fn radial() -> &'static RadialProfile {
    static R: OnceLock<RadialProfile> = OnceLock::new();
    R.get_or_init(|| kwong::solve_kwong_radial(1e-12).expect("radial profile"))
}

type ProfileCache = Mutex<HashMap<(usize, u64), Arc<KwongProfile>>>;

pub fn profile(n: usize, l: f64) -> Arc<KwongProfile> {
    static P: OnceLock<ProfileCache> = OnceLock::new();
    let map = P.get_or_init(Default::default);
    let mut m = map.lock().unwrap();
    m.entry((n, l.to_bits()))
        .or_insert_with(|| {
            let g = GridSpec::square(n, l).unwrap();
            Arc::new(kwong::kwong_on_grid(radial(), g).expect("profile on grid"))
        })
        .clone()
}

pub fn default_profile() -> Arc<KwongProfile> {
    profile(N, L)
}

pub fn psi_set(lambda: f64) -> Arc<PsiSet> {
    static S: OnceLock<Mutex<HashMap<u64, Arc<PsiSet>>>> = OnceLock::new();
    let kp = default_profile();
    let map = S.get_or_init(Default::default);
    let mut m = map.lock().unwrap();
    m.entry(lambda.to_bits()).or_insert_with(|| Arc::new(linops::build_psi_set(lambda, &kp).expect("psi set"))).clone()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
