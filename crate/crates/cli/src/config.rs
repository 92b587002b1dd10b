//! Scenario configuration: CLI flags with an optional flat key=value config
//! file underneath (flags override file values, file values override
//! defaults).

use std::collections::HashMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::scenarios::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Qubit depolarizing channel with rate e^{−t} cos t (purity flow)
    Depolarize,
    /// Born–Markov qubit relaxing to its Gibbs state (EPR, free energy)
    ThermalQubit,
    /// Central spin in a bosonized spin bath (GEPR, drifting Hamiltonian)
    Spinbath,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Depolarize => "depolarize",
            Model::ThermalQubit => "thermal-qubit",
            Model::Spinbath => "spinbath",
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Which model to simulate
    #[arg(value_enum)]
    pub model: Model,

    /// Flat key=value config file; flags given on the command line override it
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Final time of the run (default: 3 for depolarize, 10 otherwise)
    #[arg(long)]
    pub tmax: Option<f64>,

    /// Grid spacing and integrator step
    #[arg(long)]
    pub step: Option<f64>,

    /// Output CSV path (default: <model>.csv)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// JSON sidecar path (default: CSV path with .json extension)
    #[arg(long)]
    pub sidecar: Option<PathBuf>,

    /// Also dump the state trajectory (t plus Re/Im of every matrix entry)
    #[arg(long)]
    pub states_out: Option<PathBuf>,

    /// Seed echoed into the sidecar (reserved for randomized scenarios)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Inverse temperature β of the reference thermal context
    #[arg(long)]
    pub beta: Option<f64>,

    /// Relaxation scale γ of the thermal qubit
    #[arg(long)]
    pub gamma: Option<f64>,

    /// System level splitting ω₀
    #[arg(long)]
    pub omega0: Option<f64>,

    /// Bath level splitting ω (spinbath)
    #[arg(long)]
    pub omega: Option<f64>,

    /// System–bath coupling α (spinbath)
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Number of bath spins N (spinbath)
    #[arg(long = "N", visible_alias = "bath-spins")]
    pub bath_spins: Option<usize>,

    /// Bath temperature T (spinbath)
    #[arg(long = "T", visible_alias = "bath-temp")]
    pub bath_temp: Option<f64>,

    /// Initial excited-state population ρ11(0)
    #[arg(long)]
    pub rho11: Option<f64>,

    /// Initial coherence Re ρ12(0)
    #[arg(long)]
    pub re_rho12: Option<f64>,

    /// Initial coherence Im ρ12(0)
    #[arg(long)]
    pub im_rho12: Option<f64>,
}

/// Fully resolved scenario configuration.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub model: Model,
    pub t_max: f64,
    pub step: f64,
    pub out: PathBuf,
    pub sidecar: PathBuf,
    pub states_out: Option<PathBuf>,
    pub seed: u64,
    pub beta: f64,
    pub gamma: f64,
    pub omega0: f64,
    pub omega: f64,
    pub alpha: f64,
    pub bath_spins: usize,
    pub bath_temp: f64,
    pub rho11: f64,
    pub re_rho12: f64,
    pub im_rho12: f64,
}

fn parse_file(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {} is not key=value: {raw:?}",
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn take<T: std::str::FromStr>(
    map: &mut HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.remove(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config key {key} has invalid value {raw:?}"))),
    }
}

impl RunArgs {
    pub fn resolve(self) -> Result<ScenarioConfig, CliError> {
        let mut file = match &self.config {
            Some(path) => parse_file(path)?,
            None => HashMap::new(),
        };
        let t_max_file: Option<f64> = take(&mut file, "tmax")?;
        let step_file: Option<f64> = take(&mut file, "step")?;
        let out_file: Option<String> = take(&mut file, "out")?;
        let sidecar_file: Option<String> = take(&mut file, "sidecar")?;
        let states_out_file: Option<String> = take(&mut file, "states_out")?;
        let seed_file: Option<u64> = take(&mut file, "seed")?;
        let beta_file: Option<f64> = take(&mut file, "beta")?;
        let gamma_file: Option<f64> = take(&mut file, "gamma")?;
        let omega0_file: Option<f64> = take(&mut file, "omega0")?;
        let omega_file: Option<f64> = take(&mut file, "omega")?;
        let alpha_file: Option<f64> = take(&mut file, "alpha")?;
        let n_file: Option<usize> = take(&mut file, "N")?;
        let t_file: Option<f64> = take(&mut file, "T")?;
        let rho11_file: Option<f64> = take(&mut file, "rho11")?;
        let re12_file: Option<f64> = take(&mut file, "re_rho12")?;
        let im12_file: Option<f64> = take(&mut file, "im_rho12")?;
        if let Some(key) = file.keys().next() {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }

        let model = self.model;
        let default_tmax = match model {
            Model::Depolarize => 3.0,
            _ => 10.0,
        };
        let default_rho11 = match model {
            Model::ThermalQubit => 1.0,
            Model::Spinbath => 0.75,
            Model::Depolarize => 0.0,
        };
        let default_re12 = match model {
            Model::Spinbath => 0.25,
            _ => 0.0,
        };
        let t_max = self.tmax.or(t_max_file).unwrap_or(default_tmax);
        let step = self.step.or(step_file).unwrap_or(1e-3);
        if t_max <= 0.0 || step <= 0.0 {
            return Err(CliError::Usage("tmax and step must be positive".into()));
        }
        let out = self
            .out
            .or(out_file.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", model.label())));
        let sidecar = self
            .sidecar
            .or(sidecar_file.map(PathBuf::from))
            .unwrap_or_else(|| out.with_extension("json"));
        let states_out = self.states_out.or(states_out_file.map(PathBuf::from));
        Ok(ScenarioConfig {
            model,
            t_max,
            step,
            out,
            sidecar,
            states_out,
            seed: self.seed.or(seed_file).unwrap_or(7),
            beta: self.beta.or(beta_file).unwrap_or(1.0),
            gamma: self.gamma.or(gamma_file).unwrap_or(1.0),
            omega0: self.omega0.or(omega0_file).unwrap_or(1.0),
            omega: self.omega.or(omega_file).unwrap_or(1.0),
            alpha: self.alpha.or(alpha_file).unwrap_or(0.1),
            bath_spins: self.bath_spins.or(n_file).unwrap_or(10),
            bath_temp: self.bath_temp.or(t_file).unwrap_or(1.0),
            rho11: self.rho11.or(rho11_file).unwrap_or(default_rho11),
            re_rho12: self.re_rho12.or(re12_file).unwrap_or(default_re12),
            im_rho12: self.im_rho12.or(im12_file).unwrap_or(0.0),
        })
    }
}

impl ScenarioConfig {
    /// Configuration echo for the JSON sidecar.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model.label(),
            "tmax": self.t_max,
            "step": self.step,
            "seed": self.seed,
            "beta": self.beta,
            "gamma": self.gamma,
            "omega0": self.omega0,
            "omega": self.omega,
            "alpha": self.alpha,
            "N": self.bath_spins,
            "T": self.bath_temp,
            "rho11": self.rho11,
            "re_rho12": self.re_rho12,
            "im_rho12": self.im_rho12,
        })
    }
}
