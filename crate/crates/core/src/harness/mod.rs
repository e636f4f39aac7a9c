//! Monte Carlo experiment orchestration: configuration, reproducible
//! counter-based randomness, trial-level parallelism, and aggregation.
//!
//! Reproducibility contract: every trial derives its own ChaCha stream from
//! the master seed and the (grid index, trial index) pair, and aggregation
//! folds chunk partials in a fixed order, so results are byte-identical
//! across runs and across worker counts.

pub mod output;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GaussianInt;
use crate::numerics::{CMat, CVec, ChannelRealization, EigenSystem};
use crate::precoding::{
    assemble, conventional_offset, eh_ideal_precode_with, eh_offset, precoder_r_factor,
    swipt_offset, Constellation, Scheme,
};
use crate::transceiver::{apply_channel, detect, draw_noise, harvested_power, modulo_receive,
    TrialOutcome};

/// Fixed aggregation block size. Chunk partials are computed independently
/// and folded in chunk order, which keeps sums identical for any worker
/// count.
const CHUNK: u64 = 256;

/// Simulation configuration. Loadable from JSON (all fields optional, with
/// the defaults below) and overridable from the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Transmit antennas at the access point.
    pub m: usize,
    /// Single-antenna users.
    pub k: usize,
    /// Square QAM order (4, 16, 64, ...).
    pub modulation: u32,
    /// Modulo base; `None` derives `2 (sqrt(N) - 1) + 2` from the modulation.
    pub tau: Option<f64>,
    /// Noise power per user.
    pub sigma2: f64,
    /// Transmit power grid in dB (strictly increasing).
    pub p_grid_db: Vec<f64>,
    /// VP-SWIPT blend parameter used by power sweeps.
    pub eta: f64,
    /// Grid for eta sweeps; `None` means 21 evenly spaced points on [0, 1].
    pub eta_grid: Option<Vec<f64>>,
    /// Schemes evaluated on the same paired draws.
    pub schemes: Vec<Scheme>,
    /// Monte Carlo trials per grid point.
    pub trials: u64,
    /// Master seed for the counter-based per-trial streams.
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            m: 2,
            k: 2,
            modulation: 4,
            tau: None,
            sigma2: 1.0,
            p_grid_db: (0..=8).map(|i| 5.0 * i as f64).collect(),
            eta: 0.8,
            eta_grid: None,
            schemes: Scheme::ALL.to_vec(),
            trials: 100_000,
            seed: 1,
            workers: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m {
            return Err(Error::InvalidConfig(format!(
                "require 1 <= K <= M, got K = {}, M = {}",
                self.k, self.m
            )));
        }
        Constellation::new(self.modulation)?;
        if let Some(tau) = self.tau {
            if !(tau > 0.0) {
                return Err(Error::InvalidConfig(format!("tau must be positive, got {tau}")));
            }
        }
        if !(self.sigma2 >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma2 must be non-negative, got {}",
                self.sigma2
            )));
        }
        if self.p_grid_db.is_empty() {
            return Err(Error::InvalidConfig("power grid must be non-empty".into()));
        }
        if self.p_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "power grid must be strictly increasing".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidConfig(format!(
                "eta must lie in [0, 1], got {}",
                self.eta
            )));
        }
        if let Some(grid) = &self.eta_grid {
            if grid.is_empty()
                || grid.iter().any(|e| !(0.0..=1.0).contains(e))
                || grid.windows(2).any(|w| w[1] <= w[0])
            {
                return Err(Error::InvalidConfig(
                    "eta grid must be non-empty, increasing, within [0, 1]".into(),
                ));
            }
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("scheme set must be non-empty".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::InvalidConfig(format!("duplicate scheme '{s}'")));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::new(self.modulation)
    }

    /// Modulo base, either explicit or derived from the modulation.
    pub fn resolve_tau(&self, cons: &Constellation) -> f64 {
        self.tau.unwrap_or_else(|| cons.tau())
    }

    pub fn worker_count(&self) -> usize {
        self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
    }

    /// Eta grid for [`run_eta_sweep`]: explicit, or 21 points on [0, 1].
    pub fn resolve_eta_grid(&self) -> Vec<f64> {
        self.eta_grid
            .clone()
            .unwrap_or_else(|| (0..21).map(|i| i as f64 / 20.0).collect())
    }
}

/// Sweep axis: transmit power in dB or the VP-SWIPT blend parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "P_dB")]
    PowerDb,
    #[serde(rename = "eta")]
    Eta,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::PowerDb => "P_dB",
            SweepAxis::Eta => "eta",
        }
    }
}

/// Aggregated statistics for one (scheme, axis value) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub scheme: Scheme,
    pub axis_value: f64,
    /// Trials attempted (equals the configured count).
    pub trials: u64,
    /// Trials excluded because the precoder or channel draw failed.
    pub precoder_errors: u64,
    /// Mean symbol error rate; absent for the data-free EH-ideal beacon.
    pub ser_mean: Option<f64>,
    /// 95% normal-approximation half-width for the SER.
    pub ser_ci95: Option<f64>,
    /// Mean per-user harvested power (linear).
    pub q_mean_linear: f64,
    /// Mean per-user harvested power in dB.
    pub q_mean_db: f64,
    /// 95% half-width for the harvested-power mean (linear).
    pub q_ci95_linear: f64,
}

/// Full sweep output: config echo, per-cell statistics, and metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SimConfig,
    pub axis: SweepAxis,
    pub cells: Vec<SweepCell>,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl SweepResult {
    /// Cell lookup by scheme and axis value.
    pub fn cell(&self, scheme: Scheme, axis_value: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.scheme == scheme && (c.axis_value - axis_value).abs() < 1e-12)
    }
}

/// ChaCha stream for one trial, derived from the master seed and the
/// (grid index, trial index) counter; workers never share a stream.
pub fn trial_rng(seed: u64, grid_idx: u64, trials: u64, trial_idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(grid_idx * trials + trial_idx + 1);
    rng
}

// Everything one trial shares across schemes (and across eta values in an
// eta sweep): the paired draws plus the scheme-independent precoder pieces.
struct TrialEnv {
    chan: ChannelRealization,
    u: CVec,
    noise: CVec,
    rf: CMat,
    eig: Option<EigenSystem>,
    l0: Option<Vec<GaussianInt>>,
    l_eh: Option<Vec<GaussianInt>>,
}

fn needs_eig(schemes: &[Scheme]) -> bool {
    schemes
        .iter()
        .any(|s| matches!(s, Scheme::VpEh | Scheme::VpSwipt | Scheme::EhIdeal))
}

fn needs_l0(schemes: &[Scheme]) -> bool {
    schemes
        .iter()
        .any(|s| matches!(s, Scheme::Vp | Scheme::VpSwipt))
}

fn needs_l_eh(schemes: &[Scheme]) -> bool {
    schemes
        .iter()
        .any(|s| matches!(s, Scheme::VpEh | Scheme::VpSwipt))
}

fn build_env(
    cfg: &SimConfig,
    cons: &Constellation,
    tau: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialEnv> {
    // fixed draw order: channel, symbols, noise
    let chan = crate::numerics::sample_channel(cfg.k, cfg.m, rng)?;
    let u = cons.random_vector(cfg.k, rng);
    let noise = draw_noise(cfg.k, cfg.sigma2, rng);

    let rf = precoder_r_factor(&chan);
    let eig = if needs_eig(&cfg.schemes) {
        Some(crate::numerics::hermitian_eig(&chan.gram)?)
    } else {
        None
    };
    let l0 = if needs_l0(&cfg.schemes) {
        Some(conventional_offset(&rf, &u, tau)?)
    } else {
        None
    };
    let l_eh = if needs_l_eh(&cfg.schemes) {
        let eig_ref = eig.as_ref().expect("eig computed for VP-EH");
        if eig_ref.lambda_min() <= 0.0 {
            return Err(Error::InvalidInput(
                "Gram matrix not positive definite".into(),
            ));
        }
        Some(eh_offset(&u, &eig_ref.principal_vector(), tau)?)
    } else {
        None
    };
    Ok(TrialEnv {
        chan,
        u,
        noise,
        rf,
        eig,
        l0,
        l_eh,
    })
}

fn eval_scheme(
    env: &TrialEnv,
    scheme: Scheme,
    cons: &Constellation,
    tau: f64,
    p_lin: f64,
    eta: f64,
) -> Result<TrialOutcome> {
    let k = env.u.len();
    let out = match scheme {
        Scheme::Zf => assemble(
            Scheme::Zf,
            &env.chan,
            &env.u,
            vec![GaussianInt::default(); k],
            tau,
            p_lin,
        )?,
        Scheme::Vp => assemble(
            Scheme::Vp,
            &env.chan,
            &env.u,
            env.l0.clone().expect("l0 available"),
            tau,
            p_lin,
        )?,
        Scheme::VpEh => assemble(
            Scheme::VpEh,
            &env.chan,
            &env.u,
            env.l_eh.clone().expect("l_eh available"),
            tau,
            p_lin,
        )?,
        Scheme::VpSwipt => {
            let l_sw = swipt_offset(
                &env.rf,
                env.l0.as_ref().expect("l0 available"),
                env.l_eh.as_ref().expect("l_eh available"),
                tau,
                eta,
            )?;
            assemble(Scheme::VpSwipt, &env.chan, &env.u, l_sw, tau, p_lin)?
        }
        Scheme::EhIdeal => {
            eh_ideal_precode_with(&env.chan, env.eig.as_ref().expect("eig available"), p_lin)?
        }
    };

    let (detected, symbol_errors) = if scheme.carries_data() {
        let y = apply_channel(&out.x, &env.chan, &env.noise);
        let mut detected = Vec::with_capacity(k);
        let mut errors = 0usize;
        for i in 0..k {
            let est = modulo_receive(y[i], out.gamma, out.power, tau);
            let hat = detect(est, cons);
            if hat != env.u[i] {
                errors += 1;
            }
            detected.push(hat);
        }
        (detected, errors)
    } else {
        (Vec::new(), 0)
    };

    // harvest measured from the noiseless signal-power term
    let u_eff = if scheme.carries_data() {
        env.u.clone()
    } else {
        env.eig.as_ref().expect("eig available").principal_vector()
    };
    let (q_total, q_per_user) = harvested_power(&u_eff, &out.l, tau, out.gamma, out.power);

    Ok(TrialOutcome {
        detected,
        symbol_errors,
        q_total,
        q_per_user,
    })
}

/// One pass through the full chain for one scheme on explicit draws:
/// precode, channel plus noise, modulo receive, detect, harvest.
pub fn run_trial(
    cfg: &SimConfig,
    p_db: f64,
    chan: &ChannelRealization,
    u: &CVec,
    scheme: Scheme,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let cons = cfg.constellation()?;
    let tau = cfg.resolve_tau(&cons);
    let noise = draw_noise(cfg.k, cfg.sigma2, rng);
    let rf = precoder_r_factor(chan);
    let eig = if needs_eig(&[scheme]) {
        Some(crate::numerics::hermitian_eig(&chan.gram)?)
    } else {
        None
    };
    let l0 = if needs_l0(&[scheme]) {
        Some(conventional_offset(&rf, u, tau)?)
    } else {
        None
    };
    let l_eh = if needs_l_eh(&[scheme]) {
        let eig_ref = eig.as_ref().expect("eig computed");
        Some(eh_offset(u, &eig_ref.principal_vector(), tau)?)
    } else {
        None
    };
    let env = TrialEnv {
        chan: chan.clone(),
        u: u.clone(),
        noise,
        rf,
        eig,
        l0,
        l_eh,
    };
    eval_scheme(&env, scheme, &cons, tau, db_to_linear(p_db), cfg.eta)
}

/// dB to linear power.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Clone, Copy, Default)]
struct CellAcc {
    ok: u64,
    failed: u64,
    sym_errors: u64,
    q_sum: f64,
    q_sq_sum: f64,
}

impl CellAcc {
    fn push(&mut self, errors: usize, q_bar: f64) {
        self.ok += 1;
        self.sym_errors += errors as u64;
        self.q_sum += q_bar;
        self.q_sq_sum += q_bar * q_bar;
    }

    fn push_failure(&mut self) {
        self.failed += 1;
    }

    fn merge(&mut self, other: &CellAcc) {
        self.ok += other.ok;
        self.failed += other.failed;
        self.sym_errors += other.sym_errors;
        self.q_sum += other.q_sum;
        self.q_sq_sum += other.q_sq_sum;
    }

    fn into_cell(
        self,
        scheme: Scheme,
        axis_value: f64,
        trials: u64,
        k: usize,
    ) -> Result<SweepCell> {
        if self.ok == 0 {
            return Err(Error::NumericalInstability(format!(
                "every trial failed for scheme {scheme} at axis value {axis_value}"
            )));
        }
        let n = self.ok as f64;
        let (ser_mean, ser_ci95) = if scheme.carries_data() {
            let symbols = n * k as f64;
            let p_hat = self.sym_errors as f64 / symbols;
            let ci = 1.96 * (p_hat * (1.0 - p_hat) / symbols).sqrt();
            (Some(p_hat), Some(ci))
        } else {
            (None, None)
        };
        let q_mean = self.q_sum / n;
        let q_var = if self.ok > 1 {
            ((self.q_sq_sum - n * q_mean * q_mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let q_ci = 1.96 * (q_var / n).sqrt();
        Ok(SweepCell {
            scheme,
            axis_value,
            trials,
            precoder_errors: self.failed,
            ser_mean,
            ser_ci95,
            q_mean_linear: q_mean,
            q_mean_db: 10.0 * q_mean.log10(),
            q_ci95_linear: q_ci,
        })
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))
}

/// Monte Carlo sweep over the configured power grid. Within one trial all
/// requested schemes see the same channel, symbols, and noise.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let cons = cfg.constellation()?;
    let tau = cfg.resolve_tau(&cons);
    let pool = build_pool(cfg.worker_count())?;
    let start = Instant::now();
    let n_schemes = cfg.schemes.len();
    let mut cells = Vec::with_capacity(cfg.p_grid_db.len() * n_schemes);

    for (pi, &p_db) in cfg.p_grid_db.iter().enumerate() {
        let p_lin = db_to_linear(p_db);
        let n_chunks = cfg.trials.div_ceil(CHUNK);
        let partials: Vec<Vec<CellAcc>> = pool.install(|| {
            (0..n_chunks)
                .into_par_iter()
                .map(|chunk| {
                    let lo = chunk * CHUNK;
                    let hi = (lo + CHUNK).min(cfg.trials);
                    let mut accs = vec![CellAcc::default(); n_schemes];
                    for t in lo..hi {
                        let mut rng = trial_rng(cfg.seed, pi as u64, cfg.trials, t);
                        match build_env(cfg, &cons, tau, &mut rng) {
                            Ok(env) => {
                                for (si, &scheme) in cfg.schemes.iter().enumerate() {
                                    match eval_scheme(&env, scheme, &cons, tau, p_lin, cfg.eta) {
                                        Ok(outcome) => accs[si].push(
                                            outcome.symbol_errors,
                                            outcome.q_total / cfg.k as f64,
                                        ),
                                        Err(_) => accs[si].push_failure(),
                                    }
                                }
                            }
                            Err(_) => {
                                for acc in accs.iter_mut() {
                                    acc.push_failure();
                                }
                            }
                        }
                    }
                    accs
                })
                .collect()
        });
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let mut total = CellAcc::default();
            for chunk in &partials {
                total.merge(&chunk[si]);
            }
            cells.push(total.into_cell(scheme, p_db, cfg.trials, cfg.k)?);
        }
    }

    Ok(SweepResult {
        config: cfg.clone(),
        axis: SweepAxis::PowerDb,
        cells,
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Sweep over the VP-SWIPT blend parameter at a single fixed power.
/// Non-SWIPT schemes are evaluated once per trial and replicated across the
/// eta grid, so cells at the endpoints coincide exactly with VP / VP-EH.
pub fn run_eta_sweep(cfg: &SimConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if cfg.p_grid_db.len() != 1 {
        return Err(Error::InvalidConfig(format!(
            "eta sweep requires a single power point, got {} grid entries",
            cfg.p_grid_db.len()
        )));
    }
    let cons = cfg.constellation()?;
    let tau = cfg.resolve_tau(&cons);
    let etas = cfg.resolve_eta_grid();
    let p_lin = db_to_linear(cfg.p_grid_db[0]);
    let pool = build_pool(cfg.worker_count())?;
    let start = Instant::now();
    let n_schemes = cfg.schemes.len();
    let n_cells = etas.len() * n_schemes;

    let n_chunks = cfg.trials.div_ceil(CHUNK);
    let partials: Vec<Vec<CellAcc>> = pool.install(|| {
        (0..n_chunks)
            .into_par_iter()
            .map(|chunk| {
                let lo = chunk * CHUNK;
                let hi = (lo + CHUNK).min(cfg.trials);
                let mut accs = vec![CellAcc::default(); n_cells];
                for t in lo..hi {
                    let mut rng = trial_rng(cfg.seed, 0, cfg.trials, t);
                    let env = match build_env(cfg, &cons, tau, &mut rng) {
                        Ok(env) => env,
                        Err(_) => {
                            for acc in accs.iter_mut() {
                                acc.push_failure();
                            }
                            continue;
                        }
                    };
                    for (si, &scheme) in cfg.schemes.iter().enumerate() {
                        if scheme == Scheme::VpSwipt {
                            for (ei, &eta) in etas.iter().enumerate() {
                                let acc = &mut accs[ei * n_schemes + si];
                                match eval_scheme(&env, scheme, &cons, tau, p_lin, eta) {
                                    Ok(o) => acc.push(o.symbol_errors, o.q_total / cfg.k as f64),
                                    Err(_) => acc.push_failure(),
                                }
                            }
                        } else {
                            // eta-independent: evaluate once, replicate
                            match eval_scheme(&env, scheme, &cons, tau, p_lin, cfg.eta) {
                                Ok(o) => {
                                    for ei in 0..etas.len() {
                                        accs[ei * n_schemes + si]
                                            .push(o.symbol_errors, o.q_total / cfg.k as f64);
                                    }
                                }
                                Err(_) => {
                                    for ei in 0..etas.len() {
                                        accs[ei * n_schemes + si].push_failure();
                                    }
                                }
                            }
                        }
                    }
                }
                accs
            })
            .collect()
    });

    let mut cells = Vec::with_capacity(n_cells);
    for (ei, &eta) in etas.iter().enumerate() {
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let mut total = CellAcc::default();
            for chunk in &partials {
                total.merge(&chunk[ei * n_schemes + si]);
            }
            cells.push(total.into_cell(scheme, eta, cfg.trials, cfg.k)?);
        }
    }

    Ok(SweepResult {
        config: cfg.clone(),
        axis: SweepAxis::Eta,
        cells,
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SimConfig {
        SimConfig {
            p_grid_db: vec![10.0, 20.0],
            trials: 400,
            seed: 42,
            workers: Some(2),
            ..SimConfig::default()
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = tiny_config();
        c.schemes.clear();
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.k = 3;
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.p_grid_db = vec![10.0, 10.0];
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.schemes = vec![Scheme::Vp, Scheme::Vp];
        assert!(c.validate().is_err());

        let mut c = tiny_config();
        c.modulation = 9;
        assert!(c.validate().is_err());

        assert!(tiny_config().validate().is_ok());
    }

    #[test]
    fn sweep_is_seed_deterministic() {
        let cfg = tiny_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn sweep_is_worker_count_invariant() {
        let mut cfg = tiny_config();
        cfg.workers = Some(1);
        let a = run_sweep(&cfg).unwrap();
        cfg.workers = Some(4);
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn noiseless_trials_have_zero_errors() {
        let mut cfg = tiny_config();
        cfg.sigma2 = 0.0;
        cfg.trials = 200;
        let res = run_sweep(&cfg).unwrap();
        for cell in &res.cells {
            if let Some(ser) = cell.ser_mean {
                assert_eq!(ser, 0.0, "{} at {}", cell.scheme, cell.axis_value);
            }
        }
    }

    #[test]
    fn paired_vp_dominates_zf_in_sweep() {
        let mut cfg = tiny_config();
        cfg.schemes = vec![Scheme::Zf, Scheme::Vp];
        cfg.trials = 2000;
        let res = run_sweep(&cfg).unwrap();
        for &p in &cfg.p_grid_db {
            let zf = res.cell(Scheme::Zf, p).unwrap();
            let vp = res.cell(Scheme::Vp, p).unwrap();
            assert!(vp.q_mean_linear >= zf.q_mean_linear);
        }
    }

    #[test]
    fn eta_endpoints_coincide_with_extremes() {
        let cfg = SimConfig {
            p_grid_db: vec![25.0],
            eta_grid: Some(vec![0.0, 0.5, 1.0]),
            schemes: vec![Scheme::Vp, Scheme::VpEh, Scheme::VpSwipt],
            trials: 300,
            seed: 7,
            workers: Some(2),
            ..SimConfig::default()
        };
        let res = run_eta_sweep(&cfg).unwrap();
        let sw0 = res.cell(Scheme::VpSwipt, 0.0).unwrap();
        let eh0 = res.cell(Scheme::VpEh, 0.0).unwrap();
        assert_eq!(sw0.ser_mean, eh0.ser_mean);
        assert_eq!(sw0.q_mean_linear, eh0.q_mean_linear);

        let sw1 = res.cell(Scheme::VpSwipt, 1.0).unwrap();
        let vp1 = res.cell(Scheme::Vp, 1.0).unwrap();
        assert_eq!(sw1.ser_mean, vp1.ser_mean);
        assert_eq!(sw1.q_mean_linear, vp1.q_mean_linear);
    }

    #[test]
    fn run_trial_matches_contract() {
        let cfg = SimConfig {
            sigma2: 0.0,
            ..tiny_config()
        };
        let cons = cfg.constellation().unwrap();
        let mut rng = trial_rng(cfg.seed, 0, cfg.trials, 0);
        let chan = crate::numerics::sample_channel(cfg.k, cfg.m, &mut rng).unwrap();
        let u = cons.random_vector(cfg.k, &mut rng);
        for scheme in Scheme::ALL {
            let mut rng2 = trial_rng(cfg.seed, 0, cfg.trials, 0);
            let out = run_trial(&cfg, 20.0, &chan, &u, scheme, &mut rng2).unwrap();
            if scheme.carries_data() {
                assert_eq!(out.symbol_errors, 0);
                assert_eq!(out.detected.len(), cfg.k);
            } else {
                assert!(out.detected.is_empty());
                // EH-ideal harvest equals P * lambda_1
                let eig = crate::numerics::hermitian_eig(&chan.gram).unwrap();
                let p_lin = db_to_linear(20.0);
                assert!((out.q_total - p_lin * eig.lambda_max()).abs() <= 1e-9 * out.q_total);
            }
            let sum: f64 = out.q_per_user.iter().sum();
            assert!((sum - out.q_total).abs() <= 1e-9 * out.q_total.max(1e-12));
        }
    }

    #[test]
    fn repeat_trial_is_bit_identical() {
        let cfg = tiny_config();
        let cons = cfg.constellation().unwrap();
        let mut rng = trial_rng(cfg.seed, 1, cfg.trials, 17);
        let chan = crate::numerics::sample_channel(cfg.k, cfg.m, &mut rng).unwrap();
        let u = cons.random_vector(cfg.k, &mut rng);
        let mut r1 = trial_rng(9, 0, 1, 0);
        let mut r2 = trial_rng(9, 0, 1, 0);
        let a = run_trial(&cfg, 15.0, &chan, &u, Scheme::Vp, &mut r1).unwrap();
        let b = run_trial(&cfg, 15.0, &chan, &u, Scheme::Vp, &mut r2).unwrap();
        assert_eq!(a, b);
    }
}
