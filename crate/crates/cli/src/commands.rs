use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use gaussqkd_core::cad::{acceptance_probability, cad_error, simulate_cad, CadResult};
use gaussqkd_core::classical::{
    bb84_from_table, bb84_run, chsh_classical_max, ekert91_run, rsa_decrypt, rsa_encrypt,
    rsa_keygen, singlet_correlation, vernam as xor, BitString, Bb84Config, ALICE_ANGLES,
    BOB_ANGLES, CHSH_SETTINGS, KEY_SETTINGS, WORKED_ALICE_BASES, WORKED_ALICE_BITS,
    WORKED_BOB_BASES, WORKED_BOB_BITS, WORKED_SIFTED_POSITIONS,
};
use gaussqkd_core::efficiency::{
    self as eff, default_grid, format_sig, parse_grid_csv, sweep_with_threads, write_records_csv,
    write_skipped_csv, EfficiencyProblem, EstimatorRegistry, QuadratureConfig,
};
use gaussqkd_core::entanglement;
use gaussqkd_core::gaussian::validate_state;
use gaussqkd_core::linalg::PHYSICAL_TOL;
use gaussqkd_core::qkd::{
    accept_interval, error_rate, eve_overlap, security_check, security_margin, Attack,
    MeasurementModel, SymmetricStdState,
};

use crate::{Ctx, Failure, Format, StateArgs};

type CmdResult = Result<(), Failure>;

fn g(v: f64) -> String {
    format_sig(v, 12)
}

fn list(vs: &[f64]) -> String {
    vs.iter().map(|v| g(*v)).collect::<Vec<_>>().join(", ")
}

fn kv(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> std::io::Result<()> {
    writeln!(out, "{:<22}{}", format!("{key}:"), value)
}

fn json(out: &mut dyn Write, v: &impl Serialize) -> CmdResult {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::other(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn parse_state(a: StateArgs) -> Result<SymmetricStdState, Failure> {
    Ok(SymmetricStdState::new(a.lambda, a.c_x, a.c_p)?)
}

/// Outcome of a batch of golden-vector checks.
struct Checks {
    lines: Vec<(bool, String)>,
}

impl Checks {
    fn new() -> Self {
        Self { lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.lines.push((ok, what.into()));
    }

    fn finish(self, out: &mut dyn Write) -> CmdResult {
        let mut failed = 0;
        for (ok, what) in &self.lines {
            writeln!(out, "{} {what}", if *ok { "PASS" } else { "FAIL" })?;
            failed += usize::from(!ok);
        }
        if failed > 0 {
            return Err(Failure::other(format!("{failed} golden check(s) failed")));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- state

#[derive(Serialize)]
struct StateReport {
    lambda: f64,
    c_x: f64,
    c_p: f64,
    physical: bool,
    min_eigenvalue: f64,
    nppt: bool,
    log_negativity: f64,
    log_negativity_closed_form: f64,
    purity: f64,
    symplectic_spectrum: Vec<f64>,
    transposed_spectrum: Vec<f64>,
    standard_form: entanglement::StandardForm,
    coherent_constraint: f64,
}

pub fn state(ctx: &mut Ctx, a: StateArgs) -> CmdResult {
    let s = parse_state(a)?;
    let gamma = s.covariance();
    let validity = validate_state(&gamma, PHYSICAL_TOL)?;
    let report = StateReport {
        lambda: s.lambda,
        c_x: s.c_x,
        c_p: s.c_p,
        physical: validity.is_physical,
        min_eigenvalue: validity.min_eigenvalue,
        nppt: entanglement::is_nppt(&gamma)?,
        log_negativity: entanglement::log_negativity(&gamma)?,
        log_negativity_closed_form: s.log_negativity(),
        purity: s.purity(),
        symplectic_spectrum: validity.symplectic_spectrum,
        transposed_spectrum: entanglement::transposed_spectrum(&gamma)?,
        standard_form: entanglement::to_standard_form(&gamma)?,
        coherent_constraint: s.coherent_constraint(),
    };
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(out, &report)?,
        Format::Text | Format::Csv => {
            kv(out, "physical", yes_no(report.physical))?;
            kv(out, "nppt", yes_no(report.nppt))?;
            kv(out, "log_negativity", g(report.log_negativity))?;
            kv(out, "purity", g(report.purity))?;
            kv(out, "symplectic_spectrum", list(&report.symplectic_spectrum))?;
            kv(out, "transposed_spectrum", list(&report.transposed_spectrum))?;
            let sf = report.standard_form;
            kv(
                out,
                "standard_form",
                format!(
                    "lambda_a={} lambda_b={} k_x={} k_p={}",
                    g(sf.lambda_a),
                    g(sf.lambda_b),
                    g(sf.k_x),
                    g(sf.k_p)
                ),
            )?;
            kv(out, "coherent_constraint", g(report.coherent_constraint))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- security

#[derive(Args, Debug)]
pub struct SecurityArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value = "individual")]
    attack: Attack,
    /// Alice's outcome.
    #[arg(long = "x0a", allow_hyphen_values = true)]
    x0a: f64,
    /// Bob's outcome; adds a verdict for the pair.
    #[arg(long = "x0b", allow_hyphen_values = true)]
    x0b: Option<f64>,
    /// Width of the position measurement; reports the finite-resolution
    /// error rate beside the sharp one.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Serialize)]
struct PairVerdict {
    x0b: f64,
    delta_x0: f64,
    error_rate: f64,
    error_rate_finite: Option<f64>,
    eve_overlap: f64,
    reduced_margin: f64,
    secure: bool,
}

#[derive(Serialize)]
struct SecurityReport {
    attack: Attack,
    param_name: &'static str,
    param: f64,
    unbounded: bool,
    lo_factor: f64,
    hi_factor: f64,
    delta_lo: f64,
    delta_hi: f64,
    length: f64,
    pair: Option<PairVerdict>,
}

pub fn security(ctx: &mut Ctx, a: SecurityArgs) -> CmdResult {
    let s = parse_state(a.state)?;
    let iv = accept_interval(&s, a.attack)?;
    let (delta_lo, delta_hi) = iv.bounds(a.x0a);
    let model = a.sigma.map(MeasurementModel::finite).transpose()?;
    let pair = match a.x0b {
        Some(x0b) => Some(PairVerdict {
            x0b,
            delta_x0: x0b.abs() - a.x0a.abs(),
            error_rate: error_rate(&s, a.x0a, x0b),
            error_rate_finite: model
                .map(|m| m.error_probability(&s, a.x0a, x0b))
                .transpose()?,
            eve_overlap: eve_overlap(&s, a.x0a, x0b),
            reduced_margin: security_margin(&s, a.x0a, x0b, a.attack),
            secure: security_check(&s, a.x0a, x0b, a.attack)?,
        }),
        None => None,
    };
    let report = SecurityReport {
        attack: a.attack,
        param_name: match a.attack {
            Attack::Individual => "alpha",
            Attack::FiniteCoherent => "beta",
        },
        param: iv.param,
        unbounded: iv.unbounded,
        lo_factor: iv.lo_factor,
        hi_factor: iv.hi_factor,
        delta_lo,
        delta_hi,
        length: iv.length(a.x0a),
        pair,
    };
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(out, &report)?,
        Format::Text | Format::Csv => {
            kv(out, "attack", report.attack)?;
            kv(out, report.param_name, g(report.param))?;
            if report.unbounded {
                kv(out, "interval", format!("unbounded ({} = 1)", report.param_name))?;
            } else {
                kv(
                    out,
                    "interval",
                    format!("[{}, {}] x |x0A|", g(report.lo_factor), g(report.hi_factor)),
                )?;
            }
            kv(out, "delta_x0 range", format!("({}, {})", g(delta_lo), g(delta_hi)))?;
            kv(out, "length", g(report.length))?;
            if let Some(p) = &report.pair {
                kv(out, "delta_x0", g(p.delta_x0))?;
                kv(out, "error_rate", g(p.error_rate))?;
                if let Some(e) = p.error_rate_finite {
                    kv(out, "error_rate_finite", g(e))?;
                }
                kv(out, "eve_overlap", g(p.eve_overlap))?;
                kv(out, "secure", yes_no(p.secure))?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- efficiency

#[derive(Args, Debug, Clone)]
pub struct QuadArgs {
    /// Estimator: quadrature, quadrature-unfolded or monte-carlo.
    #[arg(long, default_value = "quadrature")]
    method: String,
    /// Quadrature nodes per axis.
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Truncation radius (default 8 sqrt(lambda)).
    #[arg(long = "x-max")]
    x_max: Option<f64>,
    #[arg(long = "mc-samples", default_value_t = 1_000_000)]
    mc_samples: usize,
}

impl QuadArgs {
    fn config(&self, seed: u64) -> QuadratureConfig {
        QuadratureConfig {
            x_max: self.x_max,
            n_points: self.points,
            mc_samples: self.mc_samples,
            rng_seed: seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct EfficiencyArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value = "individual")]
    attack: Attack,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Serialize)]
struct EfficiencyReport {
    method: String,
    attack: Attack,
    efficiency: f64,
    std_error: Option<f64>,
}

pub fn efficiency(ctx: &mut Ctx, a: EfficiencyArgs) -> CmdResult {
    let s = parse_state(a.state)?;
    let estimator = EstimatorRegistry::global().get(&a.quad.method)?;
    let problem = EfficiencyProblem::secure(&s, a.attack)?;
    let est = estimator.estimate(&problem, &a.quad.config(ctx.seed), ctx.seed)?;
    let report = EfficiencyReport {
        method: a.quad.method.clone(),
        attack: a.attack,
        efficiency: est.value,
        std_error: est.std_error,
    };
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(out, &report)?,
        Format::Text | Format::Csv => {
            kv(out, "method", &report.method)?;
            kv(out, "attack", report.attack)?;
            kv(out, "efficiency", g(report.efficiency))?;
            if let Some(se) = report.std_error {
                kv(out, "std_error", g(se))?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- sweep

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// CSV of lambda,c_x,c_p rows (default: built-in rectangular grid).
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value = "individual")]
    attack: Attack,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Where to write skipped points (default: skipped.csv beside --out).
    #[arg(long)]
    skipped: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    records: &'a [eff::SweepRecord],
    skipped: &'a [eff::SkippedPoint],
}

pub fn sweep(ctx: &mut Ctx, a: SweepArgs, out_path: Option<&Path>) -> CmdResult {
    let grid = match &a.grid {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::other(format!("cannot read {}: {e}", path.display())))?;
            parse_grid_csv(&text)?
        }
        None => default_grid(),
    };
    let estimator = EstimatorRegistry::global().get(&a.quad.method)?;
    let result = sweep_with_threads(&grid, a.attack, &a.quad.config(ctx.seed), estimator, a.threads)?;
    let skipped_path = a.skipped.clone().or_else(|| {
        out_path.map(|p| p.parent().unwrap_or(Path::new("")).join("skipped.csv"))
    });
    if let Some(path) = skipped_path {
        let f = fs::File::create(&path)
            .map_err(|e| Failure::other(format!("cannot create {}: {e}", path.display())))?;
        write_skipped_csv(std::io::BufWriter::new(f), &result.skipped)?;
    }
    match ctx.format {
        Format::Json => json(
            &mut *ctx.out,
            &SweepJson {
                records: &result.records,
                skipped: &result.skipped,
            },
        )?,
        Format::Text | Format::Csv => write_records_csv(&mut *ctx.out, &result.records)?,
    }
    Ok(())
}

// ---------------------------------------------------------------- cad

#[derive(Args, Debug)]
pub struct CadArgs {
    #[arg(long, required_unless_present = "check_paper")]
    epsilon: Option<f64>,
    /// Block size.
    #[arg(long = "M", visible_alias = "block-size", required_unless_present = "check_paper")]
    m: Option<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    /// Run the worked-example golden vectors and exit.
    #[arg(long)]
    check_paper: bool,
}

pub fn cad(ctx: &mut Ctx, a: CadArgs) -> CmdResult {
    if a.check_paper {
        let mut c = Checks::new();
        let bound = 0.25f64.powi(20);
        c.check(
            cad_error(0.2, 20).is_ok_and(|v| v < bound),
            "eps=0.2, M=20: eps_M < (eps/(1-eps))^M = 0.25^20",
        );
        c.check(
            (1..40).all(|m| cad_error(0.2, m + 1).unwrap() < cad_error(0.2, m).unwrap()),
            "eps_M strictly decreasing in M",
        );
        return c.finish(&mut *ctx.out);
    }
    let (eps, m) = (a.epsilon.unwrap_or_default(), a.m.unwrap_or_default());
    let r: CadResult = simulate_cad(eps, m, a.trials, ctx.seed)?;
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(out, &r)?,
        Format::Text | Format::Csv => {
            kv(out, "epsilon", g(eps))?;
            kv(out, "M", m)?;
            kv(out, "epsilon_M (formula)", g(r.epsilon_out_formula))?;
            kv(
                out,
                "epsilon_M (simulated)",
                r.epsilon_out_simulated.map_or("n/a (no block accepted)".into(), g),
            )?;
            kv(out, "acceptance (formula)", g(acceptance_probability(eps, m)?))?;
            kv(out, "acceptance (simulated)", g(r.acceptance_rate))?;
            kv(out, "trials", r.n_trials)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- vernam

#[derive(Args, Debug)]
pub struct VernamArgs {
    #[arg(long, required_unless_present = "check_paper")]
    message: Option<String>,
    #[arg(long, required_unless_present = "check_paper")]
    key: Option<String>,
    #[arg(long)]
    check_paper: bool,
}

pub fn vernam(ctx: &mut Ctx, a: VernamArgs) -> CmdResult {
    if a.check_paper {
        let m: BitString = "010011101".parse()?;
        let k: BitString = "110100011".parse()?;
        let mut c = Checks::new();
        let e = xor(&m, &k)?;
        c.check(e.to_string() == "100111110", format!("010011101 xor 110100011 = {e}"));
        c.check(xor(&e, &k)? == m, "decoding with the same key returns the message");
        return c.finish(&mut *ctx.out);
    }
    let m: BitString = a.message.unwrap_or_default().parse()?;
    let k: BitString = a.key.unwrap_or_default().parse()?;
    let e = xor(&m, &k)?;
    match ctx.format {
        Format::Json => json(&mut *ctx.out, &serde_json::json!({ "result": e.to_string() }))?,
        _ => writeln!(ctx.out, "{e}")?,
    }
    Ok(())
}

// ---------------------------------------------------------------- rsa

#[derive(Args, Debug)]
pub struct RsaArgs {
    #[arg(long, default_value_t = 61)]
    p: u64,
    #[arg(long, default_value_t = 53)]
    q: u64,
    /// Public exponent.
    #[arg(long, default_value_t = 17)]
    l: u64,
    /// Message to encrypt and decrypt.
    #[arg(long)]
    message: Option<u64>,
    #[arg(long)]
    check_paper: bool,
}

pub fn rsa(ctx: &mut Ctx, a: RsaArgs) -> CmdResult {
    if a.check_paper {
        let mut c = Checks::new();
        let ks = rsa_keygen(61, 53, 17)?;
        c.check(ks.n == 3233, format!("n = 61 * 53 = {}", ks.n));
        c.check(ks.phi == 3120, format!("phi = 60 * 52 = {}", ks.phi));
        c.check(ks.k == 2753, format!("k = 17^-1 mod 3120 = {}", ks.k));
        let e = rsa_encrypt(123, ks.l, ks.n)?;
        c.check(e == 855, format!("123^17 mod 3233 = {e}"));
        let d = rsa_decrypt(855, ks.k, ks.n)?;
        c.check(d == 123, format!("855^2753 mod 3233 = {d}"));
        return c.finish(&mut *ctx.out);
    }
    let ks = rsa_keygen(a.p, a.q, a.l)?;
    let cipher = a.message.map(|m| rsa_encrypt(m, ks.l, ks.n)).transpose()?;
    let plain = cipher.map(|e| rsa_decrypt(e, ks.k, ks.n)).transpose()?;
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(
            out,
            &serde_json::json!({ "keys": ks, "ciphertext": cipher, "decrypted": plain }),
        )?,
        _ => {
            kv(out, "n", ks.n)?;
            kv(out, "phi", ks.phi)?;
            kv(out, "public (l, n)", format!("({}, {})", ks.l, ks.n))?;
            kv(out, "private k", ks.k)?;
            if let (Some(e), Some(d)) = (cipher, plain) {
                kv(out, "ciphertext", e)?;
                kv(out, "decrypted", d)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- bb84

#[derive(Args, Debug)]
pub struct Bb84Args {
    #[arg(long, default_value_t = 10_000)]
    rounds: usize,
    /// Insert an intercept-resend eavesdropper.
    #[arg(long)]
    eavesdrop: bool,
    /// Abort when the sifted error rate reaches this value.
    #[arg(long, default_value_t = 0.25)]
    threshold: f64,
    /// Print the first N rounds as a table.
    #[arg(long, default_value_t = 0)]
    show: usize,
    #[arg(long)]
    check_paper: bool,
}

pub fn bb84(ctx: &mut Ctx, a: Bb84Args) -> CmdResult {
    if a.check_paper {
        let run = bb84_from_table(&WORKED_ALICE_BITS, &WORKED_ALICE_BASES, &WORKED_BOB_BASES, &WORKED_BOB_BITS);
        write!(ctx.out, "{}", run.transcript(9))?;
        let kept: Vec<usize> = run.sifted.iter().map(|i| i + 1).collect();
        let mut c = Checks::new();
        c.check(kept == WORKED_SIFTED_POSITIONS, format!("sifted rounds {kept:?}"));
        c.check(run.n_errors == 0, "no errors on sifted rounds");
        return c.finish(&mut *ctx.out);
    }
    if a.rounds < 8 {
        return Err(Failure::other("need at least 8 rounds"));
    }
    let cfg = Bb84Config {
        eavesdrop: a.eavesdrop,
        threshold: a.threshold,
    };
    let run = bb84_run(a.rounds, cfg, ctx.seed);
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(
            out,
            &serde_json::json!({
                "rounds": run.n_rounds(),
                "eavesdrop": a.eavesdrop,
                "sifted": run.sifted.len(),
                "errors": run.n_errors,
                "qber": run.qber(),
                "threshold": run.threshold,
                "accepted": run.accepted(),
            }),
        )?,
        _ => {
            if a.show > 0 {
                write!(out, "{}", run.transcript(a.show))?;
            }
            kv(out, "rounds", run.n_rounds())?;
            kv(out, "eavesdropper", yes_no(a.eavesdrop))?;
            kv(out, "sifted", run.sifted.len())?;
            kv(out, "errors", run.n_errors)?;
            kv(out, "qber", run.qber().map_or("n/a".into(), g))?;
            kv(out, "key accepted", yes_no(run.accepted()))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- ekert

#[derive(Args, Debug)]
pub struct EkertArgs {
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long)]
    check_paper: bool,
}

pub fn ekert(ctx: &mut Ctx, a: EkertArgs) -> CmdResult {
    if a.check_paper {
        let mut c = Checks::new();
        let s: f64 = CHSH_SETTINGS
            .iter()
            .map(|&(i, j, sign)| sign * singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]))
            .sum::<f64>()
            .abs();
        c.check((s - 2.0 * 2f64.sqrt()).abs() < 1e-12, format!("S = {} = 2 sqrt 2", g(s)));
        c.check(
            KEY_SETTINGS
                .iter()
                .all(|&(i, j)| singlet_correlation(ALICE_ANGLES[i], BOB_ANGLES[j]) == -1.0),
            "equal directions are perfectly anticorrelated",
        );
        c.check(chsh_classical_max() <= 2.0, "local deterministic strategies give S <= 2");
        return c.finish(&mut *ctx.out);
    }
    if a.pairs < 100 {
        return Err(Failure::other("need at least 100 pairs"));
    }
    let run = ekert91_run(a.pairs, ctx.seed);
    let s = run.s_value();
    let sigma = run.s_sigma();
    let out = &mut *ctx.out;
    match ctx.format {
        Format::Json => json(
            out,
            &serde_json::json!({
                "pairs": a.pairs,
                "s": s,
                "s_sigma": sigma,
                "key_length": run.key_alice.len(),
                "key_mismatches": run.key_mismatches(),
            }),
        )?,
        _ => {
            kv(out, "pairs", a.pairs)?;
            kv(out, "S", s.map_or("n/a".into(), g))?;
            kv(out, "S std error", sigma.map_or("n/a".into(), g))?;
            kv(out, "key length", run.key_alice.len())?;
            kv(out, "key mismatches", run.key_mismatches())?;
        }
    }
    Ok(())
}
