//! Command-line surface: key generation, signing, verification, the
//! reduction game, and the bound-check experiments. No interactivity;
//! output is files and CSV. Identical configuration and seed reproduce
//! byte-identical outputs.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ofs_core::fs::{FiatShamir, FsError};
use ofs_core::gq::GqScheme;
use ofs_core::lattice::{LatticeParams, LatticeScheme};
use ofs_core::reduction::{self, CooperativeForger, GameConfig};
use ofs_core::sigma::{InstanceGenerator, ObliviousCommitments, SigmaProtocol};
use ofs_qsim as qsim;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ofs",
    about = "signature toolkit over oblivious-commitment protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write the key files.
    Keygen(KeygenArgs),
    /// Sign a message file.
    Sign(SignArgs),
    /// Verify a signature file; exits 0 valid, 1 invalid, 2 decode error.
    Verify(VerifyArgs),
    /// Run the reduction game and report rates beside the formula values.
    Game(GameArgs),
    /// Run the bound-check suites; nonzero exit if any bound is violated.
    Qcheck(QcheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeChoice {
    Gq,
    Lattice,
}

#[derive(Args)]
struct SchemeArgs {
    /// Protocol instantiation.
    #[arg(long, value_enum)]
    scheme: SchemeChoice,
    /// Parameter preset: lattice presets t0/t1 (searched in
    /// OFS_PRESET_DIR first), GQ presets toy/b64.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes `<out>.pk` and `<out>.sk`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SignArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Signing key file.
    #[arg(long)]
    key: PathBuf,
    /// Message file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Signature output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compact (r, rsp) wire form; pass `--compact false` for the full form.
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    compact: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Verifying key file.
    #[arg(long)]
    key: PathBuf,
    /// Message file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Signature file.
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Injection fraction; defaults to the optimum 3 eps / (16 qh^4) at
    /// eps = 1.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Adversary hash-query budget.
    #[arg(long, default_value_t = 16)]
    qh: usize,
    /// Adversary signing-query budget.
    #[arg(long, default_value_t = 2)]
    qs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path for the per-trial rows.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QcheckArgs {
    /// Experiment description file; without it the built-in suites run.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Trials per arm of the distinguishing experiments.
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction for file-driven distinguisher runs.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Keygen(args) => dispatch_keygen(args),
        Command::Sign(args) => dispatch_sign(args),
        Command::Verify(args) => dispatch_verify(args),
        Command::Game(args) => dispatch_game(args),
        Command::Qcheck(args) => cmd_qcheck(args),
    }
}

fn lattice_scheme(preset: Option<&str>) -> Result<LatticeScheme, String> {
    let name = preset.unwrap_or("t1");
    if let Ok(dir) = std::env::var("OFS_PRESET_DIR") {
        let path = Path::new(&dir).join(format!("{name}.preset"));
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            let params = LatticeParams::parse(&text).map_err(|e| e.to_string())?;
            return LatticeScheme::new(params).map_err(|e| e.to_string());
        }
    }
    LatticeScheme::preset(name).map_err(|e| e.to_string())
}

fn gq_scheme(preset: Option<&str>) -> Result<GqScheme, String> {
    match preset.unwrap_or("toy") {
        "toy" => Ok(GqScheme::toy()),
        "b64" => GqScheme::new(64, 65537).map_err(|e| e.to_string()),
        other => Err(format!("unknown gq preset {other}")),
    }
}

fn dispatch_keygen(args: KeygenArgs) -> Result<ExitCode, String> {
    match args.scheme.scheme {
        SchemeChoice::Gq => cmd_keygen(
            &FiatShamir::new(gq_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
        SchemeChoice::Lattice => cmd_keygen(
            &FiatShamir::new(lattice_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
    }
}

fn cmd_keygen<P>(fs: &FiatShamir<P>, args: &KeygenArgs) -> Result<ExitCode, String>
where
    P: SigmaProtocol + ObliviousCommitments + InstanceGenerator,
{
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let (sk, pk) = fs.skgen(&mut rng).map_err(|e| e.to_string())?;
    let pk_path = args.out.with_extension("pk");
    let sk_path = args.out.with_extension("sk");
    std::fs::write(&pk_path, fs.encode_verifying_key_text(&pk))
        .map_err(|e| format!("writing {}: {e}", pk_path.display()))?;
    std::fs::write(&sk_path, fs.encode_signing_key_text(&sk))
        .map_err(|e| format!("writing {}: {e}", sk_path.display()))?;
    println!("wrote {} and {}", pk_path.display(), sk_path.display());
    Ok(ExitCode::SUCCESS)
}

fn dispatch_sign(args: SignArgs) -> Result<ExitCode, String> {
    match args.scheme.scheme {
        SchemeChoice::Gq => cmd_sign(
            &FiatShamir::new(gq_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
        SchemeChoice::Lattice => cmd_sign(
            &FiatShamir::new(lattice_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
    }
}

fn cmd_sign<P>(fs: &FiatShamir<P>, args: &SignArgs) -> Result<ExitCode, String>
where
    P: SigmaProtocol + ObliviousCommitments,
{
    let sk_text = std::fs::read_to_string(&args.key)
        .map_err(|e| format!("reading {}: {e}", args.key.display()))?;
    let sk = fs
        .decode_signing_key_text(&sk_text)
        .map_err(|e| e.to_string())?;
    let message = read_message(&args.input)?;
    let oracle = fs.reference_oracle();
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let sig = fs
        .sign(&sk, &message, &oracle, &mut rng)
        .map_err(|e| e.to_string())?;
    let bytes = fs.encode_signature(&sig, args.compact);
    std::fs::write(&args.out, &bytes)
        .map_err(|e| format!("writing {}: {e}", args.out.display()))?;
    println!("wrote {} ({} bytes)", args.out.display(), bytes.len());
    Ok(ExitCode::SUCCESS)
}

fn dispatch_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    match args.scheme.scheme {
        SchemeChoice::Gq => cmd_verify(
            &FiatShamir::new(gq_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
        SchemeChoice::Lattice => cmd_verify(
            &FiatShamir::new(lattice_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
    }
}

fn cmd_verify<P>(fs: &FiatShamir<P>, args: &VerifyArgs) -> Result<ExitCode, String>
where
    P: SigmaProtocol + ObliviousCommitments,
{
    let pk_text = std::fs::read_to_string(&args.key)
        .map_err(|e| format!("reading {}: {e}", args.key.display()))?;
    let pk = fs
        .decode_verifying_key_text(&pk_text)
        .map_err(|e| e.to_string())?;
    let message = read_message(&args.input)?;
    let bytes =
        std::fs::read(&args.sig).map_err(|e| format!("reading {}: {e}", args.sig.display()))?;
    let oracle = fs.reference_oracle();
    let sig = match fs.decode_signature(&bytes, &pk, &message, &oracle) {
        Ok(sig) => sig,
        Err(e @ (FsError::Decode { .. } | FsError::OracleLength { .. })) => {
            eprintln!("decode error: {e}");
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.to_string()),
    };
    if fs.verify(&pk, &message, &sig, &oracle) {
        println!("valid");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("invalid");
        Ok(ExitCode::from(1))
    }
}

fn read_message(path: &Path) -> Result<Vec<u8>, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    if bytes.len() >= u32::MAX as usize {
        return Err("message exceeds the 2^32 - 1 byte limit".into());
    }
    Ok(bytes)
}

fn dispatch_game(args: GameArgs) -> Result<ExitCode, String> {
    match args.scheme.scheme {
        SchemeChoice::Gq => cmd_game(
            &FiatShamir::new(gq_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
        SchemeChoice::Lattice => cmd_game(
            &FiatShamir::new(lattice_scheme(args.scheme.preset.as_deref())?),
            &args,
        ),
    }
}

fn cmd_game<P>(fs: &FiatShamir<P>, args: &GameArgs) -> Result<ExitCode, String>
where
    P: SigmaProtocol + ObliviousCommitments + InstanceGenerator + Sync,
    P::Statement: Sync,
    P::Witness: Sync,
{
    if args.trials == 0 {
        return Err("trial count must be positive".into());
    }
    if args.qh == 0 || args.qh > u32::MAX as usize {
        return Err("qh must be positive".into());
    }
    let delta = match args.delta {
        Some(d) if (0.0..=1.0).contains(&d) => d,
        Some(_) => return Err("delta must lie in [0, 1]".into()),
        None => reduction::optimal_delta(1.0, args.qh as u32).map_err(|e| e.to_string())?,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed.wrapping_add(0x6b65));
    let (sk, _) = fs.skgen(&mut rng).map_err(|e| e.to_string())?;
    let pair = sk.pair().clone();
    let forger = CooperativeForger::new(&pair).with_sign_queries(args.qs.min(2));
    let config = GameConfig {
        delta,
        trials: args.trials,
        q_h: args.qh,
        q_s: args.qs,
        seed: args.seed,
    };
    let (report, outcomes) = reduction::run_reduction_game_detailed(fs, &pair, &forger, &config)
        .map_err(|e| e.to_string())?;

    let q_h = args.qh as u32;
    let delta_star = reduction::optimal_delta(1.0, q_h).map_err(|e| e.to_string())?;
    let delta_star_exact = reduction::optimal_delta_exact(num_rational::Ratio::new(1, 1), q_h)
        .map_err(|e| e.to_string())?;
    println!(
        "game: trials={} delta={:.8} qh={} qs={} seed={}",
        report.trials, report.delta, report.q_h, report.q_s, config.seed
    );
    println!(
        "rates: forgery={:.6} landing={:.6} extraction={:.6}",
        report.forgery_rate, report.landing_rate, report.extraction_rate
    );
    println!(
        "optimal_delta(eps=1, qh={q_h}) = {delta_star:.8} (= {}/{})",
        delta_star_exact.numer(),
        delta_star_exact.denom()
    );
    println!(
        "landing_bound(eps=1, delta={:.8}, qh={q_h}) = {:.8}",
        delta,
        reduction::landing_bound(1.0, delta, q_h)
    );
    println!(
        "headline_bound 3 eps^2 / (16 qh^4) at eps=1 = {:.8}",
        reduction::headline_bound(1.0, q_h)
    );

    if let Some(path) = &args.out {
        let csv = reduction::outcomes_csv(&outcomes, &report);
        std::fs::write(path, csv).map_err(|e| format!("writing {}: {e}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_qcheck(args: QcheckArgs) -> Result<ExitCode, String> {
    if args.trials == 0 {
        return Err("trial count must be positive".into());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let mut rows = vec![qsim::textfmt::csv_header().to_string()];
    let mut all_pass = true;

    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        let spec = qsim::textfmt::parse_experiment(&text).map_err(|e| e.to_string())?;
        if let Some(modified) = &spec.modified_table {
            let out = qsim::run_bbbv_experiment(&spec.experiment, &spec.table, modified)
                .map_err(|e| e.to_string())?;
            let pass = out.ratio.map(|r| r <= 2.0).unwrap_or(out.distance < 1e-10);
            all_pass &= pass;
            rows.push(qsim::textfmt::csv_row(
                "file-bbbv",
                out.eps_sum,
                out.distance,
                out.ratio,
                2.0,
                pass,
            ));
        }
        if let Some(accept) = spec.accept_qubit {
            let q = spec.experiment.step_count();
            let advantage = qsim::run_sc_distinguisher(
                &spec.experiment,
                accept,
                args.delta,
                args.trials,
                &mut rng,
            )
            .map_err(|e| e.to_string())?;
            let bound =
                qsim::sc_distinguishing_bound(q, args.delta) + qsim::sc_sampling_error(args.trials);
            let pass = advantage <= bound;
            all_pass &= pass;
            rows.push(qsim::textfmt::csv_row(
                "file-sc", args.delta, advantage, None, bound, pass,
            ));
        }
    } else {
        run_default_suites(&mut rows, &mut all_pass, args.trials, &mut rng)?;
    }

    let csv = rows.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| format!("writing {}: {e}", path.display()))?;
            println!("wrote {} ({} rows)", path.display(), rows.len() - 1);
        }
        None => print!("{csv}"),
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_default_suites(
    rows: &mut Vec<String>,
    all_pass: &mut bool,
    trials: usize,
    rng: &mut ChaCha20Rng,
) -> Result<(), String> {
    use num_complex::Complex64;
    use rand::Rng;

    // Measurement-distance suite on random state pairs.
    for i in 0..200 {
        let bits = rng.gen_range(1..=6);
        let make = |rng: &mut ChaCha20Rng| {
            let dim = 1usize << bits;
            let mut amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            qsim::StateVector::from_amplitudes(bits, 0, 0, amps).unwrap()
        };
        let s1 = make(rng);
        let s2 = make(rng);
        let (euclid, tv) = qsim::tv_after_measurement(&s1, &s2).map_err(|e| e.to_string())?;
        let pass = tv <= 4.0 * euclid + 1e-12;
        *all_pass &= pass;
        rows.push(qsim::textfmt::csv_row(
            &format!("bv-{i}"),
            0.0,
            euclid,
            Some(tv),
            4.0 * euclid,
            pass,
        ));
    }

    // Query-perturbation suite: the closed-form case plus random runs.
    {
        let mut pre = qsim::Circuit::identity();
        pre.push_h_layer(0..3);
        let exp = qsim::QueryExperiment {
            input_bits: 3,
            answer_bits: 1,
            work_bits: 0,
            unitaries: vec![pre, qsim::Circuit::identity()],
            modified_set: [(1usize, 5u64)].into_iter().collect(),
        };
        let table = qsim::OracleTable::new(3, 1, vec![0; 8]).map_err(|e| e.to_string())?;
        let mut modified = table.clone();
        modified.set(5, 1);
        let out = qsim::run_bbbv_experiment(&exp, &table, &modified).map_err(|e| e.to_string())?;
        let pass = (out.eps_sum - 0.125).abs() < 1e-10 && (out.distance - 0.5).abs() < 1e-10;
        *all_pass &= pass;
        rows.push(qsim::textfmt::csv_row(
            "bbbv-closed-form",
            out.eps_sum,
            out.distance,
            out.ratio,
            2.0,
            pass,
        ));
    }
    for i in 0..100 {
        let a = rng.gen_range(2..=4);
        let b = rng.gen_range(1..=2);
        let t = rng.gen_range(1..=4);
        let exp = qsim::random_experiment(a, b, 0, t, rng);
        let table = qsim::OracleTable::uniform(a, b, rng);
        let mut modified = table.clone();
        for &(_, x) in &exp.modified_set {
            modified.set(x, rng.gen_range(0..1 << b));
        }
        let out = qsim::run_bbbv_experiment(&exp, &table, &modified).map_err(|e| e.to_string())?;
        let pass = out
            .ratio
            .map(|r| r <= 2.0 + 1e-9)
            .unwrap_or(out.distance < 1e-10);
        *all_pass &= pass;
        rows.push(qsim::textfmt::csv_row(
            &format!("bbbv-{i}"),
            out.eps_sum,
            out.distance,
            out.ratio,
            2.0,
            pass,
        ));
    }

    // Semi-constant distinguishing grid.
    for (name, exp, accept) in qsim::distinguisher_family(4, 2) {
        let q = exp.step_count();
        for delta in [0.05, 0.1, 0.2] {
            let advantage = qsim::run_sc_distinguisher(&exp, accept, delta, trials, rng)
                .map_err(|e| e.to_string())?;
            let bound = qsim::sc_distinguishing_bound(q, delta) + qsim::sc_sampling_error(trials);
            let pass = advantage <= bound;
            *all_pass &= pass;
            rows.push(qsim::textfmt::csv_row(
                &format!("sc-{name}-d{delta}"),
                delta,
                advantage,
                None,
                bound,
                pass,
            ));
        }
    }
    Ok(())
}
