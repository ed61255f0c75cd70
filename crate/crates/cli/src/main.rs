use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padic_fractal::{Error, Result};
use padic_fractal_cli::commands::{
    cmd_dimension, cmd_integrate, cmd_mask, cmd_nu, cmd_set, cmd_solenoid, cmd_sweep,
};
use padic_fractal_cli::{exit_code, Report, RunConfig};

/// Images, embedding masks and integrals of p-adic fractal maps.
#[derive(Parser, Debug)]
#[command(name = "padic-fractal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON config, or a manifest written next to an earlier output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    p: Option<u32>,
    /// digit, digit-normalized, exponential or csv:<path>
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Map parameter, e.g. 0.3 or -0.5+0.2i.
    #[arg(long, global = true, allow_hyphen_values = true)]
    s: Option<String>,
    /// Point on the dimension path; ignored when --s is given.
    #[arg(long, global = true, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    width: Option<u32>,
    #[arg(long, global = true)]
    height: Option<u32>,
    /// zp, lambda:<N> or whole:<shells>
    #[arg(long, global = true)]
    region: Option<String>,
    /// Integrand, repeatable: 1, z^k, conj(z)^k, exp(az), gauss. The sweep
    /// uses the first.
    #[arg(long = "f", global = true)]
    integrands: Vec<String>,
    /// Exit with status 4 unless Delta+ > 0 is certified.
    #[arg(long, global = true)]
    require_embedding: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hit-count raster and point cloud of the image of the region.
    Set {
        #[arg(long)]
        no_points: bool,
    },
    /// Certified Delta+ and delta threshold masks over an s-grid.
    Mask {
        /// Window as re0,re1,im0,im1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<f64>>,
        #[arg(long)]
        max_depth: Option<u32>,
    },
    /// Integral and embedding certificate along a straight path in d.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        no_frames: bool,
    },
    /// Box dimension of the image against -ln p / ln|s|.
    Dimension,
    /// Point cloud of the solenoid embedding and its box dimension.
    Solenoid {
        /// factorial:<offset> or constant:<a>
        #[arg(long)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Haar integrals of the integrands over the region.
    Integrate,
    /// Profile constants nu, sigma and the (p)-continuity moduli.
    Nu,
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let f = &cli.flags;
    let mut cfg = match &f.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io(msg) => Error::Invalid(format!("{}: {msg}", path.display())),
            e => e,
        })?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = f.$field.clone() {
                cfg.$field = v;
            }
        )*};
    }
    set!(p, profile, theta, depth, seed, width, height, region);
    if f.s.is_some() {
        cfg.s = f.s.clone();
    }
    if f.d.is_some() {
        cfg.d = f.d.clone();
        if f.s.is_none() {
            cfg.s = None;
        }
    }
    if !f.integrands.is_empty() {
        cfg.integrands = f.integrands.clone();
        cfg.sweep.integrand = f.integrands[0].clone();
    }
    if let Some(v) = &f.profile {
        cfg.solenoid.profile = v.clone();
    }
    cfg.require_embedding |= f.require_embedding;
    match &cli.command {
        Command::Set { no_points } => cfg.write_points &= !no_points,
        Command::Mask { window, max_depth } => {
            if let Some(w) = window {
                let [r0, r1, i0, i1] = w[..] else {
                    return Err(Error::Invalid("--window takes re0,re1,im0,im1".into()));
                };
                cfg.mask.re = [r0, r1];
                cfg.mask.im = [i0, i1];
            }
            if let Some(m) = max_depth {
                cfg.mask.max_depth = *m;
            }
        }
        Command::Sweep {
            from,
            to,
            points,
            no_frames,
        } => {
            if let Some(v) = from {
                cfg.sweep.from = v.clone();
            }
            if let Some(v) = to {
                cfg.sweep.to = v.clone();
            }
            if let Some(v) = points {
                cfg.sweep.points = *v;
            }
            cfg.sweep.frames &= !no_frames;
        }
        Command::Solenoid {
            a,
            nu,
            alpha,
            samples,
        } => {
            if let Some(v) = a {
                cfg.solenoid.a = v.clone();
            }
            if let Some(v) = nu {
                cfg.solenoid.nu = v.clone();
            }
            if let Some(v) = alpha {
                cfg.solenoid.alpha = v.clone();
            }
            if let Some(v) = samples {
                cfg.solenoid.samples = *v;
            }
        }
        Command::Dimension | Command::Integrate | Command::Nu => {}
    }
    cfg.check()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = effective_config(cli)?;
    let out = &cli.flags.out;
    match cli.command {
        Command::Set { .. } => cmd_set(&cfg, out),
        Command::Mask { .. } => cmd_mask(&cfg, out),
        Command::Sweep { .. } => cmd_sweep(&cfg, out),
        Command::Dimension => cmd_dimension(&cfg, out),
        Command::Solenoid { .. } => cmd_solenoid(&cfg, out),
        Command::Integrate => cmd_integrate(&cfg, out),
        Command::Nu => cmd_nu(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("padic-fractal: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
