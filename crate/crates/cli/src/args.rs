use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sharkovsky", version, about = "Period forcing on interval and star maps, and its shadow on the Mandelbrot set")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Significant digits for printed numbers; also the root tolerance 10^-precision.
    #[arg(long, default_value_t = 12, global = true, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub precision: u32,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Sharkovsky and star orders.
    Order {
        #[command(subcommand)]
        action: OrderAction,
    },
    /// Štefan and spiral cycles, Markov graphs, period sets.
    Star {
        #[command(subcommand)]
        action: StarAction,
    },
    /// Admissible periods, forcing and chains along a (k, l)-vein.
    Vein {
        #[command(subcommand)]
        action: VeinAction,
    },
    /// Centers, wakes and parameter rays.
    Mandel {
        #[command(subcommand)]
        action: MandelAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum OrderAction {
    /// Compare two periods under >_k.
    Compare {
        #[arg(long, default_value_t = 2)]
        k: u64,
        n: u64,
        m: u64,
    },
    /// Periods forced by n, up to the horizon.
    Downset {
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 60)]
        horizon: u64,
    },
    /// Down-set of k + l against its closed-form description.
    Crosscheck {
        #[arg(long)]
        k: u64,
        /// Every l in 1..k when omitted.
        #[arg(long)]
        l: Option<u64>,
        #[arg(long, default_value_t = 60)]
        horizon: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum StarAction {
    /// The Štefan cycle (k = 2) or spiral cycle of period n.
    Build {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Markov graph of the cycle.
    Markov {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Periods read off nonrepetitive loops of the Markov graph.
    Periods {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        horizon: u64,
    },
    /// Periods of the piecewise-linear model, by exact orbit replay.
    Oracle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        horizon: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VeinAction {
    /// Periods occurring on the vein.
    Admissible {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, visible_alias = "horizon", default_value_t = 60)]
        max: u64,
    },
    /// Which of two components lies farther along the vein.
    Force {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        p: Option<u64>,
        n1: u64,
        n2: u64,
    },
    /// Explicit descending chain of periods.
    Chain {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
        #[arg(long, visible_alias = "horizon", default_value_t = 60)]
        max: u64,
    },
    /// Štefan cycle of period n to a spiral cycle on a k-star.
    Surgery {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Spiral cycle of period n to one of period n + 1 on the next vein.
    Transform {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Visible components seen from the period-k component.
    Visible {
        #[arg(long)]
        k: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum MandelAction {
    /// Centers of exact period n.
    Centers {
        #[arg(long)]
        n: u32,
        /// Center cache file, read if it holds period n, appended otherwise.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Order of the real centers c_n against the Sharkovsky order.
    VerifyReal {
        #[arg(long, visible_alias = "max-period", default_value_t = 10)]
        max: u32,
    },
    /// Angles of the two rays bounding the p/k-wake.
    WakeAngles {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u64,
    },
    /// Parameter ray of the given angle, e.g. 1/7.
    TraceRay {
        angle: String,
        /// Last potential level 1 + 2^-depth.
        #[arg(long, default_value_t = 40)]
        depth: u32,
    },
    /// Periods of the centers inside the p/k-wake.
    VerifyLimb {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        l: u64,
        #[arg(long, visible_alias = "horizon", default_value_t = 8)]
        max: u32,
    },
}
