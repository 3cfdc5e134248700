//! Command-line grammar.

use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::Format;

#[derive(Parser, Debug)]
#[command(
    name = "halfint",
    version,
    about = "Plus-space eigenforms, twisted L-values, moments and real zeros"
)]
pub struct Cli {
    /// key = value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Ignore any configured cache directory.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Override one configuration key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClosedForm {
    /// 0 unless d | c, else c²φ(d)/d.
    Stated,
    /// 0 unless d | c, else (c²/d)·c_d(c/d) with c_d a Ramanujan sum.
    Ramanujan,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Echelon basis of S⁺_{k+1/2}(4) (--k) or S_w(1) (--weight).
    #[command(group(ArgGroup::new("space").required(true).args(["k", "weight"])))]
    Basis {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long, default_value_t = 100)]
        trunc: usize,
    },
    /// Hecke eigenbasis of the plus space with the matched lifts.
    Eigenbasis {
        #[arg(long)]
        k: u32,
        /// Coefficients to print per form.
        #[arg(long, default_value_t = 30)]
        show: usize,
    },
    /// T(p²) eigenvalues against the lift's a_f(p).
    Lift {
        #[arg(long)]
        k: u32,
    },
    /// Central values L(1/2, f ⊗ χ_d) for every eigenform of one weight.
    #[command(group(ArgGroup::new("discs").required(true).args(["d", "d_max"])))]
    Lvalue {
        #[arg(long)]
        weight: u32,
        /// Comma-separated discriminants.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        d: Vec<i64>,
        /// All discriminants of the right sign up to this size.
        #[arg(long)]
        d_max: Option<u64>,
    },
    /// Coefficient-square ratios against L-value ratios.
    WaldspurgerCheck {
        #[arg(long)]
        k: u32,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        d: Vec<i64>,
    },
    /// Certified real zeros on Re z = 0 or Re z = -1/2.
    Zeros {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        yfloor: f64,
    },
    /// Short-interval sign statistics of √α_g c_g(|d|), as CSV.
    Signchanges {
        #[arg(long)]
        k: u32,
        #[arg(long = "X")]
        x: u64,
        #[arg(long = "H")]
        h: u64,
        #[arg(long, default_value_t = 1)]
        step: u64,
    },
    /// First and second moments by both routes.
    Moments {
        #[arg(long = "K")]
        big_k: u32,
        #[arg(long = "X")]
        x: f64,
    },
    /// Exhaustive character-sum grids.
    CharsumVerify {
        #[arg(long, value_enum, default_value_t = ClosedForm::Stated)]
        closed_form: ClosedForm,
    },
    /// G(0), G'(0), γ, ζ'(2) and the constant of the second moment.
    Constants,
    /// Character sums, Shimura identities and Petersson residuals.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis { .. } => "basis",
            Command::Eigenbasis { .. } => "eigenbasis",
            Command::Lift { .. } => "lift",
            Command::Lvalue { .. } => "lvalue",
            Command::WaldspurgerCheck { .. } => "waldspurger-check",
            Command::Zeros { .. } => "zeros",
            Command::Signchanges { .. } => "signchanges",
            Command::Moments { .. } => "moments",
            Command::CharsumVerify { .. } => "charsum-verify",
            Command::Constants => "constants",
            Command::Selftest => "selftest",
        }
    }

    /// Arguments as they enter the report header.
    pub fn args_json(&self) -> Value {
        match self {
            Command::Basis { k, weight, trunc } => {
                json!({ "k": k, "weight": weight, "trunc": trunc })
            }
            Command::Eigenbasis { k, show } => json!({ "k": k, "show": show }),
            Command::Lift { k } => json!({ "k": k }),
            Command::Lvalue { weight, d, d_max } => {
                json!({ "weight": weight, "d": d, "d_max": d_max })
            }
            Command::WaldspurgerCheck { k, d } => json!({ "k": k, "d": d }),
            Command::Zeros { k, alpha, yfloor } => {
                json!({ "k": k, "alpha": alpha, "yfloor": yfloor })
            }
            Command::Signchanges { k, x, h, step } => {
                json!({ "k": k, "X": x, "H": h, "step": step })
            }
            Command::Moments { big_k, x } => json!({ "K": big_k, "X": x }),
            Command::CharsumVerify { closed_form } => {
                json!({ "closed_form": match closed_form { ClosedForm::Stated => "stated", ClosedForm::Ramanujan => "ramanujan" } })
            }
            Command::Constants | Command::Selftest => json!({}),
        }
    }
}
