pub mod experiment;
pub mod graph;
pub mod sbm;
pub mod two_agent;

use std::path::PathBuf;

use clap::ValueEnum;
use opdyn_core::graph::Normalization;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormalizationArg {
    #[value(name = "row-normalized")]
    RowNormalized,
    #[value(name = "unit-weight")]
    UnitWeight,
}

impl From<NormalizationArg> for Normalization {
    fn from(v: NormalizationArg) -> Self {
        match v {
            NormalizationArg::RowNormalized => Normalization::RowNormalized,
            NormalizationArg::UnitWeight => Normalization::UnitWeight,
        }
    }
}

/// Output directory resolution: explicit flag, then OPDYN_OUT_DIR, then cwd.
pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("OPDYN_OUT_DIR").map(Into::into))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn print_json<T: serde::Serialize>(value: &T) -> crate::CmdResult {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}
