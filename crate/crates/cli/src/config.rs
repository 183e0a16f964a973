use std::fmt;

use qmark_core::QmarkError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    /// Calkin–Wilf series depth.
    pub depth: u32,
    /// Riemann–Stieltjes cells, a power of two.
    pub quad_cells: usize,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-12,
            depth: 24,
            quad_cells: 1 << 12,
            format: Format::Json,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn new(tolerance: f64, depth: u32, quad_cells: usize, format: Format, seed: u64) -> Result<Self, CliError> {
        if !(tolerance > 0.0 && tolerance <= 1e-2) {
            return Err(CliError::Usage(format!("--tol {tolerance} must lie in (0, 1e-2]")));
        }
        if depth > 30 {
            return Err(CliError::Usage(format!("--depth {depth} exceeds 30")));
        }
        if quad_cells < 4 || !quad_cells.is_power_of_two() {
            return Err(CliError::Usage(format!("--cells {quad_cells} must be a power of two >= 4")));
        }
        Ok(RunConfig {
            tolerance,
            depth,
            quad_cells,
            format,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments or an input outside the domain: exit code 2.
    Usage(String),
    /// A computation ran but did not meet its tolerance: exit code 1.
    Residual(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Residual(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Residual(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<QmarkError> for CliError {
    fn from(e: QmarkError) -> Self {
        match e {
            QmarkError::Precision(_) | QmarkError::Inconsistency(_) => CliError::Residual(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
