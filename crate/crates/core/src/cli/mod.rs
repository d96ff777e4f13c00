//! The `bqc` command line: circuit files, configuration, the JSON-lines
//! wire format and the socket transport.
//!
//! Exit codes: 0 success, 1 a check failed (audit or verification),
//! 2 bad input (circuit file, flags, caps), 3 protocol violation,
//! 4 transport failure.

mod circuit_file;
mod commands;
mod wire;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use circuit_file::parse_circuit;
pub use commands::{parse_policy, Cli, Command};
pub use wire::{decode_frame, encode_frame, serve_bob, LineChannel, TcpTransport};

use crate::compile::{CompiledCircuit, Protocol};
use crate::engine::SessionConfig;
use crate::error::{Error, Result};
use crate::gadget::CascadeMode;
use crate::simcore::MAX_WIRES;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;
pub const EXIT_TRANSPORT: i32 = 4;

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "BQC_SEED";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Protocol(_) | Error::WireFormat(_) | Error::PendingSCorrection(_) => EXIT_PROTOCOL,
        Error::Transport(_) => EXIT_TRANSPORT,
        Error::LeakageMismatch(_) => EXIT_CHECK_FAILED,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportMode {
    InProcess,
    /// Alice connects to a Bob served at this address.
    Socket(String),
}

/// Resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub protocol: Protocol,
    pub alice_seed: u64,
    pub bob_seed: u64,
    pub adversary_seed: u64,
    pub transport: TransportMode,
    pub max_wires: usize,
    pub max_slots: usize,
    pub cascade: CascadeMode,
    pub encrypt: bool,
    pub output: Option<PathBuf>,
}

impl Config {
    /// Seeds for Alice, Bob and the adversary are derived from one seed.
    pub fn new(protocol: Protocol, seed: u64) -> Self {
        Config {
            protocol,
            alice_seed: seed,
            bob_seed: seed.wrapping_add(1),
            adversary_seed: seed.wrapping_add(2),
            transport: TransportMode::InProcess,
            max_wires: MAX_WIRES,
            max_slots: usize::MAX,
            cascade: CascadeMode::default(),
            encrypt: true,
            output: None,
        }
    }

    pub fn session(&self) -> SessionConfig {
        SessionConfig {
            protocol: self.protocol,
            alice_seed: self.alice_seed,
            bob_seed: self.bob_seed,
            adversary_seed: self.adversary_seed,
            mode: self.cascade,
            encrypt: self.encrypt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_wires > MAX_WIRES {
            return Err(Error::Config(format!("max wires {} is above the hard cap {MAX_WIRES}", self.max_wires)));
        }
        Ok(())
    }

    /// The register plus one teleported ancilla must fit the wire cap.
    pub fn check_caps(&self, compiled: &CompiledCircuit) -> Result<()> {
        let peak = compiled.num_wires() + usize::from(compiled.num_slots() > 0);
        if peak > self.max_wires {
            return Err(Error::CapsExceeded(format!("{peak} simultaneous wires, cap is {}", self.max_wires)));
        }
        if compiled.num_slots() > self.max_slots {
            return Err(Error::CapsExceeded(format!("{} slots, cap is {}", compiled.num_slots(), self.max_slots)));
        }
        Ok(())
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Reports go to stdout, errors to stderr.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.report.as_bytes());
            let _ = stdout.flush();
            if let Some(path) = &outcome.output {
                if let Err(e) = std::fs::write(path, &outcome.report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
