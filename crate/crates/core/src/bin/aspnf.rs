use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aspnf::cycles::CycleAnalysis;
use aspnf::generators::{decode_3col, encode_3col, random_kernel_program, UndirectedGraph};
use aspnf::kernel::{antichain_to_kernel, check_kernel, equivalent_mod_projection, kernelize, AntiChain};
use aspnf::normalize::{check_3kernel, three_kernelize};
use aspnf::semantics::{enumerate_answer_sets_with, well_founded, EnumOptions};
use aspnf::text::{export_dot, parse_atom_set, parse_program_with, render_atom_set, ParseOptions};
use aspnf::{Error, Program};

const INCONSISTENT: u8 = 1;
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "aspnf", version, about = "Normal forms for ground normal logic programs")]
struct Cli {
    /// Accept `__`-prefixed atoms in input programs (e.g. transformed output).
    #[arg(long, global = true)]
    allow_reserved: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normalized program.
    Parse {
        file: PathBuf,
        /// Emit the dependency graph in DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Enumerate answer sets, one per line.
    Solve {
        file: PathBuf,
        #[arg(long)]
        max_atoms: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Print the well-founded model.
    Wfs { file: PathBuf },
    /// Check the kernel normal form.
    KernelCheck { file: PathBuf },
    /// Check the 3-kernel normal form.
    #[command(name = "3kernel-check")]
    ThreeKernelCheck { file: PathBuf },
    /// Kernel program with the same answer sets modulo projection.
    Kernelize {
        file: PathBuf,
        #[arg(long)]
        max_atoms: Option<usize>,
    },
    /// Kernel program whose answer sets project onto the anti-chain.
    #[command(name = "antichain2kernel")]
    AntichainToKernel { file: PathBuf },
    /// Long-rule and bridge simplification.
    #[command(name = "3kernelize")]
    ThreeKernelize {
        file: PathBuf,
        /// Write the transformation trace as JSON.
        #[arg(long, value_name = "OUT.json")]
        trace: Option<PathBuf>,
    },
    /// Kernel encoding of 3-colorability.
    #[command(name = "encode-3col")]
    Encode3col { graph: PathBuf },
    /// Read answer sets on stdin and print the colorings.
    #[command(name = "decode-3col")]
    Decode3col { graph: PathBuf },
    /// Compare answer sets modulo projection; exit 0 iff equivalent.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        /// Comma-separated atoms to project on.
        #[arg(long, value_name = "a,b,c")]
        over: String,
        #[arg(long)]
        max_atoms: Option<usize>,
    },
    /// Random kernel program.
    GenKernel {
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        rules: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_body: usize,
    },
    /// Cycles, OR handles and bridges.
    Cycles {
        file: PathBuf,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        #[arg(long)]
        dot: bool,
    },
}

enum Failure {
    Input(String),
    Code(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn options(max_atoms: Option<usize>) -> EnumOptions {
    let options = EnumOptions::from_env();
    match max_atoms {
        Some(n) => options.with_max_atoms(n),
        None => options,
    }
}

fn status(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Code(INCONSISTENT))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let parse_opts = ParseOptions { allow_reserved: cli.allow_reserved };
    let load = |path: &Path| -> Result<Program, Failure> { Ok(parse_program_with(&read(path)?, parse_opts)?) };

    match cli.command {
        Command::Parse { file, dot } => {
            let p = load(&file)?;
            print!("{}", if dot { export_dot(&p) } else { p.to_string() });
        }
        Command::Solve { file, max_atoms, json } => {
            let sets = enumerate_answer_sets_with(&load(&file)?, &options(max_atoms))?;
            if json {
                println!("{}", serde_json::to_string(&sets).expect("answer sets serialize"));
            } else {
                for s in &sets {
                    println!("{}", render_atom_set(s));
                }
            }
            status(!sets.is_empty())?;
        }
        Command::Wfs { file } => {
            let wfs = well_founded(&load(&file)?);
            println!("true: {}", render_atom_set(&wfs.true_atoms));
            println!("false: {}", render_atom_set(&wfs.false_atoms));
            println!("undefined: {}", render_atom_set(&wfs.undefined_atoms));
        }
        Command::KernelCheck { file } => {
            let report = check_kernel(&load(&file)?);
            print!("{report}");
            status(report.is_kernel)?;
        }
        Command::ThreeKernelCheck { file } => {
            let report = check_3kernel(&load(&file)?)?;
            print!("{report}");
            status(report.is_3kernel)?;
        }
        Command::Kernelize { file, max_atoms } => {
            let (kernel, universe) = kernelize(&load(&file)?, &options(max_atoms))?;
            let names: Vec<&str> = universe.iter().map(|a| a.name()).collect();
            println!("% universe: {}", names.join(", "));
            print!("{kernel}");
        }
        Command::AntichainToKernel { file } => {
            let antichain = AntiChain::parse(&read(&file)?)?;
            print!("{}", antichain_to_kernel(&antichain));
        }
        Command::ThreeKernelize { file, trace } => {
            let (out, steps) = three_kernelize(&load(&file)?)?;
            if let Some(path) = trace {
                fs::write(&path, steps.to_json() + "\n")
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            print!("{out}");
        }
        Command::Encode3col { graph } => {
            let g: UndirectedGraph = read(&graph)?.parse()?;
            print!("{}", encode_3col(&g));
        }
        Command::Decode3col { graph } => {
            let g: UndirectedGraph = read(&graph)?.parse()?;
            let input = read(Path::new("-"))?;
            for line in input.lines().map(str::trim) {
                if line.is_empty() || line.starts_with('%') {
                    continue;
                }
                println!("{}", decode_3col(&parse_atom_set(line)?, &g)?);
            }
        }
        Command::Equiv { left, right, over, max_atoms } => {
            let over: BTreeSet<_> = parse_atom_set(&over)?;
            let same = equivalent_mod_projection(&load(&left)?, &load(&right)?, &over, &options(max_atoms))?;
            println!("{}", if same { "equivalent" } else { "not equivalent" });
            status(same)?;
        }
        Command::GenKernel { atoms, rules, seed, max_body } => {
            print!("{}", random_kernel_program(atoms, rules, max_body, seed)?);
        }
        Command::Cycles { file, json, dot } => {
            let analysis = CycleAnalysis::new(&load(&file)?)?;
            let report = analysis.report();
            if json {
                println!("{}", report.to_json());
            } else if dot {
                print!("{}", report.to_dot());
            } else {
                for c in analysis.cycles() {
                    println!("{} cycle of size {}: {c}", c.parity(), c.size());
                    for h in &c.and_handles {
                        let lits: Vec<String> = h.handle.iter().map(ToString::to_string).collect();
                        println!("  AND handle on {}: {}", c.atoms[h.position], lits.join(", "));
                    }
                    for h in analysis.or_handles(c) {
                        let lits: Vec<String> = h.handle.iter().map(ToString::to_string).collect();
                        println!("  OR handle on {}: {}", h.target, lits.join(", "));
                    }
                }
                for b in analysis.bridges() {
                    println!("{b}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Code(code)) => ExitCode::from(code),
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
