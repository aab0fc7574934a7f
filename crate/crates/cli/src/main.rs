//! Command-line front end: exact partition functions, connection matrices
//! and rank searches, invariant dimensions, spin-orbit analysis, subgroup
//! limits and partition polynomials, with stable line-oriented text I/O.
//!
//! Exit codes: 0 success, 2 parse error, 3 precondition violation,
//! 4 internal invariant breach.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conmat::{
    apply_limit, brauer_invariant_dim, build_matrix, degenerate_witness, enumerate_fragments,
    orbit_closed, saturating_rank, spin_stabilizer, Certificate, Error, FiniteOrthogonalGroup,
    Graph, LimitResult, OneParamSubgroup, PartitionPolynomial, RankReport, TruncatedModel,
    VertexModel,
};

#[derive(Parser)]
#[command(
    name = "conmat",
    version,
    about = "Exact vertex-model partition functions, connection-matrix ranks and tensor invariants over Q(i)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelSource {
    /// Model file with explicit support terms.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "spin",
        required_unless_present = "spin"
    )]
    model: Option<PathBuf>,
    /// Spin file with weighted points.
    #[arg(long, value_name = "FILE")]
    spin: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the partition function of a model on a graph.
    Eval {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Print the connection matrix on enumerated fragments plus a rank report.
    Matrix {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long)]
        k: usize,
        /// Vertex bound for the enumerated fragments.
        #[arg(long, default_value_t = 2)]
        max_vertices: usize,
        /// Degree bound; defaults to the model's support degree
        /// (max(k, 2) for spin models).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Saturating lower-bound search for the connection-matrix rank.
    Rank {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long)]
        k: usize,
        /// Largest fragment vertex class to enumerate.
        #[arg(long)]
        budget: usize,
        /// Independently computed upper bound; hitting it certifies the rank.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Dimension of the tensors fixed by a finite orthogonal group, given by
    /// a group file or as the stabilizer of a spin model.
    Invdim {
        #[arg(
            long,
            value_name = "FILE",
            conflicts_with = "spin",
            required_unless_present = "spin"
        )]
        group: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        spin: Option<PathBuf>,
        #[arg(long)]
        k: usize,
    },
    /// Dimension of the orthogonally invariant tensors, via pair-partition
    /// diagram Gram ranks.
    Brauer {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Orbit analysis of a spin model: closedness, stabilizer order and
    /// invariant dimensions, or a destabilizing witness.
    Spin {
        #[arg(long, value_name = "FILE")]
        spin: PathBuf,
        /// Largest k in the dimension table.
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Limit of a model under a one-parameter subgroup, as a model file,
    /// or the sentinel `NO_LIMIT`.
    Limit {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        oneparam: PathBuf,
        /// Truncation degree the limit is computed at.
        #[arg(long)]
        e: usize,
    },
    /// The symbolic partition polynomial of a graph.
    Pi {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Randomized self-check of the central identities.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        rounds: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 2,
            Error::DivisionByZero | Error::Precondition(_) | Error::SqrtNotInField { .. } => 3,
            Error::Internal(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> conmat::Result<T>) -> Result<T, Failure> {
    let text = read_file(path)?;
    parse(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            code: f.code,
            message: format!("{}: {}", path.display(), f.message),
        }
    })
}

impl ModelSource {
    fn load(&self) -> Result<VertexModel, Failure> {
        let path = self
            .model
            .as_ref()
            .or(self.spin.as_ref())
            .expect("clap enforces one");
        let m = load(path, VertexModel::parse)?;
        if self.spin.is_some() && m.spin().is_none() {
            return Err(Failure {
                code: 3,
                message: format!("{}: file does not define a spin model", path.display()),
            });
        }
        Ok(m)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Eval { source, graph } => {
            let h = source.load()?;
            let g = load(&graph, Graph::parse)?;
            // A truncated support without a spin form cannot answer for
            // vertices beyond its degree bound.
            if let (Some(bound), None) = (h.truncation(), h.spin()) {
                let deg = g.max_degree();
                if deg > bound {
                    return Err(Failure {
                        code: 3,
                        message: format!(
                            "graph has a vertex of degree {deg}, above the model's \
                             declared degree bound {bound}"
                        ),
                    });
                }
            }
            println!("{}", h.partition_function(&g));
            Ok(())
        }
        Command::Matrix {
            source,
            k,
            max_vertices,
            max_degree,
        } => {
            let h = source.load()?;
            let degree = max_degree.unwrap_or_else(|| default_degree(&h, k));
            let fs = enumerate_fragments(k, max_vertices, degree);
            let m = build_matrix(&h, &fs)?;
            let tsv = m.to_tsv();
            if !tsv.is_empty() {
                println!("{tsv}");
            }
            let rank = m.rank_direct();
            let ambient = h.n().pow(k as u32);
            let report = RankReport {
                k,
                rank,
                certified: rank == ambient,
                fragments_used: fs.len(),
                certificate: if rank == ambient {
                    Certificate::HitAmbientBound
                } else {
                    Certificate::None
                },
            };
            println!("{report}");
            Ok(())
        }
        Command::Rank {
            source,
            k,
            budget,
            target,
            max_degree,
        } => {
            let h = source.load()?;
            let report = saturating_rank(&h, k, budget, target, max_degree);
            println!("{report}");
            Ok(())
        }
        Command::Invdim { group, spin, k } => {
            let h = if let Some(path) = group {
                load(&path, FiniteOrthogonalGroup::parse)?
            } else {
                let path = spin.expect("clap enforces one");
                let m = load(&path, VertexModel::parse)?;
                let Some(sf) = m.spin() else {
                    return Err(Failure {
                        code: 3,
                        message: format!("{}: file does not define a spin model", path.display()),
                    });
                };
                spin_stabilizer(&sf.points, &sf.weights)?
            };
            println!("{}", h.invariant_dim(k)?);
            Ok(())
        }
        Command::Brauer { n, k } => {
            println!("{}", brauer_invariant_dim(n, k));
            Ok(())
        }
        Command::Spin { spin, kmax } => {
            let m = load(&spin, VertexModel::parse)?;
            let Some(sf) = m.spin() else {
                return Err(Failure {
                    code: 3,
                    message: format!("{}: file does not define a spin model", spin.display()),
                });
            };
            let closed = orbit_closed(&sf.points, &sf.weights)?;
            println!("closed={closed}");
            if closed {
                match spin_stabilizer(&sf.points, &sf.weights) {
                    Ok(stab) => {
                        println!("stabilizer_order={}", stab.order());
                        for k in 1..=kmax {
                            println!("k={k} dim={}", stab.invariant_dim(k)?);
                        }
                    }
                    Err(Error::Precondition(msg)) => {
                        println!("stabilizer=unavailable ({msg})");
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                let witness = degenerate_witness(&sf.points, &sf.weights)?;
                println!("witness:");
                print!("{witness}");
            }
            Ok(())
        }
        Command::Limit { model, oneparam, e } => {
            let m = load(&model, VertexModel::parse)?;
            let lambda = load(&oneparam, OneParamSubgroup::parse)?;
            lambda.verify()?;
            let truncated = if let Some(sf) = m.spin() {
                let rebuilt =
                    VertexModel::from_spin(sf.points.clone(), sf.weights.clone(), m.n(), e)?;
                TruncatedModel::new(rebuilt, e)?
            } else {
                // A declared truncation bound caps what the file represents.
                if let Some(bound) = m.truncation() {
                    if e > bound {
                        return Err(Failure {
                            code: 3,
                            message: format!(
                                "requested degree {e} exceeds the model's declared \
                                 degree bound {bound}"
                            ),
                        });
                    }
                }
                TruncatedModel::new(m.truncate(e), e)?
            };
            match apply_limit(&lambda, &truncated)? {
                LimitResult::Converges(out) => print!("{}", out.model()),
                LimitResult::NoLimit => println!("NO_LIMIT"),
            }
            Ok(())
        }
        Command::Pi { graph, n } => {
            if n == 0 {
                return Err(Failure {
                    code: 3,
                    message: "n must be positive".into(),
                });
            }
            let g = load(&graph, Graph::parse)?;
            println!("{}", PartitionPolynomial::of_graph(&g, n));
            Ok(())
        }
        Command::Selftest { seed, rounds } => {
            let report = conmat::check::run_selftest(seed, rounds)?;
            println!(
                "selftest seed={seed} rounds={} checks={}: ok",
                report.rounds, report.checks
            );
            Ok(())
        }
    }
}

fn default_degree(h: &VertexModel, k: usize) -> usize {
    if h.spin().is_some() {
        k.max(2)
    } else {
        h.support_degree()
    }
}
