//! Command-line front end.
//!
//! Exit codes: 0 when every identity or statistical check passes, 1 on a
//! failure, 2 on a usage error. Parameters come from flags, optionally on top
//! of a flat `key = value` file given with `--config`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::duality::{
    build_s, check_bra_identity, check_constructions_agree, check_cutoff, check_intertwining,
    check_sector_blocks, check_sum_rules, duality_matrix, lambda_csv, DualitySource,
};
use crate::dynamics::{duality_closure, point_mass};
use crate::error::{Error, Result};
use crate::generator::{
    build_h_exact, build_h_float, build_h_sector, ModelParams, Rates, Ring, MAX_EXACT_FULL_L,
};
use crate::lattice::{first_site, last_site, lemmas, sites, Config, Positions, Sector, Site, Species};
use crate::measures::{
    canonical, canonical_float, check_a_marginal_independence, check_partition_factorization,
    check_partition_functions, check_reversibility, check_uniqueness, grandcanonical, measure_csv,
    partition_function, profile_csv, pure_measure, stationarity_residual, ShockProfile,
};
use crate::qsym::{
    build_cartan, build_y, check_algebra_relations, check_conjugation_lemma, check_projector_lemma,
    check_symmetry, Sign,
};
use crate::report::Report;
use crate::ExactOp;

/// Largest `L` for the Serre-relation checks.
const MAX_ALGEBRA_L: usize = 2;
/// Largest `L` for the duality checks that build `S`.
const MAX_DUALITY_L: usize = 2;

#[derive(Parser, Debug)]
#[command(
    name = "asep2",
    version,
    about = "Two-component ASEP: exact identities, measures and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check exact identities and print one RELATION line per identity.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Write measures, density profiles or partition functions as CSV.
    Measure {
        #[arg(value_enum)]
        what: MeasureKind,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo estimates of <Q_z(t)> against the duality prediction (JSON).
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Print the generator in the sparse dump format.
    DumpGenerator {
        #[command(flatten)]
        common: Common,
    },
    /// Print a symmetry operator (S, Y1+, Y1-, Y2+, Y2-, L1, L2, L3) in the sparse dump format.
    DumpSymmetry {
        #[arg(long, default_value = "S")]
        which: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Algebra,
    Reversibility,
    Duality,
    Measures,
    Lemmas,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Canonical,
    Grandcanonical,
    Pure,
    Profile,
    Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    Exact,
    Float,
}

/// Flags shared by all subcommands; unset values fall back to the config
/// file and then to the defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Flat key = value parameter file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Half-length of the lattice {-L+1, ..., L}.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub ell: Option<f64>,
    /// Asymmetry sqrt(r/ell); give together with --w instead of --r/--ell.
    #[arg(long)]
    pub q: Option<f64>,
    /// Time scale sqrt(r ell).
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Comma-separated times.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ring: Option<RingArg>,
    #[arg(long)]
    pub species: Option<String>,
    /// Chemical potential of A particles.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Chemical potential of B particles.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Dual coordinates as configurations, e.g. `A000,000B`, separated by commas.
    #[arg(long)]
    pub z: Option<String>,
    /// Initial configuration of the simulation (point mass).
    #[arg(long)]
    pub init: Option<String>,
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub times: Vec<f64>,
    pub trajectories: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub ring: Ring,
    pub species: Species,
    pub nu: f64,
    pub mu: f64,
    pub z: Option<Vec<Config>>,
    pub init: Option<Config>,
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Renders a parameter map in the config file format.
pub fn write_config_file(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("invalid value for {key}: {v:?}")))
}

fn parse_times(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_value::<f64>("t", t.trim())).collect()
}

impl Common {
    /// Fills unset flags from the config file entries.
    fn merged(&self) -> Result<Common> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let map = parse_config_file(&text)?;
        let mut c = self.clone();
        for (k, v) in &map {
            match k.as_str() {
                "L" => c.l = c.l.or(Some(parse_value(k, v)?)),
                "r" => c.r = c.r.or(Some(parse_value(k, v)?)),
                "ell" => c.ell = c.ell.or(Some(parse_value(k, v)?)),
                "q" => c.q = c.q.or(Some(parse_value(k, v)?)),
                "w" => c.w = c.w.or(Some(parse_value(k, v)?)),
                "N" => c.n = c.n.or(Some(parse_value(k, v)?)),
                "M" => c.m = c.m.or(Some(parse_value(k, v)?)),
                "t" => c.t = c.t.clone().or(Some(v.clone())),
                "trajectories" => c.trajectories = c.trajectories.or(Some(parse_value(k, v)?)),
                "seed" => c.seed = c.seed.or(Some(parse_value(k, v)?)),
                "out" => c.out = c.out.clone().or(Some(PathBuf::from(v))),
                "ring" => {
                    let ring = match v.as_str() {
                        "exact" => RingArg::Exact,
                        "float" => RingArg::Float,
                        _ => return Err(Error::Parse(format!("invalid ring {v:?}"))),
                    };
                    c.ring = c.ring.or(Some(ring));
                }
                "species" => c.species = c.species.clone().or(Some(v.clone())),
                "nu" => c.nu = c.nu.or(Some(parse_value(k, v)?)),
                "mu" => c.mu = c.mu.or(Some(parse_value(k, v)?)),
                "z" => c.z = c.z.clone().or(Some(v.clone())),
                "init" => c.init = c.init.clone().or(Some(v.clone())),
                _ => return Err(Error::Parse(format!("unknown key {k:?}"))),
            }
        }
        Ok(c)
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let c = self.merged()?;
        let l = c.l.unwrap_or(2);
        let params = match (c.r, c.ell, c.q, c.w) {
            (_, _, None, None) => ModelParams::new(l, c.r.unwrap_or(2.0), c.ell.unwrap_or(0.5))?,
            (None, None, q, w) => ModelParams::from_q_w(l, q.unwrap_or(2.0), w.unwrap_or(1.0))?,
            _ => {
                return Err(Error::InvalidArgument(
                    "give either r/ell or q/w, not both".into(),
                ))
            }
        };
        let parse_cfg = |s: &str| -> Result<Config> {
            let cfg: Config = s.trim().parse()?;
            if cfg.l() != l {
                return Err(Error::InvalidArgument(format!(
                    "configuration {cfg} does not have 2L = {} sites",
                    2 * l
                )));
            }
            Ok(cfg)
        };
        Ok(RunConfig {
            params,
            n: c.n,
            m: c.m,
            times: c
                .t
                .as_deref()
                .map(parse_times)
                .transpose()?
                .unwrap_or_else(|| vec![0.0, 1.0]),
            trajectories: c.trajectories.unwrap_or(100_000),
            seed: c.seed.unwrap_or(1),
            out: c.out,
            ring: match c.ring {
                Some(RingArg::Float) => Ring::Float,
                _ => Ring::Exact,
            },
            species: c
                .species
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or(Species::A),
            nu: c.nu.unwrap_or(0.0),
            mu: c.mu.unwrap_or(0.0),
            z: c.z
                .as_deref()
                .map(|s| s.split(',').map(parse_cfg).collect())
                .transpose()?,
            init: c.init.as_deref().map(parse_cfg).transpose()?,
        })
    }
}

impl RunConfig {
    fn l(&self) -> usize {
        self.params.l
    }

    fn sector(&self) -> Result<Sector> {
        Sector::new(self.l(), self.n.unwrap_or(0), self.m.unwrap_or(0))
    }

    fn rates_text(&self) -> (String, String) {
        match self.ring {
            Ring::Exact => ("q".into(), "q^-1".into()),
            Ring::Float => (self.params.r.to_string(), self.params.ell.to_string()),
        }
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidLattice(_)
            | Error::InvalidArgument(_)
            | Error::Parse(_)
            | Error::OverlappingCoordinates(_)
            | Error::SiteOutOfRange(_)
            | Error::BondOutOfRange(_)
            | Error::DegenerateWidth => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::result::Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn require_l(cfg: &RunConfig, max: usize, what: &str) -> std::result::Result<(), CliError> {
    if cfg.l() > max {
        Err(CliError::Usage(format!(
            "{what} is limited to L <= {max}, got L = {}",
            cfg.l()
        )))
    } else {
        Ok(())
    }
}

/// Runs one verification suite.
pub fn verify(suite: Suite, cfg: &RunConfig) -> Result<Report> {
    let l = cfg.l();
    let mut report = Report::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Algebra) {
        report.extend(check_symmetry(&build_h_exact(l)?, l)?);
        report.extend(check_algebra_relations(l)?);
    }
    if want(Suite::Reversibility) {
        report.extend(check_reversibility(&build_h_exact(l)?));
        report.extend(check_uniqueness(&cfg.params, 1e-10));
    }
    if want(Suite::Duality) {
        let h = build_h_exact(l)?;
        let d = duality_matrix(DualitySource::ClosedForm, l)?;
        report.extend(check_intertwining(&d, &h));
        report.extend(check_sector_blocks(&d));
        report.extend(check_constructions_agree(l)?);
        let s = build_s(l)?;
        report.extend(check_bra_identity(&s));
        report.extend(check_cutoff(&s)?);
        report.extend(check_sum_rules(l).0);
    }
    if want(Suite::Measures) {
        report.extend(check_partition_functions(l));
        report.extend(check_partition_factorization(l));
        report.extend(check_a_marginal_independence(l));
        let q = cfg.params.q();
        let h = build_h_float(&cfg.params)?;
        for (nu, mu) in [(0.0, 0.0), (cfg.nu, cfg.mu)] {
            let m = grandcanonical(nu, mu, l, q);
            let res = stationarity_residual(&h, &m.full_vector());
            report.check(format!("grandcanonical-stationary[nu={nu},mu={mu}]"), res < 1e-12);
        }
        if q != 1.0 {
            for species in [Species::A, Species::B] {
                let m = pure_measure(species, cfg.nu, l, q);
                let sp = ShockProfile::new(species, cfg.nu, q)?;
                let ok = sites(l).all(|k| (m.marginal(k, species) - sp.density(k as f64)).abs() < 1e-10);
                report.check(format!("shock-profile[{species:?},nu={}]", cfg.nu), ok);
            }
        }
    }
    if want(Suite::Lemmas) {
        report.extend(lemmas::check_counting_lemmas(l));
        report.extend(lemmas::check_permutation_identities(3, l));
        report.extend(check_conjugation_lemma(l)?);
        report.extend(check_projector_lemma(l)?);
    }
    Ok(report)
}

/// Default dual coordinates: single A at either end, a single B, and two mixed pairs.
pub fn default_dual_coordinates(l: usize) -> Result<Vec<Positions>> {
    let (first, last) = (first_site(l), last_site(l));
    let p = |x: &[Site], y: &[Site]| Positions::new(l, x.to_vec(), y.to_vec());
    if l == 1 {
        return [
            p(&[0], &[]),
            p(&[1], &[]),
            p(&[], &[1]),
            p(&[0], &[1]),
            p(&[1], &[0]),
        ]
        .into_iter()
        .collect();
    }
    [
        p(&[first], &[]),
        p(&[last], &[]),
        p(&[], &[first + 1]),
        p(&[first], &[last]),
        p(&[last - 1], &[first + 1]),
    ]
    .into_iter()
    .collect()
}

/// Default initial configuration: two A particles on the left, one B on the right.
pub fn default_initial(l: usize) -> Config {
    let text = if l == 1 {
        "AB".to_string()
    } else {
        format!("AA{}B", "0".repeat(2 * l - 3))
    };
    text.parse().expect("valid configuration")
}

fn measure(what: MeasureKind, cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let l = cfg.l();
    let q = cfg.params.q();
    Ok(match what {
        MeasureKind::Canonical => {
            let s = cfg.sector()?;
            match cfg.ring {
                Ring::Exact => measure_csv(&canonical(s)),
                Ring::Float => measure_csv(&canonical_float(s, q)),
            }
        }
        MeasureKind::Grandcanonical => measure_csv(&grandcanonical(cfg.nu, cfg.mu, l, q)),
        MeasureKind::Pure => {
            let chem = if cfg.species == Species::A { cfg.nu } else { cfg.mu };
            measure_csv(&pure_measure(cfg.species, chem, l, q))
        }
        MeasureKind::Profile => {
            let chem = if cfg.species == Species::A { cfg.nu } else { cfg.mu };
            let sp = ShockProfile::new(cfg.species, chem, q)?;
            let rows: Vec<(Site, f64)> = sites(l).map(|k| (k, sp.density(k as f64))).collect();
            profile_csv(&rows)
        }
        MeasureKind::Partition => {
            let mut out = String::from("N,M,Z\n");
            for s in Sector::all(l) {
                out.push_str(&format!("{},{},{}\n", s.n, s.m, partition_function(s)));
            }
            if cfg.ring == Ring::Exact && l <= MAX_DUALITY_L {
                let (_, rules) = check_sum_rules(l);
                if let Some(path) = &cfg.out {
                    write_file(&path.with_extension("lambda.csv"), &lambda_csv(&rules))?;
                }
            }
            out
        }
    })
}

fn simulate(cfg: &RunConfig) -> std::result::Result<(String, bool), CliError> {
    let l = cfg.l();
    let zs = match &cfg.z {
        Some(cs) => cs.iter().map(Config::to_positions).collect(),
        None => default_dual_coordinates(l)?,
    };
    let init = cfg.init.clone().unwrap_or_else(|| default_initial(l));
    let records = duality_closure(
        &zs,
        &cfg.times,
        &point_mass(&init),
        &cfg.params,
        cfg.trajectories,
        cfg.seed,
    )?;
    let ok = records.iter().all(|r| r.z_score.abs() <= 5.0);
    let json = serde_json::to_string_pretty(&records).map_err(|e| CliError::Failed(e.to_string()))?;
    Ok((json + "\n", ok))
}

fn dump_generator(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let l = cfg.l();
    let (r, e) = cfg.rates_text();
    let sector = match (cfg.n, cfg.m) {
        (None, None) => None,
        _ => Some(cfg.sector()?),
    };
    Ok(match (cfg.ring, sector) {
        (Ring::Exact, None) => build_h_exact(l)?.dump((&r, &e)),
        (Ring::Exact, Some(s)) => build_h_sector(s, &Rates::exact()).dump((&r, &e)),
        (Ring::Float, None) => build_h_float(&cfg.params)?.dump((&r, &e)),
        (Ring::Float, Some(s)) => build_h_sector(s, &cfg.params.float_rates()).dump((&r, &e)),
    })
}

fn symmetry_operator(which: &str, l: usize) -> Result<ExactOp> {
    let y = |i, s| build_y(i, s, l).map(|t| t.op);
    Ok(match which {
        "S" => build_s(l)?.op,
        "Y1+" => y(1, Sign::Plus)?,
        "Y1-" => y(1, Sign::Minus)?,
        "Y2+" => y(2, Sign::Plus)?,
        "Y2-" => y(2, Sign::Minus)?,
        "L1" | "L2" | "L3" => {
            let i: usize = which[1..].parse().expect("digit");
            build_cartan(l).l[i - 1].op.clone()
        }
        _ => return Err(Error::InvalidArgument(format!("unknown operator {which:?}"))),
    })
}

fn dispatch(cli: Cli) -> std::result::Result<bool, CliError> {
    match cli.command {
        Command::Verify { suite, common } => {
            let cfg = common.resolve()?;
            require_l(&cfg, MAX_EXACT_FULL_L, "verify")?;
            if matches!(suite, Suite::Algebra | Suite::All) {
                require_l(&cfg, MAX_ALGEBRA_L, "verify algebra")?;
            }
            if matches!(suite, Suite::Duality | Suite::All) {
                require_l(&cfg, MAX_DUALITY_L, "verify duality")?;
            }
            let report = verify(suite, &cfg)?;
            emit(&cfg.out, &report.to_string())?;
            Ok(report.all_passed())
        }
        Command::Measure { what, common } => {
            let cfg = common.resolve()?;
            if what == MeasureKind::Canonical && cfg.ring == Ring::Exact {
                require_l(&cfg, MAX_EXACT_FULL_L + 2, "exact canonical measure")?;
            }
            let text = measure(what, &cfg)?;
            emit(&cfg.out, &text)?;
            Ok(true)
        }
        Command::Simulate { common } => {
            let cfg = common.resolve()?;
            let (text, ok) = simulate(&cfg)?;
            emit(&cfg.out, &text)?;
            Ok(ok)
        }
        Command::DumpGenerator { common } => {
            let cfg = common.resolve()?;
            emit(&cfg.out, &dump_generator(&cfg)?)?;
            Ok(true)
        }
        Command::DumpSymmetry { which, common } => {
            let cfg = common.resolve()?;
            require_l(&cfg, MAX_DUALITY_L, "dump-symmetry")?;
            let op = symmetry_operator(&which, cfg.l())?;
            emit(&cfg.out, &op.dump(("q", "q^-1")))?;
            Ok(true)
        }
    }
}

/// Parses `args` and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let text = "# desk run\nL = 2\nq = 2\nw = 1\nt = 0,0.5,1\n\nseed=7\n";
        let map = parse_config_file(text).unwrap();
        assert_eq!(map["L"], "2");
        assert_eq!(map["seed"], "7");
        assert_eq!(parse_config_file(&write_config_file(&map)).unwrap(), map);
        assert!(parse_config_file("L 2").is_err());
    }

    #[test]
    fn defaults() {
        let cfg = Common::default().resolve().unwrap();
        assert_eq!((cfg.params.r, cfg.params.ell), (2.0, 0.5));
        assert_eq!(cfg.params.q(), 2.0);
        assert_eq!(cfg.times, vec![0.0, 1.0]);
        assert_eq!(default_initial(2).to_string(), "AA0B");
        let zs = default_dual_coordinates(2).unwrap();
        assert_eq!(zs.len(), 5);
    }

    #[test]
    fn conflicting_rates_rejected() {
        let c = Common {
            r: Some(1.0),
            q: Some(2.0),
            ..Default::default()
        };
        assert!(c.resolve().is_err());
        let c = Common {
            l: Some(0),
            ..Default::default()
        };
        assert!(matches!(
            c.resolve().map_err(CliError::from),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn rates_from_q_w() {
        let c = Common {
            q: Some(3.0),
            w: Some(2.0),
            ..Default::default()
        };
        let p = c.resolve().unwrap().params;
        assert!((p.r - 6.0).abs() < 1e-12 && (p.ell - 2.0 / 3.0).abs() < 1e-12);
    }
}
