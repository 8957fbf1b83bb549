use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use primitive_types::U256;
use thermoledger::canonical;
use thermoledger::cas::{add_file, cat_file, ObjectHash, ObjectStore};
use thermoledger::envelope::{decrypt, encrypt_for, parse_key_hex, Identity};
use thermoledger::exchange::{fetch_dag, serve, DEFAULT_PORT};
use thermoledger::explorer::{render_table, ExplorerOptions, TableFormat};
use thermoledger::ledger::{
    read_blocks, verify_chain, Address, Chain, Gas, GenesisConfig, Keypair, Signer, Transaction,
    TxFilter,
};
use thermoledger::telemetry::{
    ingest_csv_path, pump, EncodingPolicy, Rotation, RotationPolicy, Temperature,
};

mod failure;

use failure::{Failure, ResultExt};

#[derive(Parser)]
#[command(
    name = "thermoledger",
    version,
    about = "Sensor ledger and encrypted record exchange"
)]
struct Cli {
    /// Directory holding the chain, keys and object store.
    #[arg(
        long,
        env = "THERMOLEDGER_DATA",
        default_value = "thermoledger-data",
        global = true
    )]
    data_dir: PathBuf,

    /// Sealer signing key (default: <data-dir>/sealer.key).
    #[arg(long, env = "THERMOLEDGER_SEALER_KEY", global = true)]
    sealer_key: Option<PathBuf>,

    /// Offset in °C added to readings before scaling to base units.
    #[arg(long, default_value = "0", global = true)]
    offset_c: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a keypair; prints the address or fingerprint.
    Keygen {
        #[arg(long, value_enum, default_value_t = KeyKind::Signing)]
        kind: KeyKind,
        /// Secret key path; the public key goes to `<out>.pub`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Create the chain and its genesis block.
    Init {
        #[arg(long)]
        genesis: PathBuf,
    },
    /// Send CSV readings as transactions and seal them into one block.
    Ingest(IngestArgs),
    /// Seal pending transactions into a block.
    Seal,
    /// Verify the whole chain; exit 1 on any fault.
    Verify,
    /// Print the transaction table.
    Explorer {
        #[arg(long)]
        from: Option<Address>,
        #[arg(long)]
        to: Option<Address>,
        #[arg(long, default_value = "tsv")]
        format: TableFormat,
        /// Show base units instead of °C.
        #[arg(long)]
        raw: bool,
    },
    /// Print an account balance in base units.
    Balance { address: Address },
    /// Publish or fetch encrypted files.
    #[command(subcommand)]
    File(FileCommand),
    /// Serve stored objects to peers until interrupted.
    Serve {
        #[arg(long, env = "THERMOLEDGER_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "0.0.0.0")]
        bind: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyKind {
    Signing,
    Encryption,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    to: Address,
    /// Switch sender address after this many transactions.
    #[arg(long)]
    rotate_every: Option<usize>,
    /// Directory of sender `.key` files, used in file-name order
    /// (default: <data-dir>/sensors).
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long, default_value_t = thermoledger::ledger::DEFAULT_GAS_LIMIT)]
    gas_limit: u64,
    #[arg(long, default_value_t = thermoledger::ledger::DEFAULT_GAS_PRICE)]
    gas_price: u64,
    /// Queue the transactions instead of sealing them.
    #[arg(long)]
    no_seal: bool,
}

#[derive(Subcommand)]
enum FileCommand {
    /// Encrypt a file for one recipient and add it to the store.
    Publish {
        #[arg(long = "in")]
        input: PathBuf,
        /// Recipient public key file.
        #[arg(long)]
        recipient: PathBuf,
    },
    /// Fetch a file from a peer by root hash and decrypt it.
    Fetch {
        #[arg(long)]
        root: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        identity: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Resolved paths and settings shared by every command.
struct Config {
    data_dir: PathBuf,
    sealer_key: PathBuf,
    encoding: EncodingPolicy,
}

impl Config {
    fn resolve(cli: &Cli) -> Result<Self, Failure> {
        let offset: Temperature = cli.offset_c.parse().usage("config")?;
        Ok(Config {
            sealer_key: cli
                .sealer_key
                .clone()
                .unwrap_or_else(|| cli.data_dir.join("sealer.key")),
            data_dir: cli.data_dir.clone(),
            encoding: EncodingPolicy::with_offset(offset).usage("config")?,
        })
    }

    fn chain_path(&self) -> PathBuf {
        self.data_dir.join("chain.jsonl")
    }

    fn genesis_path(&self) -> PathBuf {
        self.data_dir.join("genesis.json")
    }

    fn pending_path(&self) -> PathBuf {
        self.data_dir.join("pending.jsonl")
    }

    fn genesis(&self) -> Result<GenesisConfig, Failure> {
        let path = self.genesis_path();
        if !path.is_file() {
            return Err(Failure::usage(
                "config",
                format!("no genesis at {}; run init", path.display()),
            ));
        }
        GenesisConfig::load(&path).invalid("genesis")
    }

    fn sealer(&self) -> Result<Keypair, Failure> {
        read_signing_key(&self.sealer_key)
    }

    fn chain(&self) -> Result<Chain, Failure> {
        let genesis = self.genesis()?;
        Chain::load(&self.chain_path(), &genesis).invalid("verify")
    }

    fn pending(&self) -> Result<Vec<Transaction>, Failure> {
        let path = self.pending_path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        fs::read_to_string(&path)
            .invalid("io")?
            .lines()
            .map(|line| canonical::from_slice(line.as_bytes()).invalid("pending"))
            .collect()
    }
}

fn read_signing_key(path: &Path) -> Result<Keypair, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage("config", format!("{}: {e}", path.display())))?;
    Keypair::from_hex(&text).invalid("key")
}

fn write_new(path: &Path, contents: &str) -> Result<(), Failure> {
    if path.exists() {
        return Err(Failure::usage(
            "io",
            format!("{} already exists", path.display()),
        ));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).invalid("io")?;
    }
    fs::write(path, contents).invalid("io")
}

fn pub_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".pub");
    PathBuf::from(name)
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn keygen(kind: KeyKind, out: &Path) -> Result<(), Failure> {
    match kind {
        KeyKind::Signing => {
            let key = Keypair::generate();
            write_new(out, &format!("{}\n", key.to_hex()))?;
            write_new(
                &pub_path(out),
                &format!("0x{}\n", hex_encode(&key.public_key())),
            )?;
            println!("{}", key.address());
        }
        KeyKind::Encryption => {
            let id = Identity::generate();
            write_new(out, &format!("{}\n", id.to_hex()))?;
            write_new(
                &pub_path(out),
                &format!("0x{}\n", hex_encode(&id.public_key())),
            )?;
            println!("{}", id.fingerprint());
        }
    }
    Ok(())
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn init(config: &Config, genesis: &Path) -> Result<(), Failure> {
    if config.chain_path().exists() {
        return Err(Failure::usage(
            "init",
            format!("{} already exists", config.chain_path().display()),
        ));
    }
    let bytes = fs::read(genesis)
        .map_err(|e| Failure::usage("config", format!("{}: {e}", genesis.display())))?;
    let genesis = GenesisConfig::from_json(&bytes).invalid("genesis")?;
    let sealer = config.sealer()?;
    fs::create_dir_all(&config.data_dir).invalid("io")?;
    fs::write(config.genesis_path(), genesis.to_json()).invalid("io")?;
    let chain = Chain::new(genesis, &sealer);
    chain.save(&config.chain_path()).invalid("io")?;
    println!("initialized chain at height 0, sealer {}", sealer.address());
    Ok(())
}

fn sensor_pool(dir: &Path) -> Result<Vec<Keypair>, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::usage("config", format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "key"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_signing_key(p)).collect()
}

fn seal_into(config: &Config, chain: &mut Chain, txs: Vec<Transaction>) -> Result<(), Failure> {
    let sealer = config.sealer()?;
    let count = txs.len();
    chain.seal(txs, &sealer, now()).invalid("seal")?;
    chain.append_head(&config.chain_path()).invalid("io")?;
    println!(
        "sealed block {} with {} transactions",
        chain.head().height,
        count
    );
    Ok(())
}

fn ingest(config: &Config, args: &IngestArgs) -> Result<(), Failure> {
    let mut chain = config.chain()?;
    let pending = config.pending()?;
    if !args.no_seal && !pending.is_empty() {
        return Err(Failure::usage(
            "ingest",
            "pending transactions exist; run seal first",
        ));
    }
    let readings = ingest_csv_path(&args.csv).invalid("csv")?;
    let rotation = match args.rotate_every {
        None => Rotation::Never,
        Some(k) => Rotation::every(k)
            .ok_or_else(|| Failure::usage("ingest", "--rotate-every must be positive"))?,
    };
    let pool_dir = args
        .pool
        .clone()
        .unwrap_or_else(|| config.data_dir.join("sensors"));
    let policy = RotationPolicy::new(rotation, sensor_pool(&pool_dir)?);
    let gas = Gas {
        limit: U256::from(args.gas_limit),
        price: U256::from(args.gas_price),
    };

    let mut base = chain.state().clone();
    for tx in &pending {
        base.apply_tx_mut(tx).invalid("pending")?;
    }
    let txs = pump(&readings, &policy, args.to, &base, &config.encoding, gas).invalid("ingest")?;

    if args.no_seal {
        let mut lines: String = pending
            .iter()
            .map(|tx| canonical::to_string(tx) + "\n")
            .collect();
        lines.extend(txs.iter().map(|tx| canonical::to_string(tx) + "\n"));
        fs::write(config.pending_path(), lines).invalid("io")?;
        println!("queued {} transactions", txs.len());
        return Ok(());
    }
    seal_into(config, &mut chain, txs)
}

fn seal(config: &Config) -> Result<(), Failure> {
    let mut chain = config.chain()?;
    let pending = config.pending()?;
    seal_into(config, &mut chain, pending)?;
    if config.pending_path().exists() {
        fs::remove_file(config.pending_path()).invalid("io")?;
    }
    Ok(())
}

fn verify(config: &Config) -> Result<(), Failure> {
    let genesis = config.genesis()?;
    let bytes = fs::read(config.chain_path())
        .map_err(|e| Failure::usage("config", format!("{}: {e}", config.chain_path().display())))?;
    let blocks = read_blocks(&bytes).invalid("verify")?;
    let state = verify_chain(&blocks, &genesis).invalid("verify")?;
    if let Ok(sealer) = config.sealer() {
        if sealer.address() != state.sealer() {
            return Err(Failure::invalid(
                "verify",
                "chain was sealed by a different key",
            ));
        }
    }
    println!("ok: {} blocks, head {}", blocks.len(), state.head().height);
    Ok(())
}

fn file_publish(config: &Config, input: &Path, recipient: &Path) -> Result<(), Failure> {
    let plaintext =
        fs::read(input).map_err(|e| Failure::usage("io", format!("{}: {e}", input.display())))?;
    let key_text = fs::read_to_string(recipient)
        .map_err(|e| Failure::usage("config", format!("{}: {e}", recipient.display())))?;
    let public = parse_key_hex(&key_text).invalid("envelope")?;
    let sealed = encrypt_for(&public, &plaintext).invalid("envelope")?;
    let store = ObjectStore::open(&config.data_dir).invalid("cas")?;
    let root = add_file(&store, &sealed).invalid("cas")?;
    println!("{root}");
    Ok(())
}

fn file_fetch(
    config: &Config,
    root: &str,
    from: &str,
    identity: &Path,
    out: &Path,
) -> Result<(), Failure> {
    let root: ObjectHash = root.parse().usage("cas")?;
    let key_text = fs::read_to_string(identity)
        .map_err(|e| Failure::usage("config", format!("{}: {e}", identity.display())))?;
    let identity = Identity::from_hex(&key_text).invalid("envelope")?;
    let store = ObjectStore::open(&config.data_dir).invalid("cas")?;
    let transferred = fetch_dag(from, &root, &store).invalid("exchange")?;
    let sealed = cat_file(&store, &root).invalid("cas")?;
    let plaintext = decrypt(&sealed, &identity).invalid("envelope")?;
    fs::write(out, plaintext).invalid("io")?;
    println!("fetched {transferred} nodes, wrote {}", out.display());
    Ok(())
}

fn run_serve(config: &Config, bind: &str, port: u16) -> Result<(), Failure> {
    let store = ObjectStore::open(&config.data_dir).invalid("cas")?;
    let handle = serve(Arc::new(store), (bind, port)).invalid("exchange")?;
    println!(
        "serving {} on {}",
        config.data_dir.display(),
        handle.local_addr()
    );
    handle.join();
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = Config::resolve(&cli)?;
    match &cli.command {
        Command::Keygen { kind, out } => keygen(*kind, out),
        Command::Init { genesis } => init(&config, genesis),
        Command::Ingest(args) => ingest(&config, args),
        Command::Seal => seal(&config),
        Command::Verify => verify(&config),
        Command::Explorer {
            from,
            to,
            format,
            raw,
        } => {
            let chain = config.chain()?;
            let rows = chain.query(&TxFilter {
                from: *from,
                to: *to,
                heights: None,
            });
            let options = ExplorerOptions {
                format: *format,
                raw: *raw,
                encoding: config.encoding,
            };
            print!("{}", render_table(&rows, &options));
            Ok(())
        }
        Command::Balance { address } => {
            let chain = config.chain()?;
            println!("{}", chain.state().balance(address));
            Ok(())
        }
        Command::File(FileCommand::Publish { input, recipient }) => {
            file_publish(&config, input, recipient)
        }
        Command::File(FileCommand::Fetch {
            root,
            from,
            identity,
            out,
        }) => file_fetch(&config, root, from, identity, out),
        Command::Serve { port, bind } => run_serve(&config, bind, *port),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
