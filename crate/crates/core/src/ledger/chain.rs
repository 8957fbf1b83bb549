use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use primitive_types::U256;

use crate::digest::Hash;

use super::address::Address;
use super::block::{genesis_state, seal_block, verify_chain, Block};
use super::keys::Signer;
use super::state::{ChainState, GenesisConfig};
use super::tx::Transaction;
use super::{ChainError, LedgerError, SealError};

/// A verified block list together with the state it produces.
///
/// Mutation goes through `&mut self`, so there is one writer at a time;
/// readers either see the state before a block or after it.
#[derive(Debug, Clone)]
pub struct Chain {
    blocks: Vec<Block>,
    state: ChainState,
}

impl Chain {
    pub fn new(genesis: GenesisConfig, sealer: &dyn Signer) -> Self {
        let block = Block::genesis(sealer);
        let state = genesis_state(genesis, &block);
        Chain {
            blocks: vec![block],
            state,
        }
    }

    /// Rebuild a chain from stored blocks, verifying it completely.
    pub fn from_blocks(blocks: Vec<Block>, genesis: &GenesisConfig) -> Result<Self, ChainError> {
        let state = verify_chain(&blocks, genesis)?;
        Ok(Chain { blocks, state })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn head(&self) -> &Block {
        self.blocks.last().expect("chain always holds genesis")
    }

    pub fn seal(
        &mut self,
        pending: Vec<Transaction>,
        sealer: &dyn Signer,
        timestamp: u64,
    ) -> Result<&Block, SealError> {
        let (block, state) = seal_block(pending, &self.state, sealer, timestamp)?;
        self.blocks.push(block);
        self.state = state;
        Ok(self.head())
    }

    pub fn query(&self, filter: &TxFilter) -> Vec<TxRow> {
        query_transactions(&self.blocks, filter)
    }

    /// Write every block as one canonical JSON line, replacing `path`.
    pub fn save(&self, path: &Path) -> Result<(), LedgerError> {
        let mut out = BufWriter::new(File::create(path)?);
        for block in &self.blocks {
            write_line(&mut out, block)?;
        }
        out.flush()?;
        out.get_ref().sync_all()?;
        Ok(())
    }

    /// Append the head block to an existing chain file.
    pub fn append_head(&self, path: &Path) -> Result<(), LedgerError> {
        let mut file = OpenOptions::new().append(true).open(path)?;
        write_line(&mut file, self.head())?;
        file.sync_all()?;
        Ok(())
    }

    /// Load and fully verify a chain file.
    pub fn load(path: &Path, genesis: &GenesisConfig) -> Result<Self, LedgerError> {
        let blocks = read_blocks(&std::fs::read(path)?)?;
        Ok(Chain::from_blocks(blocks, genesis)?)
    }
}

fn write_line(out: &mut impl Write, block: &Block) -> std::io::Result<()> {
    out.write_all(&block.encode())?;
    out.write_all(b"\n")
}

/// Parse a chain file: canonical block encodings, each terminated by `\n`.
pub fn read_blocks(bytes: &[u8]) -> Result<Vec<Block>, LedgerError> {
    let Some(body) = bytes.strip_suffix(b"\n") else {
        return Err(LedgerError::ChainFile {
            line: bytes.split(|b| *b == b'\n').count(),
            reason: "missing trailing newline".into(),
        });
    };
    body.split(|b| *b == b'\n')
        .enumerate()
        .map(|(i, line)| {
            Block::decode(line).map_err(|e| LedgerError::ChainFile {
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Selects transactions by sender, receiver and block height.
#[derive(Debug, Clone, Default)]
pub struct TxFilter {
    pub from: Option<Address>,
    pub to: Option<Address>,
    pub heights: Option<RangeInclusive<u64>>,
}

impl TxFilter {
    fn matches(&self, height: u64, tx: &Transaction) -> bool {
        self.from.is_none_or(|a| a == tx.from)
            && self.to.is_none_or(|a| a == tx.to)
            && self.heights.as_ref().is_none_or(|r| r.contains(&height))
    }
}

/// One explorer row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxRow {
    pub tx_hash: Hash,
    pub height: u64,
    pub from: Address,
    pub to: Address,
    pub value: U256,
}

/// Matching transactions in chain order: by height, then position in block.
pub fn query_transactions(blocks: &[Block], filter: &TxFilter) -> Vec<TxRow> {
    blocks
        .iter()
        .flat_map(|block| block.transactions.iter().map(move |tx| (block.height, tx)))
        .filter(|(height, tx)| filter.matches(*height, tx))
        .map(|(height, tx)| TxRow {
            tx_hash: tx.tx_hash,
            height,
            from: tx.from,
            to: tx.to,
            value: tx.value,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::keys::Keypair;
    use crate::ledger::tx::{build_and_sign_tx, Gas};

    fn setup() -> (Chain, Keypair, Keypair, Address) {
        let sealer = Keypair::from_seed([20; 32]);
        let sensor = Keypair::from_seed([21; 32]);
        let bms = Keypair::from_seed([22; 32]).address();
        let genesis = GenesisConfig::new().with_allocation(sensor.address(), U256::from(10_000u64));
        (Chain::new(genesis, &sealer), sealer, sensor, bms)
    }

    fn send(chain: &mut Chain, sealer: &Keypair, sensor: &Keypair, to: Address, n: usize) {
        let base = chain.state().nonce(&sensor.address());
        let txs = (0..n as u64)
            .map(|i| build_and_sign_tx(sensor, to, U256::from(i + 1), base + i, Gas::default()))
            .collect();
        chain
            .seal(txs, sealer, 1_000 + chain.head().height)
            .unwrap();
    }

    #[test]
    fn query_unfiltered_returns_chain_order() {
        let (mut chain, sealer, sensor, bms) = setup();
        send(&mut chain, &sealer, &sensor, bms, 3);
        send(&mut chain, &sealer, &sensor, bms, 2);
        let rows = chain.query(&TxFilter::default());
        assert_eq!(rows.len(), 5);
        assert!(rows.windows(2).all(|w| w[0].height <= w[1].height));
        assert_eq!(
            rows.iter().map(|r| r.height).collect::<Vec<_>>(),
            [1, 1, 1, 2, 2]
        );
    }

    #[test]
    fn query_filters() {
        let (mut chain, sealer, sensor, bms) = setup();
        let other = Keypair::from_seed([23; 32]).address();
        send(&mut chain, &sealer, &sensor, bms, 3);
        send(&mut chain, &sealer, &sensor, other, 2);
        assert_eq!(
            chain
                .query(&TxFilter {
                    to: Some(bms),
                    ..Default::default()
                })
                .len(),
            3
        );
        assert_eq!(
            chain
                .query(&TxFilter {
                    from: Some(sensor.address()),
                    ..Default::default()
                })
                .len(),
            5
        );
        assert_eq!(
            chain
                .query(&TxFilter {
                    heights: Some(2..=2),
                    ..Default::default()
                })
                .len(),
            2
        );
        let unknown = Keypair::from_seed([24; 32]).address();
        assert!(chain
            .query(&TxFilter {
                to: Some(unknown),
                ..Default::default()
            })
            .is_empty());
    }

    #[test]
    fn save_load_replays_identically() {
        let (mut chain, sealer, sensor, bms) = setup();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.jsonl");
        send(&mut chain, &sealer, &sensor, bms, 3);
        chain.save(&path).unwrap();
        send(&mut chain, &sealer, &sensor, bms, 4);
        chain.append_head(&path).unwrap();

        let loaded = Chain::load(&path, chain.state().genesis()).unwrap();
        assert_eq!(loaded.blocks(), chain.blocks());
        assert_eq!(
            loaded.state().accounts_encoding(),
            chain.state().accounts_encoding()
        );
    }

    #[test]
    fn chain_file_framing_is_strict() {
        let (chain, ..) = setup();
        let line = chain.head().encode();
        assert!(read_blocks(&line).is_err());
        let mut doubled = line.clone();
        doubled.extend_from_slice(b"\n\n");
        assert!(read_blocks(&doubled).is_err());
        let mut ok = line;
        ok.push(b'\n');
        assert_eq!(read_blocks(&ok).unwrap().len(), 1);
    }
}
