use std::collections::BTreeMap;
use std::path::Path;

use primitive_types::U256;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, decimal, hex0x, u256};
use crate::digest::{Hash, ZERO_HASH};

use super::address::Address;
use super::tx::Transaction;
use super::{LedgerError, TxError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Account {
    pub address: Address,
    #[serde(with = "u256")]
    pub balance: U256,
    #[serde(with = "decimal")]
    pub nonce: u64,
}

impl Account {
    fn empty(address: Address) -> Self {
        Account {
            address,
            balance: U256::zero(),
            nonce: 0,
        }
    }
}

/// Initial balance allocations, keyed by address.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GenesisConfig {
    alloc: BTreeMap<Address, Balance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
struct Balance(#[serde(with = "u256")] U256);

impl GenesisConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_allocation(mut self, address: Address, balance: U256) -> Self {
        self.alloc.insert(address, Balance(balance));
        self
    }

    pub fn allocations(&self) -> impl Iterator<Item = (Address, U256)> + '_ {
        self.alloc.iter().map(|(a, b)| (*a, b.0))
    }

    /// Sum of all allocations; `None` if it does not fit in 256 bits.
    pub fn total_supply(&self) -> Option<U256> {
        self.alloc
            .values()
            .try_fold(U256::zero(), |acc, b| acc.checked_add(b.0))
    }

    /// Parse a genesis file: a JSON object mapping address to decimal balance.
    pub fn from_json(bytes: &[u8]) -> Result<Self, LedgerError> {
        let config: GenesisConfig =
            serde_json::from_slice(bytes).map_err(|e| LedgerError::Genesis(e.to_string()))?;
        if config.total_supply().is_none() {
            return Err(LedgerError::Genesis(
                "total allocation exceeds 2^256-1".into(),
            ));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, LedgerError> {
        Self::from_json(&std::fs::read(path)?)
    }

    pub fn to_json(&self) -> Vec<u8> {
        canonical::to_vec(self)
    }
}

/// The tip of the chain a state was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Head {
    #[serde(with = "hex0x::digest")]
    pub hash: Hash,
    #[serde(with = "decimal")]
    pub height: u64,
}

/// Account balances and nonces after replaying the chain up to `head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    accounts: BTreeMap<Address, Account>,
    head: Head,
    genesis: GenesisConfig,
    sealer: Address,
}

impl ChainState {
    /// State before any block has been applied.
    pub fn from_genesis(genesis: GenesisConfig, sealer: Address) -> Self {
        let mut accounts: BTreeMap<Address, Account> = genesis
            .allocations()
            .map(|(address, balance)| {
                (
                    address,
                    Account {
                        address,
                        balance,
                        nonce: 0,
                    },
                )
            })
            .collect();
        accounts
            .entry(sealer)
            .or_insert_with(|| Account::empty(sealer));
        ChainState {
            accounts,
            head: Head {
                hash: ZERO_HASH,
                height: 0,
            },
            genesis,
            sealer,
        }
    }

    pub fn account(&self, address: &Address) -> Option<&Account> {
        self.accounts.get(address)
    }

    pub fn balance(&self, address: &Address) -> U256 {
        self.account(address).map_or(U256::zero(), |a| a.balance)
    }

    pub fn nonce(&self, address: &Address) -> u64 {
        self.account(address).map_or(0, |a| a.nonce)
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    /// Canonical encoding of the accounts map, for comparing replays.
    pub fn accounts_encoding(&self) -> Vec<u8> {
        canonical::to_vec(&self.accounts.values().collect::<Vec<_>>())
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub(crate) fn set_head(&mut self, head: Head) {
        self.head = head;
    }

    pub fn genesis(&self) -> &GenesisConfig {
        &self.genesis
    }

    pub fn sealer(&self) -> Address {
        self.sealer
    }

    pub fn total_balance(&self) -> U256 {
        self.accounts
            .values()
            .fold(U256::zero(), |acc, a| acc.saturating_add(a.balance))
    }

    /// Check a transaction against this state without modifying it.
    pub fn verify_tx(&self, tx: &Transaction) -> Result<(), TxError> {
        tx.check_integrity()?;
        let expected = self.nonce(&tx.from);
        if tx.nonce != expected {
            return Err(TxError::NonceMismatch {
                expected,
                found: tx.nonce,
            });
        }
        let available = self.balance(&tx.from);
        let required = tx.fee().and_then(|fee| fee.checked_add(tx.value)).ok_or(
            TxError::InsufficientBalance {
                required: U256::MAX,
                available,
            },
        )?;
        if available < required {
            return Err(TxError::InsufficientBalance {
                required,
                available,
            });
        }
        Ok(())
    }

    /// Verify and apply a transaction in place. On error the state is
    /// unchanged.
    pub fn apply_tx_mut(&mut self, tx: &Transaction) -> Result<(), TxError> {
        self.verify_tx(tx)?;
        let fee = tx.fee().expect("checked by verify_tx");
        let sender = self
            .accounts
            .entry(tx.from)
            .or_insert_with(|| Account::empty(tx.from));
        sender.balance -= tx.value + fee;
        sender.nonce += 1;

        // Credits cannot overflow: every balance is bounded by the genesis
        // total supply, which fits in 256 bits.
        let receiver = self
            .accounts
            .entry(tx.to)
            .or_insert_with(|| Account::empty(tx.to));
        receiver.balance += tx.value;

        if !fee.is_zero() {
            let sealer = self.sealer;
            self.accounts
                .entry(sealer)
                .or_insert_with(|| Account::empty(sealer))
                .balance += fee;
        }
        Ok(())
    }
}

/// Check `tx` against `state`.
pub fn verify_tx(tx: &Transaction, state: &ChainState) -> Result<(), TxError> {
    state.verify_tx(tx)
}

/// Return the state that results from applying `tx`.
pub fn apply_tx(tx: &Transaction, state: &ChainState) -> Result<ChainState, TxError> {
    let mut next = state.clone();
    next.apply_tx_mut(tx)?;
    Ok(next)
}
