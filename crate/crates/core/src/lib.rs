pub mod canonical;
pub mod cas;
pub mod digest;
pub mod envelope;
pub mod exchange;
pub mod explorer;
pub mod ledger;
pub mod telemetry;
