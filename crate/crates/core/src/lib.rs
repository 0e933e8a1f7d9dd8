//! CRC-aided list successive-cancellation decoding of polar codes with
//! behavioral models of three path-memory architectures: a traditional
//! register/crossbar memory, a folded SRAM memory with block indices, and a
//! merged memory that recovers decoded bits from stored partial-sums.

pub mod arch;
pub mod bits;
pub mod config;
pub mod construction;
pub mod cost;
pub mod crc;
pub mod decoder;
pub mod error;
pub mod polar;
pub mod scalar;
pub mod sim;
pub mod trace;
pub mod verify;

pub use arch::MemoryKind;
pub use bits::BitVector;
pub use config::PolarCodeConfig;
pub use crc::CrcPoly;
pub use decoder::{DecodeOptions, DecodeOutput, ListDecoder};
pub use error::{Error, Result};
pub use scalar::Llr;
pub use trace::ScheduleTrace;

pub type ListDecoderF64 = ListDecoder<f64>;
pub type ListDecoderF32 = ListDecoder<f32>;
