//! Hypergraph product codes from biregular Tanner graphs, decoded with
//! Small-Set-Flip and a line-projection post-decoder.

pub mod bits;
pub mod cdec;
pub mod gf2;
pub mod hgp;
pub mod pal;
pub mod pipeline;
pub mod sim;
pub mod ssf;
pub mod tanner;

pub use hgp::{ErrorSupport, FlipSet, HgpCode, LocalView, Syndrome};
pub use pal::{DecodeOutcome, LineCalibration, PalDecoder};
pub use pipeline::{Decoder, DecoderKind, DecoderSpec};
pub use ssf::{Score, SsfOptions};
pub use tanner::{peg_construct, Side, TannerGraph};
