//! Single-tier cyclotomic FFTs built as explicit bilinear networks.

pub mod conv;
pub mod cosets;
pub mod network;

pub use conv::{direct_conv, short_conv, ShortConvAlg, MAX_CONV_LENGTH};
pub use cosets::CyclotomicCosets;
pub use network::{build_dcfft, build_network, build_scfft, eval_network, BilinearNetwork, Form};
