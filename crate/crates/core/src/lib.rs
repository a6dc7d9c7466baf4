//! The Burnside process on `[k]^n` and its lumped chain on set partitions:
//! exact kernels, samplers, a coupling, and mixing-time analysis.

pub mod analysis;
pub mod cli;
pub mod combinatorics;
pub mod coupling;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod partitions;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use kernel::{lumped_matrix, KernelMatrix};
pub use partitions::{SetPartition, Tuple};
pub use rng::RngStream;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp).max(0) as usize, x)
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(4.0 / 9.0), "0.44444444444444442");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000");
        assert_eq!(fmt_f64(1.25e-20), "1.2500000000000000e-20");
        assert_eq!(fmt_f64(4.0 / 9.0).parse::<f64>().unwrap(), 4.0 / 9.0);
    }
}
