//! Wall-clock comparison of the sampling schemes across dimensions.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{Construction, Kind};
use crate::error::{Error, Result};
use crate::sampling::stream_rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingRow {
    pub construction: String,
    pub d: usize,
    pub mean_time_s: f64,
}

/// Instantiate a named sampling scheme at dimension `d`. Recognized names:
/// `rbs`, `ccv`, `ccv-exch`, `aj2`, `rotation`, `gaffke-d`, `lh`.
pub fn construction_by_name(name: &str, d: usize) -> Result<Construction> {
    let c = match name {
        "rbs" => Construction::new(Kind::Rbs { d }),
        "ccv" => Construction::new(Kind::Ccv {
            d,
            offsets: vec![1],
        }),
        "ccv-exch" => Construction::new(Kind::Ccv {
            d,
            offsets: vec![1],
        })
        .exchangeable(),
        "aj2" => Construction::new(Kind::Aj { d, b: 2 }),
        "rotation" => Construction::new(Kind::Rotation { d }),
        "gaffke-d" => Construction::new(Kind::GaffkeD { d }),
        "lh" => Construction::new(Kind::Ilh {
            d,
            t: 1,
            base: None,
        }),
        other => return Err(Error::UnknownKind(other.to_string())),
    };
    Ok(c)
}

/// Mean wall-clock seconds to draw `n` vectors, averaged over `reps` runs,
/// per construction and dimension. `n = 0` produces no rows.
pub fn sampling_time_study(
    names: &[String],
    d_values: &[usize],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for name in names {
        for &d in d_values {
            let sampler = construction_by_name(name, d)?.sampler()?;
            let mut out = vec![0.0; d];
            let start = Instant::now();
            for rep in 0..reps {
                let mut rng = stream_rng(seed, rep as u64);
                for _ in 0..n {
                    sampler.sample_into(&mut rng, &mut out);
                }
            }
            rows.push(TimingRow {
                construction: name.clone(),
                d,
                mean_time_s: start.elapsed().as_secs_f64() / reps as f64,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_draws_zero_rows() {
        let rows =
            sampling_time_study(&["rbs".to_string()], &[3], 0, 5, 0).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn times_positive_and_rbs_beats_segment_ccv_at_high_dimension() {
        let names = vec!["rbs".to_string(), "ccv-exch".to_string()];
        let rows = sampling_time_study(&names, &[20], 5000, 3, 1).unwrap();
        for row in &rows {
            assert!(row.mean_time_s > 0.0);
        }
        let time_of = |name: &str| {
            rows.iter()
                .find(|r| r.construction == name)
                .unwrap()
                .mean_time_s
        };
        assert!(
            time_of("rbs") < time_of("ccv-exch"),
            "rbs {} vs ccv {}",
            time_of("rbs"),
            time_of("ccv-exch")
        );
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(
            construction_by_name("nope", 3),
            Err(Error::UnknownKind(_))
        ));
    }
}
