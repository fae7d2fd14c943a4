//! Deterministic 80/18/2 benign splits; every attack row lands in test.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FlowError, FlowTable, Label};

/// Minimum benign population for a meaningful split.
pub const MIN_BENIGN_ROWS: usize = 100;

/// Benign-only train/validation plus a mixed test set.
#[derive(Debug, Clone)]
pub struct SplitSet {
    pub train: FlowTable,
    pub test: FlowTable,
    pub validation: FlowTable,
    pub split_seed: u64,
}

/// Partitions benign rows 80% train / 18% test / 2% validation and
/// routes every ddos row into test. Deterministic in `(table, seed)`.
pub fn split(table: &FlowTable, seed: u64) -> Result<SplitSet, FlowError> {
    let benign: Vec<usize> = (0..table.num_rows())
        .filter(|&r| table.labels()[r] == Label::Benign)
        .collect();
    let ddos: Vec<usize> = (0..table.num_rows())
        .filter(|&r| table.labels()[r] == Label::Ddos)
        .collect();
    if benign.len() < MIN_BENIGN_ROWS {
        return Err(FlowError::TooFewBenign {
            need: MIN_BENIGN_ROWS,
            found: benign.len(),
        });
    }

    let mut shuffled = benign;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let nb = shuffled.len();
    let n_train = ((nb as f64) * 0.80).round() as usize;
    let n_val = ((nb as f64) * 0.02).round() as usize;
    let n_train = n_train.min(nb);
    let n_val = n_val.min(nb - n_train);

    let train_idx = &shuffled[..n_train];
    let val_idx = &shuffled[n_train..n_train + n_val];
    let mut test_idx: Vec<usize> = shuffled[n_train + n_val..].to_vec();
    test_idx.extend_from_slice(&ddos);

    let mut mark = |t: &mut FlowTable, name: &str| {
        t.provenance_mut().steps.push(format!("split:{name}"));
        t.provenance_mut().bump("split_seed", seed);
    };
    let mut train = table.select_rows(train_idx);
    let mut validation = table.select_rows(val_idx);
    let mut test = table.select_rows(&test_idx);
    mark(&mut train, "train");
    mark(&mut validation, "validation");
    mark(&mut test, "test");

    Ok(SplitSet {
        train,
        test,
        validation,
        split_seed: seed,
    })
}
