use shm_cnn::nn;
use shm_cnn::preprocess::{self, SplitSpec};
use shm_cnn::seed::derive_seed;
use shm_cnn::simulator::{self, DatasetConfig};

fn to_samples(table: &preprocess::SampleTable) -> Vec<nn::LabeledSample> {
    table
        .rows
        .iter()
        .map(|r| (preprocess::reshape_sample(r).unwrap(), r.label))
        .collect()
}

fn main() {
    let start = std::time::Instant::now();
    let base = simulator::calibrate_baseline();
    let master = 7u64;
    let cfg = DatasetConfig {
        trials_per_state: 5,
        stride: 16,
        master_seed: master,
        target_rms_n: simulator::SHAKER_VOLTS_RMS * simulator::SHAKER_NEWTONS_PER_VOLT,
        band_low_hz: 20.0,
        band_high_hz: 150.0,
    };
    let (table, _) = simulator::generate_dataset(&base, &cfg).unwrap();
    println!("dataset: {} rows in {:?}", table.len(), start.elapsed());

    let (train_t, test_t) = preprocess::split(
        &table,
        &SplitSpec {
            train_fraction: 0.7,
            seed: derive_seed(master, "split"),
        },
    )
    .unwrap();
    println!("train {} rows / test {} rows", train_t.len(), test_t.len());

    let imp = preprocess::fit_imputer(&train_t).unwrap();
    let train_i = preprocess::apply_imputer(&train_t, &imp);
    let norm = preprocess::fit_normalizer(&train_i).unwrap();
    let train_n = preprocess::apply_normalizer(&train_i, &norm);
    let test_n = preprocess::apply_normalizer(&preprocess::apply_imputer(&test_t, &imp), &norm);

    let train_s = to_samples(&train_n);
    let test_s = to_samples(&test_n);

    let mut net = nn::Network::init(derive_seed(master, "net"));
    let tcfg = nn::TrainConfig {
        epochs: 10,
        batch_size: 16,
        adam: nn::AdamConfig::default(),
        seed: derive_seed(master, "train"),
    };
    let t0 = std::time::Instant::now();
    let metrics = nn::train(&mut net, &train_s, &test_s, &tcfg).unwrap();
    println!("training took {:?}", t0.elapsed());
    for m in &metrics {
        println!(
            "epoch {:2}: train loss {:.4} acc {:.4} | val loss {:.4} acc {:.4}",
            m.epoch, m.train_loss, m.train_acc, m.val_loss, m.val_acc
        );
    }

    // Per-state mean predictions on the test partition.
    let mut sums = [0.0f64; 18];
    let mut counts = [0usize; 18];
    for (row, (map, _)) in test_n.rows.iter().zip(&test_s) {
        let p = net.forward(map).unwrap();
        sums[row.state as usize] += p;
        counts[row.state as usize] += 1;
    }
    let mut max_undamaged = 0.0f64;
    let mut min_damaged = 1.0f64;
    for s in 1..=17 {
        if counts[s] == 0 {
            continue;
        }
        let mean = sums[s] / counts[s] as f64;
        if s <= 9 {
            max_undamaged = max_undamaged.max(mean);
        } else {
            min_damaged = min_damaged.min(mean);
        }
        println!("state {s:2}: mean prediction {mean:.4} over {} rows", counts[s]);
    }
    println!("separation: max undamaged {max_undamaged:.4} < min damaged {min_damaged:.4}: {}",
        max_undamaged < min_damaged);
    println!("total {:?}", start.elapsed());
}
