//! Behavioral checks of the comparison methods on the benchmark preset.

use mgal::graph::{preset, synth_multiview};
use mgal::harness::{run_experiment, run_seed, ExperimentSpec, Method};
use mgal::nd::RngState;
use mgal::train::{predict, TrainVariant};

/// More labels never hurt much: the adversarial model's mean accuracy at a
/// 30% label ratio stays within a point of the 10% ratio (and generally
/// improves on it).
#[test]
fn accuracy_is_monotone_in_label_ratio() {
    let dataset = synth_multiview(&preset("small").unwrap()).unwrap();
    let mut spec = ExperimentSpec::new(Method::Mgal);
    spec.runs = 2;
    spec.base_seed = 7;
    spec.label_ratio = 0.1;
    let low = run_experiment(&dataset, &spec).unwrap();
    spec.label_ratio = 0.3;
    let high = run_experiment(&dataset, &spec).unwrap();
    assert!(
        high.result.mean >= low.result.mean - 0.01,
        "ratio 0.3 mean {:.4} fell more than a point below ratio 0.1 mean {:.4}",
        high.result.mean,
        low.result.mean
    );
}

/// A single view only reveals one 2+2 grouping of the four classes; within
/// an unseen pair the classifier cannot beat coin flipping by much, while
/// across the groups it separates well.
#[test]
fn single_view_confuses_the_classes_it_cannot_see() {
    let dataset = synth_multiview(&preset("default").unwrap()).unwrap();
    // View 0 distinguishes {0,1} from {2,3}; classes inside each group stay
    // structurally exchangeable.
    let mut spec = ExperimentSpec::new(Method::GcnSingle(0));
    spec.runs = 1;
    spec.base_seed = 7;
    let output = run_experiment(&dataset, &spec).unwrap();

    // Recreate the run's split to score the test set per class pair.
    let streams = RngState::from_seed(run_seed(spec.base_seed, 0));
    let mut split_rng = streams.derive(1);
    let split = mgal::graph::stratified_split(
        &dataset.labels,
        dataset.num_classes,
        spec.label_ratio,
        spec.validation_fraction,
        &mut split_rng,
    )
    .unwrap();
    let single = dataset.select_views(&[0]).unwrap();
    let prediction = predict(
        &single,
        &output.params[0],
        &spec.model,
        TrainVariant::Concat { adversarial: false },
    )
    .unwrap();
    let u = &prediction.us[0];

    // Within-pair accuracy: among test nodes of classes {0,1}, how often is
    // the exact class right? Exchangeability caps this near 1/2.
    let mut pair_correct = 0usize;
    let mut pair_total = 0usize;
    let mut group_correct = 0usize;
    for &i in &split.test {
        let truth = dataset.labels[i];
        let predicted = u.argmax_row(i);
        if truth < 2 {
            pair_total += 1;
            if predicted == truth {
                pair_correct += 1;
            }
        }
        if (predicted < 2) == (truth < 2) {
            group_correct += 1;
        }
    }
    let within_pair = pair_correct as f64 / pair_total as f64;
    let group = group_correct as f64 / split.test.len() as f64;
    assert!(
        (0.30..=0.70).contains(&within_pair),
        "within-pair accuracy {within_pair:.3} should hover near chance"
    );
    assert!(
        group >= 0.9,
        "group accuracy {group:.3} should be high: the view does see that split"
    );
}
