//! Select an encoding vector for a benign trace by seeded constrained
//! search over the normalized per-packet features.
//!
//! Run with: `cargo run --example encoding_selection`

use specmon::encoding::{self, ConstraintMode, SelectionProblem};
use specmon::ingest;
use specmon::synth::{self, TrafficProfile};
use specmon::HyperParams;

fn main() {
    let hp = HyperParams::default();
    let mut profile = TrafficProfile::benign("train");
    profile.rate_pps = 2000.0;
    profile.duration_s = 3.0;
    let records: Vec<_> = synth::generate_flows(&profile, 4, 11)
        .expect("generate")
        .into_iter()
        .map(|lp| lp.record)
        .collect();

    let features = ingest::to_feature_rows(&records).expect("non-empty");
    let problem = SelectionProblem {
        normalized: encoding::normalize_features(&features),
        w_min: hp.w_min,
        w_max: hp.w_max,
        budget: hp.b,
        mode: ConstraintMode::Hard,
    };

    for budget in [500usize, 2000, 4000] {
        let result = encoding::select_encoding(&problem, budget, 0);
        println!(
            "budget {:5}: w = [{:8.3}, {:8.3}, {:8.3}]  objective = {:10.4}  feasible = {}",
            budget, result.w.0[0], result.w.0[1], result.w.0[2], result.objective_value, result.feasible
        );
    }

    // Relaxed mode only requires 90% of the rows to satisfy the
    // order/convexity constraints.
    let relaxed = SelectionProblem {
        mode: ConstraintMode::Quantile(0.9),
        ..problem
    };
    let result = encoding::select_encoding(&relaxed, 4000, 0);
    println!(
        "quantile 0.9: w = [{:8.3}, {:8.3}, {:8.3}]  objective = {:10.4}  feasible = {}  violated rows = {:.3}",
        result.w.0[0],
        result.w.0[1],
        result.w.0[2],
        result.objective_value,
        result.feasible,
        result.violated_constraint_fraction
    );
}
