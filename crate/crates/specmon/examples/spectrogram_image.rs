//! Export the frequency features of one flow as a PPM spectrogram image
//! (time on the x-axis, frequency component on the y-axis, log-power as a
//! black-blue-magenta-yellow-white colormap).
//!
//! Run with: `cargo run --example spectrogram_image`

use specmon::ingest;
use specmon::spectral::{self, EncodingVector};
use specmon::synth::{self, TrafficProfile};
use specmon::HyperParams;

fn main() {
    let hp = HyperParams::default();
    let w = EncodingVector(vec![10.0, 10.0, 10.0]);

    // A pulsing low-rate burst flow gives the spectrogram visible structure.
    let profile = TrafficProfile::low_rate_burst("burst", 0.25, 400);
    let records: Vec<_> = synth::generate(&profile, 5)
        .expect("generate")
        .into_iter()
        .map(|lp| lp.record)
        .collect();

    let s = ingest::to_feature_rows(&records).expect("non-empty");
    let r = spectral::extract(&s, &w, &hp).expect("extract");
    println!(
        "flow {}: {} packets -> {} frames x {} components",
        profile.flow_id,
        records.len(),
        r.n_f(),
        r.k_f()
    );

    let path = std::env::temp_dir().join("specmon_burst.ppm");
    spectral::spectrogram_export(&r, &path).expect("export");
    let bytes = std::fs::metadata(&path).expect("stat").len();
    println!("wrote {} ({} bytes, P6 {}x{})", path.display(), bytes, r.n_f(), r.k_f());
}
