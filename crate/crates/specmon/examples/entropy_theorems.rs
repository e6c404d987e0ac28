//! Verify the six information-loss theorems for feature-extraction methods
//! over a stationary Gaussian packet-feature process: closed forms plus
//! Monte-Carlo entropy estimates with 3-sigma bound checks.
//!
//! Run with: `cargo run --example entropy_theorems --release`

use specmon::entropy::{self, GaussianProcessSpec, GAUSS_K};

fn main() {
    println!("entropy of N(0,1): {:.6} nats (= ln K, K = {GAUSS_K:.6})", entropy::entropy_gaussian(1.0).unwrap());

    let spec = GaussianProcessSpec::stationary(50, 1.0);
    let w = 10.0;
    println!(
        "stationary process: N = {}, sigma = {}, per-packet entropy {:.4} nats",
        spec.len(),
        spec.sigma[0],
        entropy::packet_entropy(&spec)
    );
    println!(
        "closed forms: min-max loss >= {:.3}, avg loss in [{:.3}, {:.3}] (exact {:.3}), variance loss {:.3}",
        entropy::loss_minmax_lower_bound(&spec),
        entropy::loss_avg_bounds(&spec).0,
        entropy::loss_avg_bounds(&spec).1,
        entropy::loss_avg_exact(&spec),
        entropy::loss_variance(&spec).unwrap()
    );
    println!(
        "frequency-domain loss {:.3}, reduction vs averaging {:.3}",
        entropy::loss_whisper(&spec, w).unwrap(),
        entropy::loss_whisper_reduction_avg(&spec, w).unwrap()
    );

    println!("\ntheorem verification (50k Monte-Carlo samples where applicable):");
    for theorem in 1..=6u8 {
        let report = entropy::verify_theorem(theorem, &spec, 50_000, w, 40 + theorem as u64)
            .expect("valid spec");
        let mc = match (report.monte_carlo, report.mc_stderr) {
            (Some(mc), Some(se)) => format!("mc {mc:9.3} +- {se:.3}"),
            _ => "closed form only   ".to_string(),
        };
        println!(
            "theorem {}: {:8} closed {:9.3}  {}  {}",
            report.theorem,
            format!("{:?}", report.method),
            report.closed_form,
            mc,
            if report.bound_satisfied { "ok" } else { "VIOLATED" }
        );
        assert!(report.bound_satisfied);
    }
}
