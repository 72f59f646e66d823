//! Circuit counts against system size for each estimator.

use fast_shadow::harness::{scaling_study, ScalingKind, SweepConfig};
use fast_shadow::mapping::MappingKind;

fn main() -> fast_shadow::Result<()> {
    for (kind, mapping) in [
        (ScalingKind::Fast1, MappingKind::Jw),
        (ScalingKind::Fast1, MappingKind::Tt),
        (ScalingKind::Fast2, MappingKind::Bk),
        (ScalingKind::BruteForce, MappingKind::Jw),
    ] {
        let report = scaling_study(&SweepConfig::new(kind, mapping, vec![2, 3, 4, 5, 6], 0.2))?;
        let counts: Vec<String> = report.rows.iter().map(|r| format!("n={}:{}", r.n, r.circuits_total)).collect();
        println!("{kind:?}/{mapping}: {}  slope {:.2}", counts.join(" "), report.circuit_slope);
    }
    Ok(())
}
