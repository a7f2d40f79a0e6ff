use crate::config::{resolve_k, Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::Result;
use densmat::exact::{EnsembleParams, MomentMethod, MomentTable};

/// Writes `moments`: the three exact routes side by side with their largest
/// relative discrepancy.
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let n = args.n.unwrap_or(2);
    let k = resolve_k(args, n, 2)?;
    let q_max = args.q_max.unwrap_or(10);
    let max_rel = config.threshold("relative_discrepancy", args.threshold_rel, 1e-10);
    config.n = Some(n);
    config.k = Some(k);
    config.q_max = Some(q_max);
    let p = EnsembleParams::new(n, k)?;
    let explicit = MomentTable::compute(p, q_max, MomentMethod::Explicit)?;
    let recurrence = MomentTable::compute(p, q_max, MomentMethod::Recurrence)?;
    let bridge = MomentTable::compute(p, q_max, MomentMethod::WishartBridge)?;
    let mut run = Run::new(config, &args.out)?;

    let mut table = Table::new(
        "moments",
        [
            "q",
            "explicit",
            "recurrence",
            "wishart_bridge",
            "max_rel_discrepancy",
        ],
    );
    let mut worst: f64 = 0.0;
    for q in 1..=q_max {
        let e = explicit.get(q).expect("q <= q_max");
        let r = recurrence.get(q).expect("q <= q_max");
        let b = bridge.get(q).expect("q <= q_max");
        let d = ((e - r).abs().max((e - b).abs()).max((r - b).abs())) / e.abs();
        worst = worst.max(d);
        table.push(vec![q.into(), e.into(), r.into(), b.into(), d.into()]);
    }
    run.write(&table)?;
    run.check(Check::below("routes_agree", worst, max_rel));
    Ok(run)
}
