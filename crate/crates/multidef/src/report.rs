//! CSV renderings of reports and traces, and rank correlation.

use std::fmt::Write as _;

use multidef_core::analytic::AnalyticResult;
use multidef_core::model::{EquilibriumReport, InterdependentGame};
use multidef_core::search::SearchTrace;

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const ANALYTIC_HEADER: &str = "ne_exists,q_star,epsilon,sw_eq,sw_opt,poa,poa_kind";

pub fn analytic_csv(r: &AnalyticResult) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.ne_exists,
        r.coverage,
        r.epsilon,
        r.sw_eq,
        r.sw_opt,
        opt(r.poa),
        r.poa_kind.as_str()
    )
}

/// Summary line and per-defender utilities, then one line per target.
pub fn equilibrium_csv(game: &InterdependentGame, report: &EquilibriumReport) -> String {
    let mut s = String::from("epsilon,welfare,avg_coverage,poa\n");
    writeln!(
        s,
        "{},{},{},{}",
        report.epsilon,
        report.welfare,
        report.profile.average_defense(game),
        opt(report.poa)
    )
    .unwrap();
    s.push_str("\ndefender,utility\n");
    for (d, u) in report.utilities.iter().enumerate() {
        writeln!(s, "{d},{u}").unwrap();
    }
    s.push_str("\ntarget,owner,attack");
    for c in game.config_ids() {
        write!(s, ",q_{c}").unwrap();
    }
    s.push('\n');
    for j in 0..game.target_count() {
        write!(s, "{},{},{}", game.target_ids()[j], game.owner(j), report.attack.p[j]).unwrap();
        for q in report.profile.row(j) {
            write!(s, ",{q}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn trace_csv(trace: &SearchTrace) -> String {
    let mut s = String::from("point,solves,restart,regret,best,current\n");
    let mut restart = 0;
    for (i, p) in trace.points.iter().enumerate() {
        while restart < trace.restarts.len() && trace.restarts[restart] <= i {
            restart += 1;
        }
        writeln!(s, "{i},{},{},{},{},{}", p.solves, restart, p.regret, p.best, p.current).unwrap();
    }
    s
}

/// Average ranks, ties sharing the mean of their positions.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), None);
        assert_eq!(ranks(&[2.0, 1.0, 2.0, 3.0]), vec![1.5, 0.0, 1.5, 3.0]);
    }
}
