//! CSV writers. Every float is printed with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{CensusReport, DensityReport, ShockTrack, SpreadReport};
use crate::control::LinearControl;
use crate::error::Result;
use crate::fronttrack::Simulation;
use crate::riemann::RiemannSolution;

pub(crate) fn g(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(g).collect::<Vec<_>>().join(",")
}

pub fn interactions_csv(sim: &Simulation) -> String {
    let n = sim.model().dim();
    let mut s = String::from("index,t,x,incoming,outgoing,v_before,v_after,q_before,q_after,dropped");
    for k in 1..=n {
        let _ = write!(s, ",sigma{k}");
    }
    s.push('\n');
    for e in sim.interactions() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            e.index,
            join([e.time, e.x]),
            e.incoming.len(),
            e.outgoing.len(),
            join([e.v_before, e.v_after, e.q_before, e.q_after, e.dropped]),
            join(e.raw_sigma.iter().copied())
        );
    }
    s
}

pub fn functionals_csv(sim: &Simulation) -> String {
    let mut s = String::from("t,v,q,tv\n");
    for h in sim.history() {
        let _ = writeln!(s, "{}", join([h.t, h.v, h.q, h.tv]));
    }
    s
}

pub fn census_csv(reports: &[CensusReport]) -> String {
    let mut s = String::from("t,family,shocks,largest_gap,tv,creations\n");
    for r in reports {
        for (i, list) in r.shocks.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                g(r.t),
                i + 1,
                list.len(),
                g(r.largest_gap[i]),
                g(r.total_variation),
                r.creation_count()
            );
        }
    }
    s
}

pub fn density_csv(reports: &[DensityReport]) -> String {
    let mut s = String::from("t,x_lo,x_hi,density,kappa_hat\n");
    for r in reports {
        let w = r.cell_width();
        for (k, d) in r.densities.iter().enumerate() {
            let lo = r.probe.0 + w * k as f64;
            let _ = writeln!(s, "{}", join([r.t, lo, lo + w, *d, r.kappa_hat]));
        }
    }
    s
}

pub fn tracks_csv(tracks: &[ShockTrack]) -> String {
    let mut s = String::from("track,t,x,strength,lineage\n");
    for tr in tracks {
        for smp in &tr.samples {
            let _ = writeln!(s, "{},{},{}", tr.lineage, join([smp.t, smp.x, smp.strength]), smp.lineage);
        }
    }
    s
}

pub fn spread_csv(reports: &[(f64, f64, SpreadReport)]) -> String {
    let mut s = String::from("x,y,s,ratio\n");
    for (x, y, r) in reports {
        for (t, q) in &r.samples {
            let _ = writeln!(s, "{}", join([*x, *y, *t, *q]));
        }
    }
    s
}

pub fn riemann_csv(sol: &RiemannSolution) -> String {
    let n = sol.sigma.len();
    let mut s = String::from("family,sigma,kind,speed_left,speed_right");
    for side in ["left", "right"] {
        for k in 1..=n {
            let _ = write!(s, ",{side}_u{k}");
        }
    }
    s.push('\n');
    for w in &sol.waves {
        let kind = w.kind.map_or("null", |k| k.as_str());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            w.family + 1,
            g(w.sigma),
            kind,
            join([w.speed_left, w.speed_right]),
            join(w.left.iter().copied()),
            join(w.right.iter().copied())
        );
    }
    s
}

pub fn boundary_data_csv(ctl: &LinearControl) -> String {
    let mut s = String::from("family,side,t_start,t_end,value\n");
    for i in 0..ctl.speeds.len() {
        let side = if i < ctl.negative_families { "b" } else { "a" };
        let bd = ctl.boundary_data(i);
        let mut edges = vec![0.0];
        edges.extend(&bd.breaks);
        edges.push(ctl.horizon);
        for (k, v) in bd.values.iter().enumerate() {
            let _ = writeln!(s, "{},{side},{}", i + 1, join([edges[k], edges[k + 1], *v]));
        }
    }
    s
}

fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

/// Turns the CSV reports of a finished run into gnuplot-ready data files in
/// `dir/plots`: `t` vs `κ̂`, `k` vs `log log 1/δ_k`, census gap vs `t`.
pub fn write_plots(dir: &Path) -> Result<Vec<String>> {
    let plots = dir.join("plots");
    let mut written = Vec::new();
    let mut out: Vec<(String, String)> = Vec::new();
    for fam in 1..=2 {
        let p = dir.join(format!("density_{fam}.csv"));
        if p.exists() {
            let mut s = String::from("# t kappa_hat\n");
            let mut last = f64::NAN;
            for r in read_rows(&p)? {
                let t = num(&r[0]);
                if t != last {
                    let _ = writeln!(s, "{} {}", g(t), r[4]);
                    last = t;
                }
            }
            out.push((format!("kappa_{fam}.dat"), s));
        }
    }
    let p = dir.join("contraction.csv");
    if p.exists() {
        let mut s = String::from("# k loglog(1/delta_k)\n");
        for r in read_rows(&p)? {
            let d = num(&r[2]).max(num(&r[3]));
            if d > 0.0 && d < 1.0 {
                let _ = writeln!(s, "{} {}", r[0], g((1.0 / d).ln().ln()));
            }
        }
        out.push(("loglog.dat".into(), s));
    }
    let p = dir.join("census.csv");
    if p.exists() {
        let mut s = String::from("# t largest_gap_family1 largest_gap_family2\n");
        let rows = read_rows(&p)?;
        for pair in rows.chunks(2) {
            if pair.len() == 2 {
                let _ = writeln!(s, "{} {} {}", pair[0][0], pair[0][3], pair[1][3]);
            }
        }
        out.push(("census_gap.dat".into(), s));
    }
    if out.is_empty() {
        return Ok(written);
    }
    std::fs::create_dir_all(&plots)?;
    for (name, body) in out {
        std::fs::write(plots.join(&name), body)?;
        written.push(format!("plots/{name}"));
    }
    Ok(written)
}
