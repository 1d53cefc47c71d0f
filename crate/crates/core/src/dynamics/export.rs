use std::io::Write;

use serde::Serialize;

use super::trajectory::Trajectory;
use crate::config::VERSION;
use crate::error::Result;

pub const CSV_HEADER: [&str; 12] = [
    "t", "q", "qd", "qdd", "qddd", "x1", "x2", "p1", "p2", "H1", "H2", "Hint",
];

/// `#`-prefixed version and config lines, then one row per sample.
pub fn write_csv<W: Write>(traj: &Trajectory, config: &impl Serialize, mut out: W) -> Result<()> {
    writeln!(out, "# {VERSION}")?;
    writeln!(out, "# config {}", serde_json::to_string(config)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(std::io::Error::from)?;
    for (k, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        let o = crate::model::jet_to_ostro(&traj.meta.params, z);
        let row = [
            *t,
            z.q,
            z.qd,
            z.qdd,
            z.qddd,
            o.x1,
            o.x2,
            o.p1,
            o.p2,
            traj.h1_series[k],
            traj.h2_series[k],
            traj.hint_series[k],
        ];
        w.write_record(row.iter().map(|x| x.to_string()))
            .map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}
