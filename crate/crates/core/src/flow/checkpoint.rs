//! Checkpoints: `<stem>.csv` holds the profile, `<stem>.json` the header.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::flow::{FlowError, FlowState, FlowStatus, StepControl};
use crate::geometry::io;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub t: f64,
    pub step_count: usize,
    pub status: FlowStatus,
    pub ctl: StepControl,
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("csv"), stem.with_extension("json"))
}

pub fn write_checkpoint(stem: &Path, s: &FlowState, ctl: &StepControl) -> Result<(), FlowError> {
    let (csv, json) = paths(stem);
    io::write_csv(&s.curve, &csv)?;
    let header = CheckpointHeader {
        t: s.t,
        step_count: s.step_count,
        status: s.status.clone(),
        ctl: ctl.clone(),
    };
    std::fs::write(json, serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(())
}

pub fn read_checkpoint(stem: &Path) -> Result<(FlowState, StepControl), FlowError> {
    let (csv, json) = paths(stem);
    let curve = io::read_csv(&csv)?;
    let header: CheckpointHeader = serde_json::from_str(&std::fs::read_to_string(json)?)?;
    Ok((
        FlowState::resume(curve, header.t, header.step_count, header.status),
        header.ctl,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::step;
    use crate::geometry::fixtures;

    #[test]
    fn checkpoint_round_trip_resumes_bit_exactly() {
        let dir = std::env::temp_dir().join(format!("gkflow-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let ctl = StepControl::default();
        let mut s = FlowState::new(fixtures::sphere(3, 1.0, 64, 0.0).unwrap());
        for _ in 0..7 {
            s = step(&s, &ctl);
        }
        let stem = dir.join("state");
        write_checkpoint(&stem, &s, &ctl).unwrap();
        let (back, ctl2) = read_checkpoint(&stem).unwrap();
        assert_eq!(ctl2, ctl);
        assert_eq!(back.curve, s.curve);
        assert_eq!((back.t, back.step_count), (s.t, s.step_count));
        // the next step from the restored state matches the original
        assert_eq!(step(&back, &ctl).curve, step(&s, &ctl).curve);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
