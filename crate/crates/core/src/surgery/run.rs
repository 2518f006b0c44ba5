use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::flow::{run_from, FlowFailure, FlowState, FlowStatus, SpeedField, StepControl};
use crate::geometry::{reparametrize, ProfileCurve};
use crate::monitors::{MonitorReport, MonitorSettings};
use crate::surgery::{
    detect_necks, standard_surgery, Classification, SurgeryError, SurgeryParams, SurgeryReport,
};

/// Cuts allowed at one threshold hit before the component is halted.
const MAX_CUTS_PER_HIT: usize = 64;
/// Threshold hits allowed over a whole run.
const MAX_HITS: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// Necks of `component` were cut. `children` continue the flow; `discarded` are
    /// non-convex pieces with `G >= G_star / 2` everywhere, removed with the surgery.
    Surgery {
        t: f64,
        component: usize,
        necks: usize,
        children: Vec<usize>,
        discarded: Vec<usize>,
    },
    /// A convex component reached the threshold without a neck; it keeps flowing with
    /// the threshold lifted.
    ConvexRelease {
        t: f64,
        component: usize,
    },
    /// A non-convex component with `G >= G_star / 2` everywhere and no neck was removed.
    Discarded {
        t: f64,
        component: usize,
        classification: Classification,
    },
    Extinct {
        t: f64,
        component: usize,
        classification: Classification,
    },
    Horizon {
        t: f64,
        component: usize,
    },
    /// Numerical failure of the flow.
    Failed {
        t: f64,
        component: usize,
        reason: FlowFailure,
    },
    /// The surgery could not continue this component.
    Halted {
        t: f64,
        component: usize,
        reason: String,
    },
}

impl Event {
    pub fn t(&self) -> f64 {
        match self {
            Event::Surgery { t, .. }
            | Event::ConvexRelease { t, .. }
            | Event::Discarded { t, .. }
            | Event::Extinct { t, .. }
            | Event::Horizon { t, .. }
            | Event::Failed { t, .. }
            | Event::Halted { t, .. } => *t,
        }
    }

    pub fn component(&self) -> usize {
        match self {
            Event::Surgery { component, .. }
            | Event::ConvexRelease { component, .. }
            | Event::Discarded { component, .. }
            | Event::Extinct { component, .. }
            | Event::Horizon { component, .. }
            | Event::Failed { component, .. }
            | Event::Halted { component, .. } => *component,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    Split,
    Discarded,
    Extinct,
    Horizon,
    Failed,
    Halted,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub id: usize,
    pub parent: Option<usize>,
    pub classification: Classification,
    pub born: f64,
    pub ended: f64,
    pub fate: Fate,
    /// Profile when the component ended.
    pub last: ProfileCurve,
    pub monitors: MonitorReport,
}

#[derive(Clone, Debug)]
pub struct SurgeryRun {
    /// Sorted by time, then component id.
    pub events: Vec<Event>,
    pub surgeries: Vec<SurgeryReport>,
    /// Indexed by component id; id 0 is the initial profile.
    pub components: Vec<Component>,
    pub g_stop: f64,
}

impl SurgeryRun {
    pub fn surgery_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Surgery { .. }))
            .count()
    }

    /// Components still flowing at the end: not split or discarded.
    pub fn survivors(&self) -> impl Iterator<Item = &Component> {
        self.components
            .iter()
            .filter(|c| !matches!(c.fate, Fate::Split | Fate::Discarded))
    }

    pub fn halted(&self) -> bool {
        self.components
            .iter()
            .any(|c| matches!(c.fate, Fate::Halted | Fate::Failed))
    }

    /// Numerical failure of the flow rather than of the surgery.
    pub fn failed(&self) -> bool {
        self.components.iter().any(|c| c.fate == Fate::Failed)
    }

    /// Event history as JSON lines.
    pub fn history_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}

struct Pending {
    id: usize,
    parent: Option<usize>,
    state: FlowState,
    capped: bool,
}

struct Runner<'a> {
    p: &'a SurgeryParams,
    ctl: StepControl,
    settings: &'a MonitorSettings,
    t_max: f64,
    queue: VecDeque<Pending>,
    components: Vec<Option<Component>>,
    events: Vec<Event>,
    surgeries: Vec<SurgeryReport>,
    hits: usize,
}

/// Flow with surgery: every component flows until `max G` reaches `g_stop` (default
/// `2 G_star`), then every neck it carries is cut in one event. Non-convex pieces with
/// `G >= G_star / 2` everywhere are discarded; convex ones keep flowing, and once they
/// reach the threshold without a neck the threshold is lifted so they flow to
/// extinction. A non-convex component that reaches the threshold without a neck is
/// halted.
pub fn surgically_modified_run(
    initial: ProfileCurve,
    ctl: &StepControl,
    p: &SurgeryParams,
    t_max: f64,
    settings: &MonitorSettings,
) -> Result<SurgeryRun, SurgeryError> {
    p.validate()?;
    let mut ctl = ctl.clone();
    let g_stop = *ctl.g_stop.get_or_insert(2.0 * p.g_star);
    ctl.validate()?;
    SpeedField::evaluate(&initial, ctl.kappa)
        .map_err(crate::flow::FlowError::InadmissibleInitial)?;

    let mut runner = Runner {
        p,
        ctl,
        settings,
        t_max,
        queue: VecDeque::new(),
        components: vec![None],
        events: Vec::new(),
        surgeries: Vec::new(),
        hits: 0,
    };
    runner.queue.push_back(Pending {
        id: 0,
        parent: None,
        state: FlowState::new(initial),
        capped: true,
    });
    while let Some(item) = runner.queue.pop_front() {
        runner.advance(item)?;
    }

    let mut events = runner.events;
    events.sort_by(|a, b| {
        a.t()
            .total_cmp(&b.t())
            .then(a.component().cmp(&b.component()))
    });
    Ok(SurgeryRun {
        events,
        surgeries: runner.surgeries,
        components: runner
            .components
            .into_iter()
            .map(|c| c.expect("every component ends"))
            .collect(),
        g_stop,
    })
}

impl Runner<'_> {
    fn new_id(&mut self) -> usize {
        self.components.push(None);
        self.components.len() - 1
    }

    fn finish(&mut self, item: &Pending, report: MonitorReport, fate: Fate, curve: ProfileCurve) {
        self.components[item.id] = Some(Component {
            id: item.id,
            parent: item.parent,
            classification: Classification::of(&curve),
            born: 0.0,
            ended: item.state.t,
            fate,
            last: curve,
            monitors: report,
        });
    }

    fn advance(&mut self, mut item: Pending) -> Result<(), SurgeryError> {
        let born = item.state.t;
        let kappa = self.ctl.kappa;
        let mut report = MonitorReport::new(item.state.curve.dim(), kappa, self.settings.clone());
        loop {
            let mut ctl = self.ctl.clone();
            if !item.capped {
                ctl.g_stop = None;
            }
            item.state = run_from(item.state, &ctl, self.t_max, &mut report)?;
            let t = item.state.t;
            let id = item.id;
            let class = Classification::of(&item.state.curve);
            let curve = item.state.curve.clone();
            let (event, fate) = match item.state.status.clone() {
                FlowStatus::Running => (Event::Horizon { t, component: id }, Fate::Horizon),
                FlowStatus::Extinct => (
                    Event::Extinct {
                        t,
                        component: id,
                        classification: class,
                    },
                    Fate::Extinct,
                ),
                FlowStatus::Failed { reason } => (
                    Event::Failed {
                        t,
                        component: id,
                        reason,
                    },
                    Fate::Failed,
                ),
                FlowStatus::CurvatureThresholdHit { .. } => {
                    self.hits += 1;
                    match self.threshold(&item)? {
                        Hit::Release => {
                            self.events.push(Event::ConvexRelease { t, component: id });
                            item.capped = false;
                            item.state.status = FlowStatus::Running;
                            continue;
                        }
                        Hit::Done(event, fate) => (event, fate),
                    }
                }
            };
            self.events.push(event);
            self.finish(&item, report, fate, curve);
            if let Some(c) = self.components[id].as_mut() {
                c.born = born;
            }
            return Ok(());
        }
    }

    /// Cut every neck of the component, repeating on the pieces until none is left.
    fn threshold(&mut self, item: &Pending) -> Result<Hit, SurgeryError> {
        let t = item.state.t;
        let id = item.id;
        let halt = |reason: String| {
            Hit::Done(
                Event::Halted {
                    t,
                    component: id,
                    reason,
                },
                Fate::Halted,
            )
        };
        if self.hits > MAX_HITS {
            return Ok(halt(format!("more than {MAX_HITS} threshold hits")));
        }
        let kappa = self.ctl.kappa;
        let mut open = VecDeque::from([item.state.curve.clone()]);
        let mut pieces = Vec::new();
        let mut cuts = 0;
        while let Some(piece) = open.pop_front() {
            let necks = match detect_necks(&piece, self.p, kappa) {
                Ok(n) => n,
                Err(e) => return Ok(halt(e.to_string())),
            };
            let mut cut = None;
            for neck in &necks {
                match standard_surgery(&piece, neck, self.p, kappa) {
                    Ok(out) => {
                        cut = Some(out);
                        break;
                    }
                    Err(SurgeryError::NeckTooShort { .. }) => continue,
                    Err(e) => return Ok(halt(e.to_string())),
                }
            }
            match cut {
                Some(out) if self.p.tau0 > 0.0 => {
                    cuts += 1;
                    if cuts > MAX_CUTS_PER_HIT {
                        return Ok(halt(format!(
                            "more than {MAX_CUTS_PER_HIT} cuts at one hit"
                        )));
                    }
                    self.surgeries.push(out.report);
                    open.extend(out.components);
                }
                _ => pieces.push(piece),
            }
        }

        let mut kept = Vec::new();
        let mut discarded = Vec::new();
        for piece in pieces {
            let field = match SpeedField::evaluate(&piece, kappa) {
                Ok(f) => f,
                Err(e) => return Ok(halt(format!("surgery left an inadmissible piece: {e}"))),
            };
            let min_g = field.speed.iter().copied().fold(f64::INFINITY, f64::min);
            if min_g >= 0.5 * self.p.g_star && !is_convex(&field) {
                discarded.push(piece);
            } else {
                kept.push((piece, field));
            }
        }

        if cuts == 0 {
            if let Some(piece) = discarded.pop() {
                return Ok(Hit::Done(
                    Event::Discarded {
                        t,
                        component: id,
                        classification: Classification::of(&piece),
                    },
                    Fate::Discarded,
                ));
            }
            return Ok(if is_convex(&kept[0].1) {
                Hit::Release
            } else {
                halt(SurgeryError::NoNeckAtThreshold { t }.to_string())
            });
        }

        let mut children = Vec::new();
        for (piece, _) in kept {
            let curve = reparametrize(&piece)?;
            let child = self.new_id();
            children.push(child);
            self.queue.push_back(Pending {
                id: child,
                parent: Some(id),
                state: FlowState::resume(curve, t, 0, FlowStatus::Running),
                capped: true,
            });
        }
        let mut dropped = Vec::new();
        for piece in discarded {
            let child = self.new_id();
            dropped.push(child);
            self.components[child] = Some(Component {
                id: child,
                parent: Some(id),
                classification: Classification::of(&piece),
                born: t,
                ended: t,
                fate: Fate::Discarded,
                last: piece,
                monitors: MonitorReport::new(item.state.curve.dim(), kappa, self.settings.clone()),
            });
        }
        Ok(Hit::Done(
            Event::Surgery {
                t,
                component: id,
                necks: cuts,
                children,
                discarded: dropped,
            },
            Fate::Split,
        ))
    }
}

fn is_convex(field: &SpeedField) -> bool {
    field
        .geometry
        .iter()
        .all(|g| g.lambda_profile >= 0.0 && g.lambda_rot > 0.0)
}

enum Hit {
    Release,
    Done(Event, Fate),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    fn sphere_run(t_max: f64) -> SurgeryRun {
        let c = fixtures::sphere(3, 1.0, 200, 0.0).unwrap();
        let p = SurgeryParams::default();
        surgically_modified_run(
            c,
            &StepControl::default(),
            &p,
            t_max,
            &MonitorSettings::default(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_needs_no_surgery() {
        let run = sphere_run(1.0);
        assert_eq!(run.surgery_count(), 0);
        assert!(matches!(
            run.events[0],
            Event::ConvexRelease { component: 0, .. }
        ));
        match run.events.last().unwrap() {
            Event::Extinct {
                t, classification, ..
            } => {
                assert!((t - 0.75).abs() < 0.01, "{t}");
                assert_eq!(*classification, Classification::Ball);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn short_horizon_is_a_single_segment() {
        let run = sphere_run(0.05);
        assert_eq!(
            run.events,
            vec![Event::Horizon {
                t: 0.05,
                component: 0
            }]
        );
        assert_eq!(run.components.len(), 1);
    }

    #[test]
    fn dumbbell_history_is_reproducible() {
        let go = || {
            let c = fixtures::dumbbell(3, 1.0, 0.35, 8.0, 400).unwrap();
            let p = SurgeryParams::default();
            surgically_modified_run(
                c,
                &StepControl::default(),
                &p,
                2.0,
                &MonitorSettings::default(),
            )
            .unwrap()
        };
        let (a, b) = (go(), go());
        assert_eq!(a.history_jsonl(), b.history_jsonl());
        assert_eq!(a.surgery_count(), 1);
        for c in &a.components[1..] {
            assert_eq!(c.parent, Some(0));
            assert_eq!(c.classification, Classification::Ball);
        }
    }
}
