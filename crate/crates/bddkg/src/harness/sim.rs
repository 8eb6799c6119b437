//! Kinematic pick-and-place execution: a scripted phase motion with an
//! injected slip fault, producing an event trace and a full state log.
//!
//! Phase script: approach the target object (emitting the first behaviour
//! event at motion start), grasp with a slip check, lift (second event),
//! transport at fixed height to above the target bin (third event), lower
//! and release (fourth event), retreat. A held object tracks the EE with a
//! per-EE attachment offset: grippers enclose the object center, suction
//! cups hold the top face, so suction carries the same object lower.
//!
//! Collision rule: while transporting, if the carried object's bottom face
//! is below a bin's scaled wall top and its horizontal position is inside
//! that bin's box, the bin is pushed along — it translates with the EE's
//! horizontal step and accumulates the pushed distance as displacement.

use super::config::{Aabb, WorkspaceKind, WorldConfig};
use super::rng::{fnv1a64, SimRng};
use super::world::WorldState;
use super::HarnessError;
use crate::dsl::EeKind;

/// Behaviour events in emission order with the timestep they fired at.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventTrace {
    pub events: Vec<(String, usize)>,
}

impl EventTrace {
    pub fn step_of(&self, event: &str) -> Option<usize> {
        self.events.iter().find(|(e, _)| e == event).map(|(_, s)| *s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSnapshot {
    pub aabb: Aabb,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub ee: [f64; 3],
    /// `‖ΔEE‖ / dt`; 0 at the initial step.
    pub ee_speed: f64,
    pub objects: Vec<[f64; 3]>,
    pub workspaces: Vec<WorkspaceSnapshot>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateLog {
    pub steps: Vec<StepState>,
}

impl StateLog {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn max_ee_speed(&self) -> f64 {
        self.steps.iter().map(|s| s.ee_speed).fold(0.0, f64::max)
    }
}

/// What to pick and where to place it, by index into the world config.
#[derive(Debug, Clone)]
pub struct PickPlaceJob<'a> {
    pub target_object: usize,
    pub target_workspace: usize,
    /// The behaviour's four events: motion start, lifted, above bin,
    /// released.
    pub events: &'a [String],
}

pub fn simulate_pick_place(
    state: WorldState,
    job: &PickPlaceJob<'_>,
    cfg: &WorldConfig,
    seed: u64,
) -> Result<(EventTrace, StateLog), HarnessError> {
    if job.events.len() != 4 {
        return Err(HarnessError::InvalidBehaviour(format!(
            "pick-place behaviour must emit exactly 4 events, got {}",
            job.events.len()
        )));
    }
    if job.target_object >= cfg.objects.len() || job.target_workspace >= cfg.workspaces.len() {
        return Err(HarnessError::UnresolvedBinding(
            "target object or workspace is not part of the world".into(),
        ));
    }

    let mut sim = Sim {
        cfg,
        state,
        log: StateLog::default(),
        trace: EventTrace::default(),
        step: 0,
        attach_z: cfg.agent.attach_offset_z(cfg.objects[job.target_object].half_extents[2]),
        transporting: false,
    };
    let speed = cfg.agent.nominal_speed();
    let mut rng = SimRng::new(seed ^ fnv1a64(b"fault-stream"));

    sim.log_step(0.0); // initial state, step 0

    // Approach the grasp point.
    let target = sim.state.objects[job.target_object];
    let grasp_point = [target[0], target[1], target[2] + sim.attach_z];
    let motion_start = sim.step + 1;
    sim.move_to(grasp_point, speed);
    sim.trace.events.push((job.events[0].clone(), motion_start));

    // Grasp. Slip is a gripper fault; its probability grows when other
    // objects crowd the target (count within 0.1 m horizontally, capped
    // at 1), and its consequences are a 0.1 m object displacement, a
    // failed grasp, and a one-step EE speed spike of 1.5x to 3x nominal.
    let crowding = sim.crowding(job.target_object);
    let effective_p = (cfg.slip_probability * (1.0 + crowding as f64)).min(1.0);
    let slipped = cfg.agent.ee == EeKind::Gripper && rng.next_f64() < effective_p;
    if slipped {
        let theta = rng.range_f64(0.0, std::f64::consts::TAU);
        let obj = &mut sim.state.objects[job.target_object];
        obj[0] += 0.1 * theta.cos();
        obj[1] += 0.1 * theta.sin();
        let spike = rng.range_f64(1.5, 3.0) * speed;
        let phi = rng.range_f64(0.0, std::f64::consts::TAU);
        let ee = sim.state.ee;
        sim.advance_to([
            ee[0] + spike * cfg.dt * phi.cos(),
            ee[1] + spike * cfg.dt * phi.sin(),
            ee[2],
        ]);
    } else {
        sim.state.held = Some(job.target_object);
        let ee = sim.state.ee;
        sim.state.objects[job.target_object] = [ee[0], ee[1], ee[2] - sim.attach_z];
    }

    // Lift to transport height.
    let lift_target = [sim.state.ee[0], sim.state.ee[1], cfg.transport_height];
    sim.move_to(lift_target, speed);
    sim.trace.events.push((job.events[1].clone(), sim.step));

    // Transport above the target bin at fixed height.
    let bin_center = cfg.workspaces[job.target_workspace].aabb.center_xy();
    sim.transporting = true;
    sim.move_to([bin_center[0], bin_center[1], cfg.transport_height], speed);
    sim.transporting = false;
    sim.trace.events.push((job.events[2].clone(), sim.step));

    // Lower until the object would rest on the workspace floor, release.
    let floor = cfg.workspaces[job.target_workspace].aabb.min[2];
    let rest_z = floor + cfg.objects[job.target_object].half_extents[2] + sim.attach_z;
    sim.move_to([bin_center[0], bin_center[1], rest_z], speed);
    sim.state.held = None;
    sim.trace.events.push((job.events[3].clone(), sim.step));

    // Retreat so every event has timesteps after it.
    sim.move_to([bin_center[0], bin_center[1], cfg.transport_height], speed);

    Ok((sim.trace, sim.log))
}

struct Sim<'a> {
    cfg: &'a WorldConfig,
    state: WorldState,
    log: StateLog,
    trace: EventTrace,
    /// Index of the last logged step.
    step: usize,
    attach_z: f64,
    transporting: bool,
}

impl Sim<'_> {
    fn log_step(&mut self, ee_speed: f64) {
        self.log.steps.push(StepState {
            ee: self.state.ee,
            ee_speed,
            objects: self.state.objects.clone(),
            workspaces: self
                .state
                .workspaces
                .iter()
                .map(|w| WorkspaceSnapshot { aabb: w.aabb, displacement: w.displacement })
                .collect(),
        });
        self.step = self.log.steps.len() - 1;
    }

    /// One timestep: place the EE at `new_ee` exactly, carry the held
    /// object, apply the transport push rule, log.
    fn advance_to(&mut self, new_ee: [f64; 3]) {
        let d = [
            new_ee[0] - self.state.ee[0],
            new_ee[1] - self.state.ee[1],
            new_ee[2] - self.state.ee[2],
        ];
        self.state.ee = new_ee;
        if let Some(held) = self.state.held {
            self.state.objects[held] = [new_ee[0], new_ee[1], new_ee[2] - self.attach_z];
            if self.transporting {
                self.push_bins(held, [d[0], d[1]]);
            }
        }
        let speed = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / self.cfg.dt;
        self.log_step(speed);
    }

    fn push_bins(&mut self, held: usize, d_xy: [f64; 2]) {
        let object = self.state.objects[held];
        let bottom = object[2] - self.cfg.objects[held].half_extents[2];
        for (ws_cfg, ws_state) in self.cfg.workspaces.iter().zip(&mut self.state.workspaces) {
            if ws_cfg.kind != WorkspaceKind::Bin {
                continue;
            }
            let top = ws_cfg.bin_base_height_m * self.cfg.bin_height_scale;
            if bottom < top && ws_state.aabb.contains_xy(object) {
                ws_state.aabb.translate_xy(d_xy);
                ws_state.displacement += (d_xy[0] * d_xy[0] + d_xy[1] * d_xy[1]).sqrt();
            }
        }
    }

    /// Straight-line motion at speed `v`, snapping exactly onto the target
    /// with a final partial step. Always takes at least one step so phase
    /// events stay strictly ordered.
    fn move_to(&mut self, target: [f64; 3], v: f64) {
        let step_len = v * self.cfg.dt;
        let mut moved = false;
        loop {
            let ee = self.state.ee;
            let delta = [target[0] - ee[0], target[1] - ee[1], target[2] - ee[2]];
            let dist = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
            if dist <= 1e-12 {
                break;
            }
            if dist > step_len {
                let f = step_len / dist;
                self.advance_to([ee[0] + delta[0] * f, ee[1] + delta[1] * f, ee[2] + delta[2] * f]);
                moved = true;
            } else {
                self.advance_to(target);
                moved = true;
                break;
            }
        }
        if !moved {
            let ee = self.state.ee;
            self.advance_to(ee);
        }
    }

    /// Other objects within 0.1 m of the target, horizontally, capped at 1.
    fn crowding(&self, target: usize) -> u32 {
        let tp = self.state.objects[target];
        let count = self
            .state
            .objects
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                *i != target && {
                    let dx = p[0] - tp[0];
                    let dy = p[1] - tp[1];
                    (dx * dx + dy * dy).sqrt() <= 0.1
                }
            })
            .count() as u32;
        count.min(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{AgentConfig, ObjectConfig, WorkspaceConfig};
    use crate::harness::world::sample_world;

    pub(crate) fn world_config(ee: EeKind, hz: f64, bin_base: f64, scale: f64, slip: f64) -> WorldConfig {
        WorldConfig {
            objects: vec![
                ObjectConfig {
                    iri: "urn:obj:target".into(),
                    mass_kg: 0.1,
                    half_extents: [0.02, 0.02, hz],
                    range: [[0.25, -0.4], [0.6, 0.4]],
                },
                ObjectConfig {
                    iri: "urn:obj:other".into(),
                    mass_kg: 0.1,
                    half_extents: [0.02, 0.02, 0.02],
                    range: [[0.25, -0.4], [0.6, 0.4]],
                },
            ],
            workspaces: vec![
                WorkspaceConfig {
                    iri: "urn:ws:bin".into(),
                    aabb: Aabb { min: [0.6, 0.05, 0.0], max: [0.9, 0.29, 0.24] },
                    kind: WorkspaceKind::Bin,
                    bin_base_height_m: bin_base,
                },
                WorkspaceConfig {
                    iri: "urn:ws:table".into(),
                    aabb: Aabb { min: [0.2, -0.45, 0.0], max: [0.7, 0.45, 0.12] },
                    kind: WorkspaceKind::Table,
                    bin_base_height_m: 0.0,
                },
            ],
            agent: AgentConfig { iri: "urn:agent".into(), ee },
            bin_height_scale: scale,
            transport_height: 0.3,
            dt: 0.01,
            slip_probability: slip,
            grasp_distance_threshold: 0.05,
            collision_displacement_threshold: 0.05,
        }
    }

    fn events() -> Vec<String> {
        ["pickup_start", "pickup_end", "place_start", "place_end"]
            .map(|e| format!("urn:event:{e}"))
            .to_vec()
    }

    fn run(cfg: &WorldConfig, seed: u64) -> (EventTrace, StateLog) {
        let state = sample_world(cfg, seed);
        let events = events();
        let job = PickPlaceJob { target_object: 0, target_workspace: 0, events: &events };
        simulate_pick_place(state, &job, cfg, seed).unwrap()
    }

    #[test]
    fn events_fire_in_strictly_increasing_order() {
        let cfg = world_config(EeKind::Gripper, 0.02, 0.24, 1.0, 0.0);
        let (trace, log) = run(&cfg, 11);
        let steps: Vec<usize> = trace.events.iter().map(|(_, s)| *s).collect();
        assert_eq!(trace.events.len(), 4);
        assert!(steps.windows(2).all(|w| w[0] < w[1]), "steps: {steps:?}");
        assert!(*steps.last().unwrap() < log.len() - 1, "retreat leaves steps after place_end");
        assert!(steps[0] >= 1, "before-eval of the first event needs step 0");
    }

    #[test]
    fn no_fault_gripper_holds_the_object_through_transport() {
        let cfg = world_config(EeKind::Gripper, 0.02, 0.24, 0.8, 0.0);
        let (trace, log) = run(&cfg, 5);
        let pickup_end = trace.step_of("urn:event:pickup_end").unwrap();
        let step = &log.steps[pickup_end + 1];
        let d = (0..3)
            .map(|i| (step.ee[i] - step.objects[0][i]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(d <= 0.05, "object should track the EE, distance {d}");
        // No collision at scale 0.8 for a gripper: displacement is exactly 0.
        assert_eq!(log.steps.last().unwrap().workspaces[0].displacement, 0.0);
    }

    #[test]
    fn suction_with_tall_bin_accumulates_displacement_above_threshold() {
        // Suction carries the object bottom at 0.3 - 2*hz = 0.18; the bin
        // wall top at scale 1.0 is 0.24, so the object ploughs through.
        let cfg = world_config(EeKind::Suction, 0.06, 0.24, 1.0, 0.0);
        let (_, log) = run(&cfg, 13);
        let displacement = log.steps.last().unwrap().workspaces[0].displacement;
        assert!(displacement > 0.05, "pushed displacement {displacement}");
    }

    #[test]
    fn displacement_is_monotone_over_time() {
        let cfg = world_config(EeKind::Suction, 0.06, 0.24, 1.0, 0.0);
        let (_, log) = run(&cfg, 13);
        let mut last = 0.0;
        for step in &log.steps {
            assert!(step.workspaces[0].displacement >= last);
            last = step.workspaces[0].displacement;
        }
    }

    #[test]
    fn slip_displaces_object_fails_grasp_and_spikes_speed() {
        let cfg = world_config(EeKind::Gripper, 0.02, 0.24, 1.0, 1.0);
        let seed = 21;
        let state = sample_world(&cfg, seed);
        let start = state.objects[0];
        let events = events();
        let job = PickPlaceJob { target_object: 0, target_workspace: 0, events: &events };
        let (trace, log) = simulate_pick_place(state, &job, &cfg, seed).unwrap();

        // Object left behind, displaced 0.1 m horizontally from its sample.
        let end = log.steps.last().unwrap().objects[0];
        let dx = end[0] - start[0];
        let dy = end[1] - start[1];
        assert!(((dx * dx + dy * dy).sqrt() - 0.1).abs() < 1e-9);
        assert_eq!(end[2], start[2]);

        // Grasp failed: object far from EE after pickup_end.
        let pickup_end = trace.step_of("urn:event:pickup_end").unwrap();
        let at = &log.steps[pickup_end + 1];
        let d = (0..3).map(|i| (at.ee[i] - at.objects[0][i]).powi(2)).sum::<f64>().sqrt();
        assert!(d > 0.05);

        // One-step speed spike in [1.5, 3.0] x nominal.
        let max = log.max_ee_speed();
        assert!((0.75..=1.5).contains(&max), "spike speed {max}");
    }

    #[test]
    fn same_seed_reproduces_the_exact_trace_and_log() {
        let cfg = world_config(EeKind::Gripper, 0.02, 0.24, 1.0, 0.3);
        let (t1, l1) = run(&cfg, 77);
        let (t2, l2) = run(&cfg, 77);
        assert_eq!(t1, t2);
        assert_eq!(l1, l2);
    }
}
