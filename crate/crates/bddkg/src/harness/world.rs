//! World state and seeded initial sampling.

use super::config::{Aabb, WorldConfig};
use super::rng::{fnv1a64, SimRng};

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceState {
    pub aabb: Aabb,
    /// Accumulated push displacement; stays exactly 0 without collisions.
    pub displacement: f64,
}

/// Mutable simulation state.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    /// Object centers, indexed like `WorldConfig::objects`.
    pub objects: Vec<[f64; 3]>,
    pub ee: [f64; 3],
    /// Index of the held object, if any.
    pub held: Option<usize>,
    pub workspaces: Vec<WorkspaceState>,
}

/// Samples the initial world: each object's `(x, y)` is drawn uniformly
/// from its configured range by an RNG seeded with
/// `seed ^ fnv1a64(object IRI)`, so a given object's position depends only
/// on the seed and its own identity; `z` is its half extent (resting on the
/// table plane). The EE starts centered above the origin at transport
/// height.
pub fn sample_world(cfg: &WorldConfig, seed: u64) -> WorldState {
    let objects = cfg
        .objects
        .iter()
        .map(|obj| {
            let mut rng = SimRng::new(seed ^ fnv1a64(obj.iri.as_bytes()));
            let [[x_min, y_min], [x_max, y_max]] = obj.range;
            let x = rng.range_f64(x_min, x_max);
            let y = rng.range_f64(y_min, y_max);
            [x, y, obj.half_extents[2]]
        })
        .collect();
    WorldState {
        objects,
        ee: [0.0, 0.0, cfg.transport_height],
        held: None,
        workspaces: cfg
            .workspaces
            .iter()
            .map(|w| WorkspaceState { aabb: w.aabb, displacement: 0.0 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::EeKind;
    use crate::harness::config::{AgentConfig, ObjectConfig, WorkspaceConfig, WorkspaceKind};

    fn cfg(range: [[f64; 2]; 2]) -> WorldConfig {
        WorldConfig {
            objects: (0..5)
                .map(|i| ObjectConfig {
                    iri: format!("urn:obj:{i}"),
                    mass_kg: 0.1,
                    half_extents: [0.02, 0.02, 0.02],
                    range,
                })
                .collect(),
            workspaces: vec![WorkspaceConfig {
                iri: "urn:ws:table".into(),
                aabb: Aabb { min: [0.2, -0.45, 0.0], max: [0.7, 0.45, 0.12] },
                kind: WorkspaceKind::Table,
                bin_base_height_m: 0.0,
            }],
            agent: AgentConfig { iri: "urn:agent".into(), ee: EeKind::Gripper },
            bin_height_scale: 1.0,
            transport_height: 0.3,
            dt: 0.01,
            slip_probability: 0.0,
            grasp_distance_threshold: 0.05,
            collision_displacement_threshold: 0.05,
        }
    }

    #[test]
    fn normal_range_samples_stay_inside() {
        let range = [[0.25, -0.4], [0.6, 0.4]];
        let world = sample_world(&cfg(range), 99);
        for p in &world.objects {
            assert!((0.25..0.6).contains(&p[0]), "x = {}", p[0]);
            assert!((-0.4..0.4).contains(&p[1]), "y = {}", p[1]);
            assert_eq!(p[2], 0.02);
        }
    }

    #[test]
    fn dense_range_samples_stay_inside_the_smaller_box() {
        let range = [[0.35, -0.3], [0.6, 0.3]];
        let world = sample_world(&cfg(range), 123);
        for p in &world.objects {
            assert!((0.35..0.6).contains(&p[0]));
            assert!((-0.3..0.3).contains(&p[1]));
        }
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let range = [[0.25, -0.4], [0.6, 0.4]];
        let a = sample_world(&cfg(range), 7);
        let b = sample_world(&cfg(range), 7);
        assert_eq!(a, b);
        let c = sample_world(&cfg(range), 8);
        assert_ne!(a, c);
    }
}
