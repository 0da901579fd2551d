use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};

use parasol_api::{BenchResponse, ExperimentResponse};
use parasol_core::proposer::ObservationSet;
use parasol_core::rng::RandomStream;
use parasol_core::space::SearchSpace;
use parasol_core::Sampler;
use uuid::Uuid;

/// One ask/tell optimization session. The server owns the sampler state
/// and the history; proposals consume the study's private RNG stream, so a
/// study replays deterministically given the same seed and tell sequence.
pub struct Study {
    pub sampler: Sampler,
    pub space: SearchSpace,
    pub history: ObservationSet,
    pub rng: RandomStream,
}

/// Lifecycle of a background job.
pub enum JobSlot<T> {
    Running,
    Done(T),
    Failed(String),
}

type Registry<T> = Mutex<HashMap<Uuid, Arc<Mutex<T>>>>;

#[derive(Default)]
pub struct AppState {
    studies: Registry<Study>,
    experiments: Registry<JobSlot<ExperimentResponse>>,
    benches: Registry<JobSlot<BenchResponse>>,
}

/// Lock a mutex, recovering the guard if a previous holder panicked — a
/// poisoned study or job slot is still safe to read and replace.
pub fn lock<T>(mutex: &Mutex<T>) -> MutexGuard<'_, T> {
    mutex.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl AppState {
    pub fn insert_study(&self, study: Study) -> Uuid {
        let id = Uuid::new_v4();
        lock(&self.studies).insert(id, Arc::new(Mutex::new(study)));
        id
    }

    pub fn study(&self, id: Uuid) -> Option<Arc<Mutex<Study>>> {
        lock(&self.studies).get(&id).cloned()
    }

    pub fn insert_experiment(&self) -> (Uuid, Arc<Mutex<JobSlot<ExperimentResponse>>>) {
        let id = Uuid::new_v4();
        let slot = Arc::new(Mutex::new(JobSlot::Running));
        lock(&self.experiments).insert(id, slot.clone());
        (id, slot)
    }

    pub fn experiment(&self, id: Uuid) -> Option<Arc<Mutex<JobSlot<ExperimentResponse>>>> {
        lock(&self.experiments).get(&id).cloned()
    }

    pub fn insert_bench(&self) -> (Uuid, Arc<Mutex<JobSlot<BenchResponse>>>) {
        let id = Uuid::new_v4();
        let slot = Arc::new(Mutex::new(JobSlot::Running));
        lock(&self.benches).insert(id, slot.clone());
        (id, slot)
    }

    pub fn bench(&self, id: Uuid) -> Option<Arc<Mutex<JobSlot<BenchResponse>>>> {
        lock(&self.benches).get(&id).cloned()
    }
}
