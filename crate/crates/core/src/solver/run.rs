use crate::config::SimConfig;
use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::Result;
use crate::grid::{build_grid, MeridianGrid};
use crate::initial::{initial_field, InitialParams};
use crate::real::Real;
use crate::solver::{Forcing, SolverSettings, Stepper};
use crate::state::FieldState;

/// A stepper together with the current state.
pub struct Simulation<T> {
    stepper: Stepper<T>,
    state: FieldState<T>,
    steps: usize,
}

impl<T: Real> Simulation<T> {
    /// Grid, initial field and operators for `config`.
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let grid = build_grid(config)?;
        let state = initial_field(&InitialParams::from_config(config), &grid)?;
        Self::with_state(
            grid,
            SolverSettings::from_config(config),
            T::lit(config.tau),
            T::lit(config.re),
            state,
        )
    }

    pub fn with_state(
        grid: MeridianGrid<T>,
        settings: SolverSettings,
        tau: T,
        re: T,
        state: FieldState<T>,
    ) -> Result<Self> {
        assert_eq!(state.len(), grid.len(), "state does not match grid");
        Ok(Simulation {
            stepper: Stepper::new(grid, settings, tau, re)?,
            state,
            steps: 0,
        })
    }

    pub fn step(&mut self, forcing: Option<&dyn Forcing<T>>) -> Result<&FieldState<T>> {
        self.state = self.stepper.advance(&self.state, forcing)?;
        self.steps += 1;
        Ok(&self.state)
    }

    pub fn state(&self) -> &FieldState<T> {
        &self.state
    }

    pub fn grid(&self) -> &MeridianGrid<T> {
        self.stepper.grid()
    }

    pub fn stepper(&self) -> &Stepper<T> {
        &self.stepper
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn into_parts(self) -> (MeridianGrid<T>, FieldState<T>) {
        (self.stepper.grid, self.state)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub grid: MeridianGrid<T>,
    pub state: FieldState<T>,
    pub records: Vec<DiagnosticsRecord<T>>,
}

/// Runs `config` from `t = 0` to `t_end`.
pub fn run<T: Real>(config: &SimConfig) -> Result<RunOutput<T>> {
    run_with(config, |_, _, _| Ok(()))
}

/// [`run`] with an observer called on the initial state (step 0) and after
/// every step. Diagnostics are recorded at step 0, every `record_every`
/// steps and at the final step.
pub fn run_with<T, F>(config: &SimConfig, mut observer: F) -> Result<RunOutput<T>>
where
    T: Real,
    F: FnMut(usize, &MeridianGrid<T>, &FieldState<T>) -> Result<()>,
{
    let mut sim = Simulation::<T>::new(config)?;
    let r_core = T::lit(config.r_core);
    let steps = config.steps();
    let every = config.record_every.max(1);
    let mut records = vec![record(sim.state(), sim.grid(), r_core)];
    observer(0, sim.grid(), sim.state())?;
    for k in 1..=steps {
        sim.step(None)?;
        if k % every == 0 || k == steps {
            records.push(record(sim.state(), sim.grid(), r_core));
        }
        observer(k, sim.grid(), sim.state())?;
    }
    let (grid, state) = sim.into_parts();
    Ok(RunOutput { grid, state, records })
}
