use serde::Serialize;

use super::{rk4_step, DelayLine, DelayProfile, Reference, Sample, Trace, TraceMeta};
use crate::analysis::{Metrics, MetricsAccumulator};
use crate::controllers::{ControlInput, Controller, ControllerConfig};
use crate::error::{Error, Result};
use crate::plant::{decompose, NominalModel, PlantParams, SimState};
use crate::scalar::{lit, Scalar};

/// A fully resolved closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario<T> {
    pub label: String,
    pub plant: PlantParams<T>,
    pub nominal: NominalModel<T>,
    pub controller: ControllerConfig<T>,
    pub reference: Reference<T>,
    pub delay: DelayProfile<T>,
    pub dt: T,
    pub duration: T,
    pub theta0: T,
    pub theta_dot0: T,
}

impl<T: Scalar> Scenario<T> {
    /// Sinusoidal steering without input delay: A = 0.5 rad, ω = 0.5 rad/s,
    /// 100 s at dt = 1e-4, starting from θ = 0.1.
    pub fn steering(controller: ControllerConfig<T>) -> Self {
        let plant = PlantParams::default();
        Self {
            label: controller.name().into(),
            nominal: NominalModel::default_for(&plant),
            plant,
            controller,
            reference: Reference::default(),
            delay: DelayProfile::none(),
            dt: lit(1e-4),
            duration: lit(100.0),
            theta0: lit(0.1),
            theta_dot0: T::zero(),
        }
    }

    /// Tracking `sin(t)` for 30 s under `h(t) = 0.02 |sin(0.01 t)|`.
    pub fn delayed_tracking(controller: ControllerConfig<T>) -> Self {
        Self {
            reference: Reference {
                amplitude: T::one(),
                frequency: T::one(),
                phase: T::zero(),
            },
            delay: DelayProfile {
                amplitude: lit(0.02),
                frequency: lit(0.01),
            },
            duration: lit(30.0),
            ..Self::steering(controller)
        }
    }

    /// Number of samples in the trace, `floor(T / dt) + 1`.
    pub fn sample_count(&self) -> usize {
        let ratio = (self.duration / self.dt).to_f64_lossy();
        let nearest = ratio.round();
        // T/dt is often an integer up to rounding (100 / 1e-4)
        let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            ratio.floor()
        };
        steps as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt * lit(10.0)) {
            return Err(Error::invalid("duration", "must be at least 10 dt"));
        }
        if !(self.theta0.is_finite() && self.theta_dot0.is_finite()) {
            return Err(Error::invalid("initial", "must be finite"));
        }
        self.plant.validate()?;
        self.reference.validate()?;
        self.delay.validate()?;
        self.controller.validate()?;
        if let ControllerConfig::Artdc(design) = &self.controller {
            self.nominal.validate(&self.plant)?;
            let g_bar = self.nominal.g_bar(&self.plant).abs();
            // J_hat / J - 1 picks up a few ulps when J_hat is written as a multiple of J
            if g_bar > design.g_bar_bound * (T::one() + lit(1e-12)) {
                return Err(Error::invalid(
                    "nominal",
                    format!(
                        "gives |g_bar| = {g_bar} above the design bound g_bar_bound = {}",
                        design.g_bar_bound
                    ),
                ));
            }
            let inputs = crate::analysis::DelayBoundInputs::new(
                design.lyapunov_pair()?,
                design.razumikhin_r,
                design.eta,
            )?;
            let h_bar = crate::analysis::delay_bound(&inputs)?;
            if self.delay.max_delay() > h_bar {
                return Err(Error::invalid(
                    "delay.amplitude",
                    format!("exceeds the maximum allowable delay {h_bar} s"),
                ));
            }
        }
        Ok(())
    }
}

/// Step-by-step closed-loop executor. Each call to [`Simulator::step`]
/// produces the sample at `t = k dt` and then advances plant and gains.
#[derive(Debug, Clone)]
pub struct Simulator<T> {
    scenario: Scenario<T>,
    controller: Controller<T>,
    delay_line: DelayLine<T>,
    state: SimState<T>,
    k: usize,
    n: usize,
    ceiling_hit: bool,
}

impl<T: Scalar> Simulator<T> {
    pub fn new(scenario: &Scenario<T>) -> Result<Self> {
        scenario.validate()?;
        Ok(Self {
            controller: scenario.controller.instantiate()?,
            delay_line: DelayLine::new(scenario.dt, scenario.delay.max_delay(), T::zero())?,
            state: SimState::new(T::zero(), scenario.theta0, scenario.theta_dot0),
            k: 0,
            n: scenario.sample_count(),
            ceiling_hit: false,
            scenario: scenario.clone(),
        })
    }

    pub fn meta(&self) -> TraceMeta {
        let sc = &self.scenario;
        TraceMeta {
            label: sc.label.clone(),
            controller: sc.controller.name().into(),
            gain_names: self
                .controller
                .gain_names()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            dt: sc.dt.to_f64_lossy(),
            duration: sc.duration.to_f64_lossy(),
            delay_amplitude: sc.delay.amplitude.to_f64_lossy(),
            gain_ceiling_hit: self.ceiling_hit,
        }
    }

    pub fn sample_count(&self) -> usize {
        self.n
    }

    pub fn controller(&self) -> &Controller<T> {
        &self.controller
    }

    fn time(&self, k: usize) -> T {
        T::from_usize(k).expect("step index fits in scalar") * self.scenario.dt
    }

    /// Next sample, or `None` once the horizon has been covered.
    pub fn step(&mut self) -> Result<Option<Sample<T>>> {
        if self.k >= self.n {
            return Ok(None);
        }
        let sc = &self.scenario;
        let t = self.time(self.k);
        self.state.t = t;
        let r = sc.reference.eval(t);
        let e = self.state.theta - r.theta;
        let e_dot = self.state.theta_dot - r.theta_dot;
        let nominal = if self.controller.needs_nominal() {
            Some(decompose(&sc.plant, &sc.nominal, &self.state)?)
        } else {
            None
        };
        let input = ControlInput {
            e,
            e_dot,
            theta_dd_d: r.theta_ddot,
            nominal,
        };
        let tau_cmd = self.controller.torque(&input);
        if !tau_cmd.is_finite() {
            return Err(Error::NonFinite {
                what: "commanded torque",
                t: t.to_f64_lossy(),
            });
        }
        self.delay_line.push(tau_cmd);
        let tau_applied = self.delay_line.sample(t - sc.delay.at(t))?;
        let sample = Sample {
            t,
            theta: self.state.theta,
            theta_dot: self.state.theta_dot,
            theta_d: r.theta,
            e,
            e_dot,
            tau_cmd,
            tau_applied,
            gains: self.controller.gains(),
        };
        self.k += 1;
        if self.k < self.n {
            self.state = rk4_step(&self.state, tau_applied, sc.dt, &sc.plant)?;
            self.ceiling_hit |= self.controller.advance(&input, sc.dt);
            if self.controller.gains().iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite {
                    what: "adaptive gains",
                    t: t.to_f64_lossy(),
                });
            }
        }
        Ok(Some(sample))
    }
}

/// Result of a run that may have diverged part-way.
#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub trace: Trace<T>,
    /// Set when the run stopped early; the trace holds the samples up to
    /// that point.
    pub error: Option<Error>,
}

/// Runs to completion or to the first failure, keeping the partial trace.
pub fn run_scenario_partial<T: Scalar>(scenario: &Scenario<T>) -> Result<RunOutcome<T>> {
    let mut sim = Simulator::new(scenario)?;
    let mut samples = Vec::with_capacity(sim.sample_count());
    let error = loop {
        match sim.step() {
            Ok(Some(s)) => samples.push(s),
            Ok(None) => break None,
            Err(e) => break Some(e),
        }
    };
    Ok(RunOutcome {
        trace: Trace {
            meta: sim.meta(),
            samples,
        },
        error,
    })
}

pub fn run_scenario<T: Scalar>(scenario: &Scenario<T>) -> Result<Trace<T>> {
    let out = run_scenario_partial(scenario)?;
    match out.error {
        Some(e) => Err(e),
        None => Ok(out.trace),
    }
}

/// Metrics of a full run without storing the trace.
pub fn run_metrics<T: Scalar>(scenario: &Scenario<T>) -> Result<Metrics> {
    let mut sim = Simulator::new(scenario)?;
    let mut acc = MetricsAccumulator::default();
    while let Some(s) = sim.step()? {
        acc.push(&s);
    }
    acc.finish(&sim.meta(), false)
}

/// One point of a reference-signal sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub amplitude: f64,
    pub frequency: f64,
    pub rms_error_deg: f64,
}

/// Runs `scenario` for every reference amplitude/frequency pair, in
/// parallel across the available cores. Points come back in input order.
pub fn calibration_sweep<T: Scalar>(
    scenario: &Scenario<T>,
    amplitudes: &[T],
    frequencies: &[T],
) -> Result<Vec<CalibrationPoint>> {
    let grid: Vec<(T, T)> = amplitudes
        .iter()
        .flat_map(|a| frequencies.iter().map(move |w| (*a, *w)))
        .collect();
    let run = |(a, w): (T, T)| -> Result<CalibrationPoint> {
        let mut sc = scenario.clone();
        sc.reference.amplitude = a;
        sc.reference.frequency = w;
        let m = run_metrics(&sc)?;
        Ok(CalibrationPoint {
            amplitude: a.to_f64_lossy(),
            frequency: w.to_f64_lossy(),
            rms_error_deg: m.rms_error_deg,
        })
    };
    parallel_map(&grid, run).into_iter().collect()
}

/// Order-preserving map over scoped threads, one chunk per core.
pub fn parallel_map<I: Sync + Copy, O: Send>(items: &[I], f: impl Fn(I) -> O + Sync) -> Vec<O> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(|x| f(*x)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
