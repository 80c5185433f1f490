#![allow(dead_code)]

use basketmit::mitigate::RunSetup;
use basketmit::noise::{default_base_model, NoiseSchedule, DEFAULT_EXPERIMENT_GAIN};
use basketmit::pattern::{KColouring, MeasurementPattern, CNOT15_DECISION_ACCEPT};
use basketmit::rounds::{ComputationRoundSpec, DecisionMap, ExecOrder, TestRoundSpec};
use basketmit::sim::NoiseModel;

pub fn setup<'a>(
    p: &'a MeasurementPattern,
    c: &'a KColouring,
    x: [u8; 2],
    base: NoiseModel,
    noise: NoiseSchedule,
    seed: u64,
) -> RunSetup<'a> {
    RunSetup {
        computation: ComputationRoundSpec::new(p, x.to_vec(), DecisionMap::accepting(2, CNOT15_DECISION_ACCEPT).unwrap())
            .unwrap(),
        test: TestRoundSpec::new(p, c).unwrap(),
        base,
        gain: DEFAULT_EXPERIMENT_GAIN,
        noise,
        master_seed: seed,
        order: ExecOrder::Lazy,
    }
}

pub fn calibrated() -> NoiseModel {
    default_base_model()
}
