use std::collections::VecDeque;

use rand::Rng;

/// Supplies measurement outcomes given the Born probability of `1`.
pub trait OutcomeSource {
    fn draw(&mut self, p_one: f64) -> u8;
}

impl<R: Rng + ?Sized> OutcomeSource for R {
    fn draw(&mut self, p_one: f64) -> u8 {
        u8::from(self.random::<f64>() < p_one)
    }
}

/// Replays a fixed outcome sequence; used to walk every measurement branch.
#[derive(Debug, Clone, Default)]
pub struct ScriptedOutcomes {
    queue: VecDeque<u8>,
}

impl ScriptedOutcomes {
    pub fn new(outcomes: impl IntoIterator<Item = u8>) -> Self {
        ScriptedOutcomes { queue: outcomes.into_iter().collect() }
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }
}

impl OutcomeSource for ScriptedOutcomes {
    fn draw(&mut self, _p_one: f64) -> u8 {
        self.queue.pop_front().expect("scripted outcomes exhausted")
    }
}
