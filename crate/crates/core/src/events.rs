//! Transitions emitted by the simulators and observers that consume them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reservoir {
    A,
    B,
}

/// One jump of the chain. Sites are 0-based; `Q` is the moved quantity
/// (`u64` particles or `f64` energy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition<Q> {
    Bulk { from: usize, to: usize, amount: Q },
    Extract { site: usize, reservoir: Reservoir, amount: Q },
    Inject { site: usize, reservoir: Reservoir, amount: Q },
}

/// Called after every applied transition, with the time at which it occurred.
pub trait Observer<Q> {
    fn observe(&mut self, time: f64, transition: &Transition<Q>);
}

/// Amounts exchanged with the reservoirs and across bonds after `start`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FluxCounter {
    pub start: f64,
    pub injected_a: f64,
    pub injected_b: f64,
    pub extracted_a: f64,
    pub extracted_b: f64,
    /// `bonds[x]`: net amount moved from site `x` to site `x + 1`.
    pub bonds: Vec<f64>,
    pub injections_a: u64,
    pub injections_b: u64,
}

impl FluxCounter {
    pub fn new(n: usize, start: f64) -> Self {
        Self {
            start,
            bonds: vec![0.0; n.saturating_sub(1)],
            ..Self::default()
        }
    }

    /// Net amount that entered through reservoir A.
    pub fn net_a(&self) -> f64 {
        self.injected_a - self.extracted_a
    }

    pub fn net_b(&self) -> f64 {
        self.injected_b - self.extracted_b
    }
}

/// Moved quantity viewed as a real amount.
pub trait Amount: Copy {
    fn amount(self) -> f64;
}

impl Amount for u64 {
    fn amount(self) -> f64 {
        self as f64
    }
}

impl Amount for f64 {
    fn amount(self) -> f64 {
        self
    }
}

impl<Q: Amount> Observer<Q> for FluxCounter {
    fn observe(&mut self, time: f64, transition: &Transition<Q>) {
        if time < self.start {
            return;
        }
        match *transition {
            Transition::Bulk { from, to, amount } => {
                let a: f64 = amount.amount();
                if to > from {
                    self.bonds[from] += a;
                } else {
                    self.bonds[to] -= a;
                }
            }
            Transition::Extract { reservoir, amount, .. } => match reservoir {
                Reservoir::A => self.extracted_a += amount.amount(),
                Reservoir::B => self.extracted_b += amount.amount(),
            },
            Transition::Inject { reservoir, amount, .. } => match reservoir {
                Reservoir::A => {
                    self.injected_a += amount.amount();
                    self.injections_a += 1;
                }
                Reservoir::B => {
                    self.injected_b += amount.amount();
                    self.injections_b += 1;
                }
            },
        }
    }
}
