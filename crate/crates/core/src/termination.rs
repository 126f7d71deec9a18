//! Distributed termination detection for the decentralized engines.
//!
//! Each worker owns a [`Detector`] holding its sent/received counters and
//! logical clock. Worker 0 initiates detection by emitting a control
//! [`Token`] that travels the ring `0 → 1 → … → p−1 → 0` through the same
//! mailboxes as work messages. A worker only handles a token while it is
//! locally quiescent: its mailbox is drained, its outgoing batches are
//! flushed, and no OPEN node can beat the incumbent.
//!
//! * Two-wave counting: wave 1 sums the received counters (R*), wave 2 sums
//!   the sent counters (S′*). Termination holds iff S′* = R* and no worker was
//!   active between its two visits.
//! * Time algorithm: work messages carry the sender's clock. One ring with a
//!   fresh stamp T sums `sent − received`; the ring fails if the balance is
//!   nonzero or any worker has received a message stamped ≥ T.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationMode {
    TwoWave,
    Time,
}

impl TerminationMode {
    pub fn token(self) -> &'static str {
        match self {
            TerminationMode::TwoWave => "two-wave",
            TerminationMode::Time => "time",
        }
    }
}

impl fmt::Display for TerminationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TerminationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-wave" | "twowave" | "wave" => Ok(TerminationMode::TwoWave),
            "time" => Ok(TerminationMode::Time),
            other => Err(format!("unknown termination mode `{other}` (expected two-wave|time)")),
        }
    }
}

/// Work-message counters of one worker. Only the owning worker mutates them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TerminationCounters {
    pub sent: u64,
    pub received: u64,
    pub clock: u64,
    /// Largest time stamp among received work messages.
    pub max_received_stamp: Option<u64>,
}

/// Counter snapshot reported by one worker during a wave.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WaveReport {
    pub sent: u64,
    pub received: u64,
    pub quiescent: bool,
}

/// The counting rule: with R* summed over the first wave and S′* over the
/// second, termination holds iff S′* = R* and every worker stayed quiescent.
pub fn two_wave_check(first_wave: &[WaveReport], second_wave: &[WaveReport]) -> bool {
    let received: u64 = first_wave.iter().map(|r| r.received).sum();
    let sent: u64 = second_wave.iter().map(|r| r.sent).sum();
    sent == received && first_wave.iter().chain(second_wave).all(|r| r.quiescent)
}

/// Control message of the time algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeToken {
    pub stamp: u64,
    /// Accumulated `sent − received`.
    pub balance: i64,
    pub invalid: bool,
}

/// One visit of the time algorithm's control message: raise the local clock
/// to the token's stamp, fail the ring if a message stamped ≥ T was
/// received, and accumulate the counters. Returns whether the ring can still
/// pass.
pub fn time_algorithm_step(counters: &mut TerminationCounters, token: &mut TimeToken) -> bool {
    counters.clock = counters.clock.max(token.stamp);
    if counters.max_received_stamp.is_some_and(|t| t >= token.stamp) {
        token.invalid = true;
    }
    token.balance += counters.sent as i64 - counters.received as i64;
    !token.invalid
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Wave {
        round: u64,
        wave: u8,
        /// Σ received over wave 1, fixed once wave 1 completes.
        first_wave_received: u64,
        received: u64,
        sent: u64,
        quiescent: bool,
    },
    Time { round: u64, token: TimeToken },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Visit {
    Forward { to: usize, token: Token },
    /// The initiator's verdict at the end of a round.
    Decided(bool),
}

#[derive(Clone, Debug)]
pub struct Detector {
    id: usize,
    workers: usize,
    mode: TerminationMode,
    counters: TerminationCounters,
    active_since_visit: bool,
    initiated_with: Option<(u64, u64)>,
    attempts: u64,
    rings: u64,
}

impl Detector {
    pub fn new(id: usize, workers: usize, mode: TerminationMode) -> Self {
        Detector {
            id,
            workers: workers.max(1),
            mode,
            counters: TerminationCounters::default(),
            active_since_visit: false,
            initiated_with: None,
            attempts: 0,
            rings: 0,
        }
    }

    pub fn mode(&self) -> TerminationMode {
        self.mode
    }

    pub fn counters(&self) -> &TerminationCounters {
        &self.counters
    }

    /// Detection rounds started (initiator only).
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    /// Completed trips of a control token around the ring (initiator only).
    pub fn rings(&self) -> u64 {
        self.rings
    }

    /// Counts an outgoing work message and returns its time stamp.
    pub fn on_send(&mut self) -> u64 {
        self.counters.sent += 1;
        self.counters.clock
    }

    pub fn on_receive(&mut self, stamp: u64) {
        self.counters.received += 1;
        self.counters.max_received_stamp = Some(self.counters.max_received_stamp.map_or(stamp, |m| m.max(stamp)));
    }

    /// Marks that the worker did work (expanded a node).
    pub fn note_active(&mut self) {
        self.active_since_visit = true;
    }

    fn next(&self) -> usize {
        (self.id + 1) % self.workers
    }

    fn forward(&self, token: Token) -> Visit {
        Visit::Forward { to: self.next(), token }
    }

    /// Starts a detection round. Must be called by worker 0 while quiescent.
    pub fn initiate(&mut self) -> Visit {
        debug_assert_eq!(self.id, 0, "worker 0 initiates");
        self.attempts += 1;
        self.active_since_visit = false;
        self.initiated_with = Some((self.counters.sent, self.counters.received));
        let token = match self.mode {
            TerminationMode::TwoWave => Token::Wave {
                round: self.attempts,
                wave: 1,
                first_wave_received: 0,
                received: self.counters.received,
                sent: 0,
                quiescent: true,
            },
            TerminationMode::Time => {
                self.counters.clock += 1;
                Token::Time {
                    round: self.attempts,
                    token: TimeToken {
                        stamp: self.counters.clock,
                        balance: self.counters.sent as i64 - self.counters.received as i64,
                        invalid: false,
                    },
                }
            }
        };
        if self.workers == 1 {
            self.visit(token)
        } else {
            self.forward(token)
        }
    }

    /// Handles a control token. Must be called while quiescent.
    pub fn visit(&mut self, token: Token) -> Visit {
        if self.id == 0 {
            return self.token_returned(token);
        }
        let token = match token {
            Token::Wave { round, wave, first_wave_received, mut received, mut sent, mut quiescent } => {
                if wave == 1 {
                    received += self.counters.received;
                } else {
                    sent += self.counters.sent;
                    quiescent &= !self.active_since_visit;
                }
                Token::Wave { round, wave, first_wave_received, received, sent, quiescent }
            }
            Token::Time { round, mut token } => {
                time_algorithm_step(&mut self.counters, &mut token);
                Token::Time { round, token }
            }
        };
        self.active_since_visit = false;
        self.forward(token)
    }

    fn token_returned(&mut self, token: Token) -> Visit {
        self.rings += 1;
        match token {
            Token::Wave { round, wave: 1, received, .. } => {
                let second = Token::Wave {
                    round,
                    wave: 2,
                    first_wave_received: received,
                    received: 0,
                    sent: self.counters.sent,
                    quiescent: !self.active_since_visit,
                };
                self.active_since_visit = false;
                if self.workers == 1 {
                    self.token_returned(second)
                } else {
                    self.forward(second)
                }
            }
            Token::Wave { first_wave_received, sent, quiescent, .. } => {
                let first = [WaveReport { received: first_wave_received, sent: 0, quiescent: true }];
                let second = [WaveReport { sent, received: 0, quiescent }];
                Visit::Decided(two_wave_check(&first, &second))
            }
            Token::Time { token, .. } => {
                let unchanged = self.initiated_with == Some((self.counters.sent, self.counters.received));
                let late = self.counters.max_received_stamp.is_some_and(|t| t >= token.stamp);
                Visit::Decided(unchanged && !late && !token.invalid && token.balance == 0)
            }
        }
    }
}
