use std::fmt;
use std::str::FromStr;

use crate::oracles::OracleKind;
use crate::{Error, Result};

/// The fixed, input-independent order of oracle calls.
///
/// Steps are numbered `t = 1..=τ` in the accessors below, matching the
/// usual clock convention; `steps()[t - 1]` is the kind of call `t`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    steps: Vec<OracleKind>,
}

impl Schedule {
    pub fn new(steps: Vec<OracleKind>) -> Self {
        Self { steps }
    }

    /// `τ_c` classical steps followed by `τ_q` quantum steps on `target`.
    pub fn classical_then_quantum(tau_c: usize, tau_q: usize, target: usize) -> Self {
        let mut steps = vec![OracleKind::Classical; tau_c];
        steps.extend(std::iter::repeat_n(OracleKind::Quantum { target }, tau_q));
        Self { steps }
    }

    pub fn steps(&self) -> &[OracleKind] {
        &self.steps
    }

    pub fn tau(&self) -> usize {
        self.steps.len()
    }

    pub fn tau_c(&self) -> usize {
        self.steps.iter().filter(|k| k.is_classical()).count()
    }

    pub fn tau_q(&self) -> usize {
        self.tau() - self.tau_c()
    }

    /// Kind of call `t` (1-based).
    pub fn kind(&self, t: usize) -> OracleKind {
        self.steps[t - 1]
    }

    /// `T_c` as 1-based step numbers.
    pub fn classical_steps(&self) -> Vec<usize> {
        (1..=self.tau()).filter(|&t| self.kind(t).is_classical()).collect()
    }

    /// `T_q` as 1-based step numbers.
    pub fn quantum_steps(&self) -> Vec<usize> {
        (1..=self.tau()).filter(|&t| !self.kind(t).is_classical()).collect()
    }

    /// `ℓ_t = ℓ_0 + |T_c ∩ {1..t}|`.
    pub fn workspace_after(&self, t: usize, l0: usize) -> usize {
        l0 + self.steps[..t].iter().filter(|k| k.is_classical()).count()
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// Parses the compact form, e.g. `"PPQ:0Q:0"`. Whitespace and commas
    /// between steps are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let mut steps = Vec::new();
        let mut pos = 0;
        while pos < chars.len() {
            match chars[pos] {
                c if c.is_whitespace() || c == ',' => pos += 1,
                'C' | 'c' => {
                    steps.push(OracleKind::Classical);
                    pos += 1;
                }
                'P' | 'p' => {
                    steps.push(OracleKind::PseudoClassical);
                    pos += 1;
                }
                'Q' | 'q' => {
                    if chars.get(pos + 1) != Some(&':') {
                        return Err(Error::InvalidSchedule(format!(
                            "quantum step at column {} needs a target, e.g. Q:0",
                            pos + 1
                        )));
                    }
                    let start = pos + 2;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_digit() {
                        end += 1;
                    }
                    if end == start {
                        return Err(Error::InvalidSchedule(format!(
                            "missing target qubit after column {}",
                            pos + 2
                        )));
                    }
                    let target: String = chars[start..end].iter().collect();
                    let target = target
                        .parse()
                        .map_err(|_| Error::InvalidSchedule(format!("target {target} is too large")))?;
                    steps.push(OracleKind::Quantum { target });
                    pos = end;
                }
                other => {
                    return Err(Error::InvalidSchedule(format!(
                        "unexpected {other:?} at column {}",
                        pos + 1
                    )))
                }
            }
        }
        Ok(Self { steps })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.steps {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}
