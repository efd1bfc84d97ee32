use serde::Serialize;

/// Outcome of a grid-certified inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Holds,
    Fails,
    Inconclusive,
}

/// Slack thresholds used when turning a set of signed slacks into a [`Verdict`].
///
/// A slack is the amount by which an inequality is satisfied at one grid
/// point (negative means violated). With `m` the worst slack:
///
/// * `m >= -floor` holds (violations at the level of evaluation noise),
/// * `-tol <= m < -floor` is inconclusive,
/// * `m < -tol` fails, with the offending point as witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub tol: f64,
    pub floor: f64,
}

impl Tolerance {
    pub const fn new(tol: f64, floor: f64) -> Self {
        Self { tol, floor }
    }

    /// Single threshold: anything within `tol` holds, anything beyond fails.
    pub const fn sharp(tol: f64) -> Self {
        Self { tol, floor: tol }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Grid point (coordinates depend on the check) with the worst slack.
    pub witness: Option<Vec<f64>>,
    /// Worst signed slack observed; positive means satisfied everywhere.
    pub margin: f64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == VerdictStatus::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == VerdictStatus::Fails
    }

    pub fn inconclusive(&self) -> bool {
        self.status == VerdictStatus::Inconclusive
    }

    /// Verdict that could not be evaluated at all.
    pub fn unevaluated() -> Self {
        Self {
            status: VerdictStatus::Inconclusive,
            witness: None,
            margin: f64::NAN,
        }
    }

    /// Worst of several verdicts: any failure wins, then inconclusive.
    pub fn worst<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        let mut acc: Option<Verdict> = None;
        for v in verdicts {
            acc = Some(match acc {
                None => v,
                Some(cur) => {
                    let rank = |s: VerdictStatus| match s {
                        VerdictStatus::Fails => 2,
                        VerdictStatus::Inconclusive => 1,
                        VerdictStatus::Holds => 0,
                    };
                    let (rc, rv) = (rank(cur.status), rank(v.status));
                    if rv > rc || (rv == rc && v.margin < cur.margin) {
                        v
                    } else {
                        cur
                    }
                }
            });
        }
        acc.unwrap_or_else(Verdict::unevaluated)
    }
}

/// Running minimum of slacks with the point that produced it.
#[derive(Debug, Clone)]
pub struct SlackTracker {
    worst: f64,
    witness: Option<Vec<f64>>,
    nonfinite: Option<Vec<f64>>,
    count: usize,
}

impl Default for SlackTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl SlackTracker {
    pub fn new() -> Self {
        Self {
            worst: f64::INFINITY,
            witness: None,
            nonfinite: None,
            count: 0,
        }
    }

    pub fn push(&mut self, slack: f64, point: &[f64]) {
        self.count += 1;
        if slack.is_nan() {
            if self.nonfinite.is_none() {
                self.nonfinite = Some(point.to_vec());
            }
            return;
        }
        if slack < self.worst {
            self.worst = slack;
            self.witness = Some(point.to_vec());
        }
    }

    pub fn merge(&mut self, other: SlackTracker) {
        self.count += other.count;
        if self.nonfinite.is_none() {
            self.nonfinite = other.nonfinite;
        }
        if other.worst < self.worst {
            self.worst = other.worst;
            self.witness = other.witness;
        }
    }

    pub fn worst(&self) -> f64 {
        self.worst
    }

    /// Non-strict inequality `slack >= 0`, banded by `tol`.
    pub fn finish(self, tol: Tolerance) -> Verdict {
        if self.count == 0 {
            return Verdict::unevaluated();
        }
        let m = self.worst;
        let status = if m < -tol.tol {
            VerdictStatus::Fails
        } else if self.nonfinite.is_some() || m < -tol.floor {
            VerdictStatus::Inconclusive
        } else {
            VerdictStatus::Holds
        };
        let witness = match status {
            VerdictStatus::Inconclusive if self.nonfinite.is_some() && m >= -tol.floor => {
                self.nonfinite
            }
            _ => self.witness,
        };
        Verdict {
            status,
            witness,
            margin: m,
        }
    }

    /// Strict inequality `slack > 0`: holds only when the worst slack clears
    /// `tol`, fails when it is below `-tol`, inconclusive in between.
    pub fn finish_strict(self, tol: f64) -> Verdict {
        if self.count == 0 {
            return Verdict::unevaluated();
        }
        let m = self.worst;
        let status = if m < -tol {
            VerdictStatus::Fails
        } else if m > tol && self.nonfinite.is_none() {
            VerdictStatus::Holds
        } else {
            VerdictStatus::Inconclusive
        };
        Verdict {
            status,
            witness: self.witness.or(self.nonfinite),
            margin: m,
        }
    }
}
