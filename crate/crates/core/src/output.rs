//! Trajectory CSV, events JSON and drift-report JSON, with readers that
//! reproduce the written values exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::ConservedQuantityReport;
use crate::types::{ComplexNumber, Event, EventKind, SystemState, Trajectory};

/// Header `t,x1,y1,x2,y2,…` for `n` poles.
pub fn csv_header(n: usize) -> String {
    let mut h = String::from("t");
    for k in 1..=n {
        h.push_str(&format!(",x{k},y{k}"));
    }
    h
}

/// Samples as CSV; floats use the shortest representation that reads back exactly.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let n = trajectory.labels.len();
    let mut out = csv_header(n);
    out.push('\n');
    for s in &trajectory.samples {
        out.push_str(&s.time.to_string());
        for z in &s.positions {
            out.push_str(&format!(",{},{}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

fn csv_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("trajectory CSV line {line}: {msg}"))
}

/// Reads samples written by [`trajectory_csv`].
pub fn read_trajectory_csv(text: &str) -> Result<Vec<SystemState>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| csv_err(1, "missing header"))?;
    let columns = header.split(',').count();
    if columns % 2 == 0 || header != csv_header(columns / 2) {
        return Err(csv_err(1, format!("unexpected header `{header}`")));
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| csv_err(i + 1, format!("`{v}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != columns {
            return Err(csv_err(
                i + 1,
                format!("{} fields, expected {columns}", values.len()),
            ));
        }
        let positions = values[1..]
            .chunks(2)
            .map(|c| ComplexNumber::new(c[0], c[1]))
            .collect();
        samples.push(SystemState::new(values[0], positions));
    }
    Ok(samples)
}

/// Serialized form of an [`Event`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub t: f64,
    pub pole: Option<String>,
    pub x: f64,
    pub y: f64,
}

impl From<&Event> for EventRecord {
    fn from(e: &Event) -> Self {
        Self {
            kind: e.kind,
            t: e.time,
            pole: e.pole.clone(),
            x: e.location.re,
            y: e.location.im,
        }
    }
}

impl From<EventRecord> for Event {
    fn from(r: EventRecord) -> Self {
        Event {
            kind: r.kind,
            time: r.t,
            pole: r.pole,
            location: ComplexNumber::new(r.x, r.y),
            detail: None,
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output records serialize");
    s.push('\n');
    s
}

pub fn events_json(events: &[Event]) -> String {
    let records: Vec<EventRecord> = events.iter().map(EventRecord::from).collect();
    to_json(&records)
}

pub fn read_events_json(text: &str) -> Result<Vec<Event>> {
    let records: Vec<EventRecord> =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("events JSON: {e}")))?;
    Ok(records.into_iter().map(Event::from).collect())
}

pub fn drift_json(reports: &[ConservedQuantityReport]) -> String {
    to_json(reports)
}

pub fn read_drift_json(text: &str) -> Result<Vec<ConservedQuantityReport>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("drift JSON: {e}")))
}

/// Rebuilds a trajectory from its CSV samples and events JSON.
pub fn read_trajectory(labels: Vec<String>, csv: &str, events: &str) -> Result<Trajectory> {
    let samples = read_trajectory_csv(csv)?;
    if let Some(s) = samples.first() {
        if s.len() != labels.len() {
            return Err(Error::LengthMismatch {
                positions: s.len(),
                poles: labels.len(),
            });
        }
    }
    Ok(Trajectory {
        labels,
        samples,
        events: read_events_json(events)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Trajectory::new(vec!["a".into(), "b".into()]);
        t.push_sample(SystemState::new(
            0.0,
            vec![
                ComplexNumber::new(0.1, -1.0 / 3.0),
                ComplexNumber::new(1e-300, 2.5),
            ],
        ));
        t.push_sample(SystemState::new(
            0.1 + 0.2,
            vec![
                ComplexNumber::new(f64::MIN_POSITIVE, 7.0),
                ComplexNumber::new(-0.0, 1e22),
            ],
        ));
        let csv = trajectory_csv(&t);
        assert!(csv.starts_with("t,x1,y1,x2,y2\n"));
        assert_eq!(read_trajectory_csv(&csv).unwrap(), t.samples);
    }

    #[test]
    fn events_round_trip() {
        let e = vec![Event {
            kind: EventKind::ZenoTrap,
            time: 0.123_456_789_012_345_68,
            pole: Some("w".into()),
            location: ComplexNumber::new(1.0 / 7.0, -2.0e-17),
            detail: None,
        }];
        let json = events_json(&e);
        assert!(json.contains("\"kind\": \"zeno-trap\""));
        assert_eq!(read_events_json(&json).unwrap(), e);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_trajectory_csv("t,x1\n0,1\n").is_err());
        assert!(read_trajectory_csv("t,x1,y1\n0,1\n").is_err());
        assert!(read_trajectory_csv("t,x1,y1\n0,1,a\n").is_err());
    }
}
