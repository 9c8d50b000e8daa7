use crate::dynamics::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::io::{csv_error, csv_writer, finish, format_f64, parse_f64};
use crate::phase::state::{pair_count, pairs, ReducedState};

/// Largest `n` accepted when reading a trajectory back.
const MAX_DIM: usize = 64;

/// `t,q1..qn,p1..pn,M_ij...,N_ij...,E,C2` with the pairs in strictly-upper row-major order.
pub fn trajectory_header(n: usize) -> Vec<String> {
    let pair = |prefix: &str, a: usize, b: usize| {
        if n < 10 {
            format!("{prefix}_{}{}", a + 1, b + 1)
        } else {
            format!("{prefix}_{}_{}", a + 1, b + 1)
        }
    };
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|a| format!("q{a}")));
    h.extend((1..=n).map(|a| format!("p{a}")));
    h.extend(pairs(n).map(|(a, b)| pair("M", a, b)));
    h.extend(pairs(n).map(|(a, b)| pair("N", a, b)));
    h.push("E".into());
    h.push("C2".into());
    h
}

pub fn trajectory_to_csv(traj: &Trajectory) -> Result<String> {
    let n = traj.dim();
    let mut w = csv_writer();
    w.write_record(trajectory_header(n)).map_err(csv_error)?;
    for k in 0..traj.len() {
        let mut row = vec![format_f64(traj.times[k])];
        row.extend(traj.states[k].to_flat().into_iter().map(format_f64));
        row.push(format_f64(traj.energy[k]));
        row.push(format_f64(traj.casimir[k]));
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Parsed trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
    pub energy: Vec<f64>,
    pub casimir: Vec<f64>,
}

fn dim_from_columns(cols: usize) -> Option<usize> {
    // 1 + 2n + 2·n(n−1)/2 + 2 = n² + n + 3
    (1..=MAX_DIM).find(|&n| n * n + n + 3 == cols)
}

pub fn trajectory_from_csv(text: &str) -> Result<TrajectoryTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    let n = dim_from_columns(header.len())
        .ok_or_else(|| Error::Parse(format!("{} columns match no trajectory layout", header.len())))?;
    let expected = trajectory_header(n);
    if header.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse(format!("header does not match the n = {n} layout")));
    }
    let flat = 2 * n + 2 * pair_count(n);
    let mut table = TrajectoryTable { n, times: Vec::new(), states: Vec::new(), energy: Vec::new(), casimir: Vec::new() };
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let values = record.iter().map(parse_f64).collect::<Result<Vec<f64>>>()?;
        if values[..=flat].iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("time and state columns must be finite".into()));
        }
        if table.times.last().is_some_and(|&t| values[0] < t) {
            return Err(Error::Parse("times must be nondecreasing".into()));
        }
        table.times.push(values[0]);
        table.states.push(ReducedState::from_flat(n, &values[1..=flat])?);
        table.energy.push(values[flat + 1]);
        table.casimir.push(values[flat + 2]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate::{integrate, StepControl};
    use crate::phase::model::ModelSpec;
    use crate::phase::potential::PotentialSpec;
    use crate::phase::state::SkewMatrix;

    #[test]
    fn header_layout() {
        assert_eq!(trajectory_header(2).join(","), "t,q1,q2,p1,p2,M_12,N_12,E,C2");
        assert_eq!(
            trajectory_header(3).join(","),
            "t,q1,q2,q3,p1,p2,p3,M_12,M_13,M_23,N_12,N_13,N_23,E,C2"
        );
        assert_eq!(dim_from_columns(15), Some(3));
        assert_eq!(dim_from_columns(14), None);
    }

    #[test]
    fn round_trip_is_exact() {
        let state = ReducedState::new(
            vec![0.4, -0.1, -0.3],
            vec![0.2, 0.1, -0.05],
            SkewMatrix::from_upper(3, vec![0.3, -0.2, 0.1]).unwrap(),
            SkewMatrix::from_upper(3, vec![0.7, 0.2, -0.4]).unwrap(),
        )
        .unwrap();
        let traj = integrate(&ModelSpec::aff_aff(1.0, 0.5), &PotentialSpec::none(), &state, 0.1, &StepControl::rk4(0.01)).unwrap();
        let text = trajectory_to_csv(&traj).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));
        let back = trajectory_from_csv(&text).unwrap();
        assert_eq!(back.times, traj.times);
        assert_eq!(back.states, traj.states);
        assert_eq!(back.energy, traj.energy);
    }

    #[test]
    fn malformed() {
        for bad in [
            "",
            "t,q1\n0,1\n",
            "t,q1,q2,p1,p2,M_12,N_12,E,X\n",
            "t,q1,q2,p1,p2,M_12,N_12,E,C2\n0,1,2,3\n",
            "t,q1,q2,p1,p2,M_12,N_12,E,C2\n0,1,2,3,4,5,x,0,0\n",
            "t,q1,q2,p1,p2,M_12,N_12,E,C2\n1,0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0,0\n",
            "t,q1,q2,p1,p2,M_12,N_12,E,C2\n0,inf,0,0,0,0,0,0,0\n",
        ] {
            assert!(matches!(trajectory_from_csv(bad), Err(Error::Parse(_))), "{bad:?}");
        }
        let ok = trajectory_from_csv("t,q1,q2,p1,p2,M_12,N_12,E,C2\n0,1,-1,0,0,1,2,0.5,NaN\n").unwrap();
        assert!(ok.casimir[0].is_nan());
    }
}
