//! Trajectory CSV: `t,cMx,cMy,cNx,cNy,dist,collided[,piece]`, floats with 17
//! significant digits, and an optional trailing `# collision_time=<t>` line.

use std::io::Write;

use fibersim_core::planner::Piece;
use fibersim_core::{Config, Vec2};

use crate::error::CliError;

pub const HEADER: [&str; 7] = ["t", "cMx", "cMy", "cNx", "cNy", "dist", "collided"];
pub const PIECE_COLUMN: &str = "piece";
const COLLISION_PREFIX: &str = "# collision_time=";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub state: Config,
    pub collided: bool,
    pub piece: Option<Piece>,
}

impl Row {
    pub fn new(t: f64, state: Config, collided: bool) -> Self {
        Self {
            t,
            state,
            collided,
            piece: None,
        }
    }

    pub fn dist(&self) -> f64 {
        self.state.distance()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub rows: Vec<Row>,
    pub collision_time: Option<f64>,
    /// Whether the file carries the `piece` column.
    pub with_piece: bool,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Trajectory {
    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = HEADER.to_vec();
        if self.with_piece {
            header.push(PIECE_COLUMN);
        }
        w.write_record(&header).map_err(csv_io)?;
        for row in &self.rows {
            let Config { cm, cn } = row.state;
            let mut rec = vec![
                fmt_f64(row.t),
                fmt_f64(cm.x),
                fmt_f64(cm.y),
                fmt_f64(cn.x),
                fmt_f64(cn.y),
                fmt_f64(row.dist()),
                if row.collided { "1" } else { "0" }.to_owned(),
            ];
            if self.with_piece {
                let piece = row
                    .piece
                    .ok_or_else(|| CliError::invalid("piece", "row without a planner piece"))?;
                rec.push(piece.as_str().to_owned());
            }
            w.write_record(&rec).map_err(csv_io)?;
        }
        let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        if let Some(tc) = self.collision_time {
            writeln!(out, "{COLLISION_PREFIX}{}", fmt_f64(tc))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut collision_time = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            if let Some(rest) = line.strip_prefix(COLLISION_PREFIX) {
                if collision_time.is_some() {
                    return Err(traj(line_no, "duplicate collision_time"));
                }
                let tc: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| traj(line_no, &format!("bad collision_time `{rest}`")))?;
                if !tc.is_finite() {
                    return Err(traj(line_no, "collision_time must be finite"));
                }
                collision_time = Some(tc);
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| traj(1, &e.to_string()))?
            .clone();
        let with_piece = if header.iter().eq(HEADER) {
            false
        } else if header.len() == HEADER.len() + 1
            && header.iter().take(HEADER.len()).eq(HEADER)
            && &header[HEADER.len()] == PIECE_COLUMN
        {
            true
        } else {
            return Err(traj(1, &format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
        };

        let mut rows: Vec<Row> = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                traj(line, &e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let num = |k: usize| -> Result<f64, CliError> {
                let v: f64 = rec[k]
                    .parse()
                    .map_err(|_| traj(line, &format!("column `{}`: bad number `{}`", HEADER[k], &rec[k])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(traj(line, &format!("column `{}` must be finite", HEADER[k])))
                }
            };
            let t = num(0)?;
            let state = Config::new(Vec2::new(num(1)?, num(2)?), Vec2::new(num(3)?, num(4)?));
            let dist = num(5)?;
            let collided = match &rec[6] {
                "0" => false,
                "1" => true,
                other => return Err(traj(line, &format!("collided must be 0 or 1, got `{other}`"))),
            };
            let piece = if with_piece {
                Some(rec[7].parse::<Piece>().map_err(|e| traj(line, &e.to_string()))?)
            } else {
                None
            };
            let recomputed = state.distance();
            if (dist - recomputed).abs() > 1e-9 * (1.0 + recomputed) {
                return Err(traj(line, &format!("stale dist {dist}, positions give {recomputed}")));
            }
            if let Some(prev) = rows.last() {
                if !(t > prev.t) {
                    return Err(traj(line, "t must be strictly increasing"));
                }
            }
            rows.push(Row {
                t,
                state,
                collided,
                piece,
            });
        }
        Ok(Trajectory {
            rows,
            collision_time,
            with_piece,
        })
    }
}

fn traj(line: u64, msg: &str) -> CliError {
    CliError::Trajectory {
        line,
        msg: msg.to_owned(),
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
