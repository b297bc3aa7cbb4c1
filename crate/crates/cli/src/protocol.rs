//! Sandbox websocket protocol and the simulation session behind it.

use fibersim_core::analysis::collision_geometry;
use fibersim_core::curves::Linear;
use fibersim_core::lifting::{integrate_on_grid, Mechanism};
use fibersim_core::{Config, Vec2};
use serde::{Deserialize, Serialize};

use crate::scenario::{vec2, MechanismSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Velocity {
        vx: f64,
        vy: f64,
    },
    Mechanism {
        spec: MechanismSpec,
    },
    Reset {
        #[serde(rename = "cM")]
        cm: [f64; 2],
        #[serde(rename = "cN")]
        cn: [f64; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Overlays {
    #[serde(rename = "cTilde0")]
    pub c_tilde0: Option<[f64; 2]>,
    #[serde(rename = "rD")]
    pub r_d: Option<f64>,
    #[serde(rename = "rDPrime")]
    pub r_d_prime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    State {
        t: f64,
        #[serde(rename = "cM")]
        cm: [f64; 2],
        #[serde(rename = "cN")]
        cn: [f64; 2],
        dist: f64,
        collided: bool,
        overlays: Overlays,
    },
    Error {
        msg: String,
    },
}

impl ClientMessage {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed message: {e}"))
    }
}

impl ServerMessage {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionOptions {
    pub vmax: f64,
    pub step: f64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        Self {
            vmax: 3.0,
            step: 1.0 / 60.0,
        }
    }
}

/// Initial sandbox layout: obstacle at the origin, ego three units to the right.
pub const DEFAULT_START: Config = Config::new(Vec2::new(3.0, 0.0), Vec2::ZERO);

/// All mutable state of one sandbox run. Each [`tick`](Session::tick)
/// advances one RK4 step with the obstacle moving at the commanded velocity.
pub struct Session {
    opts: SessionOptions,
    t: f64,
    state: Config,
    velocity: Vec2,
    spec: MechanismSpec,
    mech: Mechanism,
    overlays: Overlays,
    collided: bool,
}

impl Session {
    pub fn new(opts: SessionOptions) -> Self {
        let spec = MechanismSpec::Copy;
        let mech = spec.build().expect("copy mechanism builds");
        let mut s = Self {
            opts,
            t: 0.0,
            state: DEFAULT_START,
            velocity: Vec2::ZERO,
            spec,
            mech,
            overlays: Overlays::default(),
            collided: false,
        };
        s.refresh_overlays();
        s
    }

    pub fn state(&self) -> Config {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn collided(&self) -> bool {
        self.collided
    }

    pub fn velocity(&self) -> Vec2 {
        self.velocity
    }

    /// Closed-form collision disks for the current mechanism, anchored at the
    /// state where it was selected.
    fn refresh_overlays(&mut self) {
        self.overlays = match self.spec {
            MechanismSpec::LinearConst { alpha, beta } => {
                match collision_geometry(alpha, beta, self.state.cm, self.state.cn) {
                    Ok(g) => Overlays {
                        c_tilde0: g.disks.map(|d| [d.c_tilde0.x, d.c_tilde0.y]),
                        r_d: g.disks.map(|d| d.r_d),
                        r_d_prime: g.disks.map(|d| d.r_d_prime),
                    },
                    Err(_) => Overlays::default(),
                }
            }
            _ => Overlays::default(),
        };
    }

    /// Applies a client message; the returned message is an error to send back.
    pub fn handle(&mut self, msg: ClientMessage) -> Option<ServerMessage> {
        match msg {
            ClientMessage::Velocity { vx, vy } => {
                let v = Vec2::new(vx, vy);
                if !v.is_finite() {
                    return Some(error("velocity must be finite"));
                }
                let speed = v.norm();
                self.velocity = if speed > self.opts.vmax {
                    v * (self.opts.vmax / speed)
                } else {
                    v
                };
                None
            }
            ClientMessage::Mechanism { spec } => match spec.build() {
                Ok(mech) => {
                    self.spec = spec;
                    self.mech = mech;
                    self.refresh_overlays();
                    None
                }
                Err(e) => Some(error(&e.to_string())),
            },
            ClientMessage::Reset { cm, cn } => {
                let state = Config::new(vec2(cm), vec2(cn));
                if let Err(e) = state.check_admissible() {
                    return Some(error(&e.to_string()));
                }
                self.state = state;
                self.t = 0.0;
                self.velocity = Vec2::ZERO;
                self.collided = false;
                self.refresh_overlays();
                None
            }
        }
    }

    /// Parses and applies a raw text frame.
    pub fn handle_text(&mut self, text: &str) -> Option<ServerMessage> {
        match ClientMessage::parse(text) {
            Ok(msg) => self.handle(msg),
            Err(msg) => Some(ServerMessage::Error { msg }),
        }
    }

    /// Advances one step unless frozen by a collision; returns an error frame
    /// if the step could not be taken.
    pub fn tick(&mut self) -> Option<ServerMessage> {
        if self.collided {
            return None;
        }
        let (t0, t1) = (self.t, self.t + self.opts.step);
        let gamma = Linear {
            start: self.state.cn,
            velocity: self.velocity,
            t0,
            t1,
        };
        match integrate_on_grid(&*self.mech, &self.state, &gamma, &[t0, t1]) {
            Ok(out) => {
                self.state = *out.end();
                match out.collision_time {
                    Some(tc) => {
                        self.t = tc;
                        self.collided = true;
                    }
                    None => self.t = t1,
                }
                None
            }
            Err(e) => {
                self.collided = true;
                Some(error(&format!("simulation stopped: {e}")))
            }
        }
    }

    pub fn snapshot(&self) -> ServerMessage {
        let Config { cm, cn } = self.state;
        ServerMessage::State {
            t: self.t,
            cm: [cm.x, cm.y],
            cn: [cn.x, cn.y],
            dist: self.state.distance(),
            collided: self.collided,
            overlays: self.overlays,
        }
    }
}

fn error(msg: &str) -> ServerMessage {
    ServerMessage::Error { msg: msg.to_owned() }
}
