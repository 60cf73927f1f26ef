//! Figure presets: fixed parameter sets and grids, each labelled with the
//! caption of the figure it reproduces.
//!
//! Ranges not fixed by the captions (grid extents and densities) are our
//! choice; they are listed in the `grid` metadata of every emitted table.

use std::fmt;
use std::str::FromStr;

use crate::config::{ModulateConfig, RunConfig, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

/// A sampled axis: `points` values evenly spaced over `[start, stop]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x {}", self.start, self.stop, self.points)
    }
}

pub const FIG2A_G: Grid = Grid::new(0.0, 3.0, 61);
pub const FIG2B_T_LEFT: Grid = Grid::new(10.0, 200.0, 96);
pub const FIG3_T_LEFT: Grid = Grid::new(25.0, 200.0, 36);
pub const FIG3_OMEGA2: Grid = Grid::new(2.0, 6.0, 41);
pub const FIG3_G: Grid = Grid::new(0.0, 1.5, 31);
pub const FIG5_GAMMA: Grid = Grid::new(0.0005, 0.01, 39);
pub const FIG6_T_LEFT: Grid = Grid::new(30.0, 200.0, 50);

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::Fig2a, Preset::Fig2b, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Preset::Fig2a => {
                "fig2a: HCs and populations versus g; omega1=3, omega2=4, T_R=21, gamma_-=gamma_+=0.001*omega1, T_L=100"
            }
            Preset::Fig2b => {
                "fig2b: HCs and populations versus T_L; omega1=3, omega2=4, T_R=21, gamma_-=gamma_+=0.001*omega1, g=0.1*omega1"
            }
            Preset::Fig3 => {
                "fig3: HCs and Delta Q_L = Q_L^I - Q_L^C versus T_L and omega2 (panel c) or g (panel d); omega1=3, omega2=4, g=0.1*omega1, T_R=21, gamma_-=gamma_+=0.001*omega1"
            }
            Preset::Fig4 => {
                "fig4: modulation of Q_L and Q_R; rho22=1 initially, T_R=21, T_L=100, omega=3, g=0.1*omega, gamma=0.001*omega, Omega_R=0.5*pi, relaxation time t=50"
            }
            Preset::Fig5 => {
                "fig5: Delta Q_L = Q_L^I - Q_L^C versus gamma_- and gamma_+; omega1=3, omega2=4, g=0.1*omega1, T_R=21, T_L=100"
            }
            Preset::Fig6 => {
                "fig6: steady-state COA and HC; (a) omega1=3, omega2=4, T_R=21, gamma=0.001*omega1; (b) omega1=omega2=3, g=0.1*omega, T_R=21, gamma=0.001*omega"
            }
        }
    }

    /// Base configuration; sweeps start from this scenario.
    pub fn config(self) -> RunConfig {
        let detuned = ScenarioConfig::flat(3.0, 4.0, 0.3, 100.0, 21.0, 0.003);
        let resonant = ScenarioConfig::flat(3.0, 3.0, 0.3, 100.0, 21.0, 0.003);
        match self {
            Preset::Fig4 => RunConfig {
                scenario: resonant,
                modulate: Some(ModulateConfig::default()),
                ..RunConfig::default()
            },
            _ => RunConfig {
                scenario: detuned,
                ..RunConfig::default()
            },
        }
    }

    /// Scenario of the resonant panel of the COA figure.
    pub fn fig6_resonant() -> ScenarioConfig {
        ScenarioConfig::flat(3.0, 3.0, 0.3, 100.0, 21.0, 0.003)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            format!("unknown preset `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_parameters() {
        let c = Preset::Fig2a.config();
        let s = &c.scenario;
        assert_eq!((s.omega1, s.omega2, s.t_right, s.t_left), (3.0, 4.0, 21.0, 100.0));
        assert_eq!(s.left.gamma11, [0.003, 0.003]);
        assert!(c.scenario().is_ok());
    }

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            assert!(p.config().scenario().is_ok());
        }
        assert!("fig7".parse::<Preset>().is_err());
    }

    #[test]
    fn fig4_is_degenerate() {
        let s = Preset::Fig4.config().scenario().unwrap();
        assert_eq!(s.regime(), qubit_heat::Regime::ResonantDegenerate);
    }
}
