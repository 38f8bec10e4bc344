use std::path::Path;

use serde::Deserialize;

use super::{DynamicsError, Funnel, GoalRegion, Guidance, Guide, RobotSpec};
use crate::formula::{parse_formula, Formula, Interval};

/// On-disk scenario layout.
///
/// ```toml
/// formula = "G[0,6](F[0,4](0.2 - norm(x1 - 1.5, x2 - 2.5)) & F[0,4](0.2 - norm(x1 - 2.5, x2 - 1.5)))"
///
/// [robot]
/// x0 = [2.0, 2.0]
/// u_max = 1.0
/// dt = 0.02
/// horizon = 10.0
///
/// [[goals]]
/// center = [1.5, 2.5]
/// radius = 0.2
/// funnel = "strong"
///
/// [[goals]]
/// center = [2.5, 1.5]
/// radius = 0.2
/// funnel = "strong"
/// mirror = true
/// ```
///
/// `funnel` is a built-in profile (`none`, `weak`, `strong`) or a path to a
/// `t,gamma` CSV file, relative to the scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub formula: String,
    pub robot: RobotConfig,
    #[serde(default)]
    pub goals: Vec<GoalConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub x0: [f64; 2],
    pub u_max: f64,
    pub dt: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalConfig {
    pub center: [f64; 2],
    pub radius: f64,
    pub funnel: Option<String>,
    #[serde(default)]
    pub mirror: bool,
}

/// Everything needed to roll out and score a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub robot: RobotSpec,
    pub goals: Vec<GoalRegion>,
    pub guides: Vec<Guide>,
    pub formula: Formula,
}

impl Scenario {
    /// Two goals of radius 0.2 at (1.5, 2.5) and (2.5, 1.5), to be visited
    /// alternately: `G[0,6](F[0,4] μ1 & F[0,4] μ2)`. The second goal's
    /// funnel is the mirror of the first.
    pub fn case_study(guidance: Guidance) -> Self {
        let g1 = GoalRegion { center: [1.5, 2.5], radius: 0.2 };
        let g2 = GoalRegion { center: [2.5, 1.5], radius: 0.2 };
        let window = Interval::new(0.0, 4.0).expect("valid interval");
        let formula = Formula::always(
            Interval::new(0.0, 6.0).expect("valid interval"),
            Formula::and(vec![
                Formula::eventually(window, Formula::predicate(g1.predicate())),
                Formula::eventually(window, Formula::predicate(g2.predicate())),
            ]),
        );
        let funnel = guidance.funnel();
        Scenario {
            robot: RobotSpec::case_study(),
            goals: vec![g1, g2],
            guides: vec![Guide { funnel: funnel.clone(), goal: g1 }, Guide { funnel: funnel.mirror(), goal: g2 }],
            formula,
        }
    }

    /// Same robot and task with different guides.
    pub fn with_guidance(&self, guidance: Guidance) -> Self {
        let funnel = guidance.funnel();
        let mut out = self.clone();
        out.guides = self
            .goals
            .iter()
            .enumerate()
            .map(|(i, goal)| Guide { funnel: if i == 0 { funnel.clone() } else { funnel.mirror() }, goal: *goal })
            .collect();
        out
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, DynamicsError> {
        let file: ScenarioFile = toml::from_str(text)?;
        let r = &file.robot;
        let robot = RobotSpec::new(r.x0, r.u_max, r.dt, r.horizon)?;
        let mut goals = Vec::new();
        let mut guides = Vec::new();
        for g in &file.goals {
            let goal = GoalRegion::new(g.center, g.radius)?;
            goals.push(goal);
            let Some(name) = &g.funnel else { continue };
            let funnel = match name.parse::<Guidance>() {
                Ok(builtin) => builtin.funnel(),
                Err(_) => Funnel::load(base_dir.join(name))?,
            };
            if funnel.start() > 0.0 || funnel.end() < robot.horizon {
                return Err(DynamicsError::Scenario(format!(
                    "funnel `{name}` covers [{}, {}], not [0, {}]",
                    funnel.start(),
                    funnel.end(),
                    robot.horizon
                )));
            }
            let funnel = if g.mirror { funnel.mirror() } else { funnel };
            guides.push(Guide { funnel, goal });
        }
        let formula = parse_formula(&file.formula)?;
        Ok(Scenario { robot, goals, guides, formula })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DynamicsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE: &str = r#"
formula = "G[0,6](F[0,4](0.2 - norm(x1 - 1.5, x2 - 2.5)) & F[0,4](0.2 - norm(x1 - 2.5, x2 - 1.5)))"

[robot]
x0 = [2.0, 2.0]
u_max = 1.0
dt = 0.02
horizon = 10.0

[[goals]]
center = [1.5, 2.5]
radius = 0.2
funnel = "strong"

[[goals]]
center = [2.5, 1.5]
radius = 0.2
funnel = "strong"
mirror = true
"#;

    #[test]
    fn file_matches_builtin() {
        let parsed = Scenario::from_toml(CASE, Path::new(".")).unwrap();
        let builtin = Scenario::case_study(Guidance::Strong);
        assert_eq!(parsed.robot, builtin.robot);
        assert_eq!(parsed.goals, builtin.goals);
        assert_eq!(parsed.guides, builtin.guides);
        assert_eq!(parsed.formula, builtin.formula);
        assert_eq!(builtin.formula.horizon(), 10.0);
        assert_eq!(builtin.with_guidance(Guidance::Strong), builtin);
    }

    #[test]
    fn rejects_unknown_keys_and_short_funnels() {
        let bad = CASE.replace("u_max", "umax");
        assert!(Scenario::from_toml(&bad, Path::new(".")).is_err());
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("short.csv"), "t,gamma\n0,-1\n5,-1\n").unwrap();
        let short = CASE.replacen("funnel = \"strong\"", "funnel = \"short.csv\"", 1);
        let err = Scenario::from_toml(&short, dir.path()).unwrap_err();
        assert!(matches!(err, DynamicsError::Scenario(_)), "{err}");
    }
}
