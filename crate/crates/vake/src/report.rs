//! Plain-text rendering of scenario reports: per backend, a property matrix
//! with one column per scenario, then one summary line per scenario and one
//! line per trial. Output is a pure function of the reports.

use std::fmt::Write;

use vake_core::adversary::{ScenarioConfig, ScenarioReport, TrialRecord, Verdict, Verdicts};

const PROPERTIES: [(&str, fn(&Verdicts) -> Verdict); 3] = [
    ("session key secrecy", |v| v.secrecy),
    ("forward secrecy", |v| v.forward_secrecy),
    ("injective agreement", |v| v.injective_agreement),
];

/// `(a)`, or `(b')` for the mirrored one-card case.
pub fn column_label(cfg: &ScenarioConfig) -> String {
    format!("({}{})", cfg.scenario.letter(), if cfg.mirror { "'" } else { "" })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// `SasPending` to `sas_pending`.
fn snake(name: &str) -> String {
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

pub fn matrix(reports: &[&ScenarioReport]) -> String {
    let labels: Vec<String> = reports.iter().map(|r| column_label(&r.config)).collect();
    let mut out = format!("{:<21}", "property");
    for l in &labels {
        let _ = write!(out, "{l:<6}");
    }
    out = out.trim_end().to_string() + "\n";
    for (name, get) in PROPERTIES {
        let mut line = format!("{name:<21}");
        for r in reports {
            let _ = write!(line, "{:<6}", get(&r.verdicts).as_str());
        }
        out += line.trim_end();
        out.push('\n');
    }
    out
}

pub fn trial_line(label: &str, t: &TrialRecord) -> String {
    format!(
        "trial {label} {}: completed {}; phases {} {}; detected {}; exposed {} {}; forward secrecy {}; agreement {}; sas collision {}; id leak {}",
        t.index,
        yes_no(t.completed),
        snake(&format!("{:?}", t.phases[0])),
        snake(&format!("{:?}", t.phases[1])),
        t.detected_by.map_or("none".to_string(), |c| snake(c.name())),
        yes_no(t.exposed[0]),
        yes_no(t.exposed[1]),
        yes_no(t.forward_secrecy_holds),
        yes_no(t.injective_agreement_holds),
        yes_no(t.sas_collision),
        yes_no(t.identity_leak),
    )
}

fn summary_line(r: &ScenarioReport) -> String {
    let c = &r.config;
    let detected = r.trials.iter().filter(|t| t.detected_by.is_some()).count();
    let expectation = match c.expect {
        None => "none",
        Some(_) if r.meets_expectation() => "met",
        Some(_) => "MISMATCH",
    };
    format!(
        "scenario {} {}: trials {} seed {} completed {} detected {} expectation {}",
        column_label(c),
        c.scenario.description(),
        r.trials.len(),
        c.seed,
        r.completed(),
        detected,
        expectation
    )
}

/// The full report for one scenario file.
pub fn render(name: &str, reports: &[ScenarioReport]) -> String {
    let mut out = format!("report {name}\n");
    let mut modes: Vec<&str> = reports.iter().map(|r| r.mode).collect();
    modes.dedup();
    for mode in modes {
        let group: Vec<&ScenarioReport> = reports.iter().filter(|r| r.mode == mode).collect();
        let _ = write!(out, "\nmode {mode}\n\n{}\n", matrix(&group));
        for r in &group {
            out += &summary_line(r);
            out.push('\n');
        }
        out.push('\n');
        for r in &group {
            let label = column_label(&r.config);
            for t in &r.trials {
                out += &trial_line(&label, t);
                out.push('\n');
            }
        }
    }
    let bad = reports.iter().filter(|r| !r.meets_expectation()).count();
    let _ = writeln!(out, "\nexpectations {}", if bad == 0 { "met".to_string() } else { format!("failed in {bad}") });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use vake_core::adversary::{Scenario, ScenarioConfig};
    use vake_core::protocol::{AbortCode, Phase};

    #[test]
    fn snake_case_names() {
        assert_eq!(snake("SasPending"), "sas_pending");
        assert_eq!(snake(AbortCode::RetryExhausted.name()), "retry_exhausted");
    }

    #[test]
    fn layout() {
        let t = TrialRecord {
            index: 3,
            completed: false,
            phases: [Phase::Aborted, Phase::SasPending],
            detected_by: Some(AbortCode::SigInvalid),
            attacker_has_session_key: false,
            exposed: [false, false],
            forward_secrecy_holds: true,
            injective_agreement_holds: true,
            sas_collision: false,
            identity_leak: false,
        };
        let mut cfg = ScenarioConfig::new(Scenario::B);
        cfg.mirror = true;
        let r = ScenarioReport::from_trials(cfg, "concrete", vec![t]);
        let text = render("demo", &[r]);
        let expected = "\
report demo

mode concrete

property             (b')
session key secrecy  yes
forward secrecy      yes
injective agreement  yes

scenario (b') unilateral signature authentication: trials 1 seed 0 completed 0 detected 1 expectation none

trial (b') 3: completed no; phases aborted sas_pending; detected sig_invalid; exposed no no; forward secrecy yes; agreement yes; sas collision no; id leak no

expectations met
";
        assert_eq!(text, expected);
    }
}
