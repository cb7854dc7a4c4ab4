//! Report directory layout. Every table leads with the config hash.

use std::fs;
use std::io;
use std::path::Path;

use super::{DistributedSection, ModelReport, StudyReport};
use crate::leadership::{write_rows_csv, DropLedger};

pub const REPORT_FILES: [&str; 9] = [
    "report.json",
    "logit_table.csv",
    "differential_table.csv",
    "std_coef.csv",
    "bci.csv",
    "score_averages.csv",
    "drop_ledger.csv",
    "observations.csv",
    "differentials.csv",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

fn model_rows(hash: &str, format: &str, m: &ModelReport, extra: impl Fn(&str) -> Vec<String>) -> Vec<Vec<String>> {
    let Some(fit) = &m.fit else {
        let mut row = vec![hash.into(), format.into(), m.model.clone(), String::new(), String::new(), String::new()];
        row.extend([String::new(), String::new(), m.n_obs.to_string()]);
        row.extend(extra("").into_iter().map(|_| String::new()));
        row.push(m.error.clone().unwrap_or_default());
        return vec![row];
    };
    fit.coefficients
        .iter()
        .map(|c| {
            let mut row = vec![
                hash.into(),
                format.into(),
                m.model.clone(),
                c.name.clone(),
                c.estimate.to_string(),
                c.std_error.to_string(),
                c.statistic.to_string(),
                c.p_value.to_string(),
                m.n_obs.to_string(),
            ];
            row.extend(extra(&c.name));
            row.push(String::new());
            row
        })
        .collect()
}

fn logit_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let mut rows = Vec::new();
    for s in &r.centralized {
        for m in [&s.model1, &s.model2] {
            let llf = opt(m.fit.as_ref().map(|f| f.log_likelihood));
            let lr = m.lr_test;
            rows.extend(model_rows(&r.config_hash, s.format.as_str(), m, |_| {
                vec![
                    llf.clone(),
                    opt(lr.map(|t| t.statistic)),
                    opt(lr.map(|t| t.df)),
                    opt(lr.map(|t| t.p_value)),
                ]
            }));
        }
    }
    table(
        &[
            "config_hash",
            "format",
            "model",
            "term",
            "estimate",
            "std_error",
            "z",
            "p_value",
            "n_obs",
            "log_likelihood",
            "lr_statistic",
            "lr_df",
            "lr_p_value",
            "error",
        ],
        rows,
    )
}

fn vif_of(s: &DistributedSection, term: &str) -> String {
    s.vif
        .iter()
        .find(|v| v.column == term)
        .map(|v| match v.vif {
            crate::stats::Vif::Finite(x) => x.to_string(),
            crate::stats::Vif::PerfectCollinearity => "PerfectCollinearity".into(),
        })
        .unwrap_or_default()
}

fn differential_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let mut rows = Vec::new();
    for s in &r.distributed {
        for m in [&s.model1, &s.model2] {
            let r2 = opt(m.fit.as_ref().and_then(|f| f.r_squared));
            let is_full = m.model == "model2";
            rows.extend(model_rows(&r.config_hash, s.format.as_str(), m, |term| {
                vec![r2.clone(), if is_full { vif_of(s, term) } else { String::new() }]
            }));
        }
    }
    table(
        &[
            "config_hash",
            "format",
            "model",
            "term",
            "estimate",
            "std_error",
            "t",
            "p_value",
            "n_obs",
            "r_squared",
            "vif",
            "error",
        ],
        rows,
    )
}

fn std_coef_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let rows = r
        .distributed
        .iter()
        .flat_map(|s| {
            s.std_coef.iter().map(move |e| {
                vec![
                    r.config_hash.clone(),
                    s.format.to_string(),
                    e.model.clone(),
                    e.column.clone(),
                    opt(e.std_beta),
                    opt(e.lower),
                    opt(e.upper),
                    e.error.clone().unwrap_or_default(),
                ]
            })
        })
        .collect();
    table(
        &["config_hash", "format", "model", "term", "std_beta", "lower", "upper", "error"],
        rows,
    )
}

fn bci_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let rows = r
        .bci
        .iter()
        .flat_map(|s| {
            s.strata.iter().map(move |st| {
                vec![
                    r.config_hash.clone(),
                    s.format.to_string(),
                    s.criterion.clone(),
                    st.centralized.to_string(),
                    st.successes.to_string(),
                    st.trials.to_string(),
                    st.interval.point.to_string(),
                    st.interval.lower.to_string(),
                    st.interval.upper.to_string(),
                ]
            })
        })
        .collect();
    table(
        &[
            "config_hash",
            "format",
            "criterion",
            "centralized",
            "successes",
            "trials",
            "proportion",
            "lower",
            "upper",
        ],
        rows,
    )
}

fn score_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let mut rows = Vec::new();
    for s in &r.score_averages {
        for st in &s.strata {
            rows.push(vec![
                r.config_hash.clone(),
                s.format.to_string(),
                if st.centralized == 1 { "centralized" } else { "decentralized" }.into(),
                st.n.to_string(),
                st.interval.point.to_string(),
                st.interval.lower.to_string(),
                st.interval.upper.to_string(),
                String::new(),
            ]);
        }
        if let Some(d) = &s.difference {
            rows.push(vec![
                r.config_hash.clone(),
                s.format.to_string(),
                "difference".into(),
                String::new(),
                d.difference.to_string(),
                d.lower.to_string(),
                d.upper.to_string(),
                d.p_value.to_string(),
            ]);
        }
    }
    table(
        &["config_hash", "format", "stratum", "n", "mean", "lower", "upper", "p_value"],
        rows,
    )
}

fn ledger_table(r: &StudyReport) -> Result<Vec<u8>, csv::Error> {
    let mut sections: Vec<(&str, String, &DropLedger)> = Vec::new();
    for s in &r.centralized {
        sections.push(("centralized", s.format.to_string(), &s.ledger));
    }
    for s in &r.distributed {
        sections.push(("distributed", s.format.to_string(), &s.ledger));
    }
    for s in &r.score_averages {
        sections.push(("score_averages", s.format.to_string(), &s.ledger));
    }
    let rows = sections
        .into_iter()
        .flat_map(|(section, format, ledger)| {
            ledger.events.iter().map(move |e| {
                vec![
                    r.config_hash.clone(),
                    section.to_string(),
                    format.clone(),
                    e.match_id.clone(),
                    e.team.clone().unwrap_or_default(),
                    opt(e.innings),
                    e.reason.as_str().to_string(),
                ]
            })
        })
        .collect();
    table(
        &["config_hash", "section", "format", "match_id", "team", "innings", "reason"],
        rows,
    )
}

fn rows_csv<T: serde::Serialize>(rows: &[T]) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    write_rows_csv(rows, &mut buf)?;
    Ok(buf)
}

fn render(r: &StudyReport) -> Result<Vec<(&'static str, Vec<u8>)>, csv::Error> {
    let mut json = serde_json::to_vec_pretty(r).expect("report serializes");
    json.push(b'\n');
    Ok(vec![
        (REPORT_FILES[0], json),
        (REPORT_FILES[1], logit_table(r)?),
        (REPORT_FILES[2], differential_table(r)?),
        (REPORT_FILES[3], std_coef_table(r)?),
        (REPORT_FILES[4], bci_table(r)?),
        (REPORT_FILES[5], score_table(r)?),
        (REPORT_FILES[6], ledger_table(r)?),
        (REPORT_FILES[7], rows_csv(&r.observations)?),
        (REPORT_FILES[8], rows_csv(&r.differentials)?),
    ])
}

/// Writes every file of [`REPORT_FILES`] into `dir`, creating it if needed.
pub fn write_report_dir(report: &StudyReport, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in render(report).map_err(io::Error::other)? {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}
