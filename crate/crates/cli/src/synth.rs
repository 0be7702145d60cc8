use anyhow::Result;
use entail_core::kb::Ontology;
use entail_core::synth::{generate, SynthConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOutput {
    pub reports: String,
    pub log: String,
}

pub fn synth(ontology: &Ontology, config: &SynthConfig) -> Result<SynthOutput> {
    let mut reports = String::new();
    let mut log = String::new();
    for r in generate(ontology, config)? {
        reports.push_str(&serde_json::to_string(&r.record)?);
        reports.push('\n');
        log.push_str(&serde_json::to_string(&r.injection)?);
        log.push('\n');
    }
    Ok(SynthOutput { reports, log })
}
