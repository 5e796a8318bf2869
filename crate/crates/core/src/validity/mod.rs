//! Monte Carlo audits of validity, uniformity under a true point null,
//! plausibility-region coverage, and the lack of coherence of p-values
//! across nested nulls.

mod audit;
mod coherence;

pub use audit::{
    audit_exceedance, audit_region_coverage, audit_uniformity, audit_validity, CoverageReport, UniformityMode,
    UniformityReport, ValidityAudit,
};
pub use coherence::{coherence_demo, coherence_scan, CoherenceReport, CoherenceRow};
