//! Campaign drivers: exceptional-set census, survey rows, two-square gaps,
//! configuration files and the self-check suites.

pub mod config;
pub mod gaps;
pub mod record;
pub mod scan;
pub mod verify;

pub use config::{ScanConfig, ScanSettings, Variant};
pub use gaps::{two_square_gap_scan, GapScan};
pub use record::{read_records, write_records, SurveyRecord, CSV_HEADER};
pub use scan::{
    exceptional_bound, exceptional_scan, survey_record, survey_records, ExceptionRow, ExceptionalScan,
    ScanSummary, TwoSquareBitmap,
};
pub use verify::{verify, CheckReport, FailureKind, Suite, VerifyReport};
