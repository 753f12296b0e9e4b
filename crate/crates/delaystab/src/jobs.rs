//! Request handling shared by the CLI and the HTTP service.

use delaystab_core::export::{
    document, interval_json, region_csv, region_json, region_svg, report_json, sweep_csv, sweep_json, verify_json,
    zones_csv, zones_json,
};
use delaystab_core::oracle::{count_rhp_zeros, ContourSpec};
use delaystab_core::region::{admissible_h, region_in_interval, sweep_h, HInterval, RegionOptions};
use delaystab_core::stabilizability::{parse_grid, scan_parameter_plane, StabilizabilityReport};
use delaystab_core::{analyze, ControllerPoint, Error, Execution, HarmonicContext, PlantSpec, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Check,
    Region,
    Zones,
    Sweep,
    Verify,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    pub plant: Option<PlantSpec>,
    /// Only read by the service's `/api/check`, where a grid turns the
    /// check into a zone scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub h: Option<f64>,
    pub hi: Option<f64>,
    pub hd: Option<f64>,
    /// `P1:min:max:steps[,P2:min:max:steps]`.
    pub grid: Option<String>,
    /// Number of `h` slices for a sweep.
    pub steps: Option<usize>,
    #[serde(default)]
    pub format: Format,
}

pub const DEFAULT_SWEEP_STEPS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// Unreadable or incomplete input.
    Malformed,
    /// The plant or `h` does not meet the prerequisites of the request.
    Prerequisite,
    Degenerate,
    Internal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
    /// Document with `error` plus any report or interval that explains it.
    pub payload: Value,
}

impl Failure {
    fn new(kind: FailureKind, message: impl Into<String>, extra: Value) -> Self {
        let message = message.into();
        let mut payload = json!({ "error": message });
        if let Value::Object(map) = extra {
            payload.as_object_mut().unwrap().extend(map);
        }
        Failure {
            kind,
            message,
            payload: document(&payload),
        }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Failure::new(FailureKind::Malformed, message, Value::Null)
    }

    fn from_core(e: Error, extra: Value) -> Self {
        let kind = match &e {
            Error::InvalidPlant(_) | Error::CommonFactor { .. } | Error::InvalidArgument(_) => FailureKind::Malformed,
            Error::Degenerate(_) | Error::MultipleRootSuspected { .. } | Error::EndpointIsRoot | Error::ContourHitsZero { .. } => {
                FailureKind::Degenerate
            }
            _ => FailureKind::Prerequisite,
        };
        Failure::new(kind, e.to_string(), extra)
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            FailureKind::Malformed | FailureKind::Internal => 1,
            FailureKind::Prerequisite => 2,
            FailureKind::Degenerate => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Json(Value),
    Text { format: Format, content: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub body: Body,
    /// Verdict-driven exit status of a successful run.
    pub exit_code: u8,
}

impl Output {
    fn json(v: Value) -> Self {
        Output {
            body: Body::Json(v),
            exit_code: 0,
        }
    }

    /// Text for a file or stdout.
    pub fn render(&self) -> String {
        match &self.body {
            Body::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).unwrap_or_default()),
            Body::Text { content, .. } => content.clone(),
        }
    }

    /// JSON for the service: text formats are wrapped in a document.
    pub fn into_json(self) -> Value {
        match self.body {
            Body::Json(v) => v,
            Body::Text { format, content } => document(&json!({ "format": format, "content": content })),
        }
    }
}

pub type JobResult = std::result::Result<Output, Failure>;

fn plant(req: &JobRequest) -> Result<&PlantSpec, Failure> {
    req.plant.as_ref().ok_or_else(|| Failure::malformed("missing plant"))
}

fn require(v: Option<f64>, name: &str) -> Result<f64, Failure> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(Failure::malformed(format!("{name} = {x} is not finite"))),
        None => Err(Failure::malformed(format!("missing {name}"))),
    }
}

fn formats(req: &JobRequest, allowed: &[Format], mode: &str) -> Result<(), Failure> {
    if allowed.contains(&req.format) {
        Ok(())
    } else {
        Err(Failure::malformed(format!("{mode} does not support format {:?}", req.format).to_lowercase()))
    }
}

fn context(spec: &PlantSpec) -> Result<HarmonicContext, Failure> {
    spec.normalize()
        .map(HarmonicContext::new)
        .map_err(|e| Failure::from_core(e, Value::Null))
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Stabilizable => 0,
        Verdict::NotStabilizable => 2,
        Verdict::Degenerate => 3,
    }
}

pub fn run(mode: Mode, req: &JobRequest) -> JobResult {
    match mode {
        Mode::Check => check(req),
        Mode::Region => region(req),
        Mode::Zones => zones(req),
        Mode::Sweep => sweep(req),
        Mode::Verify => verify(req),
    }
}

pub fn check(req: &JobRequest) -> JobResult {
    formats(req, &[Format::Json], "check")?;
    let ctx = context(plant(req)?)?;
    let report = analyze(&ctx);
    Ok(Output {
        exit_code: verdict_exit(report.verdict),
        body: Body::Json(report_json(&report)),
    })
}

/// The admissible interval of a stabilizable plant, or the failure that
/// explains why there is none.
fn interval(ctx: &HarmonicContext) -> Result<(StabilizabilityReport, HInterval), Failure> {
    let report = analyze(ctx);
    let extra = || json!({ "report": report_json(&report) });
    let case = match (report.verdict, report.case) {
        (Verdict::Stabilizable, Some(case)) => case,
        (Verdict::Degenerate, _) => {
            return Err(Failure::new(FailureKind::Degenerate, "stabilizability is undecided", extra()))
        }
        _ => return Err(Failure::new(FailureKind::Prerequisite, "plant is not stabilizable", extra())),
    };
    let iv = admissible_h(ctx, case, None).map_err(|e| Failure::from_core(e, extra()))?;
    Ok((report, iv))
}

pub fn region(req: &JobRequest) -> JobResult {
    let ctx = context(plant(req)?)?;
    let h = require(req.h, "h")?;
    let (_, iv) = interval(&ctx)?;
    let region = region_in_interval(&ctx, h, &iv, &RegionOptions::default())
        .map_err(|e| Failure::from_core(e, json!({ "interval": interval_json(&iv) })))?;
    Ok(match req.format {
        Format::Json => Output::json(region_json(&region)),
        Format::Csv => text(Format::Csv, region_csv(&region)),
        Format::Svg => text(Format::Svg, region_svg(&region)),
    })
}

fn text(format: Format, content: String) -> Output {
    Output {
        body: Body::Text { format, content },
        exit_code: 0,
    }
}

pub fn zones(req: &JobRequest) -> JobResult {
    formats(req, &[Format::Json, Format::Csv], "zones")?;
    let base = plant(req)?;
    base.validate().map_err(|e| Failure::from_core(e, Value::Null))?;
    let spec = req.grid.as_deref().ok_or_else(|| Failure::malformed("missing grid"))?;
    let (a1, a2) = parse_grid(spec).map_err(|e| Failure::malformed(e.to_string()))?;
    let scan = scan_parameter_plane(base, &a1, a2.as_ref(), Execution::Parallel);
    Ok(match req.format {
        Format::Csv => text(Format::Csv, zones_csv(&scan)),
        _ => Output::json(zones_json(&scan)),
    })
}

pub fn sweep(req: &JobRequest) -> JobResult {
    formats(req, &[Format::Json, Format::Csv], "sweep")?;
    let ctx = context(plant(req)?)?;
    let steps = req.steps.unwrap_or(DEFAULT_SWEEP_STEPS);
    if steps == 0 {
        return Err(Failure::malformed("steps must be positive"));
    }
    let (_, iv) = interval(&ctx)?;
    let slices = sweep_h(&ctx, &iv, steps, &RegionOptions::default(), Execution::Parallel);
    Ok(match req.format {
        Format::Csv => text(Format::Csv, sweep_csv(&slices)),
        _ => Output::json(sweep_json(&iv, &slices)),
    })
}

pub fn verify(req: &JobRequest) -> JobResult {
    formats(req, &[Format::Json], "verify")?;
    let ctx = context(plant(req)?)?;
    let point = ControllerPoint::new(require(req.h, "h")?, require(req.hi, "hi")?, require(req.hd, "hd")?);
    let count = count_rhp_zeros(ctx.plant(), &point, &ContourSpec::default(), Execution::Parallel)
        .map_err(|e| Failure::from_core(e, Value::Null))?;
    // where the point falls in the analytic region, when there is one
    let class = interval(&ctx)
        .ok()
        .and_then(|(_, iv)| region_in_interval(&ctx, point.h, &iv, &RegionOptions::default()).ok())
        .map(|r| r.classify(point.hi, point.hd));
    Ok(Output::json(verify_json(&point, &count, class)))
}
