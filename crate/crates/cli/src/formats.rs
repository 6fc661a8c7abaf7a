//! On-disk formats: instance JSON (bit-exact double round-trips),
//! perturbation grids, AS graphs, explicit solution sets as bit strings,
//! Pareto-set CSV export and certificate dumps.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use smooth_pareto_core::density::{DensitySpec, PerturbationSpec};
use smooth_pareto_core::model::{Adversarial, Instance, Solution};
use smooth_pareto_core::pareto::ParetoSet;
use smooth_pareto_core::sets::{AsGraph, SolutionSet};
use smooth_pareto_core::witness::Certificate;
use smooth_pareto_core::zp::ZpCertificate;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub d: usize,
    /// Row-major `d x n` linear coefficients.
    pub coefficients: Vec<f64>,
    /// Adversarial values aligned to the solution set's enumeration order.
    pub adversarial: Vec<f64>,
    pub solution_set: SolutionSetJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionSetJson {
    Hypercube { n: usize },
    Explicit { solutions: Vec<String> },
    ValidPaths { graph: AsGraphJson },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsGraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub s: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    #[serde(rename = "as")]
    pub as_label: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityJson>,
}

/// Density descriptors; externally tagged so a grid entry reads as
/// `"zero"` or `{"uniform": {...}}` etc.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DensityJson {
    Zero,
    Uniform { center: f64, width: f64 },
    Triangular { peak: f64, halfwidth: f64 },
    Tgauss { mean: f64, sigma: f64 },
    Bimodal { blocks: [[f64; 2]; 2] },
}

impl DensityJson {
    pub fn to_spec(&self) -> Result<Option<DensitySpec>> {
        Ok(match *self {
            DensityJson::Zero => None,
            DensityJson::Uniform { center, width } => {
                Some(DensitySpec::uniform(center, width)?)
            }
            DensityJson::Triangular { peak, halfwidth } => {
                Some(DensitySpec::triangular(peak, halfwidth)?)
            }
            DensityJson::Tgauss { mean, sigma } => {
                Some(DensitySpec::truncated_gaussian(mean, sigma)?)
            }
            DensityJson::Bimodal { blocks } => Some(DensitySpec::bimodal(
                (blocks[0][0], blocks[0][1]),
                (blocks[1][0], blocks[1][1]),
            )?),
        })
    }

    pub fn from_spec(spec: Option<&DensitySpec>) -> Self {
        match spec {
            None => DensityJson::Zero,
            Some(DensitySpec::Uniform { center, width }) => {
                DensityJson::Uniform { center: *center, width: *width }
            }
            Some(DensitySpec::Triangular { peak, half_width }) => {
                DensityJson::Triangular { peak: *peak, halfwidth: *half_width }
            }
            Some(DensitySpec::TruncatedGaussian { mean, sigma }) => {
                DensityJson::Tgauss { mean: *mean, sigma: *sigma }
            }
            Some(DensitySpec::BimodalUniform { first, second }) => DensityJson::Bimodal {
                blocks: [[first.0, first.1], [second.0, second.1]],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationSpecJson {
    pub d: usize,
    pub n: usize,
    /// `d` rows of `n` entries.
    pub entries: Vec<Vec<DensityJson>>,
}

impl PerturbationSpecJson {
    pub fn to_spec(&self) -> Result<PerturbationSpec> {
        if self.entries.len() != self.d || self.entries.iter().any(|r| r.len() != self.n) {
            bail!("perturbation grid must be d x n");
        }
        let mut rows = Vec::with_capacity(self.d);
        for row in &self.entries {
            let mut out = Vec::with_capacity(self.n);
            for entry in row {
                out.push(entry.to_spec()?);
            }
            rows.push(out);
        }
        Ok(PerturbationSpec::new(rows)?)
    }

    pub fn from_spec(spec: &PerturbationSpec) -> Self {
        PerturbationSpecJson {
            d: spec.d(),
            n: spec.n(),
            entries: spec
                .rows()
                .iter()
                .map(|row| row.iter().map(|e| DensityJson::from_spec(e.as_ref())).collect())
                .collect(),
        }
    }
}

pub fn parse_solution(bits: &str) -> Result<Solution> {
    if bits.is_empty() || bits.len() > 127 {
        bail!("bit string length out of range");
    }
    let parsed: Result<Vec<bool>> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => bail!("invalid bit character {other:?}"),
        })
        .collect();
    Ok(Solution::from_bits(&parsed?))
}

/// Explicit sets as an external format: newline-separated bit strings.
pub fn parse_explicit_set(text: &str) -> Result<SolutionSet> {
    let solutions: Result<Vec<Solution>> =
        text.lines().map(str::trim).filter(|l| !l.is_empty()).map(parse_solution).collect();
    Ok(SolutionSet::explicit(solutions?)?)
}

pub fn graph_from_json(json: &AsGraphJson) -> Result<AsGraph> {
    let v = json.vertices.len();
    let mut labels = vec![0usize; v];
    for vertex in &json.vertices {
        if vertex.id >= v {
            bail!("vertex id {} out of range", vertex.id);
        }
        labels[vertex.id] = vertex.as_label;
    }
    let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e.u, e.v)).collect();
    Ok(AsGraph::new(labels, edges, json.s, json.t)?)
}

pub fn set_from_json(json: &SolutionSetJson) -> Result<SolutionSet> {
    Ok(match json {
        SolutionSetJson::Hypercube { n } => SolutionSet::hypercube(*n),
        SolutionSetJson::Explicit { solutions } => {
            let parsed: Result<Vec<Solution>> =
                solutions.iter().map(|s| parse_solution(s)).collect();
            SolutionSet::explicit(parsed?)?
        }
        SolutionSetJson::ValidPaths { graph } => graph_from_json(graph)?.valid_paths()?,
    })
}

pub fn set_to_json(set: &SolutionSet) -> SolutionSetJson {
    match set {
        SolutionSet::Hypercube { n } => SolutionSetJson::Hypercube { n: *n },
        SolutionSet::Explicit(_) => SolutionSetJson::Explicit {
            solutions: set.iter().map(|s| s.to_string()).collect(),
        },
        SolutionSet::ValidPaths(p) => SolutionSetJson::ValidPaths {
            graph: AsGraphJson {
                vertices: p
                    .graph
                    .vertex_as
                    .iter()
                    .enumerate()
                    .map(|(id, &as_label)| VertexJson { id, as_label })
                    .collect(),
                edges: p
                    .graph
                    .edges
                    .iter()
                    .map(|&(u, v)| EdgeJson { u, v, length: None, density: None })
                    .collect(),
                s: p.graph.s,
                t: p.graph.t,
            },
        },
    }
}

pub fn instance_to_json(inst: &Instance) -> Result<InstanceJson> {
    let adversarial: Result<Vec<f64>> =
        inst.set().iter().map(|x| Ok(inst.adversarial_value(&x)?)).collect();
    Ok(InstanceJson {
        n: inst.n(),
        d: inst.d(),
        coefficients: inst.coefficients().to_vec(),
        adversarial: adversarial?,
        solution_set: set_to_json(inst.set()),
    })
}

pub fn instance_from_json(json: &InstanceJson) -> Result<Instance> {
    let set = set_from_json(&json.solution_set)?;
    if set.n() != json.n {
        bail!("solution set n = {} disagrees with header n = {}", set.n(), json.n);
    }
    Ok(Instance::new(
        set,
        json.d,
        json.coefficients.clone(),
        Adversarial::Explicit(json.adversarial.clone()),
    )?)
}

pub fn read_instance(path: &std::path::Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance {}", path.display()))?;
    let json: InstanceJson = serde_json::from_str(&text).context("parsing instance JSON")?;
    instance_from_json(&json)
}

pub fn write_instance(path: &std::path::Path, inst: &Instance) -> Result<()> {
    let json = instance_to_json(inst)?;
    std::fs::write(path, serde_json::to_string_pretty(&json)?)
        .with_context(|| format!("writing instance {}", path.display()))?;
    Ok(())
}

/// CSV export: `solution,V^1,...,V^d,V^{d+1}` per Pareto member.
pub fn pareto_to_csv(set: &ParetoSet, d: usize) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["solution".to_string()];
    header.extend((1..=d).map(|t| format!("V{t}")));
    header.push(format!("V{}", d + 1));
    wtr.write_record(&header)?;
    for member in &set.members {
        let mut record = vec![member.solution.to_string()];
        record.extend(member.objectives.linear.iter().map(|v| format!("{v}")));
        record.push(format!("{}", member.objectives.adversarial));
        wtr.write_record(&record)?;
    }
    Ok(String::from_utf8(wtr.into_inner()?)?)
}

/// Certificate dump for debugging and regression comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub i_star: Vec<usize>,
    /// Row-major restricted bit matrix, rows `I*`, columns in run order.
    pub matrix: Vec<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bookkeeping: Option<ZpBookkeepingJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZpBookkeepingJson {
    pub r_k: Vec<usize>,
    pub t_r: Vec<usize>,
    pub d_r: Vec<usize>,
    pub columns: Vec<(usize, usize)>,
}

pub fn certificate_to_json(cert: &Certificate) -> CertificateJson {
    let a = cert.restricted();
    CertificateJson {
        i_star: cert.i_star.iter().collect(),
        matrix: (0..a.rows)
            .map(|r| (0..a.cols).map(|c| a.get(r, c) as u8).collect())
            .collect(),
        bookkeeping: None,
    }
}

/// One trace round as a JSON line; a full trace dump is one line per round.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRoundJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub call: Option<usize>,
    pub round: usize,
    pub winners_nonempty: bool,
    pub chosen: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub retired: Vec<usize>,
}

pub fn trace_to_json_lines(trace: &smooth_pareto_core::witness::WitnessTrace) -> Result<String> {
    let mut out = String::new();
    for round in &trace.rounds {
        let line = TraceRoundJson {
            call: None,
            round: round.t,
            winners_nonempty: round.winners_nonempty,
            chosen: round.chosen.to_string(),
            indices: round.chosen_index.into_iter().collect(),
            retired: Vec::new(),
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn zp_trace_to_json_lines(trace: &smooth_pareto_core::zp::ZpTrace) -> Result<String> {
    let mut out = String::new();
    for call in &trace.calls {
        for round in &call.rounds {
            let line = TraceRoundJson {
                call: Some(call.r),
                round: round.t,
                winners_nonempty: round.winners_nonempty,
                chosen: round.chosen.to_string(),
                indices: round.added.iter().map(|&(_, i)| i).collect(),
                retired: round.k_eq.clone(),
            };
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn zp_certificate_to_json(cert: &ZpCertificate) -> CertificateJson {
    let a = cert.matrix();
    CertificateJson {
        i_star: cert.i_star.iter().collect(),
        matrix: (0..a.rows)
            .map(|r| (0..a.cols).map(|c| a.get(r, c) as u8).collect())
            .collect(),
        bookkeeping: Some(ZpBookkeepingJson {
            r_k: cert.r_k.clone(),
            t_r: cert.t_r.clone(),
            d_r: cert.d_r.clone(),
            columns: cert.columns.iter().map(|c| (c.r, c.t)).collect(),
        }),
    }
}
