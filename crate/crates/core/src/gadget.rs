//! Shared gadget plumbing: the role-map sidecar format
//! (`r <vertex-id> <role-label>` per line, `#` comments) and structural
//! validation reports.

use std::fmt::{self, Display};
use std::str::FromStr;

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoleMapError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("vertex {0} has no role")]
    Missing(VertexId),
    #[error("vertex {0} listed twice")]
    Duplicate(VertexId),
    #[error("vertex id {0} out of range")]
    OutOfRange(VertexId),
}

/// Splits `name[a,b]` into `("name", "a,b")`; a bare `name` yields an empty
/// argument string.
pub(crate) fn split_label(label: &str) -> Option<(&str, &str)> {
    match label.find('[') {
        None => Some((label, "")),
        Some(open) => {
            let inner = label[open + 1..].strip_suffix(']')?;
            Some((&label[..open], inner))
        }
    }
}

/// Parses a comma-separated list of unsigned integers.
pub(crate) fn parse_indices(args: &str) -> Option<Vec<usize>> {
    args.split(',').map(|a| a.trim().parse().ok()).collect()
}

/// Splits `owner,k` at the last top-level comma (owners may contain commas
/// inside brackets).
pub(crate) fn split_interior(args: &str) -> Option<(&str, usize)> {
    let comma = args.rfind(',')?;
    let k = args[comma + 1..].trim().parse().ok()?;
    Some((&args[..comma], k))
}

/// Renders one `r` line per vertex, in id order.
pub fn render_role_map<R: Display>(roles: &[R]) -> String {
    let mut out = String::new();
    for (i, r) in roles.iter().enumerate() {
        out.push_str(&format!("r {} {}\n", i + 1, r));
    }
    out
}

/// Parses a role map covering exactly the vertices `1..=order`.
pub fn parse_role_map<R: FromStr>(text: &str, order: usize) -> Result<Vec<R>, RoleMapError> {
    let mut roles: Vec<Option<R>> = (0..order).map(|_| None).collect();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |msg: &str| RoleMapError::Syntax {
            line: idx + 1,
            msg: msg.to_string(),
        };
        let mut parts = line.split_whitespace();
        if parts.next() != Some("r") {
            return Err(syntax("expected `r <vertex-id> <role-label>`"));
        }
        let id: VertexId = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| syntax("bad vertex id"))?;
        let label = parts.next().ok_or_else(|| syntax("missing role label"))?;
        if parts.next().is_some() {
            return Err(syntax("trailing tokens"));
        }
        if !(1..=order).contains(&id) {
            return Err(RoleMapError::OutOfRange(id));
        }
        let role = label
            .parse()
            .map_err(|_| syntax(&format!("unknown role label `{label}`")))?;
        if roles[id - 1].replace(role).is_some() {
            return Err(RoleMapError::Duplicate(id));
        }
    }
    roles
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or(RoleMapError::Missing(i + 1)))
        .collect()
}

/// What a structural check measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Deadline,
    TreeLevel,
    DeltaDistance,
    DeltaPathCount,
    AlphaBeta,
    AlphaGamma,
    GammaDelta,
    BetaSlot,
    ClauseRoute,
    IndexSets,
    PathLength,
    FeedbackForest,
    DisjointPaths,
}

/// A failed structural check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: CheckKind,
    pub subject: String,
    pub expected: usize,
    pub found: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}: expected {}, found ", self.kind, self.subject, self.expected)?;
        match self.found {
            Some(x) => write!(f, "{x}"),
            None => f.write_str("none"),
        }
    }
}

/// Result of auditing a gadget.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GadgetReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl GadgetReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn expect(
        &mut self,
        kind: CheckKind,
        subject: impl FnOnce() -> String,
        expected: usize,
        found: Option<usize>,
    ) {
        self.checks += 1;
        if found != Some(expected) {
            self.violations.push(Violation {
                kind,
                subject: subject(),
                expected,
                found,
            });
        }
    }

    pub fn has(&self, kind: CheckKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}
