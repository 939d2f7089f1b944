// Shape of the viz.json export consumed by the viewer (read-only).

export interface SentenceLeaf {
  order: number;
  text: string;
  labels: string[];
  color: string;
}

export interface CommitNode {
  short_id: string;
  hash: string;
  has_rationale: boolean;
  sentences: SentenceLeaf[];
}

export interface AuthorNode {
  name: string;
  has_rationale: boolean;
  commits: CommitNode[];
}

export interface VizTree {
  authors: AuthorNode[];
}

export type LabelName = "Decision" | "Rationale" | "SupportingFact";

export const LABEL_NAMES: readonly LabelName[] = ["Decision", "Rationale", "SupportingFact"];

// Leaf fill palette, mirrored from the exporter; hex strings are compared
// byte-for-byte against the JSON, never re-derived.
export const PALETTE = {
  decisionOnly: "#ADD8E6",
  supportingOnly: "#FFFACD",
  rationaleOnly: "#F4C2C2",
  supportingRationale: "#FFAE42",
  rationaleDecision: "#C8A2C8",
  fallback: "#CCCCCC",
} as const;

// Author/commit marker colors (viewer-side convention, not part of the export).
export const HAS_RATIONALE_COLOR = "#7FBF7F";
export const NO_RATIONALE_COLOR = "#D3D3D3";
