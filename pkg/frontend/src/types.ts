// API payload shapes, mirroring the service JSON verbatim.
// The console never recomputes any of these values; it only displays them.

export type CaseState =
  | "Submitted"
  | "UnderVerification"
  | "FindingsIssued"
  | "CorrectionRequested"
  | "Resubmitted"
  | "Approved"
  | "Rejected"
  | "Closed";

export type FindingStatus = "Verified" | "Discrepancy" | "Ineligible" | "NeedsReview";

export interface CaseRow {
  app_id: string;
  applicant: string;
  state: CaseState;
  revision: number;
  submitted_at: string;
  items: number;
  summary: Record<string, number> | null;
}

export interface CaseList {
  cases: CaseRow[];
}

export interface LineItem {
  index: number;
  description: string;
  attributes: Record<string, unknown>;
  claimed_code: string | null;
  quantity: number;
  declared_value: number;
  currency: string;
}

export interface Application {
  app_id: string;
  revision: number;
  applicant: string;
  submitted_at: string;
  items: LineItem[];
}

export interface TraceStep {
  rule: string;
  justification: string;
  cited_notes: string[];
  candidates_before: string[];
  candidates_after: string[];
  needs_review: boolean;
}

export interface Classification {
  code: string | null;
  confidence: number;
  evidence_incomplete: boolean;
  decided_by: string | null;
  missing_attrs: string[];
  trace: TraceStep[];
}

export interface Citation {
  note_id: string;
  excerpt: string;
  citation_uri: string;
}

export interface Finding {
  item_index: number;
  status: FindingStatus;
  claimed_code: string | null;
  suggested: Classification | null;
  explanation: string;
  citations: Citation[];
  confidence: number;
  exemption: string | null;
  tags: string[];
  extraction_confidence: Record<string, number> | null;
}

export interface Report {
  app_id: string;
  revision: number;
  kb_version: string;
  summary: Record<string, number>;
  findings: Finding[];
}

export interface Revision {
  revision: number;
  application: Application;
  report: Report | null;
}

export interface Decision {
  item_index: number;
  action: string;
  final_code: string;
  justification: string;
  officer_id: string;
  decided_at: string;
  revision: number;
  supersedes: boolean;
  rating: number | null;
}

export interface CaseDetail extends CaseRow {
  revisions: Revision[];
  decisions: Decision[];
  audit_entries: number;
}

export interface DecisionRequest {
  item_index: number;
  action: "accept_ai" | "override";
  officer_id: string;
  final_code?: string;
  justification?: string;
  supersedes?: boolean;
  rating?: number | null;
}

export interface ClassifyRequest {
  description: string;
  attributes: Record<string, unknown>;
}

export interface ClassifyResponse {
  kb_version: string;
  classification: Classification;
}

export interface CorrectionResponse {
  app_id: string;
  state: CaseState;
  guidance: Record<string, string>;
  letter: string;
}
