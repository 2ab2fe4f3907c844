// Case detail: findings with traces and citations, adjudication forms,
// case-level actions. The view renders server payloads verbatim; every
// action round-trips through the API and the controller re-renders from
// the fresh server response.

import { el } from "../dom.js";
import type { CaseDetail, Decision, DecisionRequest, Finding, Revision } from "../types.js";

export interface DetailHandlers {
  onVerify(): void;
  onDecision(decision: DecisionRequest): void;
  onRequestCorrection(): void;
  onApprove(officerId: string): void;
  onReject(officerId: string): void;
  onClose(): void;
  onShowDiff(): void;
}

export function renderCaseDetail(
  detail: CaseDetail,
  handlers: DetailHandlers,
  officerId: string,
): HTMLElement {
  const root = el("section", { class: "case-detail", "data-testid": "case-detail" });
  root.append(
    el("header", { class: "case-header" }, [
      el("h2", {}, [`${detail.app_id}`]),
      el("span", { class: `state state-${detail.state}`, "data-testid": "case-state" }, [
        detail.state,
      ]),
      el("span", { class: "meta" }, [
        `${detail.applicant} | revision ${detail.revision} | submitted ${detail.submitted_at}`,
      ]),
    ]),
  );
  root.append(renderActions(detail, handlers, officerId));

  const current = detail.revisions[detail.revisions.length - 1];
  if (!current) {
    return root;
  }
  if (!current.report) {
    root.append(el("p", { class: "empty" }, ["No verification report for this revision yet."]));
    return root;
  }

  root.append(
    el("p", { class: "report-meta", "data-testid": "report-meta" }, [
      `Report for revision ${current.report.revision}, knowledge base ${current.report.kb_version}`,
    ]),
  );
  for (const finding of current.report.findings) {
    root.append(
      renderFindingPanel(finding, current, detail.decisions, detail, handlers, officerId),
    );
  }
  return root;
}

function renderActions(
  detail: CaseDetail,
  handlers: DetailHandlers,
  officerId: string,
): HTMLElement {
  const bar = el("div", { class: "actions", "data-testid": "case-actions" });
  const add = (label: string, testid: string, onClick: () => void, enabled = true) => {
    const button = el("button", { "data-testid": testid }, [label]) as HTMLButtonElement;
    button.disabled = !enabled;
    button.addEventListener("click", onClick);
    bar.append(button);
  };
  if (detail.state === "Submitted" || detail.state === "Resubmitted") {
    add("Run verification", "action-verify", () => handlers.onVerify());
  }
  if (detail.state === "FindingsIssued") {
    add("Request correction", "action-correction", () => handlers.onRequestCorrection());
    add("Approve", "action-approve", () => handlers.onApprove(officerId));
    add("Reject", "action-reject", () => handlers.onReject(officerId));
  }
  if (detail.state === "Approved" || detail.state === "Rejected") {
    add("Close case", "action-close", () => handlers.onClose());
  }
  add(
    "Revision diff",
    "action-diff",
    () => handlers.onShowDiff(),
    detail.revisions.length >= 2,
  );
  return bar;
}

function renderFindingPanel(
  finding: Finding,
  revision: Revision,
  decisions: Decision[],
  detail: CaseDetail,
  handlers: DetailHandlers,
  officerId: string,
): HTMLElement {
  const item = revision.application.items.find((i) => i.index === finding.item_index);
  const panel = el("article", {
    class: `finding finding-${finding.status}`,
    "data-testid": `finding-${finding.item_index}`,
  });
  panel.append(
    el("header", {}, [
      el("h3", {}, [`Item ${finding.item_index}: ${item ? item.description : ""}`]),
      el("span", { class: `status status-${finding.status}`, "data-testid": "finding-status" }, [
        finding.status,
      ]),
      el("span", { class: "confidence", "data-testid": "finding-confidence" }, [
        `confidence ${String(finding.confidence)}`,
      ]),
    ]),
  );
  panel.append(
    el("p", { class: "codes" }, [
      `Claimed: ${finding.claimed_code ?? "none"} | Suggested: ${
        finding.suggested && finding.suggested.code ? finding.suggested.code : "undetermined"
      }`,
    ]),
  );
  panel.append(
    el("pre", { class: "explanation", "data-testid": "finding-explanation" }, [
      finding.explanation,
    ]),
  );

  if (finding.citations.length > 0) {
    const list = el("ul", { class: "citations" });
    for (const citation of finding.citations) {
      list.append(
        el("li", { "data-testid": `citation-${citation.note_id}` }, [
          el("strong", {}, [citation.note_id]),
          ` ${citation.excerpt} `,
          el("a", { href: citation.citation_uri, class: "citation-link" }, [
            citation.citation_uri,
          ]),
        ]),
      );
    }
    panel.append(
      el("details", { class: "citation-panel", "data-testid": "citation-panel" }, [
        el("summary", {}, [`Citations (${finding.citations.length})`]),
        list,
      ]),
    );
  }

  if (finding.suggested && finding.suggested.trace.length > 0) {
    const steps = el("ol", { class: "trace" });
    for (const step of finding.suggested.trace) {
      steps.append(
        el("li", {}, [
          el("strong", {}, [step.rule]),
          ` ${step.justification}`,
          step.cited_notes.length > 0 ? ` [notes: ${step.cited_notes.join(", ")}]` : "",
        ]),
      );
    }
    panel.append(
      el("details", { class: "trace-panel", "data-testid": "trace-panel" }, [
        el("summary", {}, [`Rule trace (${finding.suggested.trace.length} steps)`]),
        steps,
      ]),
    );
  }

  const existing = decisions.filter(
    (d) => d.item_index === finding.item_index && d.revision === revision.revision,
  );
  for (const decision of existing) {
    panel.append(
      el("p", { class: "decision-record" }, [
        `Decision: ${decision.action} -> ${decision.final_code} by ${decision.officer_id}` +
          (decision.justification ? ` ("${decision.justification}")` : "") +
          (decision.supersedes ? " [supersedes]" : ""),
      ]),
    );
  }

  if (detail.state === "FindingsIssued") {
    panel.append(
      renderDecisionForm(finding, existing.length > 0, handlers, officerId),
    );
  }
  return panel;
}

export function renderDecisionForm(
  finding: Finding,
  hasDecision: boolean,
  handlers: Pick<DetailHandlers, "onDecision">,
  officerId: string,
): HTMLElement {
  const form = el("form", { class: "decision-form", "data-testid": `decision-form-${finding.item_index}` });
  const suggestedCode =
    finding.suggested && finding.suggested.code ? finding.suggested.code : "";

  const acceptRadio = el("input", {
    type: "radio",
    name: `action-${finding.item_index}`,
    value: "accept_ai",
    "data-testid": "action-accept",
  }) as HTMLInputElement;
  acceptRadio.checked = true;
  const overrideRadio = el("input", {
    type: "radio",
    name: `action-${finding.item_index}`,
    value: "override",
    "data-testid": "action-override",
  }) as HTMLInputElement;

  const codeInput = el("input", {
    type: "text",
    placeholder: "final HS code",
    value: suggestedCode,
    "data-testid": "final-code",
  }) as HTMLInputElement;
  codeInput.disabled = true;

  const justification = el("textarea", {
    placeholder: "justification (required for override)",
    "data-testid": "justification",
  }) as HTMLTextAreaElement;

  const rating = el("select", { "data-testid": "rating" }) as HTMLSelectElement;
  rating.append(el("option", { value: "" }, ["rate AI suggestion (optional)"]));
  for (const value of ["1", "2", "3", "4", "5"]) {
    rating.append(el("option", { value }, [`${value} / 5`]));
  }

  const submit = el("button", { type: "submit", "data-testid": "decision-submit" }, [
    hasDecision ? "Supersede decision" : "Record decision",
  ]) as HTMLButtonElement;

  const errorBox = el("p", { class: "error", "data-testid": "decision-error" });
  errorBox.hidden = true;

  const sync = () => {
    const overriding = overrideRadio.checked;
    codeInput.disabled = !overriding;
    // Override submissions are blocked until a justification is present.
    submit.disabled = overriding && justification.value.trim() === "";
  };
  acceptRadio.addEventListener("change", sync);
  overrideRadio.addEventListener("change", sync);
  justification.addEventListener("input", sync);
  sync();

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const overriding = overrideRadio.checked;
    const request: DecisionRequest = {
      item_index: finding.item_index,
      action: overriding ? "override" : "accept_ai",
      officer_id: officerId,
      justification: justification.value,
      supersedes: hasDecision,
    };
    if (overriding) {
      request.final_code = codeInput.value;
    }
    const parsedRating = rating.value ? Number(rating.value) : null;
    if (parsedRating !== null) {
      request.rating = parsedRating;
    }
    handlers.onDecision(request);
  });

  form.append(
    el("label", {}, [acceptRadio, " accept suggestion"]),
    el("label", {}, [overrideRadio, " override"]),
    codeInput,
    justification,
    rating,
    submit,
    errorBox,
  );
  return form;
}

export function showDecisionError(form: HTMLElement, message: string): void {
  const box = form.querySelector<HTMLElement>('[data-testid="decision-error"]');
  if (box) {
    box.textContent = message;
    box.hidden = false;
  }
}
