// Case queue: list, filter by state, open a case.

import { el } from "../dom.js";
import type { CaseRow, CaseState } from "../types.js";

export const CASE_STATES: CaseState[] = [
  "Submitted",
  "UnderVerification",
  "FindingsIssued",
  "CorrectionRequested",
  "Resubmitted",
  "Approved",
  "Rejected",
  "Closed",
];

export interface QueueHandlers {
  onOpen(appId: string): void;
  onFilter(state: string): void;
}

function summaryText(row: CaseRow): string {
  if (!row.summary) {
    return "not verified yet";
  }
  return Object.entries(row.summary)
    .filter(([, count]) => count > 0)
    .map(([status, count]) => `${status}: ${count}`)
    .join(", ");
}

export function renderQueue(
  rows: CaseRow[],
  activeFilter: string,
  handlers: QueueHandlers,
): HTMLElement {
  const filter = el("select", { class: "state-filter", "data-testid": "state-filter" });
  filter.append(el("option", { value: "" }, ["all states"]));
  for (const state of CASE_STATES) {
    const option = el("option", { value: state }, [state]);
    if (state === activeFilter) {
      option.selected = true;
    }
    filter.append(option);
  }
  filter.addEventListener("change", () => handlers.onFilter(filter.value));

  const table = el("table", { class: "queue", "data-testid": "queue-table" });
  table.append(
    el("thead", {}, [
      el("tr", {}, [
        el("th", {}, ["Application"]),
        el("th", {}, ["Applicant"]),
        el("th", {}, ["State"]),
        el("th", {}, ["Rev"]),
        el("th", {}, ["Findings"]),
        el("th", {}, ["Submitted"]),
      ]),
    ]),
  );
  const body = el("tbody");
  for (const row of rows) {
    const tr = el("tr", { class: "queue-row", "data-app-id": row.app_id }, [
      el("td", {}, [el("a", { href: `#/case/${row.app_id}`, class: "case-link" }, [row.app_id])]),
      el("td", {}, [row.applicant]),
      el("td", { class: `state state-${row.state}` }, [row.state]),
      el("td", {}, [String(row.revision)]),
      el("td", {}, [summaryText(row)]),
      el("td", {}, [row.submitted_at]),
    ]);
    tr.addEventListener("click", (event) => {
      if (!(event.target instanceof HTMLAnchorElement)) {
        handlers.onOpen(row.app_id);
      }
    });
    body.append(tr);
  }
  table.append(body);

  if (rows.length === 0) {
    body.append(
      el("tr", {}, [el("td", { colspan: "6", class: "empty" }, ["no cases match the filter"])]),
    );
  }

  return el("section", { class: "queue-screen" }, [
    el("div", { class: "toolbar" }, [el("label", {}, ["State: ", filter])]),
    table,
  ]);
}
