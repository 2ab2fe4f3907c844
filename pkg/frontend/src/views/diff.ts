// Side-by-side comparison of claimed codes and finding statuses across two
// application revisions; changed items highlighted, resolved ones marked.

import { el } from "../dom.js";
import type { CaseDetail, FindingStatus, Revision } from "../types.js";

const OPEN_STATUSES: FindingStatus[] = ["Discrepancy", "Ineligible", "NeedsReview"];

export interface DiffRow {
  index: number;
  description: string;
  beforeClaimed: string | null;
  afterClaimed: string | null;
  beforeStatus: FindingStatus | null;
  afterStatus: FindingStatus | null;
  changed: boolean;
  resolved: boolean;
}

function findingStatus(revision: Revision, index: number): FindingStatus | null {
  const finding = revision.report?.findings.find((f) => f.item_index === index) ?? null;
  return finding ? finding.status : null;
}

export function computeRevisionDiff(
  before: Revision,
  after: Revision,
): DiffRow[] {
  const indices = new Set<number>();
  for (const item of before.application.items) {
    indices.add(item.index);
  }
  for (const item of after.application.items) {
    indices.add(item.index);
  }
  const rows: DiffRow[] = [];
  for (const index of [...indices].sort((a, b) => a - b)) {
    const beforeItem = before.application.items.find((i) => i.index === index) ?? null;
    const afterItem = after.application.items.find((i) => i.index === index) ?? null;
    const beforeStatus = findingStatus(before, index);
    const afterStatus = findingStatus(after, index);
    const beforeClaimed = beforeItem ? beforeItem.claimed_code : null;
    const afterClaimed = afterItem ? afterItem.claimed_code : null;
    rows.push({
      index,
      description: (afterItem ?? beforeItem)?.description ?? "",
      beforeClaimed,
      afterClaimed,
      beforeStatus,
      afterStatus,
      changed: beforeClaimed !== afterClaimed,
      resolved:
        beforeStatus !== null &&
        OPEN_STATUSES.includes(beforeStatus) &&
        afterStatus === "Verified",
    });
  }
  return rows;
}

export function renderRevisionDiff(detail: CaseDetail): HTMLElement {
  const root = el("section", { class: "revision-diff", "data-testid": "revision-diff" });
  if (detail.revisions.length < 2) {
    root.append(
      el("p", { class: "empty", "data-testid": "diff-disabled" }, [
        "Revision diff requires at least two revisions.",
      ]),
    );
    return root;
  }
  const before = detail.revisions[detail.revisions.length - 2]!;
  const after = detail.revisions[detail.revisions.length - 1]!;
  root.append(
    el("h3", {}, [`Revision ${before.revision} vs revision ${after.revision}`]),
  );
  const table = el("table", { class: "diff-table" });
  table.append(
    el("thead", {}, [
      el("tr", {}, [
        el("th", {}, ["Item"]),
        el("th", {}, [`Claimed (rev ${before.revision})`]),
        el("th", {}, [`Claimed (rev ${after.revision})`]),
        el("th", {}, [`Finding (rev ${before.revision})`]),
        el("th", {}, [`Finding (rev ${after.revision})`]),
        el("th", {}, ["Outcome"]),
      ]),
    ]),
  );
  const body = el("tbody");
  for (const row of computeRevisionDiff(before, after)) {
    const classes = ["diff-row"];
    if (row.changed) {
      classes.push("changed");
    }
    if (row.resolved) {
      classes.push("resolved");
    }
    body.append(
      el("tr", { class: classes.join(" "), "data-testid": `diff-row-${row.index}` }, [
        el("td", {}, [`${row.index}: ${row.description}`]),
        el("td", {}, [row.beforeClaimed ?? "none"]),
        el("td", {}, [row.afterClaimed ?? "none"]),
        el("td", {}, [row.beforeStatus ?? "-"]),
        el("td", {}, [row.afterStatus ?? "-"]),
        el("td", { class: "outcome" }, [
          row.resolved ? "resolved" : row.changed ? "changed" : "unchanged",
        ]),
      ]),
    );
  }
  table.append(body);
  root.append(table);
  return root;
}
