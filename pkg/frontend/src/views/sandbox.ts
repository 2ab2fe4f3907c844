// What-if panel: re-run classification with edited attributes against the
// stateless sandbox endpoint. Nothing here is ever persisted or audited.

import { el } from "../dom.js";
import type { ClassifyResponse } from "../types.js";

export interface SandboxHandlers {
  onClassify(description: string, attributes: Record<string, unknown>): void;
}

export function parseAttributeLines(text: string): Record<string, unknown> {
  const attributes: Record<string, unknown> = {};
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line || !line.includes("=")) {
      continue;
    }
    const eq = line.indexOf("=");
    const key = line.slice(0, eq).trim().toLowerCase();
    const value = line.slice(eq + 1).trim();
    if (!key) {
      continue;
    }
    const numeric = Number(value);
    attributes[key] = value !== "" && !Number.isNaN(numeric) ? numeric : value;
  }
  return attributes;
}

export function renderSandbox(handlers: SandboxHandlers): HTMLElement {
  const description = el("input", {
    type: "text",
    placeholder: "item description",
    "data-testid": "sandbox-description",
  }) as HTMLInputElement;
  const attributes = el("textarea", {
    placeholder: "attributes, one per line: width_cm = 65",
    "data-testid": "sandbox-attributes",
  }) as HTMLTextAreaElement;
  const run = el("button", { type: "submit", "data-testid": "sandbox-run" }, [
    "Classify (sandbox)",
  ]);
  const form = el("form", { class: "sandbox-form" }, [description, attributes, run]);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onClassify(description.value, parseAttributeLines(attributes.value));
  });
  return el("section", { class: "sandbox", "data-testid": "sandbox" }, [
    el("h3", {}, ["What-if sandbox"]),
    el("p", { class: "hint" }, ["Runs the classifier only; never touches the case record."]),
    form,
    el("div", { class: "sandbox-result", "data-testid": "sandbox-result" }),
  ]);
}

export function renderSandboxResult(container: HTMLElement, response: ClassifyResponse): void {
  const target = container.querySelector<HTMLElement>('[data-testid="sandbox-result"]');
  if (!target) {
    return;
  }
  target.textContent = "";
  const { classification } = response;
  target.append(
    el("p", {}, [
      `Code: ${classification.code ?? "undetermined"} | confidence ${String(
        classification.confidence,
      )} | KB ${response.kb_version}`,
    ]),
  );
  const steps = el("ol", { class: "trace" });
  for (const step of classification.trace) {
    steps.append(el("li", {}, [`${step.rule}: ${step.justification}`]));
  }
  target.append(steps);
}
