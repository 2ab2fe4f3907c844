// App bootstrap: hash routing, server-truth refresh after every mutation.

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { renderCaseDetail, showDecisionError } from "./views/detail.js";
import { renderRevisionDiff } from "./views/diff.js";
import { renderQueue } from "./views/queue.js";
import { renderSandbox, renderSandboxResult } from "./views/sandbox.js";
import type { DecisionRequest } from "./types.js";

const DEFAULT_BASE = "http://127.0.0.1:8800";

interface AppState {
  baseUrl: string;
  officerId: string;
  filter: string;
  showDiff: boolean;
}

function loadState(): AppState {
  return {
    baseUrl: localStorage.getItem("tariffcheck.baseUrl") ?? DEFAULT_BASE,
    officerId: localStorage.getItem("tariffcheck.officerId") ?? "officer-1",
    filter: "",
    showDiff: false,
  };
}

export function startApp(root: HTMLElement): void {
  const state = loadState();
  let client = new ApiClient(state.baseUrl);

  const banner = el("div", { class: "banner", "data-testid": "banner" });
  banner.hidden = true;
  const content = el("main", { class: "content" });

  const baseInput = el("input", { type: "text", value: state.baseUrl, class: "base-url" }) as HTMLInputElement;
  const officerInput = el("input", { type: "text", value: state.officerId, class: "officer-id" }) as HTMLInputElement;
  baseInput.addEventListener("change", () => {
    state.baseUrl = baseInput.value;
    localStorage.setItem("tariffcheck.baseUrl", state.baseUrl);
    client = new ApiClient(state.baseUrl);
    void route();
  });
  officerInput.addEventListener("change", () => {
    state.officerId = officerInput.value;
    localStorage.setItem("tariffcheck.officerId", state.officerId);
  });

  root.append(
    el("header", { class: "app-header" }, [
      el("h1", {}, [el("a", { href: "#/queue" }, ["tariffcheck console"])]),
      el("label", {}, ["Service ", baseInput]),
      el("label", {}, ["Officer ", officerInput]),
    ]),
    banner,
    content,
  );

  function showError(error: unknown): void {
    banner.textContent =
      error instanceof ApiError
        ? `Service error (${error.status}): ${error.message}`
        : `Service unreachable: ${String(error)}`;
    banner.hidden = false;
    const retry = el("button", {}, ["retry"]);
    retry.addEventListener("click", () => void route());
    banner.append(" ", retry);
  }

  async function showQueue(): Promise<void> {
    const list = await client.listCases(state.filter || undefined);
    clear(content);
    content.append(
      renderQueue(list.cases, state.filter, {
        onOpen: (appId) => {
          window.location.hash = `#/case/${appId}`;
        },
        onFilter: (value) => {
          state.filter = value;
          void showQueue();
        },
      }),
    );
  }

  async function showCase(appId: string): Promise<void> {
    const detail = await client.getCase(appId);
    clear(content);
    const handlers = {
      onVerify: () => run(() => client.verify(appId)),
      onDecision: (decision: DecisionRequest) =>
        runDecision(appId, decision),
      onRequestCorrection: () => run(() => client.requestCorrection(appId)),
      onApprove: (officerId: string) => run(() => client.approve(appId, officerId)),
      onReject: (officerId: string) => run(() => client.reject(appId, officerId)),
      onClose: () => run(() => client.closeCase(appId)),
      onShowDiff: () => {
        state.showDiff = !state.showDiff;
        void showCase(appId);
      },
    };
    content.append(renderCaseDetail(detail, handlers, state.officerId));
    if (state.showDiff) {
      content.append(renderRevisionDiff(detail));
    }
    const sandbox = renderSandbox({
      onClassify: (description, attributes) => {
        client
          .classify({ description, attributes })
          .then((response) => renderSandboxResult(sandbox, response))
          .catch(showError);
      },
    });
    content.append(sandbox);

    function run(action: () => Promise<unknown>): void {
      banner.hidden = true;
      action()
        .then(() => showCase(appId))
        .catch(showError);
    }

    function runDecision(id: string, decision: DecisionRequest): void {
      banner.hidden = true;
      client
        .decide(id, decision)
        .then(() => showCase(id))
        .catch((error) => {
          // Validation problems belong next to the form, not in the banner.
          const form = content.querySelector<HTMLElement>(
            `[data-testid="decision-form-${decision.item_index}"]`,
          );
          if (form && error instanceof ApiError && (error.status === 422 || error.status === 409)) {
            showDecisionError(form, error.message);
          } else {
            showError(error);
          }
        });
    }
  }

  async function route(): Promise<void> {
    banner.hidden = true;
    const hash = window.location.hash || "#/queue";
    try {
      const caseMatch = /^#\/case\/(.+)$/.exec(hash);
      if (caseMatch && caseMatch[1]) {
        await showCase(decodeURIComponent(caseMatch[1]));
      } else {
        state.showDiff = false;
        await showQueue();
      }
    } catch (error) {
      showError(error);
    }
  }

  window.addEventListener("hashchange", () => void route());
  void route();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  startApp(document.getElementById("app")!);
}
