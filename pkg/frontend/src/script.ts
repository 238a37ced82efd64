// Parsed-script pane helpers: split the gateway's script echo into lines
// with the failing one flagged, and summarize exchange status.

import type { PendingExchange } from "./state.js";

export interface ScriptLine {
  lineNo: number;
  text: string;
  isError: boolean;
}

export function scriptLines(script: string, errorLine: number | null): ScriptLine[] {
  if (!script) return [];
  return script.split("\n").map((text, i) => ({
    lineNo: i + 1,
    text,
    isError: errorLine !== null && i + 1 === errorLine,
  }));
}

const LABELS: Record<string, string> = {
  executing: "executing",
  completed: "completed",
  fault: "fault",
  timeout: "timeout",
  parse_failed: "parse failed",
  bind_failed: "bind failed",
  backend_error: "backend error",
  rejected: "rejected",
};

export function statusLabel(pending: PendingExchange): string {
  const base = LABELS[pending.status] ?? pending.status;
  if (pending.error) {
    return `${base}: ${pending.error}`;
  }
  return base;
}

/** The pane prefers the bound multi-robot plan; a parse failure falls
 * back to the raw extracted script so the bad line can be shown. */
export function displayScript(pending: PendingExchange): string {
  return pending.plan || pending.script;
}
