/** Pure view builders: wizard panels and playground as HTML strings. */

import type { DropdownOption, Step, Wizard } from "./wizard.js";
import { isDropdownEntity } from "./wizard.js";
import type {
  Diagnostic,
  LibraryComponent,
  ProposalView,
  SettingSpec,
  VariableBinding,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const STEP_TITLES: Record<Step, string> = {
  1: "Configure the action to govern",
  2: "Choose and configure the decision procedure",
  3: "Customize the procedure",
  4: "Choose what happens on pass or fail",
};

const STEP_KINDS: Record<Step, LibraryComponent["kind"]> = {
  1: "BaseAction",
  2: "BaseProcedure",
  3: "Decorator",
  4: "Execution",
};

/** Left panel: selectable options with descriptions and a source toggle. */
export function renderOptionsPanel(wizard: Wizard): string {
  const kind = STEP_KINDS[wizard.step];
  const items = wizard.componentsOf(kind).map((c) => {
    const source = wizard.showSource
      ? `<pre class="source">${escapeHtml(c.source_view)}</pre>`
      : "";
    return `<li class="option" data-kind="${c.kind}" data-name="${escapeHtml(c.name)}">
      <button data-choose="${escapeHtml(c.name)}">${escapeHtml(c.label)}</button>
      <p class="description">${escapeHtml(c.description)}</p>${source}
    </li>`;
  });
  return `<section class="options">
    <h2>${STEP_TITLES[wizard.step]}</h2>
    <label><input type="checkbox" data-toggle-source ${wizard.showSource ? "checked" : ""}>
      view source code</label>
    <ul>${items.join("\n")}</ul>
  </section>`;
}

export function renderDropdown(
  path: string,
  spec: SettingSpec,
  options: DropdownOption[],
  current: unknown,
): string {
  const rows = options.map((o) => {
    const selected = current === o.value ? " selected" : "";
    return `<option value="${escapeHtml(o.value)}" data-source="${o.source}"${selected}>` +
      `${escapeHtml(o.label)}</option>`;
  });
  return `<select data-setting="${escapeHtml(path)}">
    <option value="">(choose ${escapeHtml(spec.label)})</option>
    ${rows.join("\n")}
  </select>`;
}

export function renderVariablesMenu(path: string, bindings: VariableBinding[]): string {
  const rows = bindings.map((b) =>
    `<li><button data-insert="${escapeHtml(b.token)}" data-target="${escapeHtml(path)}">` +
    `${escapeHtml(b.label)}</button></li>`);
  return `<details class="insert-variables"><summary>Insert Variables</summary>
    <ul>${rows.join("\n")}</ul></details>`;
}

/** One setting input: drop-down for entity values, input box otherwise. */
export function renderSettingInput(
  path: string,
  spec: SettingSpec,
  current: unknown,
  dropdown: DropdownOption[] | null,
  variablesMenu: VariableBinding[] | null,
  localError: string | null,
): string {
  let control: string;
  if (dropdown !== null && isDropdownEntity(spec.entity)) {
    control = renderDropdown(path, spec, dropdown, current);
  } else if (spec.entity === "Boolean") {
    control = `<input type="checkbox" data-setting="${escapeHtml(path)}"` +
      `${current === true ? " checked" : ""}>`;
  } else {
    const type = spec.entity === "Number" || spec.entity === "Timestamp"
      ? "number" : "text";
    const value = current === undefined || current === null ? "" : String(current);
    control = `<input type="${type}" data-setting="${escapeHtml(path)}" ` +
      `value="${escapeHtml(value)}">`;
  }
  const menu = variablesMenu !== null && spec.entity === "Text"
    ? renderVariablesMenu(path, variablesMenu)
    : "";
  const error = localError
    ? `<p class="inline-diagnostic">${escapeHtml(localError)}</p>`
    : "";
  return `<div class="setting" data-path="${escapeHtml(path)}">
    <label>${escapeHtml(spec.label)}${spec.required ? " *" : ""}</label>
    ${control}${menu}${error}
  </div>`;
}

export function renderDiagnostics(diagnostics: Diagnostic[]): string {
  if (!diagnostics.length) return "";
  const rows = diagnostics.map((d) =>
    `<li data-path="${escapeHtml(d.path)}"><code>${escapeHtml(d.path)}</code> ` +
    `${escapeHtml(d.message)}</li>`);
  return `<ul class="diagnostics">${rows.join("\n")}</ul>`;
}

export function renderStepNav(wizard: Wizard): string {
  const blocked = !wizard.canAdvance();
  return `<nav class="wizard-nav">
    <button data-nav="back" ${wizard.step === 1 ? "disabled" : ""}>Back</button>
    <span class="step-indicator">step ${wizard.step} of 4</span>
    <button data-nav="next" ${blocked || wizard.step === 4 ? "disabled" : ""}>Next</button>
    <button data-nav="submit" ${wizard.step !== 4 || blocked ? "disabled" : ""}>
      Create policy</button>
  </nav>`;
}

export function renderTrace(lines: string[]): string {
  const rows = lines.map((line) => {
    let kind = "";
    try {
      kind = String((JSON.parse(line) as { kind?: string }).kind ?? "");
    } catch {
      /* keep raw */
    }
    return `<li data-kind="${escapeHtml(kind)}"><code>${escapeHtml(line)}</code></li>`;
  });
  return `<ol class="trace">${rows.join("\n")}</ol>`;
}

export function renderProposalCard(proposal: ProposalView): string {
  const outstanding = proposal.eligible.filter((u) => !proposal.voted.includes(u));
  return `<article class="proposal" data-id="${escapeHtml(proposal.proposal_id)}"
    data-status="${proposal.status}">
    <h3>${escapeHtml(proposal.proposal_id)} - ${escapeHtml(proposal.policy_id)}
      (${proposal.status})</h3>
    <p>eligible: ${escapeHtml(proposal.eligible.join(", "))}</p>
    <p>waiting on: ${escapeHtml(outstanding.join(", ") || "nobody")}</p>
  </article>`;
}
