/** Browser bootstrap: mounts the wizard and playground onto the page. */

import { ApiClient } from "./api.js";
import { Playground } from "./playground.js";
import {
  renderDiagnostics,
  renderOptionsPanel,
  renderProposalCard,
  renderSettingInput,
  renderStepNav,
  renderTrace,
} from "./render.js";
import { isDropdownEntity, parseInputValue, Wizard } from "./wizard.js";
import type { DropdownOption, Step } from "./wizard.js";
import type { SettingSpec, SettingsMap, VariableBinding } from "./types.js";

const api = new ApiClient(
  (window as unknown as { AGORA_BASE_URL?: string }).AGORA_BASE_URL ?? "",
);
const wizard = new Wizard(api, `policy-${Date.now()}`);
const playground = new Playground(api);

interface SettingSite {
  path: string;
  spec: SettingSpec;
  settings: SettingsMap;
  position: "procedure_settings" | "after_procedure";
}

function settingSites(): SettingSite[] {
  const sites: SettingSite[] = [];
  const doc = wizard.doc;
  if (wizard.step === 1) {
    doc.action.filters.forEach((inst, i) => {
      const desc = wizard.component("Filter", inst.filter);
      desc?.settings.forEach((spec) => sites.push({
        path: `action.filters[${i}].settings.${spec.name}`,
        spec, settings: inst.settings, position: "procedure_settings",
      }));
    });
  } else if (wizard.step === 2) {
    const desc = wizard.component("BaseProcedure", doc.procedure.base_procedure);
    desc?.settings.forEach((spec) => sites.push({
      path: `procedure.settings.${spec.name}`,
      spec, settings: doc.procedure.settings, position: "procedure_settings",
    }));
  } else if (wizard.step === 3) {
    doc.procedure.decorators.forEach((inst, i) => {
      const desc = wizard.component("Decorator", inst.name);
      desc?.settings.forEach((spec) => sites.push({
        path: `procedure.decorators[${i}].settings.${spec.name}`,
        spec, settings: inst.settings, position: "after_procedure",
      }));
    });
  } else {
    (["on_pass", "on_fail"] as const).forEach((branch) => {
      doc.procedure[branch].forEach((inst, i) => {
        const desc = wizard.component("Execution", inst.execution);
        desc?.settings.forEach((spec) => sites.push({
          path: `procedure.${branch}[${i}].settings.${spec.name}`,
          spec, settings: inst.settings, position: "after_procedure",
        }));
      });
    });
  }
  return sites;
}

async function renderAll(): Promise<void> {
  const left = document.getElementById("panel-left")!;
  const right = document.getElementById("panel-right")!;
  const nav = document.getElementById("wizard-nav")!;
  left.innerHTML = renderOptionsPanel(wizard);

  const blocks: string[] = [];
  for (const site of settingSites()) {
    let dropdown: DropdownOption[] | null = null;
    let menu: VariableBinding[] | null = null;
    if (isDropdownEntity(site.spec.entity)) {
      dropdown = await wizard.dropdownOptions(site.spec, site.position);
    }
    if (site.spec.entity === "Text") {
      menu = await wizard.insertableVariables(site.position);
    }
    blocks.push(renderSettingInput(
      site.path, site.spec, site.settings[site.spec.name], dropdown, menu,
      wizard.localErrors.get(site.path) ?? null));
  }
  right.innerHTML = blocks.join("\n") +
    renderDiagnostics(wizard.stepDiagnostics(wizard.step));
  nav.innerHTML = renderStepNav(wizard);

  document.getElementById("playground-proposals")!.innerHTML =
    playground.proposals.map(renderProposalCard).join("\n");
  document.getElementById("playground-trace")!.innerHTML =
    renderTrace(playground.traceLines);
}

async function applySettingInput(path: string, raw: string): Promise<void> {
  const site = settingSites().find((s) => s.path === path);
  if (!site) return;
  const parsed = parseInputValue(site.spec, raw);
  if (!parsed.ok) {
    wizard.setLocalError(path, parsed.error);
    await renderAll();
    return;
  }
  wizard.setLocalError(path, null);
  site.settings[site.spec.name] = parsed.value;
  await wizard.refresh();
  await renderAll();
}

function wireEvents(): void {
  document.body.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    const path = target.getAttribute("data-setting");
    if (path !== null) {
      const raw = target instanceof HTMLInputElement && target.type === "checkbox"
        ? String(target.checked)
        : (target as HTMLInputElement | HTMLSelectElement).value;
      void applySettingInput(path, raw);
    }
    if (target.hasAttribute("data-toggle-source")) {
      wizard.showSource = (target as HTMLInputElement).checked;
      void renderAll();
    }
  });

  document.body.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("button");
    if (!target) return;
    const choose = target.getAttribute("data-choose");
    if (choose !== null) {
      void (async () => {
        if (wizard.step === 1) await wizard.chooseBaseAction(choose);
        else if (wizard.step === 2) await wizard.chooseProcedure(choose);
        else if (wizard.step === 3) await wizard.addDecorator(choose);
        else await wizard.addExecution("on_pass", choose);
        await renderAll();
      })();
    }
    const nav = target.getAttribute("data-nav");
    if (nav === "next") { wizard.next(); void renderAll(); }
    if (nav === "back") { wizard.back(); void renderAll(); }
    if (nav === "submit") {
      void wizard.submit().then(async (result) => {
        const out = document.getElementById("compiled-source")!;
        out.textContent = result.ok
          ? result.source ?? ""
          : result.diagnostics.map((d) => `${d.path}: ${d.message}`).join("\n");
        await renderAll();
      });
    }
    const insert = target.getAttribute("data-insert");
    const into = target.getAttribute("data-target");
    if (insert !== null && into !== null) {
      const box = document.querySelector<HTMLInputElement>(
        `[data-setting="${CSS.escape(into)}"]`);
      if (box) {
        box.value += insert;
        void applySettingInput(into, box.value);
      }
    }
  });
}

void (async () => {
  await wizard.init();
  wireEvents();
  await renderAll();
})();
