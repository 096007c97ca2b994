/** Four-step authoring wizard over the policy service.
 *
 * Steps: (1) custom action (base action + filters), (2) base procedure and its
 * settings, (3) decorators, (4) executions. The wizard never judges a draft
 * itself: every diagnostic comes from the server's validate endpoint, mapped
 * onto the step that owns its path, and forward navigation is blocked while
 * the current step has diagnostics or unparsed inputs.
 */

import type { PolicyApi } from "./api.js";
import type {
  CommunitySnapshot,
  Diagnostic,
  DraftShape,
  EntityTag,
  Library,
  LibraryComponent,
  PolicyDocument,
  SettingSpec,
  ValidationReport,
  VariableBinding,
} from "./types.js";

export type Step = 1 | 2 | 3 | 4;

export interface DropdownOption {
  value: string; // what the document stores: an id or a ${scope.name} token
  label: string;
  source: "variable" | "community";
}

export interface SubmitResult {
  ok: boolean;
  diagnostics: Diagnostic[];
  source?: string;
  sections?: Record<string, string>;
}

/** Parse one raw input-box string by the setting's entity. */
export function parseInputValue(
  spec: SettingSpec,
  raw: string,
): { ok: true; value: unknown } | { ok: false; error: string } {
  if (spec.entity === "Number" || spec.entity === "Timestamp") {
    const trimmed = raw.trim();
    const value = Number(trimmed);
    if (trimmed === "" || !Number.isFinite(value)) {
      return { ok: false, error: `${spec.label} must be a number` };
    }
    return { ok: true, value: spec.entity === "Timestamp" ? Math.trunc(value) : value };
  }
  if (spec.entity === "Boolean") {
    if (raw === "true" || raw === "false") {
      return { ok: true, value: raw === "true" };
    }
    return { ok: false, error: `${spec.label} must be true or false` };
  }
  return { ok: true, value: raw };
}

/** Entities whose inputs render as drop-downs of community values + variables. */
export function isDropdownEntity(entity: EntityTag): boolean {
  return entity === "CommunityUser" || entity === "CommunityRole" ||
    entity === "Channel" || entity === "Document" || entity === "UserList";
}

const STEP_OWNERS: Array<{ step: Step; prefixes: string[] }> = [
  { step: 1, prefixes: ["action", "registry_version"] },
  { step: 2, prefixes: ["procedure.base_procedure", "procedure.settings"] },
  { step: 3, prefixes: ["procedure.decorators"] },
  { step: 4, prefixes: ["procedure.on_pass", "procedure.on_fail"] },
];

export function stepOfPath(path: string): Step {
  for (const owner of STEP_OWNERS) {
    if (owner.prefixes.some((p) => path === p || path.startsWith(p + ".") ||
      path.startsWith(p + "["))) {
      return owner.step;
    }
  }
  return 1;
}

export class Wizard {
  step: Step = 1;
  doc: PolicyDocument;
  report: ValidationReport = { ok: true, diagnostics: [] };
  localErrors: Map<string, string> = new Map();
  library: Library = { version: 0, components: [] };
  community: CommunitySnapshot = { users: [], roles: [], channels: [], documents: [] };
  showSource = false;

  constructor(private api: PolicyApi, id = "draft") {
    this.doc = {
      id,
      name: "",
      description: "",
      action: { base_action: "", filters: [] },
      procedure: {
        base_procedure: "",
        settings: {},
        decorators: [],
        on_pass: [],
        on_fail: [],
      },
      registry_version: 0,
      enabled: true,
    };
  }

  async init(): Promise<void> {
    this.library = await this.api.library();
    this.community = await this.api.community();
    this.doc.registry_version = this.library.version;
    await this.refresh();
  }

  componentsOf(kind: LibraryComponent["kind"]): LibraryComponent[] {
    return this.library.components.filter((c) => c.kind === kind);
  }

  component(kind: LibraryComponent["kind"], name: string): LibraryComponent | undefined {
    return this.library.components.find((c) => c.kind === kind && c.name === name);
  }

  /** Filters applicable to one field of the chosen base action, by entity. */
  filtersForField(field: string): LibraryComponent[] {
    const base = this.component("BaseAction", this.doc.action.base_action);
    const entity = base?.variables.find((v) => v.name === field)?.entity;
    if (!entity) return [];
    return this.componentsOf("Filter").filter((f) => f.applies_to === entity);
  }

  async refresh(): Promise<void> {
    this.report = await this.api.validate(this.doc);
  }

  // --- mutations -------------------------------------------------------------

  async setMeta(name: string, description: string): Promise<void> {
    this.doc.name = name;
    this.doc.description = description;
    await this.refresh();
  }

  async chooseBaseAction(name: string): Promise<void> {
    this.doc.action.base_action = name;
    this.doc.action.filters = [];
    await this.refresh();
  }

  async addFilter(field: string, filter: string): Promise<void> {
    this.doc.action.filters.push({ field, filter, settings: {} });
    await this.refresh();
  }

  async removeFilter(index: number): Promise<void> {
    this.doc.action.filters.splice(index, 1);
    await this.refresh();
  }

  async setFilterSetting(index: number, name: string, value: unknown): Promise<void> {
    this.doc.action.filters[index].settings[name] = value;
    await this.refresh();
  }

  async chooseProcedure(name: string): Promise<void> {
    this.doc.procedure.base_procedure = name;
    this.doc.procedure.settings = {};
    await this.refresh();
  }

  async setProcedureSetting(name: string, value: unknown): Promise<void> {
    this.doc.procedure.settings[name] = value;
    await this.refresh();
  }

  async addDecorator(name: string): Promise<void> {
    this.doc.procedure.decorators.push({ name, settings: {} });
    await this.refresh();
  }

  async removeDecorator(index: number): Promise<void> {
    this.doc.procedure.decorators.splice(index, 1);
    await this.refresh();
  }

  async setDecoratorSetting(index: number, name: string, value: unknown): Promise<void> {
    this.doc.procedure.decorators[index].settings[name] = value;
    await this.refresh();
  }

  async addExecution(branch: "on_pass" | "on_fail", execution: string): Promise<void> {
    this.doc.procedure[branch].push({ execution, settings: {} });
    await this.refresh();
  }

  async removeExecution(branch: "on_pass" | "on_fail", index: number): Promise<void> {
    this.doc.procedure[branch].splice(index, 1);
    await this.refresh();
  }

  async setExecutionSetting(
    branch: "on_pass" | "on_fail",
    index: number,
    name: string,
    value: unknown,
  ): Promise<void> {
    this.doc.procedure[branch][index].settings[name] = value;
    await this.refresh();
  }

  /** Record or clear a raw-input parse error (e.g. letters in a number box). */
  setLocalError(path: string, error: string | null): void {
    if (error === null) {
      this.localErrors.delete(path);
    } else {
      this.localErrors.set(path, error);
    }
  }

  // --- gating ------------------------------------------------------------------

  stepDiagnostics(step: Step): Diagnostic[] {
    return this.report.diagnostics.filter((d) => stepOfPath(d.path) === step);
  }

  stepLocalErrors(step: Step): string[] {
    const out: string[] = [];
    for (const [path, error] of this.localErrors) {
      if (stepOfPath(path) === step) out.push(error);
    }
    return out;
  }

  canAdvance(): boolean {
    return this.stepDiagnostics(this.step).length === 0 &&
      this.stepLocalErrors(this.step).length === 0;
  }

  next(): boolean {
    if (this.step >= 4 || !this.canAdvance()) return false;
    this.step = (this.step + 1) as Step;
    return true;
  }

  back(): void {
    if (this.step > 1) this.step = (this.step - 1) as Step;
  }

  // --- reference data for inputs ---------------------------------------------------

  /** The draft as seen from an authoring position: while configuring the
   * procedure's own settings, only the action scope exists yet. */
  draftAt(position: "procedure_settings" | "after_procedure"): DraftShape {
    const base: DraftShape = {
      base_action: this.doc.action.base_action || null,
      filters: this.doc.action.filters.map((f) => f.filter),
    };
    if (position === "after_procedure") {
      base.base_procedure = this.doc.procedure.base_procedure || null;
    }
    return base;
  }

  communityValues(entity: EntityTag): DropdownOption[] {
    switch (entity) {
      case "Channel":
        return this.community.channels.map((c) => ({
          value: c.id, label: c.label, source: "community",
        }));
      case "CommunityUser":
        return this.community.users.map((u) => ({
          value: u.id, label: u.label, source: "community",
        }));
      case "CommunityRole":
        return this.community.roles.map((r) => ({
          value: r, label: r, source: "community",
        }));
      case "Document":
        return this.community.documents.map((d) => ({
          value: d, label: d, source: "community",
        }));
      default:
        return [];
    }
  }

  /** Drop-down contents: the server's compatible variables, then community
   * values of the entity. Exactly that union, nothing client-invented. */
  async dropdownOptions(
    spec: SettingSpec,
    position: "procedure_settings" | "after_procedure",
  ): Promise<DropdownOption[]> {
    const variables = await this.api.draftVariables(
      this.draftAt(position), spec.entity, spec.value_type);
    const fromVariables: DropdownOption[] = variables.map((v) => ({
      value: v.token, label: v.label, source: "variable",
    }));
    return fromVariables.concat(this.communityValues(spec.entity));
  }

  /** The full insertable list for a Text setting's variables menu. */
  insertableVariables(
    position: "procedure_settings" | "after_procedure",
  ): Promise<VariableBinding[]> {
    return this.api.draftVariables(this.draftAt(position));
  }

  // --- submission ---------------------------------------------------------------

  async submit(): Promise<SubmitResult> {
    const report = await this.api.validate(this.doc);
    if (!report.ok) {
      this.report = report;
      return { ok: false, diagnostics: report.diagnostics };
    }
    await this.api.register(this.doc);
    const compiled = await this.api.compile(this.doc.id);
    return {
      ok: true,
      diagnostics: [],
      source: compiled.source,
      sections: compiled.sections,
    };
  }

  document(): PolicyDocument {
    return JSON.parse(JSON.stringify(this.doc)) as PolicyDocument;
  }
}
