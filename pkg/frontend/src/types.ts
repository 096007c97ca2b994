/** Wire formats shared with the policy service. */

export type ComponentKind =
  | "BaseAction"
  | "Filter"
  | "BaseProcedure"
  | "Decorator"
  | "Execution";

export type EntityTag =
  | "CommunityUser"
  | "CommunityRole"
  | "Channel"
  | "Text"
  | "Timestamp"
  | "Number"
  | "Boolean"
  | "Document"
  | "UserList";

export interface SettingSpec {
  name: string;
  label: string;
  entity: EntityTag;
  value_type: "scalar" | "list";
  required: boolean;
  default?: unknown;
}

export interface VariableSpec {
  name: string;
  label: string;
  entity: EntityTag;
  value_type: "scalar" | "list";
}

export interface LibraryComponent {
  kind: ComponentKind;
  name: string;
  label: string;
  description: string;
  behavior: string;
  settings: SettingSpec[];
  variables: VariableSpec[];
  source_view: string;
  applies_to?: EntityTag;
  compatible_with?: string[];
}

export interface Library {
  version: number;
  components: LibraryComponent[];
}

export interface CommunityOption {
  id: string;
  label: string;
}

export interface CommunitySnapshot {
  users: CommunityOption[];
  roles: string[];
  channels: CommunityOption[];
  documents: string[];
}

export interface VariableBinding {
  scope: "action" | "procedure";
  name: string;
  label: string;
  entity: EntityTag;
  value_type: "scalar" | "list";
  token: string;
}

export interface Diagnostic {
  code: string;
  message: string;
  path: string;
}

export interface ValidationReport {
  ok: boolean;
  diagnostics: Diagnostic[];
}

export type SettingsMap = Record<string, unknown>;

export interface FilterInstance {
  field: string;
  filter: string;
  settings: SettingsMap;
}

export interface DecoratorInstance {
  name: string;
  settings: SettingsMap;
}

export interface ExecutionInstance {
  execution: string;
  settings: SettingsMap;
}

export interface PolicyDocument {
  id: string;
  name: string;
  description: string;
  action: { base_action: string; filters: FilterInstance[] };
  procedure: {
    base_procedure: string;
    settings: SettingsMap;
    decorators: DecoratorInstance[];
    on_pass: ExecutionInstance[];
    on_fail: ExecutionInstance[];
  };
  registry_version: number;
  enabled: boolean;
}

export interface CompiledView {
  id: string;
  sections: Record<string, string>;
  source: string;
}

export interface ProposalView {
  proposal_id: string;
  policy_id: string;
  event: string;
  opened_at: number;
  status: "Open" | "Passed" | "Failed";
  eligible: string[];
  voted: string[];
  slots: Record<string, unknown>;
}

export interface EffectRecord {
  kind: string;
  payload: Record<string, unknown>;
}

export interface SessionEventResponse {
  event_id: string;
  effects: EffectRecord[];
  proposals: ProposalView[];
}

export interface SessionVoteResponse {
  effects: EffectRecord[];
  proposal: ProposalView;
}

export type BallotJson =
  | { type: "yesno"; value: boolean }
  | { type: "ranking"; ranking: string[] }
  | { type: "quadratic"; magnitude: number }
  | { type: "delegate"; target: string };

export interface DraftShape {
  base_action?: string | null;
  filters?: string[];
  base_procedure?: string | null;
}
