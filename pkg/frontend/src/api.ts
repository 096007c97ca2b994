/** Thin typed client over the policy service HTTP endpoints. */

import type {
  BallotJson,
  CommunitySnapshot,
  CompiledView,
  DraftShape,
  Library,
  PolicyDocument,
  SessionEventResponse,
  SessionVoteResponse,
  ValidationReport,
  VariableBinding,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public diagnostics: unknown = undefined,
  ) {
    super(message);
  }
}

/** The service surface the wizard and playground depend on. */
export interface PolicyApi {
  library(): Promise<Library>;
  community(): Promise<CommunitySnapshot>;
  validate(doc: PolicyDocument): Promise<ValidationReport>;
  register(doc: PolicyDocument): Promise<{ id: string; enabled: boolean }>;
  compile(policyId: string): Promise<CompiledView>;
  draftVariables(
    draft: DraftShape,
    entity?: string,
    valueType?: string,
  ): Promise<VariableBinding[]>;
  submitEvent(
    kind: string,
    fields: Record<string, unknown>,
    at?: number,
  ): Promise<SessionEventResponse>;
  castVote(
    proposalId: string,
    voter: string,
    ballot: BallotJson,
    at?: number,
  ): Promise<SessionVoteResponse>;
  tick(now: number): Promise<{ effects: unknown[] }>;
  trace(): Promise<string[]>;
}

export class ApiClient implements PolicyApi {
  constructor(private baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "HttpError";
      let message = `${method} ${path} -> ${response.status}`;
      let diagnostics: unknown;
      try {
        const payload = (await response.json()) as Record<string, unknown>;
        code = String(payload.code ?? code);
        message = String(payload.message ?? message);
        diagnostics = payload.diagnostics;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message, diagnostics);
    }
    return (await response.json()) as T;
  }

  library(): Promise<Library> {
    return this.request("GET", "/library");
  }

  community(): Promise<CommunitySnapshot> {
    return this.request("GET", "/community");
  }

  validate(doc: PolicyDocument): Promise<ValidationReport> {
    return this.request("POST", "/policies/validate", doc);
  }

  register(doc: PolicyDocument): Promise<{ id: string; enabled: boolean }> {
    return this.request("POST", "/policies", doc);
  }

  compile(policyId: string): Promise<CompiledView> {
    return this.request("POST", `/policies/${policyId}/compile`);
  }

  draftVariables(
    draft: DraftShape,
    entity?: string,
    valueType?: string,
  ): Promise<VariableBinding[]> {
    const body: Record<string, unknown> = { draft };
    if (entity !== undefined) body.entity = entity;
    if (valueType !== undefined) body.value_type = valueType;
    return this.request<{ variables: VariableBinding[] }>(
      "POST", "/drafts/variables", body,
    ).then((r) => r.variables);
  }

  submitEvent(
    kind: string,
    fields: Record<string, unknown>,
    at?: number,
  ): Promise<SessionEventResponse> {
    const body: Record<string, unknown> = { kind, fields };
    if (at !== undefined) body.at = at;
    return this.request("POST", "/session/events", body);
  }

  castVote(
    proposalId: string,
    voter: string,
    ballot: BallotJson,
    at?: number,
  ): Promise<SessionVoteResponse> {
    const body: Record<string, unknown> = { voter, ballot };
    if (at !== undefined) body.at = at;
    return this.request("POST", `/session/proposals/${proposalId}/votes`, body);
  }

  tick(now: number): Promise<{ effects: unknown[] }> {
    return this.request("POST", "/session/tick", { now });
  }

  async trace(): Promise<string[]> {
    const response = await fetch(this.baseUrl + "/session/trace");
    if (!response.ok) {
      throw new ApiError(response.status, "HttpError", "trace fetch failed");
    }
    const text = await response.text();
    return text.length ? text.replace(/\n$/, "").split("\n") : [];
  }
}
