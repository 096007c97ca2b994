/** Live simulation playground: trigger actions, vote as any member, advance
 * the clock, and stream the effect trace from the session. */

import type { PolicyApi } from "./api.js";
import type {
  BallotJson,
  PolicyDocument,
  ProposalView,
  SessionEventResponse,
  SessionVoteResponse,
} from "./types.js";

export class Playground {
  proposals: ProposalView[] = [];
  traceLines: string[] = [];

  constructor(private api: PolicyApi) {}

  async registerPolicy(doc: PolicyDocument): Promise<void> {
    await this.api.register(doc);
  }

  async trigger(
    kind: string,
    fields: Record<string, unknown>,
    at?: number,
  ): Promise<SessionEventResponse> {
    const response = await this.api.submitEvent(kind, fields, at);
    this.proposals = response.proposals;
    await this.refreshTrace();
    return response;
  }

  async vote(
    proposalId: string,
    voter: string,
    ballot: BallotJson,
    at?: number,
  ): Promise<SessionVoteResponse> {
    const response = await this.api.castVote(proposalId, voter, ballot, at);
    this.proposals = this.proposals.map((p) =>
      p.proposal_id === proposalId ? response.proposal : p);
    await this.refreshTrace();
    return response;
  }

  async advanceClock(now: number): Promise<void> {
    await this.api.tick(now);
    await this.refreshTrace();
  }

  async refreshTrace(): Promise<string[]> {
    this.traceLines = await this.api.trace();
    return this.traceLines;
  }

  openProposals(): ProposalView[] {
    return this.proposals.filter((p) => p.status === "Open");
  }
}
