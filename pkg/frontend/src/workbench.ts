import type { SessionApi } from './api.js';
import { ApiError } from './client.js';
import type { SessionView } from './types.js';

// Accept/reject decisions feed the next expansion round, so the workbench
// treats the server as the only authority: after every action it throws its
// local copy away and re-fetches the session. Rendering this state is
// guaranteed to match what a page reload would show.
export function expansionWorkbench(api: SessionApi, snapshotId: string) {
  return {
    view: null as SessionView | null,
    error: '',
    busy: false,
    // Candidates only ever leave the corpus, so one empty step means every
    // later step would be empty too.
    exhausted: false,
    lastAction: null as (() => Promise<void>) | null,

    get canStep(): boolean {
      return this.view !== null && !this.busy && !this.exhausted;
    },

    get stepDisabledReason(): string {
      if (this.view === null) return 'no session started';
      if (this.exhausted) return 'no candidates remain; every account has been triaged';
      if (this.busy) return 'request in flight';
      return '';
    },

    async runAction(action: () => Promise<void>): Promise<void> {
      this.lastAction = action;
      this.busy = true;
      try {
        await action();
        this.error = '';
      } catch (err) {
        // Surface the server's own wording; the analyst decides what to do.
        this.error = err instanceof ApiError ? err.body.message : String(err);
      } finally {
        this.busy = false;
      }
    },

    async refreshView(): Promise<void> {
      if (this.view === null) return;
      this.view = await api.fetch(snapshotId, this.view.session_id);
    },

    async start(seeds: string[]): Promise<void> {
      await this.runAction(async () => {
        const created = await api.create(snapshotId, seeds);
        this.exhausted = false;
        this.view = created;
        await this.refreshView();
      });
    },

    async step(topN = 20): Promise<void> {
      await this.runAction(async () => {
        if (this.view === null) throw new Error('no session started');
        const after = await api.step(snapshotId, this.view.session_id, topN);
        if (after.frontier.length === 0) this.exhausted = true;
        await this.refreshView();
      });
    },

    async accept(ids: string[]): Promise<void> {
      await this.runAction(async () => {
        if (this.view === null) throw new Error('no session started');
        await api.accept(snapshotId, this.view.session_id, ids);
        await this.refreshView();
      });
    },

    async reject(ids: string[]): Promise<void> {
      await this.runAction(async () => {
        if (this.view === null) throw new Error('no session started');
        await api.reject(snapshotId, this.view.session_id, ids);
        await this.refreshView();
      });
    },

    async retry(): Promise<void> {
      if (this.lastAction !== null) {
        await this.runAction(this.lastAction);
      }
    },
  };
}

export type ExpansionWorkbench = ReturnType<typeof expansionWorkbench>;
