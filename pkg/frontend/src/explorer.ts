import type { SnapshotApi } from './api.js';
import { ApiError } from './client.js';
import type { SnapshotListEntry } from './types.js';
import {
  renderCalibration,
  renderCommunityCards,
  renderEgoNetwork,
  renderInfluencerTable,
  renderSnapshotPicker,
  renderStatsPanel,
  renderTimeline,
} from './views.js';

// Drill-down console over one snapshot: stats, timelines, influencers,
// communities, calibration, and on-demand ego networks. Panels hold rendered
// lines only; all analytics stay on the server.
export function explorerApp(api: SnapshotApi) {
  return {
    snapshots: [] as SnapshotListEntry[],
    selected: '',
    picker: [] as string[],
    panels: {
      stats: [] as string[],
      tweets: [] as string[],
      creation: [] as string[],
      abusive: [] as string[],
      influencers: [] as string[],
      communities: [] as string[],
      calibration: [] as string[],
      ego: [] as string[],
    },
    error: '',

    async loadSnapshots(): Promise<void> {
      try {
        this.snapshots = await api.list();
        this.picker = renderSnapshotPicker(this.snapshots);
        this.error = '';
      } catch (err) {
        this.error = err instanceof ApiError ? err.body.message : String(err);
      }
    },

    // One fetch per panel; a failing panel reports inline instead of taking
    // the whole console down.
    async open(snapshotId: string): Promise<void> {
      this.selected = snapshotId;
      this.panels.ego = [];
      const fill = async (panel: keyof typeof this.panels, load: () => Promise<string[]>) => {
        try {
          this.panels[panel] = await load();
        } catch (err) {
          const message = err instanceof ApiError ? err.body.message : String(err);
          this.panels[panel] = [`error: ${message}`];
        }
      };
      await Promise.all([
        fill('stats', async () => renderStatsPanel(await api.stats(snapshotId))),
        fill('tweets', async () => renderTimeline(await api.timeline(snapshotId, 'tweets'))),
        fill('creation', async () => renderTimeline(await api.timeline(snapshotId, 'creation'))),
        fill('abusive', async () => renderTimeline(await api.timeline(snapshotId, 'abusive'))),
        fill('influencers', async () => renderInfluencerTable(await api.influencers(snapshotId))),
        fill('communities', async () => renderCommunityCards(await api.communities(snapshotId))),
        fill('calibration', async () => renderCalibration(await api.calibration(snapshotId))),
      ]);
    },

    async loadEgo(account: string, hops = 1, kind = 'mention'): Promise<void> {
      if (!this.selected) return;
      try {
        const payload = await api.ego(this.selected, { account, hops, kind });
        this.panels.ego = renderEgoNetwork(payload);
      } catch (err) {
        const message = err instanceof ApiError ? err.body.message : String(err);
        this.panels.ego = [`error: ${message}`];
      }
    },
  };
}

export type ExplorerApp = ReturnType<typeof explorerApp>;
