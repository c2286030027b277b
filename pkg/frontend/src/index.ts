export { ApiError, HttpClient } from './client.js';
export { sessionApi, snapshotApi } from './api.js';
export type { EgoQuery, SessionApi, SnapshotApi } from './api.js';
export { explorerApp } from './explorer.js';
export type { ExplorerApp } from './explorer.js';
export { expansionWorkbench } from './workbench.js';
export type { ExpansionWorkbench } from './workbench.js';
export * from './types.js';
export {
  renderCalibration,
  renderCommunityCard,
  renderCommunityCards,
  renderEgoNetwork,
  renderInfluencerTable,
  renderSessionPanel,
  renderSnapshotPicker,
  renderStatsPanel,
  renderTimeline,
} from './views.js';
