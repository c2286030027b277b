// Shapes of the snapshot-service API bodies. Snapshot-scoped responses wrap
// their payload in a provenance envelope; sections a snapshot never built
// come back as an absent marker instead of an error.

export interface Envelope<T> {
  snapshot_id: string;
  config_digest: string;
  data: T;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
  fields?: { field: string; message: string }[];
  allowed?: string[];
}

export interface AbsentPayload {
  absent: true;
  reason: string;
}

// The service never mixes the two: a payload either has its section fields
// or it is the absent marker.
export type SectionPayload<T> = T | AbsentPayload;

export function isAbsent(payload: SectionPayload<unknown>): payload is AbsentPayload {
  return (
    typeof payload === 'object' &&
    payload !== null &&
    (payload as { absent?: unknown }).absent === true
  );
}

export interface SnapshotListEntry {
  snapshot_id: string;
  created_at: string | null;
  config_digest: string;
  sections: Record<string, string>;
}

export interface SectionEntry {
  status: string;
  reason?: string;
}

export interface SnapshotOverview {
  sections: Record<string, SectionEntry>;
  config: Record<string, unknown>;
}

export interface StatsPayload {
  total_tweets: number;
  unique_users: number;
  original_tweets: number;
  retweet_tweets: number;
  reply_tweets: number;
  quote_tweets: number;
  unique_hashtags: number;
  image_count: number;
  url_count: number;
  unique_domains: number;
  verified_tweets: number;
  daily_cap: number | null;
  capped_days: number;
  skipped_lines: Record<string, number>;
  line_count: number;
  subset: string | null;
}

export interface TimelinePoint {
  day: string;
  value: number;
  bot_proportion?: number | null;
}

export interface TimelinePayload {
  metric: string;
  series: TimelinePoint[];
}

export interface EgoNode {
  account_id: string;
  screen_name: string;
}

export interface EgoEdge {
  src: string;
  dst: string;
  weight: number;
}

export interface EgoPayload {
  kind: string;
  account: string;
  hops: number;
  truncated: boolean;
  nodes: EgoNode[];
  edges: EgoEdge[];
}

export interface InfluencerRow {
  rank: number;
  account_id: string;
  screen_name: string;
  centrality: number;
  bot_score: number | null;
  flagged: boolean;
}

export interface InfluencersPayload {
  detector: string | null;
  threshold: number;
  iterations_used: number;
  converged: boolean;
  rows: InfluencerRow[];
}

export interface CommunityCard {
  community_id: number;
  size: number;
  scored_members: number;
  bot_share: number | null;
  top_members: [string, number][];
  top_hashtags: [string, number][];
}

export interface CommunitiesPayload {
  seed: number;
  modularity: number;
  community_sizes: Record<string, number>;
  cards: CommunityCard[];
}

export interface ThresholdMetrics {
  threshold: number;
  precision: number | null;
  recall: number | null;
  f1: number | null;
  accuracy: number;
  roc_auc: number | null;
}

export interface DetectorCalibration {
  detector: string;
  labeled_accounts: number;
  policy: string;
  selected_threshold: number | null;
  selection_error: string | null;
  metrics_at_default: ThresholdMetrics;
  metrics_at_selected: ThresholdMetrics | null;
  curve: [number, number, number][];
}

export interface CalibrationPayload {
  detectors: Record<string, DetectorCalibration>;
}

export interface FrontierEntry {
  account_id: string;
  similarity: number;
}

export interface SessionView {
  session_id: string;
  snapshot_id: string;
  seeds: string[];
  accepted: string[];
  rejected: string[];
  frontier: FrontierEntry[];
  round: number;
}
