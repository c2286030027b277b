import type {
  AbsentPayload,
  CalibrationPayload,
  CommunitiesPayload,
  CommunityCard,
  EgoPayload,
  InfluencersPayload,
  SectionPayload,
  SessionView,
  SnapshotListEntry,
  StatsPayload,
  ThresholdMetrics,
  TimelinePayload,
} from './types.js';
import { isAbsent } from './types.js';

// Every view is a pure payload -> lines function. Numbers are interpolated
// with String() straight off the payload and never rounded, summed, or
// otherwise recomputed, so each digit on screen traces back to an API body.

const BAR_WIDTH = 40;

function absentLines(payload: AbsentPayload): string[] {
  return [`not computed: ${payload.reason}`];
}

function n(value: number | null | undefined): string {
  return value === null || value === undefined ? '-' : String(value);
}

export function renderSnapshotPicker(entries: SnapshotListEntry[]): string[] {
  if (entries.length === 0) return ['no snapshots in the store'];
  const lines = ['snapshots:'];
  for (const entry of entries) {
    const built = Object.entries(entry.sections)
      .filter(([, status]) => status === 'built')
      .map(([name]) => name)
      .sort()
      .join(', ');
    lines.push(`  ${entry.snapshot_id}  created ${entry.created_at ?? '-'}  [${built}]`);
  }
  return lines;
}

export function renderStatsPanel(stats: SectionPayload<StatsPayload>): string[] {
  if (isAbsent(stats)) return absentLines(stats);
  const rows: [string, string][] = [
    ['total tweets', n(stats.total_tweets)],
    ['unique users', n(stats.unique_users)],
    ['original tweets', n(stats.original_tweets)],
    ['retweets', n(stats.retweet_tweets)],
    ['replies', n(stats.reply_tweets)],
    ['quotes', n(stats.quote_tweets)],
    ['unique hashtags', n(stats.unique_hashtags)],
    ['tweets with images', n(stats.image_count)],
    ['tweets with URLs', n(stats.url_count)],
    ['unique domains', n(stats.unique_domains)],
    ['verified tweets', n(stats.verified_tweets)],
  ];
  const lines = ['stream statistics' + (stats.subset ? ` (subset: ${stats.subset})` : '')];
  for (const [label, value] of rows) {
    lines.push(`  ${label.padEnd(20)} ${value}`);
  }
  if (stats.daily_cap !== null) {
    lines.push(`  daily cap ${n(stats.daily_cap)}, capped days ${n(stats.capped_days)}`);
  }
  for (const [reason, count] of Object.entries(stats.skipped_lines).sort()) {
    lines.push(`  skipped (${reason}) ${n(count)}`);
  }
  return lines;
}

export function renderTimeline(payload: SectionPayload<TimelinePayload>): string[] {
  if (isAbsent(payload)) return absentLines(payload);
  const lines = [`${payload.metric} per day`];
  if (payload.series.length === 0) {
    lines.push('  (empty series)');
    return lines;
  }
  // Bars are glyph repetition scaled against the max; the printed number is
  // always the raw value.
  const max = Math.max(...payload.series.map((p) => p.value));
  for (const point of payload.series) {
    const bar = max > 0 ? '#'.repeat(Math.round((point.value / max) * BAR_WIDTH)) : '';
    let line = `  ${point.day} ${bar.padEnd(BAR_WIDTH)} ${n(point.value)}`;
    if (point.bot_proportion !== undefined && point.bot_proportion !== null) {
      line += `  bot share ${n(point.bot_proportion)}`;
    }
    lines.push(line);
  }
  return lines;
}

export function renderInfluencerTable(payload: SectionPayload<InfluencersPayload>): string[] {
  if (isAbsent(payload)) return absentLines(payload);
  const lines = ['influencers (eigenvector centrality)'];
  if (payload.detector !== null) {
    lines.push(`  detector ${payload.detector}, bot threshold ${n(payload.threshold)}`);
  }
  if (!payload.converged) {
    lines.push(`  warning: centrality stopped after ${n(payload.iterations_used)} iterations without converging`);
  }
  lines.push(`  ${'rank'.padEnd(6)}${'account'.padEnd(22)}${'centrality'.padEnd(24)}bot`);
  for (const row of payload.rows) {
    const who = row.screen_name || row.account_id;
    const bot = row.bot_score === null ? '-' : n(row.bot_score);
    const flag = row.flagged ? '  BOT' : '';
    lines.push(`  ${n(row.rank).padEnd(6)}${who.padEnd(22)}${n(row.centrality).padEnd(24)}${bot}${flag}`);
  }
  return lines;
}

function cardLines(card: CommunityCard): string[] {
  const lines = [`  community ${n(card.community_id)}: ${n(card.size)} members`];
  if (card.bot_share === null) {
    lines.push('    no scored members');
  } else {
    lines.push(`    bot share ${n(card.bot_share)} over ${n(card.scored_members)} scored members`);
  }
  for (const [name, centrality] of card.top_members) {
    lines.push(`    ${name} (${n(centrality)})`);
  }
  if (card.top_hashtags.length > 0) {
    lines.push(`    hashtags: ${card.top_hashtags.map(([tag, count]) => `#${tag} x${n(count)}`).join(' ')}`);
  }
  return lines;
}

export function renderCommunityCards(payload: SectionPayload<CommunitiesPayload>): string[] {
  if (isAbsent(payload)) return absentLines(payload);
  const lines = [`communities (modularity ${n(payload.modularity)})`];
  for (const card of payload.cards) {
    lines.push(...cardLines(card));
  }
  return lines;
}

export function renderCommunityCard(payload: SectionPayload<CommunityCard>): string[] {
  if (isAbsent(payload)) return absentLines(payload);
  return cardLines(payload);
}

function metricsLine(label: string, m: ThresholdMetrics): string {
  return (
    `  ${label.padEnd(12)} t=${n(m.threshold)}  precision ${n(m.precision)}  ` +
    `recall ${n(m.recall)}  f1 ${n(m.f1)}  accuracy ${n(m.accuracy)}  auc ${n(m.roc_auc)}`
  );
}

export function renderCalibration(payload: SectionPayload<CalibrationPayload>): string[] {
  if (isAbsent(payload)) return absentLines(payload);
  const lines: string[] = [];
  for (const name of Object.keys(payload.detectors).sort()) {
    const d = payload.detectors[name];
    lines.push(`detector ${d.detector} (${n(d.labeled_accounts)} labeled accounts, policy ${d.policy})`);
    if (d.selected_threshold === null) {
      lines.push(`  no threshold satisfies the policy: ${d.selection_error ?? ''}`);
    } else {
      lines.push(`  selected threshold ${n(d.selected_threshold)}`);
    }
    lines.push(metricsLine('at default', d.metrics_at_default));
    if (d.metrics_at_selected !== null) {
      lines.push(metricsLine('at selected', d.metrics_at_selected));
    }
    for (const [t, precision, recall] of d.curve) {
      lines.push(`    curve t=${n(t)} p=${n(precision)} r=${n(recall)}`);
    }
  }
  return lines;
}

export function renderEgoNetwork(payload: EgoPayload): string[] {
  const lines = [`ego network of ${payload.account} (${payload.kind}, ${n(payload.hops)} hops)`];
  if (payload.truncated) {
    lines.push('  truncated at the node cap; widen the cap to see more');
  }
  for (const node of payload.nodes) {
    lines.push(`  node ${node.account_id}${node.screen_name ? ` (${node.screen_name})` : ''}`);
  }
  for (const edge of payload.edges) {
    lines.push(`  ${edge.src} -> ${edge.dst} weight ${n(edge.weight)}`);
  }
  return lines;
}

export function renderSessionPanel(view: SessionView): string[] {
  const lines = [
    `expansion session ${view.session_id} (snapshot ${view.snapshot_id}, round ${n(view.round)})`,
    `  seeds: ${view.seeds.join(', ')}`,
    `  accepted: ${view.accepted.length > 0 ? view.accepted.join(', ') : '(none)'}`,
    `  rejected: ${view.rejected.length > 0 ? view.rejected.join(', ') : '(none)'}`,
  ];
  if (view.frontier.length === 0) {
    lines.push('  frontier: (empty; step to propose candidates)');
  } else {
    lines.push('  frontier:');
    for (const entry of view.frontier) {
      lines.push(`    ${entry.account_id.padEnd(22)} similarity ${n(entry.similarity)}  [accept] [reject]`);
    }
  }
  return lines;
}
