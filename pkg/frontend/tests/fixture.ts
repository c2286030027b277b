import { once } from 'node:events';
import type { AddressInfo } from 'node:net';
import express from 'express';
import type { Request, Response } from 'express';

// In-process stand-in for the snapshot service. It serves one canned
// snapshot and runs real expansion-session semantics (max cosine against
// seeds plus accepted, rank descending with id tiebreak) over a small
// embedded vector table, so scripted dashboards and direct HTTP replays can
// be compared against the same authority.

export const SNAPSHOT_ID = 'snap_fixture0001';
export const CONFIG_DIGEST = 'cfgd_9f1e22ab';

// account -> term counts. ops* share one vocabulary block, civ* another,
// mix1 straddles, ghost0 mentions nothing and must still rank (at zero).
export const VECTORS: Record<string, number[]> = {
  ops1: [3, 1, 0, 0, 0, 0],
  ops2: [2, 2, 0, 0, 0, 0],
  ops3: [1, 3, 0, 0, 0, 0],
  ops4: [0, 1, 1, 0, 0, 0],
  mix1: [1, 0, 1, 1, 0, 0],
  civ1: [0, 0, 2, 1, 0, 0],
  civ2: [0, 0, 1, 3, 0, 0],
  civ3: [0, 0, 0, 1, 2, 0],
  civ4: [0, 0, 0, 0, 3, 1],
  ghost0: [0, 0, 0, 0, 0, 0],
};

function cosine(a: number[], b: number[]): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na === 0 || nb === 0) return 0;
  return dot / (Math.sqrt(na) * Math.sqrt(nb));
}

interface SessionState {
  snapshotId: string;
  seeds: Set<string>;
  accepted: Set<string>;
  rejected: Set<string>;
  frontier: [string, number][];
  round: number;
}

const STATS = {
  total_tweets: 48211,
  unique_users: 9120,
  original_tweets: 10233,
  retweet_tweets: 30110,
  reply_tweets: 5301,
  quote_tweets: 2567,
  unique_hashtags: 1873,
  image_count: 6410,
  url_count: 12055,
  unique_domains: 422,
  verified_tweets: 801,
  daily_cap: null as number | null,
  capped_days: 0,
  skipped_lines: { 'bad json': 12, 'missing field': 3 },
  line_count: 48226,
  subset: null as string | null,
};

const TWEET_SERIES = [
  { day: '2020-03-01', value: 11021 },
  { day: '2020-03-02', value: 15480 },
  { day: '2020-03-03', value: 13207 },
  { day: '2020-03-04', value: 8503 },
];

const CREATION_SERIES = [
  { day: '2009-06-11', value: 14, bot_proportion: 0.0714285714285714 },
  { day: '2020-02-28', value: 312, bot_proportion: 0.5833333333333334 },
  { day: '2020-03-01', value: 95, bot_proportion: null as number | null },
];

const INFLUENCERS = {
  detector: 'tier1',
  threshold: 0.7,
  iterations_used: 34,
  converged: true,
  rows: [
    { rank: 1, account_id: 'ops1', screen_name: 'OpsLeader', centrality: 0.5912044161, bot_score: 0.94, flagged: true },
    { rank: 2, account_id: 'civ2', screen_name: 'plain_citizen', centrality: 0.4410781223, bot_score: 0.12, flagged: false },
    { rank: 3, account_id: 'mix1', screen_name: '', centrality: 0.3017229345, bot_score: null, flagged: false },
    { rank: 4, account_id: 'civ1', screen_name: 'bystander', centrality: 0.2220958871, bot_score: 0.44, flagged: false },
  ],
};

const COMMUNITIES = {
  seed: 7,
  modularity: 0.512308,
  community_sizes: { '0': 6, '1': 4 },
  cards: [
    {
      community_id: 0,
      size: 6,
      scored_members: 5,
      bot_share: 0.8,
      top_members: [['OpsLeader', 0.5912044161], ['ops2', 0.2871734402]] as [string, number][],
      top_hashtags: [['standwithus', 41], ['truth', 17]] as [string, number][],
    },
    {
      community_id: 1,
      size: 4,
      scored_members: 0,
      bot_share: null as number | null,
      top_members: [['bystander', 0.2220958871]] as [string, number][],
      top_hashtags: [] as [string, number][],
    },
  ],
};

const CALIBRATION = {
  detectors: {
    tier1: {
      detector: 'tier1',
      labeled_accounts: 120,
      policy: 'max_f1',
      selected_threshold: 0.7,
      selection_error: null as string | null,
      metrics_at_default: {
        threshold: 0.5,
        precision: 0.8214285714285714,
        recall: 0.92,
        f1: 0.8679245283018868,
        accuracy: 0.8833333333333333,
        roc_auc: 0.9441,
      },
      metrics_at_selected: {
        threshold: 0.7,
        precision: 0.9111111111111111,
        recall: 0.82,
        f1: 0.8631578947368421,
        accuracy: 0.8916666666666667,
        roc_auc: 0.9441,
      },
      curve: [
        [0.94, 1.0, 0.26],
        [0.7, 0.9111111111111111, 0.82],
        [0.5, 0.8214285714285714, 0.92],
        [0.12, 0.4166666666666667, 1.0],
      ] as [number, number, number][],
    },
  },
};

// Undirected mention graph for ego walks; weights are interaction counts.
const EGO_EDGES: [string, string, number][] = [
  ['ops1', 'ops2', 9],
  ['ops1', 'ops3', 4],
  ['ops2', 'ops3', 6],
  ['ops3', 'ops4', 2],
  ['ops4', 'mix1', 1],
  ['mix1', 'civ1', 3],
  ['civ1', 'civ2', 5],
  ['civ2', 'civ3', 2],
  ['civ3', 'civ4', 7],
];

const SCREEN_NAMES: Record<string, string> = {
  ops1: 'OpsLeader',
  ops2: 'ops2',
  civ1: 'bystander',
  civ2: 'plain_citizen',
};

const SECTIONS = {
  stats: { status: 'built' },
  'network/mention': { status: 'built' },
  'network/retweet': { status: 'absent', reason: 'graph has no edges' },
  calibration: { status: 'built' },
  audit: { status: 'absent', reason: 'no rehydration endpoint configured' },
  content: { status: 'built' },
  characterize: { status: 'absent', reason: 'no side tables configured' },
  topics: { status: 'absent', reason: 'lda disabled for the fixture' },
  dtm: { status: 'built' },
};

function envelope(data: unknown) {
  return { snapshot_id: SNAPSHOT_ID, config_digest: CONFIG_DIGEST, data };
}

function notFound(res: Response, message: string) {
  res.status(404).json({ error: { code: 'not_found', message } });
}

function badRequest(res: Response, message: string, extra: Record<string, unknown> = {}) {
  res.status(400).json({ error: { code: 'bad_request', message, ...extra } });
}

function checkSnapshot(req: Request, res: Response): boolean {
  if (req.params.id !== SNAPSHOT_ID) {
    notFound(res, `unknown snapshot '${req.params.id}'`);
    return false;
  }
  return true;
}

export interface Fixture {
  url: string;
  snapshotId: string;
  close: () => Promise<void>;
}

export async function startFixture(): Promise<Fixture> {
  const app = express();
  app.use(express.json());

  const sessions = new Map<string, SessionState>();
  let sessionCounter = 0;

  app.get('/api/snapshots', (_req, res) => {
    res.json({
      snapshots: [
        {
          snapshot_id: SNAPSHOT_ID,
          created_at: '2026-08-14T09:12:44Z',
          config_digest: CONFIG_DIGEST,
          sections: Object.fromEntries(
            Object.entries(SECTIONS).map(([name, entry]) => [name, entry.status]),
          ),
        },
      ],
    });
  });

  app.get('/api/snapshots/:id', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    res.json(envelope({ sections: SECTIONS, config: { lda_k: 10, k_core_k: 2 } }));
  });

  app.get('/api/snapshots/:id/stats', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    res.json(envelope(STATS));
  });

  app.get('/api/snapshots/:id/timeline', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const metric = (req.query.metric as string | undefined) ?? 'tweets';
    if (metric === 'tweets') {
      res.json(envelope({ metric, series: TWEET_SERIES }));
    } else if (metric === 'creation') {
      res.json(envelope({ metric, series: CREATION_SERIES }));
    } else if (metric === 'abusive') {
      res.json(envelope({ metric, absent: true, reason: 'no abusive lexicon configured' }));
    } else {
      badRequest(res, `unknown metric '${metric}'`, {
        field: 'metric',
        allowed: ['tweets', 'abusive', 'creation'],
      });
    }
  });

  app.get('/api/snapshots/:id/network/ego', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const account = req.query.account as string | undefined;
    const kind = (req.query.kind as string | undefined) ?? 'mention';
    const hops = Number(req.query.hops ?? 1);
    const cap = Number(req.query.cap ?? 500);
    if (kind !== 'mention') {
      badRequest(res, `unknown graph kind '${kind}'`, { field: 'kind' });
      return;
    }
    if (!Number.isInteger(hops) || hops < 0) {
      badRequest(res, 'hops must be >= 0', { field: 'hops' });
      return;
    }
    if (!Number.isInteger(cap) || cap < 1) {
      badRequest(res, 'cap must be >= 1', { field: 'cap' });
      return;
    }
    const neighbors = new Map<string, Set<string>>();
    for (const [u, v] of EGO_EDGES) {
      if (!neighbors.has(u)) neighbors.set(u, new Set());
      if (!neighbors.has(v)) neighbors.set(v, new Set());
      neighbors.get(u)!.add(v);
      neighbors.get(v)!.add(u);
    }
    if (!account || !neighbors.has(account)) {
      notFound(res, `account '${account}' is not in the mention graph`);
      return;
    }
    const kept = new Set([account]);
    let frontier = [account];
    let truncated = false;
    for (let i = 0; i < hops && !truncated; i++) {
      const next: string[] = [];
      for (const node of frontier) {
        for (const peer of [...(neighbors.get(node) ?? [])].sort()) {
          if (kept.has(peer)) continue;
          if (kept.size >= cap) {
            truncated = true;
            break;
          }
          kept.add(peer);
          next.push(peer);
        }
        if (truncated) break;
      }
      if (next.length === 0) break;
      frontier = next;
    }
    res.json(
      envelope({
        kind,
        account,
        hops,
        truncated,
        nodes: [...kept].sort().map((a) => ({ account_id: a, screen_name: SCREEN_NAMES[a] ?? '' })),
        edges: EGO_EDGES.filter(([u, v]) => kept.has(u) && kept.has(v)).map(([src, dst, weight]) => ({
          src,
          dst,
          weight,
        })),
      }),
    );
  });

  app.get('/api/snapshots/:id/influencers', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    res.json(envelope(INFLUENCERS));
  });

  app.get('/api/snapshots/:id/communities', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    res.json(envelope(COMMUNITIES));
  });

  app.get('/api/snapshots/:id/communities/:cid', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const card = COMMUNITIES.cards.find((c) => c.community_id === Number(req.params.cid));
    if (!card) {
      notFound(res, `no community card for id ${req.params.cid}`);
      return;
    }
    res.json(envelope(card));
  });

  app.get('/api/snapshots/:id/calibration', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    res.json(envelope(CALIBRATION));
  });

  const sessionView = (sessionId: string, s: SessionState) => ({
    session_id: sessionId,
    snapshot_id: s.snapshotId,
    seeds: [...s.seeds].sort(),
    accepted: [...s.accepted].sort(),
    rejected: [...s.rejected].sort(),
    frontier: s.frontier.map(([account_id, similarity]) => ({ account_id, similarity })),
    round: s.round,
  });

  const getSession = (req: Request, res: Response): [string, SessionState] | null => {
    const sid = String(req.params.sid);
    const s = sessions.get(sid);
    if (!s) {
      notFound(res, `unknown or expired session '${sid}'`);
      return null;
    }
    if (s.snapshotId !== req.params.id) {
      notFound(res, 'session belongs to a different snapshot');
      return null;
    }
    return [sid, s];
  };

  app.post('/api/snapshots/:id/botmatch/session', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const seeds = (req.body as { seeds?: unknown }).seeds;
    if (!Array.isArray(seeds) || seeds.some((s) => typeof s !== 'string')) {
      badRequest(res, 'request validation failed', {
        fields: [{ field: 'body.seeds', message: 'must be a list of strings' }],
      });
      return;
    }
    if (seeds.length === 0) {
      badRequest(res, 'seeds must be non-empty', { field: 'seeds' });
      return;
    }
    for (const seed of seeds) {
      if (!(seed in VECTORS)) {
        notFound(res, `no document for account '${seed}'`);
        return;
      }
    }
    sessionCounter += 1;
    const sessionId = `sess${String(sessionCounter).padStart(4, '0')}`;
    const state: SessionState = {
      snapshotId: SNAPSHOT_ID,
      seeds: new Set(seeds as string[]),
      accepted: new Set(),
      rejected: new Set(),
      frontier: [],
      round: 0,
    };
    sessions.set(sessionId, state);
    res.json(envelope(sessionView(sessionId, state)));
  });

  app.get('/api/snapshots/:id/botmatch/session/:sid', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const hit = getSession(req, res);
    if (!hit) return;
    res.json(envelope(sessionView(hit[0], hit[1])));
  });

  app.post('/api/snapshots/:id/botmatch/session/:sid/step', (req, res) => {
    if (!checkSnapshot(req, res)) return;
    const hit = getSession(req, res);
    if (!hit) return;
    const [sessionId, s] = hit;
    const topN = (req.body as { top_n?: unknown }).top_n ?? 20;
    if (!Number.isInteger(topN) || (topN as number) < 1) {
      badRequest(res, 'top_n must be a positive integer', { field: 'top_n' });
      return;
    }
    const references = [...s.seeds, ...s.accepted].map((a) => VECTORS[a]);
    const ranked: [string, number][] = Object.keys(VECTORS)
      .filter((a) => !s.seeds.has(a) && !s.accepted.has(a) && !s.rejected.has(a))
      .map((a): [string, number] => [a, Math.max(...references.map((r) => cosine(VECTORS[a], r)))])
      .sort((x, y) => y[1] - x[1] || (x[0] < y[0] ? -1 : 1));
    s.frontier = ranked.slice(0, topN as number);
    s.round += 1;
    res.json(envelope(sessionView(sessionId, s)));
  });

  const triage = (verb: 'accept' | 'reject') => (req: Request, res: Response) => {
    if (!checkSnapshot(req, res)) return;
    const hit = getSession(req, res);
    if (!hit) return;
    const [sessionId, s] = hit;
    const ids = (req.body as { ids?: unknown }).ids;
    if (!Array.isArray(ids) || ids.some((i) => typeof i !== 'string')) {
      badRequest(res, 'request validation failed', {
        fields: [{ field: 'body.ids', message: 'must be a list of strings' }],
      });
      return;
    }
    const inFrontier = new Set(s.frontier.map(([a]) => a));
    const outside = (ids as string[]).filter((i) => !inFrontier.has(i));
    if (outside.length > 0) {
      badRequest(res, `cannot ${verb} accounts outside the frontier: ${JSON.stringify(outside.slice(0, 3))}`);
      return;
    }
    for (const id of ids as string[]) {
      (verb === 'accept' ? s.accepted : s.rejected).add(id);
    }
    s.frontier = s.frontier.filter(([a]) => !(ids as string[]).includes(a));
    res.json(envelope(sessionView(sessionId, s)));
  };

  app.post('/api/snapshots/:id/botmatch/session/:sid/accept', triage('accept'));
  app.post('/api/snapshots/:id/botmatch/session/:sid/reject', triage('reject'));

  const server = app.listen(0, '127.0.0.1');
  await once(server, 'listening');
  const address = server.address() as AddressInfo;
  return {
    url: `http://127.0.0.1:${address.port}`,
    snapshotId: SNAPSHOT_ID,
    close: () =>
      new Promise<void>((resolve, reject) => {
        server.close((err) => (err ? reject(err) : resolve()));
      }),
  };
}
