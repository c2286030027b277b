import { HttpClient } from './client.js';
import type {
  CalibrationPayload,
  CommunitiesPayload,
  CommunityCard,
  EgoPayload,
  Envelope,
  InfluencersPayload,
  SectionPayload,
  SessionView,
  SnapshotListEntry,
  SnapshotOverview,
  StatsPayload,
  TimelinePayload,
} from './types.js';

export interface EgoQuery {
  account: string;
  hops?: number;
  kind?: string;
  cap?: number;
}

function query(params: Record<string, string | number | undefined>): string {
  const pairs = Object.entries(params).filter(([, v]) => v !== undefined);
  if (pairs.length === 0) return '';
  const qs = new URLSearchParams(pairs.map(([k, v]) => [k, String(v)]));
  return `?${qs.toString()}`;
}

// Thin read-only wrapper over the snapshot endpoints. Each call returns the
// payload out of the provenance envelope; no analytics happen here.
export function snapshotApi(client: HttpClient) {
  return {
    list: async (): Promise<SnapshotListEntry[]> => {
      const body = await client.get<{ snapshots: SnapshotListEntry[] }>('/api/snapshots');
      return body.snapshots;
    },

    overview: async (id: string): Promise<SnapshotOverview> => {
      const body = await client.get<Envelope<SnapshotOverview>>(`/api/snapshots/${id}`);
      return body.data;
    },

    stats: async (id: string): Promise<StatsPayload> => {
      const body = await client.get<Envelope<StatsPayload>>(`/api/snapshots/${id}/stats`);
      return body.data;
    },

    timeline: async (id: string, metric: string): Promise<SectionPayload<TimelinePayload>> => {
      const body = await client.get<Envelope<SectionPayload<TimelinePayload>>>(
        `/api/snapshots/${id}/timeline${query({ metric })}`,
      );
      return body.data;
    },

    ego: async (id: string, q: EgoQuery): Promise<EgoPayload> => {
      const body = await client.get<Envelope<EgoPayload>>(
        `/api/snapshots/${id}/network/ego${query({ ...q })}`,
      );
      return body.data;
    },

    influencers: async (id: string, kind = 'mention'): Promise<SectionPayload<InfluencersPayload>> => {
      const body = await client.get<Envelope<SectionPayload<InfluencersPayload>>>(
        `/api/snapshots/${id}/influencers${query({ kind })}`,
      );
      return body.data;
    },

    communities: async (id: string, kind = 'mention'): Promise<SectionPayload<CommunitiesPayload>> => {
      const body = await client.get<Envelope<SectionPayload<CommunitiesPayload>>>(
        `/api/snapshots/${id}/communities${query({ kind })}`,
      );
      return body.data;
    },

    communityCard: async (id: string, communityId: number, kind = 'mention'): Promise<SectionPayload<CommunityCard>> => {
      const body = await client.get<Envelope<SectionPayload<CommunityCard>>>(
        `/api/snapshots/${id}/communities/${communityId}${query({ kind })}`,
      );
      return body.data;
    },

    calibration: async (id: string): Promise<SectionPayload<CalibrationPayload>> => {
      const body = await client.get<Envelope<SectionPayload<CalibrationPayload>>>(
        `/api/snapshots/${id}/calibration`,
      );
      return body.data;
    },
  };
}

// Session endpoints are the only writes the service accepts. Every method
// returns the server's view of the session; callers must treat that as the
// single source of truth.
export function sessionApi(client: HttpClient) {
  return {
    create: async (snapshotId: string, seeds: string[]): Promise<SessionView> => {
      const body = await client.post<Envelope<SessionView>>(
        `/api/snapshots/${snapshotId}/botmatch/session`,
        { seeds },
      );
      return body.data;
    },

    fetch: async (snapshotId: string, sessionId: string): Promise<SessionView> => {
      const body = await client.get<Envelope<SessionView>>(
        `/api/snapshots/${snapshotId}/botmatch/session/${sessionId}`,
      );
      return body.data;
    },

    step: async (snapshotId: string, sessionId: string, topN = 20): Promise<SessionView> => {
      const body = await client.post<Envelope<SessionView>>(
        `/api/snapshots/${snapshotId}/botmatch/session/${sessionId}/step`,
        { top_n: topN },
      );
      return body.data;
    },

    accept: async (snapshotId: string, sessionId: string, ids: string[]): Promise<SessionView> => {
      const body = await client.post<Envelope<SessionView>>(
        `/api/snapshots/${snapshotId}/botmatch/session/${sessionId}/accept`,
        { ids },
      );
      return body.data;
    },

    reject: async (snapshotId: string, sessionId: string, ids: string[]): Promise<SessionView> => {
      const body = await client.post<Envelope<SessionView>>(
        `/api/snapshots/${snapshotId}/botmatch/session/${sessionId}/reject`,
        { ids },
      );
      return body.data;
    },
  };
}

export type SnapshotApi = ReturnType<typeof snapshotApi>;
export type SessionApi = ReturnType<typeof sessionApi>;
