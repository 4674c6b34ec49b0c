// Thin typed client for the gateway HTTP API.  The fetch implementation
// is injectable so tests can replay recorded fixtures.

import type {
  ExpandResponse,
  JobRecordDoc,
  JobSubmitResponse,
  SearchSettings,
  StatusDoc,
  StrategySettings,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: unknown,
  ) {
    super(`gateway returned ${status}`);
  }
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  expand(
    smiles: string,
    strategies: string[] = ['template_relevance'],
    config?: StrategySettings,
  ): Promise<ExpandResponse> {
    return this.post('/api/retro/expand', { smiles, strategies, config });
  }

  canonicalize(smiles: string): Promise<{ smiles: string }> {
    return this.post('/api/chem/canonicalize', { smiles });
  }

  submitTreeSearch(smiles: string, config?: SearchSettings): Promise<JobSubmitResponse> {
    return this.post('/api/tree-search/call-async', { smiles, config });
  }

  getResult(jobId: string): Promise<JobRecordDoc> {
    return this.request(`/api/results/${jobId}`);
  }

  listResults(): Promise<JobRecordDoc[]> {
    return this.request('/api/results');
  }

  banChemical(smiles: string): Promise<string[]> {
    return this.post('/api/banlist/chemicals', { smiles });
  }

  unbanChemical(smiles: string): Promise<string[]> {
    return this.request(
      `/api/banlist/chemicals?smiles=${encodeURIComponent(smiles)}`,
      { method: 'DELETE' },
    );
  }

  listBannedChemicals(): Promise<string[]> {
    return this.request('/api/banlist/chemicals');
  }

  banReaction(rxnSmiles: string): Promise<string[]> {
    return this.post('/api/banlist/reactions', { smiles: rxnSmiles });
  }

  status(): Promise<StatusDoc> {
    return this.request('/api/status');
  }
}
