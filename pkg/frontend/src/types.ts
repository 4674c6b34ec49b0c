// Wire types mirroring the gateway's JSON documents.  The client never
// invents chemistry: everything rendered comes from these payloads.

export interface SuggestionDoc {
  precursors: string[];
  precursor_buyable: boolean[];
  precursor_known: boolean[];
  rank_score: number;
  plausibility: number;
  strategy_provenance: string[];
  template_ids: string[];
  precedent_reaction_ids: string[];
  reacting_atoms: number[] | null;
  cluster_id: number | null;
}

export interface ExpandResponse {
  target: string;
  suggestions: SuggestionDoc[];
  top_n: number;
}

export interface JobSubmitResponse {
  job_id: string;
  status: string;
}

export interface RouteMetricsDoc {
  depth: number;
  reaction_count: number;
  longest_linear_sequence: number;
  avg_plausibility: number;
  avg_template_score: number;
  atom_economy: number;
  starting_material_cost: number;
  cost_is_lower_bound: boolean;
}

export interface GraphNodeDoc {
  type: 'chemical' | 'reaction';
  smiles?: string;
  id?: string;
  attributes: Record<string, unknown>;
  children: GraphNodeDoc[];
  metrics?: RouteMetricsDoc;
}

export interface TreeSearchResult {
  graph: { target: string; stats: Record<string, unknown>; tree: GraphNodeDoc };
  routes: GraphNodeDoc[];
  stats: Record<string, unknown>;
}

export interface JobRecordDoc {
  job_id: string;
  kind: string;
  status: 'started' | 'completed' | 'failed';
  settings: Record<string, unknown>;
  created_at: number;
  finished_at: number | null;
  error: string | null;
  result_ref: string | null;
  result?: TreeSearchResult | null;
}

export interface StrategySettings {
  max_num_templates?: number;
  max_cum_prob?: number;
  retrosim_k?: number;
  filter_threshold?: number;
  top_n_returned?: number;
  cluster_cutoff?: number;
}

export interface SearchSettings {
  algorithm?: 'mcts' | 'retro_star';
  max_depth?: number;
  max_branching?: number;
  max_chemicals?: number;
  max_price?: number;
  expansion_time_s?: number | null;
  exploration_c?: number;
  return_first?: boolean;
  max_routes?: number;
  random_seed?: number;
  strategies?: string[] | null;
}

export interface StatusDoc {
  modules: Record<string, unknown>;
  jobs: { pending: number };
}
