/** Wire types mirroring the session service's JSON schema. */

export interface ProblemInfo {
  id: string;
  components: string[];
}

export interface PartitionSizes {
  dplus: number;
  dminus: number;
  dzero: number;
}

export interface QueryView {
  prop: string;
  wire: string;
  token: string;
  partition_sizes: PartitionSizes;
  scores: Record<string, number | null>;
  p_yes: number;
}

export interface HistoryRecord {
  step: number;
  query: string;
  token: string;
  partition_sizes: PartitionSizes;
  scores: Record<string, number | null>;
  answer: "true" | "false" | "skip";
  eliminated: string[][];
  remaining: string[][];
  posteriors: number[];
  ts: number;
}

export interface Snapshot {
  session_id: string;
  mode: "dynamic" | "static";
  heuristic: string;
  step: number;
  query: QueryView | null;
  partition_sizes: PartitionSizes | null;
  scores: Record<string, number | null> | null;
  answer: null;
  eliminated: string[][];
  remaining: string[][];
  posteriors: number[];
  stopped: boolean;
  stop_reason: string | null;
  final_diagnoses: string[][] | null;
  history: HistoryRecord[];
}

export interface SessionOptions {
  problem_id: string;
  heuristic: string;
  mode: "dynamic" | "static";
  k: number;
  sigma: number;
  sampler: string;
  seed: number;
}

export type AnswerValue = true | false | "skip";
