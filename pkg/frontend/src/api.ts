/**
 * Thin typed client over the analysis service HTTP API. Every number the UI
 * shows comes out of one of these calls; the client does no math beyond
 * serialization.
 */

export interface StructuredError {
  code: string;
  message: string;
  field?: string;
}

export class ServiceError extends Error {
  constructor(public status: number, public detail: StructuredError) {
    super(`${detail.code}: ${detail.message}`);
  }
}

export interface ModelMeta {
  layer_sizes: number[];
  activations: string[];
  dropout_rates: number[];
  parameters: Array<{ name: string; lo: number; hi: number }>;
  training: Record<string, unknown>;
  model_hash: string;
  n_instances: number;
}

export interface UncertainPrediction {
  mean: number[];
  std: number[];
  T: number;
  seed: number;
}

export type OptimizeOrigin = "max" | "min" | "maxmin";

export interface OptimizeRequest {
  max_mask: number[];
  min_mask: number[];
  anchor: number[];
  lambda?: number;
  steps?: number;
  step_size?: number;
}

export interface OptimizeResponse {
  optimum: number[];
  trajectory: number[];
  profile: number[];
  objective: number;
  origin: OptimizeOrigin;
}

export interface InstanceResponse {
  id: number;
  config: number[];
  profile: number[];
  predicted: number[];
  pf: number;
}

export interface TreeNode {
  id: number;
  height: number;
  children?: TreeNode[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail: StructuredError = { code: "http_error", message: resp.statusText };
      try {
        const body = await resp.json();
        if (body && body.error) detail = body.error as StructuredError;
      } catch {
        // non-JSON error body; keep the fallback detail
      }
      throw new ServiceError(resp.status, detail);
    }
    return resp;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return resp.json() as Promise<T>;
  }

  modelMeta(): Promise<ModelMeta> {
    return this.getJson("/model/meta");
  }

  async predict(config: number[]): Promise<number[]> {
    const body = await this.postJson<{ profile: number[] }>("/predict", { config });
    return body.profile;
  }

  predictUncertain(config: number[], T?: number, seed?: number): Promise<UncertainPrediction> {
    return this.postJson("/predict_uncertain", { config, T, seed });
  }

  sensitivity(config: number[], mask?: number[]): Promise<{
    map: number[][];
    averages: number[];
    averages_selected?: number[];
  }> {
    return this.postJson("/sensitivity", { config, mask });
  }

  optimize(req: OptimizeRequest): Promise<OptimizeResponse> {
    return this.postJson("/optimize", req);
  }

  async diff(configA: number[], configB: number[]): Promise<number[]> {
    const body = await this.postJson<{ delta: number[] }>("/diff", { configA, configB });
    return body.delta;
  }

  instance(id: number): Promise<InstanceResponse> {
    return this.getJson(`/instance/${id}`);
  }

  clustersSpatial(instance: number, mode: "value" | "uncertainty", T?: number, seed?: number):
      Promise<{ mode: string; tree: TreeNode }> {
    const params = new URLSearchParams({ instance: String(instance), mode });
    if (T !== undefined) params.set("T", String(T));
    if (seed !== undefined) params.set("seed", String(seed));
    return this.getJson(`/clusters/spatial?${params}`);
  }

  clustersParams(instance: number): Promise<{ tree: TreeNode }> {
    return this.getJson(`/clusters/params?instance=${instance}`);
  }

  weights(layer: number, sorted = false): Promise<{
    layer: number;
    shape: number[];
    sorted: boolean;
    matrix: number[][];
  }> {
    return this.getJson(`/weights/${layer}?sorted=${sorted ? 1 : 0}`);
  }

  weightsRow(layer: number, row: number): Promise<{ layer: number; row: number; values: number[] }> {
    return this.getJson(`/weights/${layer}/row/${row}`);
  }

  weightsPattern(layer: number, window: [number, number], quantile?: number): Promise<{
    layer: number;
    indices: number[];
    hidden_sensitivity: number[] | null;
  }> {
    return this.postJson("/weights/pattern", { layer, window, quantile });
  }

  saveParams(config: number[], name?: string, origin?: string): Promise<{
    index: number;
    name: string;
    origin: string;
  }> {
    return this.postJson("/params/save", { config, name, origin });
  }

  listParams(): Promise<{
    entries: Array<{ index: number; name: string; config: number[]; origin: string }>;
  }> {
    return this.getJson("/params/list");
  }

  async deleteParams(index: number): Promise<number> {
    const resp = await this.request(`/params/${index}`, { method: "DELETE" });
    const body = (await resp.json()) as { remaining: number };
    return body.remaining;
  }

  /** Raw export bytes, byte-identical to what the server sends. */
  async exportParams(): Promise<Uint8Array> {
    const resp = await this.request("/params/export");
    return new Uint8Array(await resp.arrayBuffer());
  }
}
