/**
 * Analytic landscape formulas mirroring the host toolkit's built-in catalog.
 *
 * Parameter schemas and arithmetic structure (ascending accumulation order,
 * shared denominators) match the host exactly; only the exp implementation
 * differs across runtimes, which keeps scores within ~1e-15 relative of the
 * host's values.
 */

export interface BasinParams {
  amplitude: number;
  center: number[];
  scale: number;
}

export interface AdapterConfig {
  landscape: string;
  params: Record<string, unknown>;
  dims: number;
}

export type ScoreFn = (params: number[]) => number;

function isFiniteNumber(x: unknown): x is number {
  return typeof x === 'number' && Number.isFinite(x);
}

function isNumberVector(x: unknown, length?: number): x is number[] {
  if (!Array.isArray(x) || x.length === 0) return false;
  if (length !== undefined && x.length !== length) return false;
  return x.every(isFiniteNumber);
}

function basinScore(params: BasinParams): ScoreFn {
  const denom = 2.0 * (params.scale * params.scale);
  return (p) => {
    let acc = 0.0;
    for (let i = 0; i < p.length; i++) {
      const d = p[i] - params.center[i];
      acc += d * d;
    }
    return params.amplitude * Math.exp(-(acc / denom));
  };
}

function parseBasin(raw: Record<string, unknown>, dims: number, where: string): BasinParams {
  const { amplitude, center, scale } = raw as Partial<BasinParams>;
  if (!isFiniteNumber(amplitude)) throw new Error(`${where}: amplitude must be a finite number`);
  if (!isNumberVector(center, dims)) throw new Error(`${where}: center must be a vector of ${dims} numbers`);
  if (!isFiniteNumber(scale) || scale <= 0) throw new Error(`${where}: scale must be > 0`);
  return { amplitude, center, scale };
}

/** Build the scoring function for a validated adapter config. */
export function buildScoreFn(config: AdapterConfig): ScoreFn {
  const { landscape, params, dims } = config;
  if (!Number.isInteger(dims) || dims < 1) {
    throw new Error('dims must be a positive integer');
  }
  switch (landscape) {
    case 'basin':
      return basinScore(parseBasin(params, dims, 'basin'));
    case 'multi_basin': {
      const raw = params.basins;
      if (!Array.isArray(raw) || raw.length === 0) {
        throw new Error("multi_basin: 'basins' must be a non-empty list");
      }
      const fns = raw.map((b, k) =>
        basinScore(parseBasin(b as Record<string, unknown>, dims, `basins[${k}]`)));
      return (p) => {
        let score = fns[0](p);
        for (let j = 1; j < fns.length; j++) {
          score = Math.max(score, fns[j](p));
        }
        return score;
      };
    }
    case 'ridge': {
      const { amplitude, direction, offset, scale } = params as {
        amplitude?: unknown; direction?: unknown; offset?: unknown; scale?: unknown;
      };
      if (!isFiniteNumber(amplitude)) throw new Error('ridge: amplitude must be a finite number');
      if (!isNumberVector(direction, dims) || direction.every((u) => u === 0)) {
        throw new Error(`ridge: direction must be a non-zero vector of ${dims} numbers`);
      }
      if (!isFiniteNumber(offset)) throw new Error('ridge: offset must be a finite number');
      if (!isFiniteNumber(scale) || scale <= 0) throw new Error('ridge: scale must be > 0');
      const denom = 2.0 * (scale * scale);
      return (p) => {
        let t = p[0] * direction[0];
        for (let i = 1; i < p.length; i++) {
          t = t + p[i] * direction[i];
        }
        const dev = t - offset;
        return amplitude * Math.exp(-((dev * dev) / denom));
      };
    }
    case 'edge_trap': {
      const { gain, half_widths: halfWidths, basin } = params as {
        gain?: unknown; half_widths?: unknown; basin?: unknown;
      };
      if (!isFiniteNumber(gain) || gain <= 0) throw new Error('edge_trap: gain must be > 0');
      if (!isNumberVector(halfWidths, dims) || halfWidths.some((h) => h <= 0)) {
        throw new Error(`edge_trap: half_widths must be ${dims} positive numbers`);
      }
      const basinFn = basinScore(parseBasin(basin as Record<string, unknown>, dims, 'edge_trap.basin'));
      return (p) => {
        let edge = Math.abs(p[0]) / halfWidths[0];
        for (let i = 1; i < p.length; i++) {
          edge = Math.max(edge, Math.abs(p[i]) / halfWidths[i]);
        }
        return Math.max(gain * edge, basinFn(p));
      };
    }
    case 'flat_safe': {
      const { value } = params as { value?: unknown };
      if (!isFiniteNumber(value)) throw new Error('flat_safe: value must be a finite number');
      return () => value;
    }
    default:
      throw new Error(`unknown landscape '${landscape}'`);
  }
}

export function parseConfig(doc: unknown): AdapterConfig {
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new Error('config must be a JSON object');
  }
  const { landscape, params, dims } = doc as Partial<AdapterConfig>;
  if (typeof landscape !== 'string') throw new Error("config: 'landscape' must be a string");
  if (typeof params !== 'object' || params === null) throw new Error("config: 'params' must be an object");
  if (!Number.isInteger(dims) || (dims as number) < 1) throw new Error("config: 'dims' must be a positive integer");
  const config: AdapterConfig = { landscape, params: params as Record<string, unknown>, dims: dims as number };
  buildScoreFn(config); // validate eagerly
  return config;
}
