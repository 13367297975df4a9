/**
 * Emitter configuration, usually read from the environment:
 *
 *   OROBORO_SINK   file:/path/to/events.jsonl  (default ./oroboro-events.jsonl)
 *                  tcp:host:port
 *   OROBORO_AGENT  name stamped on every emitted event
 *   OROBORO_STRICT "1"/"true" to fail loudly instead of degrading to a no-op
 */

export type Sink =
  | { kind: 'file'; path: string }
  | { kind: 'tcp'; host: string; port: number };

export interface EmitterConfig {
  sink: Sink;
  agentName: string;
  strict: boolean;
  /** clock returning the event timestamp; defaults to wall time in seconds */
  now?: () => number;
  /** bound on connect/handshake/send waits (default 1000 ms) */
  sendTimeoutMs?: number;
}

export const DEFAULT_SINK = 'file:./oroboro-events.jsonl';
export const DEFAULT_SEND_TIMEOUT_MS = 1000;

export function parseSink(text: string): Sink {
  if (text.startsWith('file:')) {
    const path = text.slice('file:'.length);
    if (!path) {
      throw new Error(`empty file sink path in ${JSON.stringify(text)}`);
    }
    return { kind: 'file', path };
  }
  if (text.startsWith('tcp:')) {
    const rest = text.slice('tcp:'.length);
    const sep = rest.lastIndexOf(':');
    const port = Number(rest.slice(sep + 1));
    if (sep <= 0 || !Number.isInteger(port) || port < 0 || port > 65535) {
      throw new Error(`bad tcp sink ${JSON.stringify(text)}; expected tcp:host:port`);
    }
    return { kind: 'tcp', host: rest.slice(0, sep), port };
  }
  throw new Error(`unknown sink ${JSON.stringify(text)}; expected file:... or tcp:host:port`);
}

export function configure(env: NodeJS.ProcessEnv = process.env): EmitterConfig {
  const strictRaw = (env.OROBORO_STRICT ?? '').toLowerCase();
  return {
    sink: parseSink(env.OROBORO_SINK ?? DEFAULT_SINK),
    agentName: env.OROBORO_AGENT ?? '',
    strict: strictRaw === '1' || strictRaw === 'true',
  };
}
