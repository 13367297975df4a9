/**
 * Tool-call hook shim: serialize before/after tool-call events onto the
 * monitor's JSONL wire format, via a file or the live TCP protocol.
 *
 * Monitoring must never alter agent behavior: unless strict is set, any
 * sink failure silently degrades the emitter to a no-op, and no wait
 * exceeds the configured send timeout.
 */

import { configure, DEFAULT_SEND_TIMEOUT_MS, EmitterConfig } from './config';
import { FileSink, NullSink, RecordSink, TcpSink } from './sinks';

export type EventType = 'tool_call_pre' | 'tool_call_post' | 'custom';

export interface EventRecord {
  seq: number;
  ts: number;
  type: EventType;
  tool: string;
  agent: string;
  args: Record<string, string>;
}

export function flattenArgs(args: Record<string, unknown>): Record<string, string> {
  const flat: Record<string, string> = {};
  for (const [key, value] of Object.entries(args)) {
    flat[key] = typeof value === 'string' ? value : JSON.stringify(value) ?? '';
  }
  return flat;
}

export class ToolCallEmitter {
  private seq = 0;
  private sink: RecordSink;
  private readonly config: EmitterConfig;

  private constructor(config: EmitterConfig, sink: RecordSink) {
    this.config = config;
    this.sink = sink;
  }

  /**
   * Resolve the configured sink. An unreachable TCP sink throws when
   * strict, otherwise yields a silent no-op emitter.
   */
  static async create(config: EmitterConfig = configure()): Promise<ToolCallEmitter> {
    const timeout = config.sendTimeoutMs ?? DEFAULT_SEND_TIMEOUT_MS;
    if (config.sink.kind === 'file') {
      return new ToolCallEmitter(config, new FileSink(config.sink.path));
    }
    const sink = new TcpSink(config.sink.host, config.sink.port, timeout);
    try {
      await sink.open();
    } catch (err) {
      if (config.strict) throw err;
      return new ToolCallEmitter(config, new NullSink());
    }
    return new ToolCallEmitter(config, sink);
  }

  async emitBeforeToolCall(tool: string, args: Record<string, unknown> = {}): Promise<void> {
    await this.emit('tool_call_pre', tool, args);
  }

  async emitAfterToolCall(tool: string, args: Record<string, unknown> = {}): Promise<void> {
    await this.emit('tool_call_post', tool, args);
  }

  private async emit(type: EventType, tool: string, args: Record<string, unknown>): Promise<void> {
    const record: EventRecord = {
      seq: ++this.seq,
      ts: this.config.now ? this.config.now() : Date.now() / 1000,
      type,
      tool,
      agent: this.config.agentName,
      args: flattenArgs(args),
    };
    try {
      await this.sink.send(JSON.stringify(record));
    } catch (err) {
      if (this.config.strict) throw err;
      this.sink = new NullSink(); // degrade once, stay quiet
    }
  }

  async close(): Promise<void> {
    await this.sink.close();
  }
}

let defaultEmitter: Promise<ToolCallEmitter> | null = null;

function sharedEmitter(): Promise<ToolCallEmitter> {
  if (defaultEmitter === null) {
    defaultEmitter = ToolCallEmitter.create();
  }
  return defaultEmitter;
}

/** Hook-shaped module-level functions for frameworks that want plain callables. */
export async function emitBeforeToolCall(
  tool: string,
  args: Record<string, unknown> = {},
): Promise<void> {
  await (await sharedEmitter()).emitBeforeToolCall(tool, args);
}

export async function emitAfterToolCall(
  tool: string,
  args: Record<string, unknown> = {},
): Promise<void> {
  await (await sharedEmitter()).emitAfterToolCall(tool, args);
}

export async function closeEmitter(): Promise<void> {
  if (defaultEmitter !== null) {
    const emitter = await defaultEmitter;
    defaultEmitter = null;
    await emitter.close();
  }
}
