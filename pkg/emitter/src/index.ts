export { configure, parseSink, DEFAULT_SINK, DEFAULT_SEND_TIMEOUT_MS } from './config';
export type { EmitterConfig, Sink } from './config';
export { FileSink, NullSink, TcpSink, HANDSHAKE } from './sinks';
export type { RecordSink } from './sinks';
export {
  ToolCallEmitter,
  closeEmitter,
  emitAfterToolCall,
  emitBeforeToolCall,
  flattenArgs,
} from './emitter';
export type { EventRecord, EventType } from './emitter';
