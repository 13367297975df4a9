/**
 * Record sinks. FileSink appends synchronously (hook callers are already
 * sequential per session, and sync appends keep ordering trivial).
 * TcpSink speaks the monitor's line protocol: send OROBORO/1, expect OK,
 * then one record per newline-terminated line. Every wait is bounded.
 */

import { appendFileSync } from 'node:fs';
import * as net from 'node:net';

export interface RecordSink {
  send(line: string): Promise<void>;
  close(): Promise<void>;
}

export const HANDSHAKE = 'OROBORO/1';

export class NullSink implements RecordSink {
  async send(): Promise<void> {}
  async close(): Promise<void> {}
}

export class FileSink implements RecordSink {
  constructor(private readonly path: string) {}

  async send(line: string): Promise<void> {
    appendFileSync(this.path, line + '\n', { encoding: 'utf-8' });
  }

  async close(): Promise<void> {}
}

export class TcpSink implements RecordSink {
  private socket: net.Socket | null = null;

  constructor(
    private readonly host: string,
    private readonly port: number,
    private readonly timeoutMs: number,
  ) {}

  /** Connect and complete the version handshake. */
  async open(): Promise<void> {
    const socket = new net.Socket();
    socket.setNoDelay(true);
    await this.bounded(
      new Promise<void>((resolve, reject) => {
        socket.once('error', reject);
        socket.connect(this.port, this.host, () => resolve());
      }),
      'connect',
      socket,
    );
    const reply = this.readLine(socket);
    socket.write(HANDSHAKE + '\n');
    const answer = await this.bounded(reply, 'handshake', socket);
    if (answer !== 'OK') {
      socket.destroy();
      throw new Error(`monitor refused handshake: ${JSON.stringify(answer)}`);
    }
    this.socket = socket;
  }

  async send(line: string): Promise<void> {
    const socket = this.socket;
    if (socket === null) {
      throw new Error('tcp sink is not connected');
    }
    await this.bounded(
      new Promise<void>((resolve, reject) => {
        socket.once('error', reject);
        socket.write(line + '\n', (err) => {
          socket.removeListener('error', reject);
          if (err) reject(err);
          else resolve();
        });
      }),
      'send',
      socket,
    );
  }

  async close(): Promise<void> {
    const socket = this.socket;
    this.socket = null;
    if (socket === null) return;
    await new Promise<void>((resolve) => {
      socket.end(() => resolve());
    });
    socket.destroy();
  }

  private readLine(socket: net.Socket): Promise<string> {
    return new Promise((resolve, reject) => {
      let buffer = '';
      const onData = (chunk: Buffer) => {
        buffer += chunk.toString('utf-8');
        const newline = buffer.indexOf('\n');
        if (newline >= 0) {
          socket.removeListener('data', onData);
          socket.removeListener('error', reject);
          resolve(buffer.slice(0, newline).trim());
        }
      };
      socket.on('data', onData);
      socket.once('error', reject);
    });
  }

  private async bounded<T>(work: Promise<T>, what: string, socket: net.Socket): Promise<T> {
    let timer: NodeJS.Timeout | undefined;
    const timeout = new Promise<never>((_, reject) => {
      timer = setTimeout(() => {
        socket.destroy();
        reject(new Error(`${what} timed out after ${this.timeoutMs} ms`));
      }, this.timeoutMs);
    });
    try {
      return await Promise.race([work, timeout]);
    } finally {
      clearTimeout(timer);
    }
  }
}
