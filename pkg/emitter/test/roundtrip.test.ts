/**
 * Round-trip against the monitor: events emitted by the hooks must be
 * accepted by `oroboro check`, and the TCP sink must deliver verdicts
 * identical to the file path.
 */

import { ChildProcess, spawn, spawnSync } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';

import { describe, expect, it } from 'vitest';

import { EmitterConfig } from '../src/config';
import { ToolCallEmitter } from '../src/emitter';

const PYTHON = process.env.PYTHON ?? 'python3';
const REPO_ROOT = resolve(__dirname, '..', '..');
const SPEC = join(REPO_ROOT, 'src', 'oroboro', 'specs', 'three-agent.ote');

// the correct conversation: greeting delegation, hello, return, lookup
const SCRIPT: Array<[string, Record<string, unknown>]> = [
  ['transfer_to_agent', { agent_name: 'greeting_agent' }],
  ['say_hello', {}],
  ['transfer_to_agent', { agent_name: 'weather_agent_v2' }],
  ['get_weather', { city: 'New York' }],
];

function fixedClock(): () => number {
  let ticks = 0;
  return () => 10 * ++ticks;
}

async function emitScript(emitter: ToolCallEmitter): Promise<void> {
  for (const [tool, args] of SCRIPT) {
    await emitter.emitBeforeToolCall(tool, args);
  }
  await emitter.close();
}

function runCheck(eventsPath: string) {
  return spawnSync(PYTHON, ['-m', 'oroboro', 'check', SPEC, eventsPath], {
    encoding: 'utf-8',
    timeout: 60_000,
  });
}

function waitForPort(proc: ChildProcess): Promise<{ host: string; port: number }> {
  return new Promise((resolvePort, reject) => {
    let buffer = '';
    proc.stderr!.on('data', (chunk: Buffer) => {
      buffer += chunk.toString('utf-8');
      const match = buffer.match(/listening on ([^:\s]+):(\d+)/);
      if (match) resolvePort({ host: match[1], port: Number(match[2]) });
    });
    proc.once('error', reject);
    proc.once('exit', (code) => reject(new Error(`monitor exited early (${code}): ${buffer}`)));
  });
}

function collectExit(proc: ChildProcess): Promise<{ code: number | null; stdout: string }> {
  let stdout = '';
  proc.stdout!.on('data', (chunk: Buffer) => {
    stdout += chunk.toString('utf-8');
  });
  return new Promise((resolveExit) => {
    proc.on('exit', (code) => resolveExit({ code, stdout }));
  });
}

describe('round-trip through the monitor', () => {
  it('file sink: emitted events replay to a te1 match at (1,3), exit 0', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'oroboro-rt-'));
    const path = join(dir, 'events.jsonl');
    const config: EmitterConfig = {
      sink: { kind: 'file', path },
      agentName: 'three-agent-demo',
      strict: true,
      now: fixedClock(),
    };
    await emitScript(await ToolCallEmitter.create(config));

    const result = runCheck(path);
    expect(result.status).toBe(0);
    expect(result.stdout).toContain('MATCH te1');
    expect(result.stdout).toContain('>> (1/3)');
    expect(result.stdout).not.toContain('FAILURE');
  });

  it('after-hook events ride along but do not disturb the sampled verdicts', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'oroboro-rt-'));
    const before = join(dir, 'before-only.jsonl');
    const both = join(dir, 'both-hooks.jsonl');

    const emitterBefore = await ToolCallEmitter.create({
      sink: { kind: 'file', path: before },
      agentName: 'three-agent-demo',
      strict: true,
      now: fixedClock(),
    });
    await emitScript(emitterBefore);

    // realistic instrumentation: the after hook fires for every call too
    const clock = fixedClock();
    const emitterBoth = await ToolCallEmitter.create({
      sink: { kind: 'file', path: both },
      agentName: 'three-agent-demo',
      strict: true,
      now: clock,
    });
    for (const [tool, args] of SCRIPT) {
      await emitterBoth.emitBeforeToolCall(tool, args);
      await emitterBoth.emitAfterToolCall(tool, args);
    }
    await emitterBoth.close();

    const beforeResult = runCheck(before);
    const bothResult = runCheck(both);
    expect(beforeResult.status).toBe(0);
    expect(bothResult.status).toBe(0);
    expect(bothResult.stdout).toContain('>> (1/3)');
    // identical sampled behavior: only the timestamp tuples differ
    const stripTs = (text: string) =>
      text.replace(/ \(\d+(?:\.\d+)?\/\d+(?:\.\d+)?\)(?= \d \{)/g, '');
    expect(stripTs(bothResult.stdout)).toBe(stripTs(beforeResult.stdout));
  });

  it('tcp sink: handshake completes and verdicts equal the file path byte-for-byte', async () => {
    const dir = mkdtempSync(join(tmpdir(), 'oroboro-rt-'));
    const path = join(dir, 'events.jsonl');
    await emitScript(
      await ToolCallEmitter.create({
        sink: { kind: 'file', path },
        agentName: 'three-agent-demo',
        strict: true,
        now: fixedClock(),
      }),
    );
    const fileOutput = runCheck(path);
    expect(fileOutput.status).toBe(0);

    const proc = spawn(PYTHON, ['-m', 'oroboro', 'monitor', SPEC, 'tcp:127.0.0.1:0'], {
      stdio: ['ignore', 'pipe', 'pipe'],
    });
    const finished = collectExit(proc);
    const { host, port } = await waitForPort(proc);
    await emitScript(
      await ToolCallEmitter.create({
        sink: { kind: 'tcp', host, port },
        agentName: 'three-agent-demo',
        strict: true,
        now: fixedClock(),
        sendTimeoutMs: 5000,
      }),
    );
    const live = await finished;
    expect(live.code).toBe(0);
    expect(live.stdout).toBe(fileOutput.stdout);
    expect(live.stdout).toContain('MATCH te1');
  }, 30_000);
});
