/**
 * Reference external system-under-test adapter.
 *
 * Speaks newline-delimited single-line JSON over stdin/stdout:
 *
 *   on start:        {"type":"hello","dims":N}
 *   request:         {"type":"eval","id":I,"params":[...]}
 *   response:        {"type":"result","id":I,"score":S}
 *                    or {"type":"error","id":I,"message":"..."}
 *   shutdown:        {"type":"shutdown"}   -> clean exit 0
 *
 * Requests are handled strictly in order (the protocol is lock-step).
 * Malformed or unknown requests get an error response and the adapter keeps
 * serving. All logging goes to stderr; stdout carries protocol lines only.
 *
 * Scores come from the analytic landscape named in the config file
 * (see landscapes.ts). To mount a real simulator+model stack instead,
 * replace `buildScoreFn` with any ScoreFn: a function from a parameter
 * vector of length `dims` to a finite scalar score (e.g. render an image
 * pair from the parameters, run the model under test, return its loss or
 * similarity).
 *
 * Usage: node dist/main.js CONFIG.json
 *   CONFIG.json: {"landscape": "basin", "params": {...}, "dims": N}
 */
import * as fs from 'fs';
import * as readline from 'readline';

import { buildScoreFn, parseConfig, ScoreFn } from './landscapes';

function send(obj: unknown): void {
  process.stdout.write(JSON.stringify(obj) + '\n');
}

function sendError(id: number, message: string): void {
  send({ type: 'error', id, message });
}

function serve(dims: number, score: ScoreFn): void {
  send({ type: 'hello', dims });
  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on('line', (line: string) => {
    const trimmed = line.trim();
    if (!trimmed) return;
    let msg: unknown;
    try {
      msg = JSON.parse(trimmed);
    } catch {
      sendError(-1, `malformed request: not valid JSON`);
      return;
    }
    if (typeof msg !== 'object' || msg === null || Array.isArray(msg)) {
      sendError(-1, 'malformed request: expected an object');
      return;
    }
    const { type, id, params } = msg as { type?: unknown; id?: unknown; params?: unknown };
    const reqId = typeof id === 'number' && Number.isInteger(id) ? id : -1;
    if (type === 'shutdown') {
      process.exit(0);
    }
    if (type !== 'eval') {
      sendError(reqId, `unknown message type '${String(type)}'`);
      return;
    }
    if (reqId === -1) {
      sendError(-1, 'eval request without an integer id');
      return;
    }
    if (!Array.isArray(params) || params.length !== dims
        || !params.every((x) => typeof x === 'number' && Number.isFinite(x))) {
      sendError(reqId, `params must be ${dims} finite numbers`);
      return;
    }
    send({ type: 'result', id: reqId, score: score(params as number[]) });
  });
  rl.on('close', () => {
    process.exit(0);
  });
}

function main(): void {
  const configPath = process.argv[2];
  if (!configPath) {
    process.stderr.write('usage: node dist/main.js CONFIG.json\n');
    process.exit(2);
  }
  let config;
  try {
    config = parseConfig(JSON.parse(fs.readFileSync(configPath, 'utf8')));
  } catch (err) {
    process.stderr.write(`sut-adapter: invalid config: ${(err as Error).message}\n`);
    process.exit(2);
  }
  process.stderr.write(
    `sut-adapter: serving '${config.landscape}' over ${config.dims} dims\n`);
  serve(config.dims, buildScoreFn(config));
}

main();
