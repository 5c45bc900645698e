import { spawn, type ChildProcess } from "node:child_process";
import * as net from "node:net";
import * as path from "node:path";
import * as readline from "node:readline";
import { fileURLToPath } from "node:url";

const SERVER = path.resolve(
  path.dirname(fileURLToPath(import.meta.url)),
  "..",
  "dist",
  "server.js",
);

export interface RunningServer {
  port: number;
  proc: ChildProcess;
  stop(): void;
}

export function startServer(): Promise<RunningServer> {
  return new Promise((resolve, reject) => {
    const proc = spawn("node", [SERVER, "--port", "0"], { stdio: ["ignore", "pipe", "pipe"] });
    proc.once("error", reject);
    const rl = readline.createInterface({ input: proc.stdout! });
    rl.once("line", (line) => {
      const match = /^LISTENING (\d+)$/.exec(line.trim());
      if (!match) {
        reject(new Error(`unexpected startup line: ${line}`));
        return;
      }
      resolve({ port: Number(match[1]), proc, stop: () => proc.kill() });
    });
  });
}

/** Minimal line-protocol client used by the tests. */
export class LineClient {
  private socket: net.Socket;
  private pending: Array<(line: string) => void> = [];
  private nextId = 0;

  private constructor(socket: net.Socket) {
    this.socket = socket;
    const rl = readline.createInterface({ input: socket });
    rl.on("line", (line) => {
      const waiter = this.pending.shift();
      if (waiter) waiter(line);
    });
  }

  static connect(port: number): Promise<LineClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host: "127.0.0.1", port }, () =>
        resolve(new LineClient(socket)),
      );
      socket.once("error", reject);
    });
  }

  /** Sends a raw line and awaits one response line. */
  raw(line: string): Promise<any> {
    return new Promise((resolve) => {
      this.pending.push((response) => resolve(JSON.parse(response)));
      this.socket.write(line + "\n");
    });
  }

  request(op: string, extra: Record<string, unknown> = {}): Promise<any> {
    this.nextId += 1;
    return this.raw(JSON.stringify({ id: this.nextId, op, ...extra }));
  }

  close(): void {
    this.socket.destroy();
  }
}
