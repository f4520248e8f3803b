/**
 * Session persistence: the registration token lives in memory and mirrors to
 * storage so a reload keeps the session; logout clears both.
 */

import type { Session } from "./api.js";

export interface StringStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const KEY = "stockbench.session";

export class MemoryStorage implements StringStorage {
  private data = new Map<string, string>();
  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export class SessionStore {
  private current: Session | null = null;

  constructor(private readonly storage: StringStorage) {
    const raw = storage.getItem(KEY);
    if (raw) {
      try {
        this.current = JSON.parse(raw) as Session;
      } catch {
        storage.removeItem(KEY);
      }
    }
  }

  get session(): Session | null {
    return this.current;
  }

  save(session: Session): void {
    this.current = session;
    this.storage.setItem(KEY, JSON.stringify(session));
  }

  clear(): void {
    this.current = null;
    this.storage.removeItem(KEY);
  }
}
