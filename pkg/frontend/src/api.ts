// Command channel: the engine is the source of truth, so callers only apply
// the threshold returned in the 200 acknowledgment.

export interface CommandResult {
  ok: boolean;
  threshold?: number;
  error?: string;
}

export async function submitThreshold(
  baseUrl: string,
  value: number,
  fetchFn: typeof fetch = fetch,
): Promise<CommandResult> {
  let response: Response;
  try {
    response = await fetchFn(`${baseUrl}/command`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ set_threshold: value }),
    });
  } catch (err) {
    return { ok: false, error: String(err) };
  }
  let body: { threshold?: number; error?: string } = {};
  try {
    body = await response.json();
  } catch {
    // fall through with empty body
  }
  if (!response.ok) {
    return { ok: false, error: body.error ?? `HTTP ${response.status}` };
  }
  if (typeof body.threshold !== 'number') {
    return { ok: false, error: 'malformed acknowledgment' };
  }
  return { ok: true, threshold: body.threshold };
}

export async function fetchStatus(
  baseUrl: string,
  fetchFn: typeof fetch = fetch,
): Promise<{ run_id: string; epoch: number; threshold: number } | null> {
  try {
    const response = await fetchFn(`${baseUrl}/status`);
    if (!response.ok) return null;
    return await response.json();
  } catch {
    return null;
  }
}
