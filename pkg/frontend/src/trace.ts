/**
 * Trace document model: the line-delimited format the engine consumes.
 *
 * Document layout:
 *
 *     #SMAUG-TRACE v1
 *     META gestureId=... name=... round=... secret=0|1 bgmode=0|1 bg=-|<ref>
 *     TOUCH <timeNs> <pointerId> <pointerNumber> <action> <x> <y> <pressure> <size>
 *     GYRO <timeNs> <v1> <v2> <v3>
 *     ACCEL <timeNs> <v1> <v2> <v3>
 */

export const TRACE_HEADER = '#SMAUG-TRACE v1';

export type TouchAction = 'DOWN' | 'PDOWN' | 'MOVE' | 'PUP' | 'UP';

export interface TouchRecord {
  eventTimeNs: number;
  pointerId: number;
  pointerNumber: number;
  action: TouchAction;
  x: number;
  y: number;
  pressure: number;
  size: number;
}

export interface MotionRecord {
  eventTimeNs: number;
  v: [number, number, number];
}

export interface TraceMeta {
  gestureId: string;
  name: string;
  round: number;
  secretMode: boolean;
  backgroundImageMode: boolean;
  backgroundImageRef: string | null;
}

/** Clamp browser pressure into the schema range; 1.0 when unsupported. */
export function normalizePressure(raw: number | undefined): number {
  if (raw === undefined || !isFinite(raw) || raw <= 0) {
    return 1.0;
  }
  return Math.min(2.0, Math.max(0.0, raw));
}

/**
 * Contact size from pointer geometry, normalized by a reference contact of
 * 100x100 CSS pixels; 0.1 when the platform reports no geometry.
 */
export function normalizeSize(width: number | undefined, height: number | undefined): number {
  if (!width || !height || !isFinite(width) || !isFinite(height)) {
    return 0.1;
  }
  const area = (width * height) / (100 * 100);
  return Math.min(1.0, Math.max(0.0, area));
}

/** Milliseconds from the high-resolution clock to integer nanoseconds. */
export function toNanoseconds(timeMs: number): number {
  return Math.round(timeMs * 1e6);
}

/** Canonical real formatting: 9 significant digits when exact, else full. */
export function formatReal(x: number): string {
  const short = Number(x.toPrecision(9));
  if (short === x) {
    return String(short);
  }
  return String(x);
}

function encodeText(s: string): string {
  // percent-encode everything outside the unreserved set, like a strict
  // encodeURIComponent (which leaves !'()* alone)
  return encodeURIComponent(s).replace(
    /[!'()*]/g,
    (c) => '%' + c.charCodeAt(0).toString(16).toUpperCase(),
  );
}

export function buildTraceDocument(
  meta: TraceMeta,
  touch: TouchRecord[],
  gyro: MotionRecord[],
  accel: MotionRecord[],
): string {
  const lines: string[] = [TRACE_HEADER];
  const bg = meta.backgroundImageRef ? encodeText(meta.backgroundImageRef) : '-';
  lines.push(
    `META gestureId=${encodeText(meta.gestureId)} name=${encodeText(meta.name)} ` +
      `round=${meta.round} secret=${meta.secretMode ? 1 : 0} ` +
      `bgmode=${meta.backgroundImageMode ? 1 : 0} bg=${bg}`,
  );
  const touchSorted = [...touch].sort(
    (a, b) => a.eventTimeNs - b.eventTimeNs || a.pointerNumber - b.pointerNumber,
  );
  for (const ev of touchSorted) {
    lines.push(
      `TOUCH ${ev.eventTimeNs} ${ev.pointerId} ${ev.pointerNumber} ${ev.action} ` +
        `${formatReal(ev.x)} ${formatReal(ev.y)} ` +
        `${formatReal(ev.pressure)} ${formatReal(ev.size)}`,
    );
  }
  for (const [tag, events] of [
    ['GYRO', gyro],
    ['ACCEL', accel],
  ] as const) {
    const sorted = [...events].sort((a, b) => a.eventTimeNs - b.eventTimeNs);
    for (const ev of sorted) {
      lines.push(`${tag} ${ev.eventTimeNs} ${ev.v.map(formatReal).join(' ')}`);
    }
  }
  return lines.join('\n') + '\n';
}

/**
 * Local mirror of the engine's trace invariants, used to reject a round
 * client-side before wasting a network post. Returns problems; [] when valid.
 */
export function validateRound(
  touch: TouchRecord[],
  gyro: MotionRecord[],
  accel: MotionRecord[],
): string[] {
  const problems: string[] = [];
  if (touch.length === 0) {
    problems.push('no touch events captured');
    return problems;
  }
  for (const [i, ev] of touch.entries()) {
    if (ev.pressure < 0 || ev.pressure > 2) problems.push(`pressure out of range at ${i}`);
    if (ev.size < 0 || ev.size > 1) problems.push(`size out of range at ${i}`);
    if (ev.x < 0 || ev.y < 0) problems.push(`negative coordinate at ${i}`);
    if (ev.pointerId < 0 || ev.pointerNumber < 0) problems.push(`negative pointer field at ${i}`);
    if (!Number.isInteger(ev.eventTimeNs)) problems.push(`non-integer timestamp at ${i}`);
  }
  const open = new Set<number>();
  const closed = new Set<number>();
  const sorted = [...touch].sort(
    (a, b) => a.eventTimeNs - b.eventTimeNs || a.pointerNumber - b.pointerNumber,
  );
  for (const ev of sorted) {
    if (ev.action === 'DOWN' || ev.action === 'PDOWN') {
      if (open.has(ev.pointerId)) problems.push(`pointer ${ev.pointerId} down twice`);
      open.add(ev.pointerId);
      closed.delete(ev.pointerId);
    } else {
      if (!open.has(ev.pointerId)) problems.push(`pointer ${ev.pointerId} event without down`);
      if (ev.action === 'UP' || ev.action === 'PUP') {
        open.delete(ev.pointerId);
        closed.add(ev.pointerId);
      }
    }
  }
  for (const id of open) {
    problems.push(`pointer ${id} never released`);
  }
  for (const stream of [gyro, accel]) {
    for (const [i, ev] of stream.entries()) {
      if (ev.v.length !== 3 || ev.v.some((c) => !isFinite(c))) {
        problems.push(`bad motion vector at ${i}`);
      }
    }
  }
  return problems;
}
