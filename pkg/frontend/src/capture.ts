/**
 * Pointer and device-motion capture for one round.
 *
 * Touch events are emitted as event-set snapshots: whenever a pointer produces
 * an event, the buffer records the state of every active pointer at that
 * moment (the triggering pointer with its real action, the others as MOVE,
 * pointer numbers counting 0..k-1). This mirrors how multi-touch hardware
 * reports measurements and is what the engine's post-processing expects.
 */

import {
  MotionRecord,
  TouchAction,
  TouchRecord,
  TraceMeta,
  buildTraceDocument,
  normalizePressure,
  normalizeSize,
  toNanoseconds,
  validateRound,
} from './trace.js';

/** The subset of PointerEvent the buffer consumes (testable without a DOM). */
export interface PointerSample {
  pointerId: number;
  x: number;
  y: number;
  pressure?: number;
  width?: number;
  height?: number;
  /** high-resolution milliseconds (performance.now() timebase) */
  timeMs: number;
}

export interface MotionSample {
  timeMs: number;
  v: [number, number, number];
}

interface ActivePointer {
  pointerId: number;
  x: number;
  y: number;
  pressure: number;
  size: number;
}

export class CaptureBuffer {
  private touch: TouchRecord[] = [];
  private gyro: MotionRecord[] = [];
  private accel: MotionRecord[] = [];
  private active: ActivePointer[] = [];
  private lastSnapshotNs = 0;

  get touchCount(): number {
    return this.touch.length;
  }

  get isEmpty(): boolean {
    return this.touch.length === 0;
  }

  get activePointers(): number {
    return this.active.length;
  }

  private snapshotTimeNs(timeMs: number): number {
    // distinct snapshots must never share a timestamp, or their events would
    // interleave into malformed event sets after time-sorting
    const ns = Math.max(toNanoseconds(timeMs), this.lastSnapshotNs + 1);
    this.lastSnapshotNs = ns;
    return ns;
  }

  private updated(sample: PointerSample): ActivePointer {
    return {
      pointerId: sample.pointerId,
      x: Math.max(0, sample.x),
      y: Math.max(0, sample.y),
      pressure: normalizePressure(sample.pressure),
      size: normalizeSize(sample.width, sample.height),
    };
  }

  private emitSnapshot(timeMs: number, triggerId: number, triggerAction: TouchAction): void {
    const timeNs = this.snapshotTimeNs(timeMs);
    this.active.forEach((p, index) => {
      this.touch.push({
        eventTimeNs: timeNs,
        pointerId: p.pointerId,
        pointerNumber: index,
        action: p.pointerId === triggerId ? triggerAction : 'MOVE',
        x: p.x,
        y: p.y,
        pressure: p.pressure,
        size: p.size,
      });
    });
  }

  pointerDown(sample: PointerSample): void {
    if (this.active.some((p) => p.pointerId === sample.pointerId)) {
      return; // duplicate down from the platform; ignore
    }
    const action: TouchAction = this.active.length === 0 ? 'DOWN' : 'PDOWN';
    this.active.push(this.updated(sample));
    this.emitSnapshot(sample.timeMs, sample.pointerId, action);
  }

  pointerMove(sample: PointerSample): void {
    const index = this.active.findIndex((p) => p.pointerId === sample.pointerId);
    if (index < 0) {
      return; // hover or move without a preceding down
    }
    this.active[index] = this.updated(sample);
    this.emitSnapshot(sample.timeMs, sample.pointerId, 'MOVE');
  }

  pointerUp(sample: PointerSample): void {
    const index = this.active.findIndex((p) => p.pointerId === sample.pointerId);
    if (index < 0) {
      return;
    }
    this.active[index] = this.updated(sample);
    const action: TouchAction = this.active.length === 1 ? 'UP' : 'PUP';
    this.emitSnapshot(sample.timeMs, sample.pointerId, action);
    this.active.splice(index, 1);
  }

  motionGyro(sample: MotionSample): void {
    this.gyro.push({ eventTimeNs: toNanoseconds(sample.timeMs), v: sample.v });
  }

  motionAccel(sample: MotionSample): void {
    this.accel.push({ eventTimeNs: toNanoseconds(sample.timeMs), v: sample.v });
  }

  /** Problems that would make the engine reject this round; [] when clean. */
  validate(): string[] {
    const problems = validateRound(this.touch, this.gyro, this.accel);
    if (this.active.length > 0) {
      problems.push('a pointer is still down');
    }
    return problems;
  }

  /** Serialize the round and reset the buffer for the next one. */
  finishRound(meta: TraceMeta): string {
    const doc = buildTraceDocument(meta, this.touch, this.gyro, this.accel);
    this.reset();
    return doc;
  }

  reset(): void {
    this.touch = [];
    this.gyro = [];
    this.accel = [];
    this.active = [];
    this.lastSnapshotNs = 0;
  }
}
