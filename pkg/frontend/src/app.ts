/**
 * Capture application: a full-screen canvas plus a small control strip that
 * drives enrollment ("repeat the gesture N times") and verification ("up to
 * three attempts") against the HTTP service.
 */

import { SmaugClient, ApiError } from './api.js';
import { CaptureBuffer, MotionSample, PointerSample } from './capture.js';
import { TraceMeta } from './trace.js';

type Phase = 'idle' | 'enroll' | 'verify' | 'done';

interface Elements {
  canvas: HTMLCanvasElement;
  status: HTMLElement;
  counter: HTMLElement;
  nextButton: HTMLButtonElement;
  user: HTMLInputElement;
  gestureName: HTMLInputElement;
  secretMode: HTMLInputElement;
  enrollButton: HTMLButtonElement;
  verifyButton: HTMLButtonElement;
}

function sampleOf(e: PointerEvent): PointerSample {
  return {
    pointerId: e.pointerId,
    x: e.offsetX,
    y: e.offsetY,
    pressure: e.pressure,
    width: e.width,
    height: e.height,
    timeMs: e.timeStamp,
  };
}

export class CaptureApp {
  private readonly buffer = new CaptureBuffer();
  private phase: Phase = 'idle';
  private sessionId = '';
  private gestureId = '';
  private round = 1;
  private roundsRequired = 10;
  private attempt = 1;
  private attemptsAllowed = 3;
  private ctx: CanvasRenderingContext2D | null;
  private lastPoint = new Map<number, [number, number]>();

  constructor(
    private readonly el: Elements,
    private readonly client: SmaugClient,
  ) {
    this.ctx = el.canvas.getContext('2d');
    this.wirePointerEvents();
    this.wireMotionEvents();
    el.enrollButton.addEventListener('click', () => void this.startEnrollment());
    el.verifyButton.addEventListener('click', () => void this.startVerification());
    el.nextButton.addEventListener('click', () => void this.finishRound());
    this.render();
  }

  private wirePointerEvents(): void {
    const canvas = this.el.canvas;
    canvas.style.touchAction = 'none';
    canvas.addEventListener('pointerdown', (e) => {
      if (this.phase === 'idle' || this.phase === 'done') return;
      canvas.setPointerCapture(e.pointerId);
      this.buffer.pointerDown(sampleOf(e));
      this.lastPoint.set(e.pointerId, [e.offsetX, e.offsetY]);
      e.preventDefault();
    });
    canvas.addEventListener('pointermove', (e) => {
      if (!this.lastPoint.has(e.pointerId)) return;
      this.buffer.pointerMove(sampleOf(e));
      this.drawSegment(e);
      e.preventDefault();
    });
    const release = (e: PointerEvent) => {
      if (!this.lastPoint.has(e.pointerId)) return;
      this.buffer.pointerUp(sampleOf(e));
      this.lastPoint.delete(e.pointerId);
      e.preventDefault();
    };
    canvas.addEventListener('pointerup', release);
    canvas.addEventListener('pointercancel', release);
  }

  private wireMotionEvents(): void {
    // desktop browsers expose no motion sensors; the trace simply carries
    // empty motion sections there and the engine disables motion checks
    if (typeof window === 'undefined' || !('DeviceMotionEvent' in window)) {
      return;
    }
    window.addEventListener('devicemotion', (e: DeviceMotionEvent) => {
      if (this.phase === 'idle' || this.phase === 'done' || this.buffer.isEmpty) {
        return;
      }
      const t = performance.now();
      const r = e.rotationRate;
      if (r && r.alpha !== null && r.beta !== null && r.gamma !== null) {
        const gyro: MotionSample = { timeMs: t, v: [r.alpha, r.beta, r.gamma] };
        this.buffer.motionGyro(gyro);
      }
      const a = e.accelerationIncludingGravity;
      if (a && a.x !== null && a.y !== null && a.z !== null) {
        this.buffer.motionAccel({ timeMs: t, v: [a.x, a.y, a.z] });
      }
    });
  }

  private drawSegment(e: PointerEvent): void {
    const last = this.lastPoint.get(e.pointerId);
    if (!this.ctx || !last) return;
    this.ctx.beginPath();
    this.ctx.moveTo(last[0], last[1]);
    this.ctx.lineTo(e.offsetX, e.offsetY);
    this.ctx.lineWidth = 3;
    this.ctx.lineCap = 'round';
    this.ctx.strokeStyle = '#1a6ef5';
    this.ctx.stroke();
    this.lastPoint.set(e.pointerId, [e.offsetX, e.offsetY]);
  }

  private clearCanvas(): void {
    this.ctx?.clearRect(0, 0, this.el.canvas.width, this.el.canvas.height);
  }

  private meta(): TraceMeta {
    return {
      gestureId: this.gestureId || 'pending',
      name: this.el.gestureName.value || 'gesture',
      round: this.phase === 'enroll' ? this.round : this.attempt,
      secretMode: this.el.secretMode.checked,
      backgroundImageMode: false,
      backgroundImageRef: null,
    };
  }

  private async startEnrollment(): Promise<void> {
    const user = this.el.user.value.trim();
    const name = this.el.gestureName.value.trim();
    if (!user || !name) {
      this.setStatus('enter a user and a gesture name first');
      return;
    }
    try {
      const session = await this.client.startEnrollment(user, name, {
        secretMode: this.el.secretMode.checked,
      });
      this.phase = 'enroll';
      this.sessionId = session.sessionId;
      this.gestureId = session.gestureId;
      this.round = 1;
      this.roundsRequired = session.roundsRequired;
      this.setStatus(`draw your gesture, then press Next (${name})`);
    } catch (err) {
      this.surface(err);
    }
    this.render();
  }

  private async startVerification(): Promise<void> {
    const user = this.el.user.value.trim();
    if (!user) {
      this.setStatus('enter a user first');
      return;
    }
    try {
      const session = await this.client.startVerification(user);
      this.phase = 'verify';
      this.sessionId = session.sessionId;
      this.attempt = 1;
      this.attemptsAllowed = session.prompt.attemptsAllowed;
      // name shown only when the gesture is not secret
      const hint = session.prompt.gestureName
        ? `draw "${session.prompt.gestureName}"`
        : 'draw your secret gesture';
      this.setStatus(`${hint}, then press Next`);
    } catch (err) {
      this.surface(err);
    }
    this.render();
  }

  private async finishRound(): Promise<void> {
    if (this.phase !== 'enroll' && this.phase !== 'verify') return;
    const problems = this.buffer.validate();
    if (problems.length > 0) {
      this.setStatus(`round invalid: ${problems[0]} — try again`);
      this.buffer.reset();
      this.clearCanvas();
      return;
    }
    const doc = this.buffer.finishRound(this.meta());
    this.clearCanvas();
    try {
      if (this.phase === 'enroll') {
        const resp = await this.client.postRound(this.sessionId, doc);
        if (resp.complete) {
          this.phase = 'done';
          this.setStatus('enrollment complete — gesture stored');
        } else {
          this.round = resp.roundsDone + 1;
          this.setStatus('good — draw the same gesture again');
        }
      } else {
        const resp = await this.client.postAttempt(this.sessionId, doc);
        if (resp.decision) {
          this.phase = 'done';
          this.setStatus('verified — welcome back');
        } else if (resp.fallbackRequired) {
          this.phase = 'done';
          this.setStatus('not recognized — fall back to your passcode');
        } else {
          this.attempt = this.attemptsAllowed - resp.attemptsRemaining + 1;
          this.setStatus('not recognized — try again');
        }
      }
    } catch (err) {
      this.surface(err);
    }
    this.render();
  }

  private surface(err: unknown): void {
    if (err instanceof ApiError) {
      this.setStatus(`service error (${err.status}): ${err.message}`);
      if (err.status === 404) {
        this.phase = 'idle';
      }
    } else {
      this.setStatus(`network error: ${String(err)}`);
    }
  }

  private setStatus(text: string): void {
    this.el.status.textContent = text;
  }

  private render(): void {
    const busy = this.phase === 'enroll' || this.phase === 'verify';
    this.el.nextButton.disabled = !busy;
    this.el.enrollButton.disabled = busy;
    this.el.verifyButton.disabled = busy;
    if (this.phase === 'enroll') {
      this.el.counter.textContent = `round ${this.round} / ${this.roundsRequired}`;
    } else if (this.phase === 'verify') {
      this.el.counter.textContent = `attempt ${this.attempt} / ${this.attemptsAllowed}`;
    } else {
      this.el.counter.textContent = '';
    }
  }
}

export function mount(baseUrl: string): CaptureApp {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  };
  const app = new CaptureApp(
    {
      canvas: byId<HTMLCanvasElement>('capture-canvas'),
      status: byId('status'),
      counter: byId('round-counter'),
      nextButton: byId<HTMLButtonElement>('next-button'),
      user: byId<HTMLInputElement>('user-input'),
      gestureName: byId<HTMLInputElement>('gesture-name-input'),
      secretMode: byId<HTMLInputElement>('secret-mode-input'),
      enrollButton: byId<HTMLButtonElement>('enroll-button'),
      verifyButton: byId<HTMLButtonElement>('verify-button'),
    },
    new SmaugClient(baseUrl),
  );
  return app;
}
