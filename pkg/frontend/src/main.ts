/** DOM wiring: binds the annotation console to the page served under /ui. */

import { ApiClient } from "./api.js";
import { AXES, COMBINED_COLOR, axisLabel, type AxisInfo } from "./axes.js";
import { layoutFor, toPolylines, toX, toY } from "./chart.js";
import { AnnotationConsole, type CurvePanelData } from "./console.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const api = new ApiClient("");

const clockLabel = byId<HTMLSpanElement>("clock-label");
const errorBanner = byId<HTMLDivElement>("error-banner");
const revisionLabel = byId<HTMLSpanElement>("revision-label");
const canvas = byId<HTMLCanvasElement>("curve-canvas");
const stripImg = byId<HTMLImageElement>("strip-img");
const echoList = byId<HTMLUListElement>("echo-list");

function drawCurves(data: CurvePanelData): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const layout = layoutFor([data.axes, data.combined], canvas.width, canvas.height);
  // zero line
  ctx.strokeStyle = "#cccccc";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(toX(layout, layout.tMin), toY(layout, 0));
  ctx.lineTo(toX(layout, layout.tMax), toY(layout, 0));
  ctx.stroke();
  ctx.setLineDash([]);
  const lines = [
    ...toPolylines(layout, data.axes, ["#ff0000", "#008000", "#0000ff"]),
    ...toPolylines(layout, data.combined, [COMBINED_COLOR]),
  ];
  for (const line of lines) {
    if (line.points.length === 0) continue;
    ctx.strokeStyle = line.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    const [x0, y0] = line.points[0]!;
    ctx.moveTo(x0, y0);
    for (const [x, y] of line.points.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
  }
}

const console_ = new AnnotationConsole(api, {
  onClock(clock) {
    clockLabel.textContent = `${clock.state} @ ${clock.offset_minutes.toFixed(3)} min`;
  },
  onCurves(data) {
    revisionLabel.textContent = `rev ${data.revision}`;
    drawCurves(data);
  },
  onStrip(url, revision) {
    stripImg.src = url;
    stripImg.alt = `color strip, revision ${revision}`;
  },
  onEcho(pending) {
    const li = document.createElement("li");
    li.dataset.echo = "1";
    li.textContent = `${pending.subject} (${pending.kind}): [${pending.values.join(", ")}] …`;
    echoList.appendChild(li);
  },
  onRollback() {
    const last = echoList.querySelector('li[data-echo="1"]:last-child');
    last?.remove();
  },
  onError(message) {
    errorBanner.textContent = message ?? "";
    errorBanner.hidden = message === null;
  },
});

function buildAxisButtons(): void {
  const host = byId<HTMLDivElement>("axis-buttons");
  const slider = byId<HTMLInputElement>("magnitude");
  const sliderLabel = byId<HTMLSpanElement>("magnitude-label");

  const buttons: Array<[HTMLButtonElement, AxisInfo]> = [];
  for (const axis of AXES) {
    const btn = document.createElement("button");
    btn.className = `axis-btn kind-${axis.kind}`;
    btn.style.borderColor = axis.color;
    btn.addEventListener("click", () => void console_.annotate(axis));
    host.appendChild(btn);
    buttons.push([btn, axis]);
  }

  const relabel = () => {
    const m = console_.state.magnitude;
    sliderLabel.textContent = m.toFixed(2);
    for (const [btn, axis] of buttons) {
      btn.textContent = `${axisLabel(axis, m)} ${m >= 0 ? "+" : ""}${m.toFixed(2)}`;
    }
  };
  slider.addEventListener("input", () => {
    console_.setMagnitude(Number(slider.value));
    relabel();
  });
  console_.setMagnitude(Number(slider.value));
  relabel();
}

async function boot(): Promise<void> {
  buildAxisButtons();

  byId<HTMLButtonElement>("btn-create").addEventListener("click", async () => {
    const title = byId<HTMLInputElement>("film-title").value.trim();
    if (!title) return;
    const created = await api.createSession(title);
    byId<HTMLInputElement>("session-id").value = created.id;
    await console_.connect(created.id);
    console_.start();
  });

  byId<HTMLButtonElement>("btn-open").addEventListener("click", async () => {
    const id = byId<HTMLInputElement>("session-id").value.trim();
    if (!id) return;
    await console_.connect(id);
    console_.start();
  });

  byId<HTMLInputElement>("subject").addEventListener("change", (ev) => {
    const subject = (ev.target as HTMLInputElement).value.trim();
    console_.setSubject(subject, "discourse");
  });

  byId<HTMLButtonElement>("btn-clock-start").addEventListener("click", () => {
    const offset = Number(byId<HTMLInputElement>("clock-offset").value || "0");
    void console_.clock("start", offset);
  });
  byId<HTMLButtonElement>("btn-clock-pause").addEventListener("click", () => {
    void console_.clock("pause");
  });
  byId<HTMLButtonElement>("btn-clock-seek").addEventListener("click", () => {
    const offset = Number(byId<HTMLInputElement>("clock-offset").value || "0");
    void console_.clock("seek", offset);
  });
  byId<HTMLButtonElement>("btn-undo").addEventListener("click", () => {
    void console_.undo();
  });
}

void boot();
