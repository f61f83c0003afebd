// Interactive EIT spectrum: wires the two sliders to the wasm solver and
// redraws the absorption curve plus the slow-light readout.

import init, {
  absorption_spectrum,
  group_velocity_at,
  reference_absorption,
} from "./pkg/eit_wasm.js";

const N_POINTS = 241;
const DELTA_MIN = -3;
const DELTA_MAX = 3;

const canvas = document.getElementById("plot");
const ctx = canvas.getContext("2d");
const f0sqSlider = document.getElementById("f0sq");
const omegacSlider = document.getElementById("omegac");
const f0sqValue = document.getElementById("f0sq-value");
const omegacValue = document.getElementById("omegac-value");
const vgOut = document.getElementById("vg");
const alpha0Out = document.getElementById("alpha0");

let alphaRef = 1;

// Plot frame in canvas pixels.
const M = { left: 110, right: 30, top: 30, bottom: 90 };

function toX(delta) {
  const w = canvas.width - M.left - M.right;
  return M.left + ((delta - DELTA_MIN) / (DELTA_MAX - DELTA_MIN)) * w;
}

function toY(value, maxValue) {
  const h = canvas.height - M.top - M.bottom;
  return M.top + h - (value / maxValue) * h;
}

function drawAxes(maxValue) {
  ctx.strokeStyle = "#313c4b";
  ctx.fillStyle = "#8b97a8";
  ctx.lineWidth = 2;
  ctx.font = "26px system-ui";

  for (let delta = DELTA_MIN; delta <= DELTA_MAX; delta += 1) {
    const x = toX(delta);
    ctx.beginPath();
    ctx.moveTo(x, M.top);
    ctx.lineTo(x, canvas.height - M.bottom);
    ctx.stroke();
    ctx.textAlign = "center";
    ctx.fillText(delta.toFixed(0), x, canvas.height - M.bottom + 36);
  }
  const yTicks = 4;
  for (let i = 0; i <= yTicks; i += 1) {
    const value = (maxValue * i) / yTicks;
    const y = toY(value, maxValue);
    ctx.beginPath();
    ctx.moveTo(M.left, y);
    ctx.lineTo(canvas.width - M.right, y);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(value.toFixed(1), M.left - 12, y + 9);
  }
  ctx.textAlign = "center";
  ctx.fillText("probe detuning Δ/Γ", (M.left + canvas.width - M.right) / 2,
    canvas.height - 18);
  ctx.save();
  ctx.translate(30, (M.top + canvas.height - M.bottom) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("absorption (arb. units)", 0, 0);
  ctx.restore();
}

function drawCurve(alphas, maxValue, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 4;
  ctx.beginPath();
  alphas.forEach((alpha, i) => {
    const delta = DELTA_MIN + ((DELTA_MAX - DELTA_MIN) * i) / (alphas.length - 1);
    const x = toX(delta);
    const y = toY(Math.max(alpha, 0) / alphaRef, maxValue);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function formatVelocity(vg) {
  if (!Number.isFinite(vg)) return "singular";
  if (Math.abs(vg) >= 1000) return `${(vg / 1000).toPrecision(3)} km/s`;
  return `${vg.toPrecision(3)} m/s`;
}

function redraw() {
  const f0sq = Number(f0sqSlider.value);
  const omegac = Number(omegacSlider.value);
  f0sqValue.textContent = f0sq.toFixed(2);
  omegacValue.textContent = omegac.toFixed(2);

  const noisy = absorption_spectrum(omegac, f0sq, N_POINTS);
  const quiet = absorption_spectrum(omegac, 0, N_POINTS);
  const maxValue = Math.max(
    1.05 * Math.max(...noisy) / alphaRef,
    1.05 * Math.max(...quiet) / alphaRef,
    1.2,
  );

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  drawAxes(maxValue);
  drawCurve(quiet, maxValue, "#3d5a73");
  drawCurve(noisy, maxValue, "#5ec8f2");

  vgOut.textContent = formatVelocity(group_velocity_at(omegac, f0sq, 0));
  alpha0Out.textContent = (noisy[(N_POINTS - 1) / 2] / alphaRef).toFixed(3);
}

await init();
alphaRef = reference_absorption();
f0sqSlider.addEventListener("input", redraw);
omegacSlider.addEventListener("input", redraw);
redraw();
