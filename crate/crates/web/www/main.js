import init, { seam_gaps, render_strip, field_preview } from "./pkg/texrig_web.js";

const SIZE = 96;

function paint(id, rgba, size) {
  const canvas = document.getElementById(id);
  canvas.width = size;
  canvas.height = size;
  const img = new ImageData(new Uint8ClampedArray(rgba), size, size);
  canvas.getContext("2d").putImageData(img, 0, 0);
}

function update() {
  const angle = Number(document.getElementById("angle").value);
  const res = Number(document.getElementById("res").value);
  document.getElementById("angle-out").textContent = angle;
  paint("naive", render_strip(angle, false, res, SIZE), SIZE);
  paint("smooth", render_strip(angle, true, res, SIZE), SIZE);
  paint("field", field_preview(angle, res), res);
  const [qMax, nMax, qMean, nMean] = seam_gaps(angle, res);
  const fmt = (x) => x.toExponential(3);
  document.getElementById("q-max").textContent = fmt(qMax);
  document.getElementById("n-max").textContent = fmt(nMax);
  document.getElementById("q-mean").textContent = fmt(qMean);
  document.getElementById("n-mean").textContent = fmt(nMean);
}

await init();
document.getElementById("angle").addEventListener("input", update);
document.getElementById("res").addEventListener("change", update);
update();
