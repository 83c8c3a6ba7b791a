import init, { grd, masses, search } from "./pkg/nfdb_wasm.js";

const $ = (id) => document.getElementById(id);

function cell(tag, text) {
  const el = document.createElement(tag);
  el.textContent = text;
  return el;
}

function table(header, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  header.forEach((h) => head.appendChild(cell("th", h)));
  rows.forEach((r) => {
    const tr = t.insertRow();
    r.forEach((v) => tr.appendChild(cell("td", v)));
  });
  return t;
}

function guard(out, fn) {
  try {
    out.replaceChildren();
    fn();
  } catch (e) {
    out.replaceChildren(cell("p", String(e.message ?? e)));
    out.firstChild.className = "error";
  }
}

function showGrd(event) {
  event?.preventDefault();
  const out = $("grd-out");
  guard(out, () => {
    const v = JSON.parse(grd($("grd-input").value));
    const lines = v.terms.map((t) => `${t.prime}: alpha = ${t.alpha}`);
    lines.push(`grd = ${v.exact} ~ ${v.decimal}`);
    out.textContent = lines.join("\n");
  });
}

function showMasses(event) {
  event?.preventDefault();
  const out = $("mass-out");
  guard(out, () => {
    const v = JSON.parse(masses(Number($("mass-n").value), Number($("mass-p").value)));
    const label = v.p === 0 ? "s" : "c";
    out.appendChild(cell("p", `${v.source} masses, total ${v.total.exact}`));
    out.appendChild(table([label, "mass"], v.masses.map((m, i) => [String(i), m.exact])));
  });
}

function showSearch(event) {
  event?.preventDefault();
  const out = $("search-out");
  const params = new URLSearchParams({
    degree: $("s-degree").value,
    absdisc_max: $("s-max").value,
    sort: $("s-sort").value,
    narrow: $("s-narrow").checked ? "1" : "",
  });
  history.replaceState(null, "", `?${params}`);
  guard(out, () => {
    const v = JSON.parse(search(Number($("s-degree").value), $("s-max").value, $("s-sort").value, $("s-narrow").checked));
    if (v.banner) {
      out.appendChild(cell("p", v.banner));
      out.lastChild.className = "banner";
    }
    const rows = v.rows.map((r) => [r.rd, r.grd ?? "-", r.disc, r.h, r.group_name, r.polynomial]);
    out.appendChild(table(["rd", "grd", "D", "h", "G", "polynomial"], rows));
    out.appendChild(cell("p", `${v.rows.length} field(s)`));
  });
}

function restore() {
  const q = new URLSearchParams(location.search);
  if (q.has("degree")) $("s-degree").value = q.get("degree");
  if (q.has("absdisc_max")) $("s-max").value = q.get("absdisc_max");
  if (q.has("sort")) $("s-sort").value = q.get("sort");
  $("s-narrow").checked = q.get("narrow") === "1";
}

await init();
restore();
$("grd-form").addEventListener("submit", showGrd);
$("mass-form").addEventListener("submit", showMasses);
$("search-form").addEventListener("submit", showSearch);
$("s-narrow").addEventListener("change", () => showSearch());
showGrd();
showMasses();
showSearch();
