/** Sortable table rendering: click a header to sort, click again to reverse.
 * Array.prototype.sort is stable, so equal keys keep their relative order.
 */

import type { Table } from "./csv.js";

function compareValues(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  if (!Number.isNaN(na) && !Number.isNaN(nb) && a !== "" && b !== "") {
    return na - nb;
  }
  return a < b ? -1 : a > b ? 1 : 0;
}

export function sortRows(rows: string[][], column: number, descending: boolean): string[][] {
  const sorted = [...rows].sort((x, y) => compareValues(x[column] ?? "", y[column] ?? ""));
  return descending ? sorted.reverse() : sorted;
}

export function renderTable(doc: Document, table: Table, title: string): HTMLElement {
  const wrap = doc.createElement("section");
  wrap.className = "table-panel";
  const heading = doc.createElement("h3");
  heading.textContent = title;
  wrap.appendChild(heading);

  const el = doc.createElement("table");
  el.className = "sortable";
  const thead = doc.createElement("thead");
  const headRow = doc.createElement("tr");
  const tbody = doc.createElement("tbody");
  let sortColumn = -1;
  let descending = false;

  const renderBody = (rows: string[][]) => {
    tbody.innerHTML = "";
    for (const row of rows) {
      const tr = doc.createElement("tr");
      for (const cellText of row) {
        const td = doc.createElement("td");
        td.textContent = cellText;
        tr.appendChild(td);
      }
      tbody.appendChild(tr);
    }
  };

  table.header.forEach((name, index) => {
    const th = doc.createElement("th");
    th.textContent = name;
    th.tabIndex = 0;
    th.addEventListener("click", () => {
      descending = sortColumn === index ? !descending : false;
      sortColumn = index;
      renderBody(sortRows(table.rows, index, descending));
    });
    headRow.appendChild(th);
  });
  thead.appendChild(headRow);
  el.appendChild(thead);
  el.appendChild(tbody);
  renderBody(table.rows);
  wrap.appendChild(el);
  return wrap;
}
