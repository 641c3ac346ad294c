// SVG map of the current game state. Rooms sit at the server-provided grid
// coordinates (larger y is further north), so the layout is deterministic:
// no client-side physics, the same snapshot always draws the same picture.

import type { MapSnapshot } from "./protocol.js";

const CELL = 104;
const ROOM = 72;
const PAD = 20;
const SVG_NS = "http://www.w3.org/2000/svg";

export function renderMap(host: HTMLElement, snapshot: MapSnapshot | null): void {
  host.replaceChildren();
  if (!snapshot || snapshot.rooms.length === 0) {
    host.classList.add("hidden");
    return;
  }
  host.classList.remove("hidden");

  const maxY = Math.max(...snapshot.rooms.map((r) => r.y));
  const maxX = Math.max(...snapshot.rooms.map((r) => r.x));
  const minY = Math.min(...snapshot.rooms.map((r) => r.y));
  const minX = Math.min(...snapshot.rooms.map((r) => r.x));

  const cx = (x: number) => PAD + (x - minX) * CELL + ROOM / 2;
  const cy = (y: number) => PAD + (maxY - y) * CELL + ROOM / 2;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "map-svg");
  svg.setAttribute("width", String((maxX - minX) * CELL + ROOM + 2 * PAD));
  svg.setAttribute("height", String((maxY - minY) * CELL + ROOM + 2 * PAD));

  const byId = new Map(snapshot.rooms.map((r) => [r.id, r]));
  const contents = new Map<string, string[]>();
  for (const obj of snapshot.objects) {
    if (obj.room === null) continue;
    const names = contents.get(obj.room) ?? [];
    names.push(obj.name);
    contents.set(obj.room, names);
  }

  // Exits first so the room boxes paint over the edge ends. Exits come in
  // reciprocal pairs; draw each pair once.
  const drawn = new Set<string>();
  for (const exit of snapshot.exits) {
    const key = [exit.from, exit.to].sort().join("|");
    if (drawn.has(key)) continue;
    drawn.add(key);
    const a = byId.get(exit.from);
    const b = byId.get(exit.to);
    if (!a || !b) continue;

    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", "map-exit");
    line.setAttribute("x1", String(cx(a.x)));
    line.setAttribute("y1", String(cy(a.y)));
    line.setAttribute("x2", String(cx(b.x)));
    line.setAttribute("y2", String(cy(b.y)));
    svg.appendChild(line);

    if (exit.door) {
      const marker = document.createElementNS(SVG_NS, "rect");
      marker.setAttribute("class", `map-door ${exit.door.state}`);
      marker.setAttribute("data-door", exit.door.id);
      marker.setAttribute("x", String((cx(a.x) + cx(b.x)) / 2 - 7));
      marker.setAttribute("y", String((cy(a.y) + cy(b.y)) / 2 - 7));
      marker.setAttribute("width", "14");
      marker.setAttribute("height", "14");
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${exit.door.name} (${exit.door.state})`;
      marker.appendChild(title);
      svg.appendChild(marker);
    }
  }

  for (const room of snapshot.rooms) {
    const group = document.createElementNS(SVG_NS, "g");
    let cls = "map-room";
    if (room.id === snapshot.player_room) cls += " player";
    if (room.id === snapshot.target_room) cls += " target";
    group.setAttribute("class", cls);
    group.setAttribute("data-room", room.id);

    const box = document.createElementNS(SVG_NS, "rect");
    box.setAttribute("x", String(cx(room.x) - ROOM / 2));
    box.setAttribute("y", String(cy(room.y) - ROOM / 2));
    box.setAttribute("width", String(ROOM));
    box.setAttribute("height", String(ROOM));
    box.setAttribute("rx", "6");
    group.appendChild(box);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("class", "map-room-name");
    label.setAttribute("x", String(cx(room.x)));
    label.setAttribute("y", String(cy(room.y) - ROOM / 2 + 16));
    label.textContent = room.name;
    group.appendChild(label);

    const names = contents.get(room.id) ?? [];
    names.slice(0, 3).forEach((name, i) => {
      const item = document.createElementNS(SVG_NS, "text");
      item.setAttribute("class", "map-object");
      item.setAttribute("x", String(cx(room.x)));
      item.setAttribute("y", String(cy(room.y) - ROOM / 2 + 32 + i * 13));
      item.textContent = names.length > 3 && i === 2 ? `+${names.length - 2} more` : name;
      group.appendChild(item);
    });

    svg.appendChild(group);
  }

  host.appendChild(svg);
}
