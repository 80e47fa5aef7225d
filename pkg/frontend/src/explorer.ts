/** Recourse Path Explorer: six value-vs-attribution scatterplots in two
 * rows of three. Dots are data subjects; the selected sequence is drawn
 * with arrowed lines (unfilled start, filled end); the top-3 candidates
 * get enlarged dots. Every rendered number is a served value. */

import { CandidateDoc, PathDoc, SchemaDoc, SubjectDoc } from "./api.js";
import { colorFor, PATH_COLOR } from "./palette.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const PLOT_WIDTH = 300;
export const PLOT_HEIGHT = 200;
export const PLOT_PAD = 36;
export const DOT_RADIUS = 3.5;
export const TOP3_RADIUS = 7;

export interface ExplorerData {
  schema: SchemaDoc;
  subjects: SubjectDoc[];
  path: PathDoc;
  candidates: CandidateDoc[];
}

export interface ExplorerHooks {
  onSelect?: (subjectId: string) => void;
  onHover?: (subjectId: string | null) => void;
}

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

interface Scale {
  (v: number): number;
}

function linear(domainLow: number, domainHigh: number, rangeLow: number, rangeHigh: number): Scale {
  const span = domainHigh - domainLow || 1;
  return (v: number) => rangeLow + ((v - domainLow) / span) * (rangeHigh - rangeLow);
}

export class ExplorerView {
  private hooks: ExplorerHooks;

  constructor(
    private root: HTMLElement,
    hooks: ExplorerHooks = {},
  ) {
    this.hooks = hooks;
    this.root.classList.add("explorer");
  }

  render(data: ExplorerData): void {
    this.root.textContent = "";
    const { displayed } = data.schema;
    const featureInfo = new Map(data.schema.features.map((f) => [f.name, f]));
    const malformed =
      displayed.length !== 6 ||
      displayed.some((name) => !featureInfo.has(name)) ||
      data.subjects.some((s) =>
        displayed.some((name) => !(name in s.values) || !(name in s.phi)),
      );
    if (malformed) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.textContent = "malformed payload: cannot draw the explorer";
      this.root.appendChild(banner);
      return;
    }

    const candidateById = new Map(data.candidates.map((c) => [c.subject_id, c]));
    const pathIds = data.path.states.map((s) => s.subject_id);

    displayed.forEach((feature, index) => {
      const info = featureInfo.get(feature)!;
      const plot = svgElement("svg", {
        class: "plot",
        width: String(PLOT_WIDTH),
        height: String(PLOT_HEIGHT),
        "data-feature": feature,
        "data-row": String(Math.floor(index / 3)),
        "data-col": String(index % 3),
      });

      const phiValues = data.subjects.map((s) => s.phi[feature]);
      const phiLow = Math.min(...phiValues);
      const phiHigh = Math.max(...phiValues);
      const x = linear(info.min, info.max, PLOT_PAD, PLOT_WIDTH - 8);
      const y = linear(phiLow, phiHigh, PLOT_HEIGHT - PLOT_PAD, 10);

      plot.appendChild(this.arrowMarker(feature));
      plot.appendChild(this.axes(feature, info.min, info.max, phiLow, phiHigh, x, y));

      const color = colorFor(displayed, feature);
      const dots = svgElement("g", { class: "dot-layer" });
      for (const subject of data.subjects) {
        const candidate = candidateById.get(subject.id);
        const radius = candidate?.top3 ? TOP3_RADIUS : DOT_RADIUS;
        const dot = svgElement("circle", {
          class: "dot" + (candidate ? " candidate" : "") + (candidate?.top3 ? " top3" : ""),
          cx: String(x(subject.values[feature])),
          cy: String(y(subject.phi[feature])),
          r: String(radius),
          fill: color,
          "data-subject-id": subject.id,
          "data-value": String(subject.values[feature]),
          "data-phi": String(subject.phi[feature]),
        });
        const tip = svgElement("title", {});
        tip.textContent =
          `${subject.id}\n${feature} = ${String(subject.values[feature])}\n` +
          `phi = ${String(subject.phi[feature])}\noutcome = ${String(subject.outcome)}`;
        dot.appendChild(tip);
        dot.addEventListener("click", () => this.hooks.onSelect?.(subject.id));
        dot.addEventListener("mouseenter", () => this.hooks.onHover?.(subject.id));
        dot.addEventListener("mouseleave", () => this.hooks.onHover?.(null));
        dots.appendChild(dot);
      }
      plot.appendChild(dots);
      plot.appendChild(
        this.pathLayer(feature, pathIds, data.subjects, x, y),
      );
      this.root.appendChild(plot);
    });
  }

  /** Highlight one subject's dots across all six plots. */
  setHover(subjectId: string | null): void {
    for (const dot of this.root.querySelectorAll<SVGCircleElement>("circle.dot")) {
      dot.classList.toggle("hovered", dot.dataset.subjectId === subjectId);
    }
  }

  private arrowMarker(feature: string): SVGElement {
    const defs = svgElement("defs", {});
    const marker = svgElement("marker", {
      id: `arrow-${feature}`,
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.appendChild(svgElement("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: PATH_COLOR }));
    defs.appendChild(marker);
    return defs;
  }

  private axes(
    feature: string,
    xLow: number,
    xHigh: number,
    yLow: number,
    yHigh: number,
    x: Scale,
    y: Scale,
  ): SVGElement {
    const g = svgElement("g", { class: "axes" });
    const baseline = PLOT_HEIGHT - PLOT_PAD;
    g.appendChild(
      svgElement("line", {
        x1: String(PLOT_PAD), y1: String(baseline),
        x2: String(PLOT_WIDTH - 8), y2: String(baseline),
        class: "axis-line",
      }),
    );
    g.appendChild(
      svgElement("line", {
        x1: String(PLOT_PAD), y1: "10",
        x2: String(PLOT_PAD), y2: String(baseline),
        class: "axis-line",
      }),
    );
    const title = svgElement("text", {
      x: String(PLOT_WIDTH / 2), y: "196", class: "axis-title",
      "text-anchor": "middle",
    });
    title.textContent = feature;
    g.appendChild(title);
    // endpoint labels are the served numbers themselves
    const labels: Array<[string, Record<string, string>]> = [
      [String(xLow), { x: String(PLOT_PAD), y: String(baseline + 12), class: "tick x-tick" }],
      [String(xHigh), {
        x: String(PLOT_WIDTH - 8), y: String(baseline + 12),
        class: "tick x-tick", "text-anchor": "end",
      }],
      [String(yLow), {
        x: String(PLOT_PAD - 3), y: String(y(yLow)),
        class: "tick y-tick", "text-anchor": "end",
      }],
      [String(yHigh), {
        x: String(PLOT_PAD - 3), y: String(y(yHigh) + 8),
        class: "tick y-tick", "text-anchor": "end",
      }],
    ];
    for (const [text, attrs] of labels) {
      const node = svgElement("text", attrs);
      node.textContent = text;
      g.appendChild(node);
    }
    return g;
  }

  private pathLayer(
    feature: string,
    pathIds: string[],
    subjects: SubjectDoc[],
    x: Scale,
    y: Scale,
  ): SVGElement {
    const layer = svgElement("g", { class: "path-layer" });
    const byId = new Map(subjects.map((s) => [s.id, s]));
    const points = pathIds
      .map((id) => byId.get(id))
      .filter((s): s is SubjectDoc => s !== undefined)
      .map((s) => ({ id: s.id, px: x(s.values[feature]), py: y(s.phi[feature]) }));

    for (let i = 0; i + 1 < points.length; i += 1) {
      layer.appendChild(
        svgElement("line", {
          class: "path-line",
          x1: String(points[i].px), y1: String(points[i].py),
          x2: String(points[i + 1].px), y2: String(points[i + 1].py),
          stroke: PATH_COLOR,
          "marker-end": `url(#arrow-${feature})`,
        }),
      );
    }
    points.forEach((p, i) => {
      const isStart = i === 0;
      const isEnd = i === points.length - 1;
      layer.appendChild(
        svgElement("circle", {
          class: "path-dot" + (isStart ? " path-start" : "") + (isEnd ? " path-end" : ""),
          cx: String(p.px), cy: String(p.py), r: "5",
          fill: isStart && points.length > 1 ? "none" : PATH_COLOR,
          stroke: PATH_COLOR,
          "data-subject-id": p.id,
        }),
      );
    });
    return layer;
  }
}
