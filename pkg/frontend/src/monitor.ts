/** Outcome Monitor: per path step, the signed attribution stack topped by
 * a figure marker at the model outcome (upper half), and per-feature
 * deviation rows with dotted normalized ranges, black mean dots, and
 * colored current dots (lower half). Served numbers render verbatim. */

import { PathDoc, SchemaDoc } from "./api.js";
import { BASE_COLOR, colorFor, MEAN_DOT_COLOR, OTHERS_COLOR } from "./palette.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const STEP_WIDTH = 76;
export const STACK_HEIGHT = 240;
export const STACK_PAD = 18;
export const ROW_HEIGHT = 46;
export const LEFT_PAD = 150;

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

export class MonitorView {
  constructor(private root: HTMLElement) {
    this.root.classList.add("monitor");
  }

  render(path: PathDoc, schema: SchemaDoc): void {
    this.root.textContent = "";
    if (path.states.length === 0) {
      const placeholder = document.createElement("div");
      placeholder.className = "placeholder";
      placeholder.textContent = "Select a subject in the explorer to start a recourse path.";
      this.root.appendChild(placeholder);
      return;
    }

    this.root.appendChild(this.renderStacks(path, schema));
    this.root.appendChild(this.renderDeviations(path, schema));
  }

  private stackScale(path: PathDoc): (v: number) => number {
    let low = 0;
    let high = 1;
    for (const state of path.states) {
      for (const seg of state.segments) {
        low = Math.min(low, seg.y_from, seg.y_to);
        high = Math.max(high, seg.y_from, seg.y_to);
      }
    }
    const span = high - low || 1;
    return (v: number) =>
      STACK_HEIGHT - STACK_PAD - ((v - low) / span) * (STACK_HEIGHT - 2 * STACK_PAD);
  }

  private renderStacks(path: PathDoc, schema: SchemaDoc): SVGElement {
    const width = LEFT_PAD + path.states.length * STEP_WIDTH + 20;
    const svg = svgElement("svg", {
      class: "stack-plot",
      width: String(width),
      height: String(STACK_HEIGHT + 18),
    });
    const y = this.stackScale(path);

    // fixed structural gridlines at 0, the target, and 1
    for (const [value, label] of [
      [0, "0"],
      [path.target_outcome, String(path.target_outcome)],
      [1, "1"],
    ] as Array<[number, string]>) {
      const line = svgElement("line", {
        class: value === path.target_outcome ? "gridline target" : "gridline",
        x1: String(LEFT_PAD - 8),
        x2: String(width - 10),
        y1: String(y(value)),
        y2: String(y(value)),
      });
      svg.appendChild(line);
      const text = svgElement("text", {
        x: String(LEFT_PAD - 12), y: String(y(value) + 4),
        class: "tick", "text-anchor": "end",
      });
      text.textContent = label;
      svg.appendChild(text);
    }

    path.states.forEach((state, index) => {
      const cx = LEFT_PAD + index * STEP_WIDTH + STEP_WIDTH / 2;
      const column = svgElement("g", {
        class: "stack-column",
        "data-step": String(index),
        "data-outcome": String(state.outcome),
      });
      for (const seg of state.segments) {
        const top = Math.min(y(seg.y_from), y(seg.y_to));
        const height = Math.abs(y(seg.y_from) - y(seg.y_to));
        const fill =
          seg.label === "base"
            ? BASE_COLOR
            : seg.label === "others"
              ? OTHERS_COLOR
              : colorFor(schema.displayed, seg.label);
        const rect = svgElement("rect", {
          class: `segment ${seg.sign}`,
          x: String(cx - 16),
          y: String(top),
          width: "32",
          height: String(Math.max(height, 0.5)),
          fill,
          "data-label": seg.label,
          "data-sign": seg.sign,
        });
        const tip = svgElement("title", {});
        tip.textContent = `${seg.label}: ${String(seg.y_from)} to ${String(seg.y_to)}`;
        rect.appendChild(tip);
        column.appendChild(rect);
      }

      // figure marker whose feet sit on the stack top = the model outcome
      const topY = y(state.outcome);
      const marker = svgElement("g", {
        class: "outcome-marker",
        transform: `translate(${cx}, ${topY})`,
        "data-outcome": String(state.outcome),
      });
      marker.appendChild(svgElement("circle", { cx: "0", cy: "-14", r: "3.2", class: "figure" }));
      marker.appendChild(
        svgElement("path", {
          d: "M 0 -11 L 0 -4 M -4 -8 L 4 -8 M 0 -4 L -3 0 M 0 -4 L 3 0",
          class: "figure",
        }),
      );
      const label = svgElement("text", {
        class: "outcome-label",
        x: "0", y: "-20", "text-anchor": "middle",
      });
      label.textContent = String(state.outcome);
      marker.appendChild(label);
      column.appendChild(marker);

      const stepLabel = svgElement("text", {
        x: String(cx), y: String(STACK_HEIGHT + 12),
        class: "tick", "text-anchor": "middle",
      });
      stepLabel.textContent = `${index}: ${state.subject_id}`;
      column.appendChild(stepLabel);
      svg.appendChild(column);
    });
    return svg;
  }

  private renderDeviations(path: PathDoc, schema: SchemaDoc): SVGElement {
    const features = schema.displayed;
    const width = LEFT_PAD + path.states.length * STEP_WIDTH + 20;
    const svg = svgElement("svg", {
      class: "deviation-plot",
      width: String(width),
      height: String(features.length * ROW_HEIGHT + 10),
    });

    features.forEach((feature, row) => {
      const rowTop = row * ROW_HEIGHT + 6;
      const rowBottom = rowTop + ROW_HEIGHT - 14;
      const name = svgElement("text", {
        x: String(LEFT_PAD - 12), y: String((rowTop + rowBottom) / 2 + 4),
        class: "row-label", "text-anchor": "end",
        fill: colorFor(features, feature),
      });
      name.textContent = feature;
      svg.appendChild(name);

      const scale = (v: number) => rowBottom - v * (rowBottom - rowTop);
      path.states.forEach((state, index) => {
        const dev = state.deviations.find((d) => d.feature === feature);
        if (!dev) {
          return;
        }
        const cx = LEFT_PAD + index * STEP_WIDTH + STEP_WIDTH / 2;
        const cell = svgElement("g", {
          class: "deviation-cell",
          "data-feature": feature,
          "data-step": String(index),
          "data-mean": String(dev.mean),
          "data-current": String(dev.current),
        });
        // dotted line spans the served normalized range
        cell.appendChild(
          svgElement("line", {
            class: "range-line",
            x1: String(cx), x2: String(cx),
            y1: String(scale(dev.range_low)), y2: String(scale(dev.range_high)),
            "stroke-dasharray": "2,3",
          }),
        );
        // solid connector makes the deviation readable at a glance
        cell.appendChild(
          svgElement("line", {
            class: "deviation-line",
            x1: String(cx), x2: String(cx),
            y1: String(scale(dev.mean)), y2: String(scale(dev.current)),
            stroke: colorFor(features, feature),
          }),
        );
        const meanDot = svgElement("circle", {
          class: "mean-dot",
          cx: String(cx), cy: String(scale(dev.mean)), r: "3",
          fill: MEAN_DOT_COLOR,
        });
        const meanTip = svgElement("title", {});
        meanTip.textContent = `${feature} mean = ${String(dev.mean)}`;
        meanDot.appendChild(meanTip);
        cell.appendChild(meanDot);

        const currentDot = svgElement("circle", {
          class: "current-dot",
          cx: String(cx), cy: String(scale(dev.current)), r: "4",
          fill: colorFor(features, feature),
        });
        const currentTip = svgElement("title", {});
        currentTip.textContent = `${feature} current = ${String(dev.current)}`;
        currentDot.appendChild(currentTip);
        cell.appendChild(currentDot);
        svg.appendChild(cell);
      });
    });
    return svg;
  }
}
