/**
 * HTML renderers for each wizard screen. Pure string producers so they can
 * be tested without a browser; main.ts injects them and wires events via
 * data-action attributes.
 */

import type { DimensionInfo, Pair, ScoreDoc, SessionMetricsDoc } from "./api.js";
import { SEGMENT_COUNT, scaleEndpoints, segmentToValue } from "./wizard.js";

export function escapeHtml(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;")
        .replace(/'/g, "&#39;");
}

function panel(title: string, dimensions: DimensionInfo[]): string {
    const items = dimensions
        .map(
            (d) => `<li class="dimension">
  <span class="dimension-label">${escapeHtml(d.label)}</span>
  <span class="dimension-prompt">${escapeHtml(d.prompt)}</span>
</li>`,
        )
        .join("\n");
    return `<section class="panel panel-${title.toLowerCase()}">
  <h2>${escapeHtml(title)}</h2>
  <ul>
${items}
  </ul>
</section>`;
}

/** Intro screen: every dimension explained, grouped into its panel. */
export function renderIntro(dimensions: DimensionInfo[]): string {
    const task = dimensions.filter((d) => d.group === "task");
    const technology = dimensions.filter((d) => d.group === "technology");
    const panels = [panel("Task", task)];
    if (technology.length > 0) {
        panels.push(panel("Technology", technology));
    }
    return `<div class="screen screen-intro">
<h1>Workload questionnaire</h1>
<p>You will first compare dimensions in pairs, then rate each one after the task.</p>
${panels.join("\n")}
<button class="primary" data-action="begin">Start</button>
</div>`;
}

/** One forced-choice pair: exactly two options and no way to skip. */
export function renderPair(
    pair: Pair,
    labels: Record<string, string>,
    answered: number,
    total: number,
): string {
    const option = (id: string) =>
        `<button class="pair-option" data-action="choose" data-dimension="${escapeHtml(id)}">${escapeHtml(labels[id] ?? id)}</button>`;
    return `<div class="screen screen-pair">
<p class="instruction">Which of the two is a greater source of load for this task?</p>
<div class="pair-options">
${option(pair[0])}
${option(pair[1])}
</div>
<p class="progress">${answered + 1}/${total}</p>
</div>`;
}

/** Twenty-segment scale with a zero notch; segment k stores value 5k. */
export function renderRatingScale(
    dimension: DimensionInfo,
    selectedSegment: number | null,
    index: number,
    total: number,
): string {
    const [low, high] = scaleEndpoints(dimension);
    const notches: string[] = [];
    for (let segment = 0; segment <= SEGMENT_COUNT; segment += 1) {
        const classes = ["segment"];
        if (segment === 0) {
            classes.push("segment-zero");
        }
        if (selectedSegment !== null && segment <= selectedSegment && segment > 0) {
            classes.push("segment-filled");
        }
        notches.push(
            `<button class="${classes.join(" ")}" data-action="rate" data-segment="${segment}" ` +
                `title="${segmentToValue(segment)}"></button>`,
        );
    }
    return `<div class="screen screen-rating">
<h2>${escapeHtml(dimension.label)}</h2>
<p class="dimension-prompt">${escapeHtml(dimension.prompt)}</p>
<div class="scale">
<span class="endpoint endpoint-low">${escapeHtml(low)}</span>
${notches.join("\n")}
<span class="endpoint endpoint-high">${escapeHtml(high)}</span>
</div>
<p class="progress">${index + 1}/${total}</p>
</div>`;
}

/** Final screen: the returned score (and usage summary when telemetry exists),
 * numbers rendered exactly as the server sent them. */
export function renderDone(score: ScoreDoc, metrics: SessionMetricsDoc | null = null): string {
    const rows = [
        `<dt>Overall workload</dt><dd class="score-main">${escapeHtml(score.weighted_task)}</dd>`,
        `<dt>Raw task mean</dt><dd>${escapeHtml(score.raw_task)}</dd>`,
    ];
    if (score.weighted_technology !== undefined) {
        rows.push(
            `<dt>Technology workload</dt><dd>${escapeHtml(score.weighted_technology)}</dd>`,
        );
    }
    const usage = metrics
        ? `<dl class="score metrics-summary">
<dt>Interactions</dt><dd>${metrics.total_interactions} (${metrics.clicks} clicks, ${metrics.gazes} gazes)</dd>
<dt>Usage time</dt><dd>${(metrics.usage_time_ms / 60000).toFixed(1)} min</dd>
<dt>Clicks / gazes per minute</dt><dd>${metrics.clicks_per_minute.toFixed(2)} / ${metrics.gazes_per_minute.toFixed(2)}</dd>
<dt>Focused objects</dt><dd>${metrics.focused_objects}</dd>
</dl>`
        : "";
    return `<div class="screen screen-done">
<h1>Thank you</h1>
<dl class="score">
${rows.join("\n")}
</dl>
${usage}
</div>`;
}

export function renderError(message: string, retryAction: string | null): string {
    const retry = retryAction
        ? `<button class="primary" data-action="${escapeHtml(retryAction)}">Retry</button>`
        : "";
    return `<div class="screen screen-error">
<p class="error">${escapeHtml(message)}</p>
${retry}
</div>`;
}
