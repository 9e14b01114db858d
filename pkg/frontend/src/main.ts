/**
 * Browser entry point: binds the wizard state machine to the page.
 *
 * Configuration: the service base URL comes from the `service` query
 * parameter (default: same origin). Joining an existing session uses
 * `?session=<id>`; otherwise a small setup form creates a demo study and
 * session first.
 */

import { ApiException, TlxClient } from "./api.js";
import { Wizard, resumeWizard } from "./wizard.js";
import {
    renderDone,
    renderError,
    renderIntro,
    renderPair,
    renderRatingScale,
} from "./ui.js";

const params = new URLSearchParams(window.location.search);
const client = new TlxClient(params.get("service") ?? window.location.origin);
const root = document.getElementById("app") as HTMLElement;

let wizard: Wizard | null = null;

function labelsById(w: Wizard): Record<string, string> {
    return Object.fromEntries(w.dimensions.map((d) => [d.id, d.label]));
}

function draw(): void {
    if (!wizard) {
        return;
    }
    const step = wizard.step;
    if (step.kind === "intro") {
        root.innerHTML = renderIntro(wizard.dimensions);
    } else if (step.kind === "weighting") {
        const progress = wizard.weightingProgress();
        root.innerHTML = renderPair(
            wizard.currentPair(),
            labelsById(wizard),
            Math.min(progress.answered, progress.total - 1),
            progress.total,
        );
    } else if (step.kind === "rating") {
        const dimension = wizard.currentDimension();
        root.innerHTML = renderRatingScale(
            dimension,
            wizard.selectedSegment(dimension.id),
            step.dimensionIndex,
            wizard.dimensions.length,
        );
    } else if (wizard.score) {
        root.innerHTML = renderDone(wizard.score);
    }
}

async function submitChoicesIfComplete(): Promise<void> {
    if (!wizard || !wizard.allPairsAnswered()) {
        return;
    }
    try {
        await client.postChoices(wizard.session.session_id, wizard.choicesPayload());
        wizard.markChoicesAccepted();
    } catch (error) {
        // buffered answers survive; offer a retry without losing anything
        root.innerHTML = renderError(describe(error), "retry-choices");
        return;
    }
    draw();
}

async function submitRatingsIfComplete(): Promise<void> {
    if (!wizard || wizard.firstUnratedDimension() !== null) {
        return;
    }
    try {
        const response = await client.postRatings(
            wizard.session.session_id,
            wizard.ratingsPayload(),
        );
        wizard.completeWithScore(response.score);
    } catch (error) {
        root.innerHTML = renderError(describe(error), "retry-ratings");
        return;
    }
    draw();
}

function describe(error: unknown): string {
    if (error instanceof ApiException) {
        return `${error.code}: ${error.message}`;
    }
    return error instanceof Error ? error.message : String(error);
}

root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!target || !wizard) {
        return;
    }
    const action = target.getAttribute("data-action");
    if (action === "begin") {
        wizard.beginWeighting();
        draw();
    } else if (action === "choose") {
        wizard.choosePair(target.getAttribute("data-dimension") ?? "");
        if (wizard.allPairsAnswered()) {
            void submitChoicesIfComplete();
        } else {
            draw();
        }
    } else if (action === "rate") {
        wizard.rateCurrent(Number(target.getAttribute("data-segment")));
        if (wizard.firstUnratedDimension() === null) {
            void submitRatingsIfComplete();
        } else {
            draw();
        }
    } else if (action === "retry-choices") {
        void submitChoicesIfComplete();
    } else if (action === "retry-ratings") {
        void submitRatingsIfComplete();
    }
});

async function setup(): Promise<void> {
    const sessionId = params.get("session");
    if (sessionId) {
        wizard = await resumeWizard(client, sessionId);
        draw();
        return;
    }
    root.innerHTML = `<div class="screen screen-setup">
<h1>New questionnaire session</h1>
<label>Variant
  <select id="variant">
    <option value="xr11">headset (11 dimensions)</option>
    <option value="classic6">classic (6 dimensions)</option>
  </select>
</label>
<label>Participant id <input id="user" value="demo_user"></label>
<button class="primary" id="create">Create session</button>
</div>`;
    const button = document.getElementById("create") as HTMLButtonElement;
    button.addEventListener("click", async () => {
        const variant = (document.getElementById("variant") as HTMLSelectElement).value;
        const user = (document.getElementById("user") as HTMLInputElement).value || "demo_user";
        const mode = variant === "classic6" ? "classic" : "xr_grouped";
        const study = await client.createStudy("browser demo", variant, mode);
        const session = await client.createSession(study.study_id, user, {
            app_knowledge: "medium",
            device_experience: "high",
        });
        params.set("session", session.session_id);
        window.history.replaceState(null, "", `?${params.toString()}`);
        wizard = new Wizard(session, (await client.getPairs(session.session_id)).pairs);
        draw();
    });
}

setup().catch((error) => {
    root.innerHTML = renderError(describe(error), null);
});
