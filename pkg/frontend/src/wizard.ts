/**
 * Wizard state machine for the two-phase questionnaire.
 *
 * Mirrors the server's session states so a mid-wizard refresh can resume at
 * the right step, and buffers answers locally so a failed submission loses
 * nothing. By construction the produced payloads always cover the served
 * pair list exactly and rate every dimension with a multiple of five, so
 * the server never rejects them for structural reasons.
 */

import type {
    ChoicePayload,
    DimensionInfo,
    Pair,
    ScoreDoc,
    SessionDoc,
    TlxClient,
} from "./api.js";

export const SEGMENT_COUNT = 20;

export type WizardStep =
    | { kind: "intro" }
    | { kind: "weighting"; pairIndex: number }
    | { kind: "rating"; dimensionIndex: number }
    | { kind: "done" };

/** Segment k of the twenty-segment scale maps to its upper tick, 5k. */
export function segmentToValue(segment: number): number {
    if (!Number.isInteger(segment) || segment < 0 || segment > SEGMENT_COUNT) {
        throw new RangeError(`segment must be an integer in 0..${SEGMENT_COUNT}, got ${segment}`);
    }
    return segment * 5;
}

/** Scale endpoint labels; performance runs Good to Poor, the rest Low to High. */
export function scaleEndpoints(dimension: DimensionInfo): [string, string] {
    return dimension.id === "performance" ? ["Good", "Poor"] : ["Low", "High"];
}

export function pairKey(pair: Pair): string {
    return [...pair].sort().join("|");
}

export class WizardError extends Error {}

export class Wizard {
    readonly session: SessionDoc;
    readonly pairs: Pair[];
    private readonly answers = new Map<string, string>();
    private readonly ratings = new Map<string, number>();
    private choicesSubmitted: boolean;
    private scoreDoc: ScoreDoc | null = null;
    private current: WizardStep;

    constructor(session: SessionDoc, pairs: Pair[], score: ScoreDoc | null = null) {
        this.session = session;
        this.pairs = pairs;
        this.scoreDoc = score;
        switch (session.state) {
            case "created":
                this.choicesSubmitted = false;
                this.current = { kind: "intro" };
                break;
            case "weighting_done":
                this.choicesSubmitted = true;
                this.current = { kind: "rating", dimensionIndex: 0 };
                break;
            default:
                // rating_done or scored: nothing left to collect
                this.choicesSubmitted = true;
                this.current = { kind: "done" };
        }
    }

    get step(): WizardStep {
        return this.current;
    }

    get dimensions(): DimensionInfo[] {
        return this.session.dimensions;
    }

    get score(): ScoreDoc | null {
        return this.scoreDoc;
    }

    beginWeighting(): void {
        if (this.current.kind !== "intro") {
            throw new WizardError("weighting starts from the intro screen");
        }
        this.current = { kind: "weighting", pairIndex: 0 };
    }

    currentPair(): Pair {
        if (this.current.kind !== "weighting") {
            throw new WizardError("no pair on screen outside the weighting step");
        }
        const pair = this.pairs[this.current.pairIndex];
        if (!pair) {
            throw new WizardError(`pair index ${this.current.pairIndex} out of range`);
        }
        return pair;
    }

    /** Progress indicator for the weighting step, e.g. 3/25 answered. */
    weightingProgress(): { answered: number; total: number } {
        return { answered: this.answers.size, total: this.pairs.length };
    }

    /** Record the forced choice for the pair on screen and advance. */
    choosePair(chosen: string): void {
        const pair = this.currentPair();
        if (chosen !== pair[0] && chosen !== pair[1]) {
            throw new WizardError(`${chosen} is not a member of the pair on screen`);
        }
        if (this.choicesSubmitted) {
            throw new WizardError("weighting already submitted; choices are final");
        }
        this.answers.set(pairKey(pair), chosen);
        const next = (this.current as { pairIndex: number }).pairIndex + 1;
        if (next < this.pairs.length) {
            this.current = { kind: "weighting", pairIndex: next };
        }
        // after the final pair the wizard stays on it until submission succeeds
    }

    allPairsAnswered(): boolean {
        return this.pairs.every((pair) => this.answers.has(pairKey(pair)));
    }

    /** One request covering every served pair, in served order. */
    choicesPayload(): ChoicePayload[] {
        if (!this.allPairsAnswered()) {
            const missing = this.pairs.filter((p) => !this.answers.has(pairKey(p))).length;
            throw new WizardError(`${missing} pair(s) still unanswered`);
        }
        return this.pairs.map((pair) => ({
            pair,
            chosen: this.answers.get(pairKey(pair)) as string,
        }));
    }

    markChoicesAccepted(): void {
        if (!this.allPairsAnswered()) {
            throw new WizardError("cannot finish weighting with unanswered pairs");
        }
        this.choicesSubmitted = true;
        this.current = { kind: "rating", dimensionIndex: 0 };
    }

    currentDimension(): DimensionInfo {
        if (this.current.kind !== "rating") {
            throw new WizardError("no rating scale on screen outside the rating step");
        }
        const dimension = this.session.dimensions[this.current.dimensionIndex];
        if (!dimension) {
            throw new WizardError(`dimension index ${this.current.dimensionIndex} out of range`);
        }
        return dimension;
    }

    selectedSegment(dimensionId: string): number | null {
        const value = this.ratings.get(dimensionId);
        return value === undefined ? null : value / 5;
    }

    /** Record the clicked segment (0 = the zero notch) and advance. */
    rateCurrent(segment: number): void {
        const dimension = this.currentDimension();
        this.ratings.set(dimension.id, segmentToValue(segment));
        const next = (this.current as { dimensionIndex: number }).dimensionIndex + 1;
        if (next < this.session.dimensions.length) {
            this.current = { kind: "rating", dimensionIndex: next };
        }
    }

    /** First dimension still unanswered, if any; submission is blocked on it. */
    firstUnratedDimension(): DimensionInfo | null {
        return this.session.dimensions.find((d) => !this.ratings.has(d.id)) ?? null;
    }

    ratingsPayload(): Record<string, number> {
        const missing = this.firstUnratedDimension();
        if (missing) {
            throw new WizardError(`rate "${missing.label}" before submitting`);
        }
        const payload: Record<string, number> = {};
        for (const dimension of this.session.dimensions) {
            payload[dimension.id] = this.ratings.get(dimension.id) as number;
        }
        return payload;
    }

    completeWithScore(score: ScoreDoc): void {
        this.scoreDoc = score;
        this.current = { kind: "done" };
    }

    /** The headline score line shown on the final screen. */
    summaryText(): string {
        if (!this.scoreDoc) {
            throw new WizardError("no score to summarize yet");
        }
        return `Overall workload: ${this.scoreDoc.weighted_task}`;
    }
}

/**
 * Load server state and reconstruct the wizard at the right step, fetching
 * the persisted score when the session is already finished.
 */
export async function resumeWizard(
    client: TlxClient,
    sessionId: string,
    seed?: number,
): Promise<Wizard> {
    const session = await client.getSession(sessionId);
    const pairs = (await client.getPairs(sessionId, seed)).pairs;
    let score: ScoreDoc | null = null;
    if (session.state === "scored") {
        score = await client.getScore(sessionId);
    }
    return new Wizard(session, pairs, score);
}

/**
 * Scripted end-to-end run: answer every pair, rate every dimension, submit
 * both phases. Used by the demo driver and the service contract tests.
 */
export async function runScriptedWizard(
    client: TlxClient,
    sessionId: string,
    pickChosen: (pair: Pair, index: number) => string,
    pickSegment: (dimension: DimensionInfo, index: number) => number,
    seed?: number,
): Promise<Wizard> {
    const wizard = await resumeWizard(client, sessionId, seed);
    if (wizard.step.kind === "intro") {
        wizard.beginWeighting();
        let index = 0;
        while (!wizard.allPairsAnswered()) {
            wizard.choosePair(pickChosen(wizard.currentPair(), index));
            index += 1;
        }
        await client.postChoices(sessionId, wizard.choicesPayload());
        wizard.markChoicesAccepted();
    }
    if (wizard.step.kind === "rating") {
        wizard.session.dimensions.forEach((dimension, index) => {
            wizard.rateCurrent(pickSegment(dimension, index));
        });
        const response = await client.postRatings(sessionId, wizard.ratingsPayload());
        wizard.completeWithScore(response.score);
    }
    return wizard;
}
