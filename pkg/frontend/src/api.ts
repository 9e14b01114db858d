/**
 * Typed client for the questionnaire service (v1 endpoints).
 *
 * Every failure is surfaced as an ApiException carrying the service's
 * structured error body (code, message, optional per-field details).
 */

export type DimensionGroup = "task" | "technology";

export interface DimensionInfo {
    id: string;
    label: string;
    prompt: string;
    group: DimensionGroup;
}

export type SessionStateName = "created" | "weighting_done" | "rating_done" | "scored";

export interface StudyDoc {
    study_id: string;
    name: string;
    dimension_set: string;
    weighting_mode: string;
    created_at: string;
    dimensions: DimensionInfo[];
}

export interface SessionDoc {
    session_id: string;
    study_id: string;
    user_id: string;
    state: SessionStateName;
    created_at: string;
    dimension_set: string;
    weighting_mode: string;
    dimensions: DimensionInfo[];
}

export type Pair = [string, string];

export interface PairsDoc {
    session_id: string;
    mode: string;
    pairs: Pair[];
}

export interface ScoreDoc {
    mode: string;
    raw_task: string;
    weighted_task: string;
    weighted_technology?: string;
}

export interface ChoicePayload {
    pair: Pair;
    chosen: string;
}

export interface UserProfilePayload {
    app_knowledge: "high" | "medium" | "low";
    device_experience: "high" | "low_none";
    task_experience?: "high" | "low";
}

export interface SessionMetricsDoc {
    total_interactions: number;
    clicks: number;
    gazes: number;
    usage_time_ms: number;
    clicks_per_minute: number;
    gazes_per_minute: number;
    focused_objects: number;
}

export interface MetricsDoc {
    session_id: string;
    metrics: SessionMetricsDoc;
    objects: {
        object_id: string;
        gaze_count: number;
        total_dwell_ms: number;
        longest_dwell_ms: number;
        focused: boolean;
    }[];
}

export interface ErrorBody {
    code: string;
    message: string;
    details?: string[];
}

export class ApiException extends Error {
    readonly status: number;
    readonly code: string;
    readonly details: string[];

    constructor(status: number, body: ErrorBody) {
        super(body.message);
        this.status = status;
        this.code = body.code;
        this.details = body.details ?? [];
    }
}

export class TlxClient {
    private readonly baseUrl: string;
    private readonly fetchImpl: typeof fetch;

    constructor(baseUrl: string, fetchImpl: typeof fetch = fetch) {
        this.baseUrl = baseUrl.replace(/\/+$/, "");
        this.fetchImpl = fetchImpl;
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await this.fetchImpl(this.baseUrl + path, {
            method,
            headers: body === undefined ? {} : { "content-type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await response.text();
        const parsed = text ? JSON.parse(text) : null;
        if (!response.ok) {
            const errorBody: ErrorBody =
                parsed && typeof parsed.code === "string"
                    ? parsed
                    : { code: "internal", message: `unexpected response ${response.status}` };
            throw new ApiException(response.status, errorBody);
        }
        return parsed as T;
    }

    healthz(): Promise<{ status: string; version: string }> {
        return this.request("GET", "/healthz");
    }

    createStudy(name: string, dimensionSet: string, weightingMode: string): Promise<StudyDoc> {
        return this.request("POST", "/v1/studies", {
            name,
            dimension_set: dimensionSet,
            weighting_mode: weightingMode,
        });
    }

    createSession(
        studyId: string,
        userId: string,
        profile: UserProfilePayload,
    ): Promise<SessionDoc> {
        return this.request("POST", `/v1/studies/${studyId}/sessions`, {
            user_id: userId,
            profile,
        });
    }

    getSession(sessionId: string): Promise<SessionDoc> {
        return this.request("GET", `/v1/sessions/${sessionId}`);
    }

    getPairs(sessionId: string, seed?: number): Promise<PairsDoc> {
        const query = seed === undefined ? "" : `?seed=${seed}`;
        return this.request("GET", `/v1/sessions/${sessionId}/pairs${query}`);
    }

    postChoices(
        sessionId: string,
        choices: ChoicePayload[],
    ): Promise<{ session_id: string; state: SessionStateName }> {
        return this.request("POST", `/v1/sessions/${sessionId}/choices`, { choices });
    }

    postRatings(
        sessionId: string,
        ratings: Record<string, number>,
    ): Promise<{ session_id: string; state: SessionStateName; score: ScoreDoc }> {
        return this.request("POST", `/v1/sessions/${sessionId}/ratings`, { ratings });
    }

    getScore(sessionId: string): Promise<ScoreDoc> {
        return this.request("GET", `/v1/sessions/${sessionId}/score`);
    }

    getMetrics(sessionId: string): Promise<MetricsDoc> {
        return this.request("GET", `/v1/sessions/${sessionId}/metrics`);
    }
}
