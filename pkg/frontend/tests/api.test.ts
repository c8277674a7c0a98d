import { describe, expect, it } from "vitest";

import { ApiError, GatewayClient } from "../src/api.js";

import { jsonResponse, session } from "./helpers.js";

describe("gateway client", () => {
  it("posts JSON and returns the parsed body", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const client = new GatewayClient("", async (url, init) => {
      calls.push({ url, init });
      return jsonResponse(session());
    });
    const created = await client.createSession("general");
    expect(created.session_id).toBe("s1");
    expect(calls[0].url).toBe("/api/sessions");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ mode: "general" });
  });

  it("sends the frame as base64 with a client timestamp", async () => {
    let body: Record<string, unknown> = {};
    const client = new GatewayClient("", async (_url, init) => {
      body = JSON.parse(String(init?.body));
      return jsonResponse({});
    });
    await client.submitFrame("s1", "QUJD");
    expect(body.image).toBe("QUJD");
    expect(typeof body.client_timestamp).toBe("number");
  });

  it("decodes error bodies into typed ApiError", async () => {
    const client = new GatewayClient("", async () =>
      jsonResponse(
        { code: "no_face", message: "no face", retryable: true, emotion: "fear" },
        422,
      ),
    );
    const failure = await client
      .registerTemplate("p", "fear", "AAAA")
      .catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe("no_face");
    expect(failure.retryable).toBe(true);
    expect(failure.body.emotion).toBe("fear");
  });

  it("targets the documented endpoints only", async () => {
    const urls: string[] = [];
    const client = new GatewayClient("http://srv", async (url) => {
      urls.push(url);
      return jsonResponse({});
    });
    await client.getSession("s9");
    await client.completeRegistration("p7");
    await client.stats();
    expect(urls).toEqual([
      "http://srv/api/sessions/s9",
      "http://srv/api/players/p7/templates/complete",
      "http://srv/api/stats",
    ]);
  });
});
