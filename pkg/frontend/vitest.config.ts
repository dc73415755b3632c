import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // the end-to-end suite boots the real API server once per file
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
