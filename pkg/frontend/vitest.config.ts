import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // The UI-contract suite boots the real HTTP service in a child
    // process; give startup and teardown generous budgets.
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
