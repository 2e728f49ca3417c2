import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    fileParallelism: false, // the e2e file owns a service process
    testTimeout: 20000,
  },
});
