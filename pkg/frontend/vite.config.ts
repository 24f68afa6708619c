import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // during development the API runs separately: `scoreloop serve`
    proxy: { "/v1": "http://127.0.0.1:8000" },
  },
  test: {
    environment: "jsdom",
  },
});
