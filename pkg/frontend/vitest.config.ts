import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // the round-trip test builds a fixture and boots a real server
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
