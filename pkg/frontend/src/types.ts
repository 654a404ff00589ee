import { z } from "zod";

export const FIGURE_KINDS = [
  "error-vs-degree",
  "error-vs-shadows",
  "training-curves",
  "purity-scan",
  "distribution",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

const scaleSchema = z.enum(["linear", "log"]);

export const figureSpecSchema = z
  .object({
    kind: z.enum(FIGURE_KINDS),
    inputs: z.array(z.string()).min(1),
    output: z.string().min(1),
    title: z.string().optional(),
    scales: z
      .object({
        x: scaleSchema.optional(),
        y: scaleSchema.optional(),
      })
      .strict()
      .optional(),
  })
  .strict();

export type FigureSpec = z.infer<typeof figureSpecSchema>;

/** Required CSV header per figure kind; parsing refuses mismatches. */
export const REQUIRED_HEADERS: Record<FigureKind, string[]> = {
  "error-vs-degree": ["beta", "degree", "max_err", "seed_count"],
  "error-vs-shadows": ["method", "n_shadows", "max_err"],
  "training-curves": ["step", "S", "eps_max", "eps_mean"],
  "purity-scan": ["model", "beta", "n", "purity"],
  distribution: ["bitstring", "q", "p_model"],
};

/** Default axis scales per kind; error plots use a log y axis. */
export const DEFAULT_SCALES: Record<FigureKind, { x: "linear" | "log"; y: "linear" | "log" }> = {
  "error-vs-degree": { x: "linear", y: "log" },
  "error-vs-shadows": { x: "log", y: "log" },
  "training-curves": { x: "linear", y: "linear" },
  "purity-scan": { x: "linear", y: "log" },
  distribution: { x: "linear", y: "linear" },
};
