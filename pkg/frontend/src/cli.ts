/** Render subcommands: each consumes harness CSV/JSON outputs and writes one
 * SVG.  Errors (missing files, missing columns) abort with no partial file. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import {
  cltOverlay,
  rqDeltaStrips,
  rqScatter,
  torsionScatter,
  valueDistribution,
  vanishingCurves,
  vanishingSlopes,
} from "./figures.js";

function usage(): never {
  console.error(
    [
      "usage: render <subcommand> --out FILE.svg [inputs...]",
      "  value-dist    --hist H.csv --density D.csv [--rescale-x R] [--rescale-y R]",
      "  clt-overlay   --hist H.csv --model M.csv --gauss G.csv [--alpha A]",
      "  rq-scatter    --rq RQ.csv --which main|refined",
      "  rq-dist       --rq RQ.csv",
      "  vanish-curves --vanish V1.csv [--vanish V2.csv ...]",
      "  vanish-slopes --meta M1.json [--meta M2.json ...]",
      "  torsion       --pair V1.csv:M1.json [--pair V2.csv:M2.json ...]",
    ].join("\n"),
  );
  process.exit(1);
}

interface Args {
  flags: Map<string, string[]>;
  sub: string;
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) usage();
  const sub = argv[0];
  const flags = new Map<string, string[]>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) usage();
    const list = flags.get(key) ?? [];
    list.push(argv[i + 1]);
    flags.set(key, list);
  }
  return { flags, sub };
}

function one(args: Args, key: string): string {
  const v = args.flags.get(key);
  if (!v || v.length !== 1) usage();
  return v[0];
}

function oneOr(args: Args, key: string, dflt: string): string {
  const v = args.flags.get(key);
  if (!v) return dflt;
  if (v.length !== 1) usage();
  return v[0];
}

function many(args: Args, key: string): string[] {
  const v = args.flags.get(key);
  if (!v || v.length === 0) usage();
  return v;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const out = one(args, "--out");
  let svg: string;
  try {
    switch (args.sub) {
      case "value-dist":
        svg = valueDistribution(one(args, "--hist"), one(args, "--density"), {
          rescaleX: Number(oneOr(args, "--rescale-x", "1")),
          rescaleY: Number(oneOr(args, "--rescale-y", "1")),
        });
        break;
      case "clt-overlay":
        svg = cltOverlay(one(args, "--hist"), one(args, "--model"), one(args, "--gauss"), {
          alpha: Number(oneOr(args, "--alpha", "1")),
        });
        break;
      case "rq-scatter": {
        const which = one(args, "--which");
        if (which !== "main" && which !== "refined") usage();
        svg = rqScatter(one(args, "--rq"), which);
        break;
      }
      case "rq-dist":
        svg = rqDeltaStrips(one(args, "--rq"));
        break;
      case "vanish-curves":
        svg = vanishingCurves(many(args, "--vanish"));
        break;
      case "vanish-slopes":
        svg = vanishingSlopes(many(args, "--meta"));
        break;
      case "torsion":
        svg = torsionScatter(
          many(args, "--pair").map((p) => {
            const [vanishCsv, metaJson] = p.split(":");
            if (!vanishCsv || !metaJson) usage();
            return { vanishCsv, metaJson };
          }),
        );
        break;
      default:
        usage();
    }
  } catch (err) {
    console.error(`render failed: ${(err as Error).message}`);
    return 2;
  }
  mkdirSync(dirname(out), { recursive: true });
  writeFileSync(out, svg);
  console.log(out);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
