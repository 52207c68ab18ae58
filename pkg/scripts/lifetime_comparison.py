"""Zero-field vs 2.6 mT VRO: write both averaged traces and compare envelope lifetimes."""

import argparse
from pathlib import Path

from hybridvro.analysis import NoOscillation, fit_envelope_lifetime, oscillation_frequency
from hybridvro.config import RunConfig
from hybridvro.experiments import run_vro, vro_csv, write_text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--realizations", type=int, default=8)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--out", type=Path, default=Path("results/lifetime"))
    args = ap.parse_args()

    base = RunConfig(seed=args.seed, n_realizations=args.realizations)
    taus = {}
    for field in (0.0, 2.6):
        cfg = base.replace(b_ext_mt=field)
        traj = run_vro(cfg, args.threads)
        write_text(args.out / f"vro_{field:g}mT.csv", vro_csv(traj, cfg))
        fit = fit_envelope_lifetime(traj)
        taus[field] = fit.tau
        try:
            freq = f"{oscillation_frequency(traj):6.2f} MHz"
        except NoOscillation:
            freq = "not resolved"
        print(f"B = {field:3.1f} mT: tau = {fit.tau:6.1f} ns, P oscillation {freq}, "
              f"{fit.n_extrema} extrema, log residual {fit.residual:.3f}")
    print(f"lifetime ratio tau(2.6 mT) / tau(0) = {taus[2.6] / taus[0.0]:.2f}")


if __name__ == "__main__":
    main()
