"""Writes data/hopper.obj: a funnel of 29 bands x 32 segments (1,856 triangles).

Mirrors ltsdem::makeFunnel(12, 4, 10, 29, 32).
"""
import math
import pathlib
import sys

TOP, BOTTOM, HEIGHT, BANDS, SEGMENTS = 12.0, 4.0, 10.0, 29, 32


def main(out: pathlib.Path) -> None:
    lines = ["# funnel hopper, opening radius 4 (about four large rocks across)"]
    for b in range(BANDS + 1):
        f = b / BANDS
        rad = BOTTOM + f * (TOP - BOTTOM)
        for s in range(SEGMENTS):
            phi = 2.0 * math.pi * s / SEGMENTS
            lines.append(f"v {rad * math.cos(phi):.17g} {f * HEIGHT:.17g} {rad * math.sin(phi):.17g}")

    def vid(b, s):
        return b * SEGMENTS + (s % SEGMENTS) + 1

    for b in range(BANDS):
        for s in range(SEGMENTS):
            lines.append(f"f {vid(b, s)} {vid(b + 1, s + 1)} {vid(b + 1, s)}")
            lines.append(f"f {vid(b, s)} {vid(b, s + 1)} {vid(b + 1, s + 1)}")
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/hopper.obj"))
