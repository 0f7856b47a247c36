"""Detect lines, circles, and ray directions in a synthetic drawing."""

from diagramcheck import ThresholdConfig, threshold_foreground, to_grayscale
from diagramcheck.detect import (detect_radial_peaks, hough_circles,
                                 hough_lines, radial_profile)
from diagramcheck.render import INK, Canvas, direction_vector

cfg = ThresholdConfig()

# a circle, a long diagonal, and a 3-ray fan on one 1024x1024 canvas
canvas = Canvas(1024, 1024)
canvas.stroke_circle((700, 300), 150, 3, INK)
canvas.stroke_segment((100, 900), (520, 620), 3, INK)
vertex = (300, 300)
for d in (20, 110, 250):
    ux, uy = direction_vector(d)
    canvas.stroke_segment(vertex, (vertex[0] + 220 * ux, vertex[1] + 220 * uy),
                          3, INK)

mask = threshold_foreground(to_grayscale(canvas.to_image()), 200, True)

segments = hough_lines(mask, cfg.line_vote_threshold,
                       cfg.line_min_len(1024, 1024), cfg.line_max_gap,
                       cfg.hough_seed)
print(f"{len(segments)} segments; longest at {segments[0].angle:.1f} deg, "
      f"{segments[0].length:.0f} px")

circles = hough_circles(mask, cfg.venn_circle)
print(f"{len(circles)} circles; first at {circles[0].center} "
      f"r={circles[0].radius:.1f}")

probe = cfg.probe_radius(1024, 1024)
peaks = detect_radial_peaks(radial_profile(mask, vertex, probe), probe)
print("ray directions:", [round(p.direction, 1) for p in peaks])
