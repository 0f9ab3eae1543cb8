#pragma once

#include <string>
#include <vector>

#include "svplab/experiments.hpp"

/**
 * Self-contained SVG emitters. No plotting dependency: every element is
 * written directly, coordinates formatted with fixed precision, so the byte
 * stream is a pure function of the data.
 */
namespace svplab {

/// Three stacked panels: eta*, MNI and SVM estimates, training labels.
std::string render_figure1_svg(const std::vector<Figure1Panel>& panels);

/// Proportion heatmap over (r, q) with the predicted-region boundary
/// polyline q = (1-r)/2 and hatching on invalid cells.
std::string render_heatmap_svg(const HeatmapResult& result);

}  // namespace svplab
