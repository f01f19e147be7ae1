#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace topicdrift {

/// Minimal line chart: divergence score per window transition with a dashed
/// horizontal threshold rule. Self-contained SVG, no plotting dependency.
void write_diffusion_chart(const std::filesystem::path& path, const std::string& term,
                           const std::vector<std::string>& pair_labels,
                           const std::vector<double>& scores, double threshold);

/// Filesystem-safe slug for a term name (spaces to '_', other non-alnum to '-').
std::string term_slug(const std::string& term);

}  // namespace topicdrift
