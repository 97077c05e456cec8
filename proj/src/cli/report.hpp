#pragma once

#include <filesystem>
#include <string>

namespace clustermorph::cli {

/// Plain-text summary of a finished run: image status counts, filter
/// attrition by stage, berries per cluster, truth totals when the metadata
/// gave them, the count-correction fit and the repeatability table. Reads
/// manifest.json, clusters.csv and (when present) repeatability.csv.
/// Throws ParseError naming a missing table.
std::string cmd_report(const std::filesystem::path& results_dir);

}  // namespace clustermorph::cli
