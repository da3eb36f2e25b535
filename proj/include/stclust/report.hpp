#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "stclust/analysis.hpp"
#include "stclust/kmeans.hpp"
#include "stclust/mistic.hpp"
#include "stclust/zone_map.hpp"

namespace stclust::report {

using Json = nlohmann::ordered_json;

/// `row,col,label` with a header line; unlabeled cells are omitted.
std::string label_csv(const ZoneMap& map);

/// Reads a label CSV. With a geometry, indices must fall inside it; without
/// one the grid is the bounding box of the listed cells (planar, unit cells).
ZoneMap read_label_csv(const std::filesystem::path& file, const std::optional<GridGeometry>& geometry);

Json kmeans_run(const ClusterMap& map);
Json focus_table(const mistic::MisticResult& result);
Json cores(const mistic::MisticResult& result, const mistic::MisticParams& params);
Json comparison(const analysis::ContingencyTable& table);
Json summary(const analysis::SummaryReport& report);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& j);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);
/// Hex SHA-256 over every regular file below `dir`, in sorted relative-path
/// order, hashing each relative path and content.
std::string sha256_tree(const std::filesystem::path& dir);
std::string sha256_bytes(std::string_view bytes);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace stclust::report
