#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "envtiming/boundary.hpp"
#include "envtiming/config.hpp"
#include "envtiming/policy.hpp"
#include "envtiming/solver.hpp"

namespace envtiming {

/// Library version string baked in at build time.
const char* version();

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// boundary.csv: z,m,c,residual,residual_se with 10 significant digits. Rows without a
/// residual estimate (stride > 1) carry "nan".
std::string boundary_csv(const Boundary& c, const std::vector<ResidualRow>& residuals);

/// Reads the z, m and c columns of a boundary.csv written by boundary_csv.
Boundary read_boundary_csv(const std::filesystem::path& path, const Model& model);

std::string stats_csv(const StatePoint& sp, const PolicyStats& s, const Model& model);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string surface_csv(const std::vector<SurfaceRow>& rows);

/// Skeleton of a run_meta record: version, command, seed and effective config.
nlohmann::ordered_json run_meta(const RunConfig& cfg, const std::string& command);
nlohmann::ordered_json solve_info_json(const SolveInfo& info);

/// Writes `<stem>.run_meta.json` next to an output file.
void write_run_meta(const std::filesystem::path& output_file, const nlohmann::ordered_json& meta);

} // namespace envtiming
