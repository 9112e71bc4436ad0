#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorlight/scan.hpp"

namespace tl {

/// One map of a run: file stem, observable and its resolved description.
struct PlannedMap {
  std::string stem;
  Observable observable;
  nlohmann::json description;
};

/// Validated run document. Every physical quantity in the document carries
/// a unit; unknown keys are rejected with the offending path.
struct RunPlan {
  nlohmann::json document;
  std::string name;
  std::string output_dir;
  BeamSpec beam;
  GridSpec grid;
  DiffBackend backend = DiffBackend::automatic;
  bool keep_complex = false;
  unsigned threads = 0;
  std::vector<PlannedMap> maps;
};

/// Parses JSON text; syntax errors become ConfigError with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Throws ConfigError naming the offending field, e.g. "run.beam.l".
RunPlan parse_run(const nlohmann::json& document);

/// Individual sections, shared with the point query.
BeamSpec parse_beam(const nlohmann::json& section, const std::string& path);
TransitionSpec parse_transition(const nlohmann::json& section, const std::string& path,
                                const std::optional<HalfInt>& m2_override = std::nullopt);
Geometry parse_geometry(const nlohmann::json& section, const std::string& path);
TrapSpec parse_trap(const nlohmann::json& section, const std::string& path);
GridSpec parse_grid(const nlohmann::json& section, const std::string& path);
DiffBackend parse_backend(const std::string& text, const std::string& path);

struct RunOutput {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
  MapDataset map;
};

/// Evaluates every planned map and writes CSV plus JSON sidecar files into
/// `output_dir` (or the plan's own directory). Each sidecar echoes the run
/// document under "run", so re-running that echo reproduces the outputs.
std::vector<RunOutput> execute_run(const RunPlan& plan, const std::optional<std::filesystem::path>& output_dir = {});

} // namespace tl
