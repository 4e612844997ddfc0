#pragma once
// Problem-file JSON schema, run manifests, and deterministic CSV emission.
// Every output file starts with a '#'-prefixed JSON manifest line recording
// the command, tool version, resolved problem, and arguments, so any file can
// be regenerated byte-identically from its own header.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlp/problem.hpp"

namespace rlp {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json spec_to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const nlohmann::json& j);
ProblemSpec load_problem(const std::string& path);

// Formats with 17 significant digits: round-trip exact, diff-stable.
std::string fmt17(double v);

struct RunManifest {
    std::string command;
    nlohmann::json spec;
    nlohmann::json args;  // normalized flag map, sufficient to re-run
    std::vector<std::string> outputs;

    std::string to_line() const;  // "# {...}" header line
    static RunManifest parse_line(const std::string& line);
};

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const RunManifest& manifest,
              const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);

  private:
    std::ofstream out_;
    size_t ncols_;
};

}  // namespace rlp
