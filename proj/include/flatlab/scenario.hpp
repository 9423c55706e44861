#pragma once

#include "flatlab/cech.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flatlab::scenario {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;  // overrides every tolerance-type threshold
    std::optional<int> grid;    // overrides grid resolution where a scenario has one
    std::string examples_dir;   // empty selects examples_dir()
};

struct Verdict {
    std::string name;
    double measured = 0;
    double threshold = 0;
    std::string relation;  // "<", "<=", ">=" or ">"
    bool pass = false;
};

struct Report {
    nlohmann::json scenario;
    nlohmann::json results;
    nlohmann::json provenance;
    nlohmann::json table;  // {"columns": [...], "rows": [[...]]} or null
    std::vector<Verdict> verdicts;

    bool all_pass() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
    std::string summary() const;
};

// FLATLAB_EXAMPLES if set, else the shipped scenario directory.
std::string examples_dir();

struct CatalogEntry {
    std::string name, kind, description, path;
};
std::vector<CatalogEntry> list_examples(const std::string& dir);

nlohmann::json load_json_file(const std::string& path);
// A catalog name or a path to a scenario file.
nlohmann::json load_scenario(const std::string& ref, const std::string& dir);
cech::Datum resolve_datum(const nlohmann::json& ref, const std::string& dir);

Report run_scenario(const nlohmann::json& scenario, const RunOptions& opt = {});

}  // namespace flatlab::scenario
