#pragma once

#include "mspec/deformation.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

// A deformation, a point and the per-command options, all from one JSON document:
// {"deformation": {...}, "point": {...}, "options": {...}}
struct Scenario {
    Deformation d;
    PointPattern p;
    nlohmann::json options = nlohmann::json::object();
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
// "1,0,1; 0,1,1" with rationals allowed as entries
Matrix parse_matrix_text(const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

enum class Format { Text, Json, Latex };
Format parse_format(const std::string& name);

struct Report {
    nlohmann::json doc;
    std::vector<std::string> text;
    std::vector<std::string> latex;
};

// Raised by command builders: which module refused the input and the rule it names.
struct CommandError : std::runtime_error {
    std::string module;
    std::string rule;
    CommandError(const std::string& msg, std::string mod, std::string r)
        : std::runtime_error(msg), module(std::move(mod)), rule(std::move(r)) {}
};

nlohmann::json error_json(const CommandError& e);

const std::vector<std::string>& command_names();
// Throws CommandError; unknown commands are an InputError of the cli-report module.
Report run_command(const std::string& command, const Scenario& sc);
std::string render(const Report& r, Format f);

// --- fixture corpus ---

struct FixtureCase {
    std::string name;
    std::string group;
    std::string file;
    std::string command;
    nlohmann::json scenario;
    nlohmann::json expect;  // array of {path, kind, value, ...}
};

struct CheckResult {
    std::string path;
    std::string kind;
    bool ok = false;
    std::string detail;
};

struct FixtureResult {
    std::string name;
    std::string group;
    bool ok = false;
    std::string error;
    std::vector<CheckResult> checks;
    double seconds = 0;
};

std::string default_fixture_dir();
// every *.json under dir, each holding an array of cases; sorted by file then order
std::vector<FixtureCase> load_fixtures(const std::string& dir);
// group equal to the filter, or name containing it; an empty filter keeps everything
std::vector<FixtureCase> filter_fixtures(const std::vector<FixtureCase>& all, const std::string& filter);
FixtureResult run_fixture(const FixtureCase& c);

}  // namespace mspec
