// mspec: command-line front end over the report layer.
#include "mspec/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;

namespace {

struct Common {
    std::string scenario;
    std::string matrix;
    std::string blocks;
    std::string zeros;
    std::string norms;
    bool normalized = false;
    std::string format;
    std::vector<std::string> set_options;  // key=value, value parsed as JSON when it can be
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mspec::CommandError("cannot read '" + path + "'", "cli-report", "file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --scenario wins for the deformation and point; flags then override pieces of it
json build_scenario(const Common& c) {
    json j = json::object();
    if (!c.scenario.empty()) {
        const std::string text = c.scenario == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                                   : slurp(c.scenario);
        j = json::parse(text);  // parse_error propagates: exit code 2
    }
    if (!c.matrix.empty()) {
        std::string text = c.matrix;
        if (text.find(',') == std::string::npos && text.find(';') == std::string::npos) text = slurp(text);
        json d{{"A", json::array()}};
        for (const auto& row : mspec::parse_matrix_text(text)) {
            json r = json::array();
            for (const auto& x : row) r.push_back(mspec::q_str(x));
            d["A"].push_back(r);
        }
        j["deformation"] = d;
    }
    if (!c.blocks.empty() && j.contains("deformation") && j["deformation"].is_object()) {
        std::vector<int> dims;
        for (const auto& s : mspec::split_list(c.blocks)) dims.push_back(std::stoi(s));
        j["deformation"]["blocks"] = dims;
    }
    json& p = j["point"];
    if (p.is_null()) p = json::object();
    if (!c.zeros.empty()) {
        std::vector<int> z;
        for (const auto& s : mspec::split_list(c.zeros)) z.push_back(std::stoi(s));
        p["zeros"] = z;
    }
    if (!c.norms.empty()) {
        // "2:0.5,4:3"
        json n = json::object();
        for (const auto& s : mspec::split_list(c.norms)) {
            auto colon = s.find(':');
            if (colon == std::string::npos) throw mspec::CommandError("norms are k:value", "cli-report", "options");
            n[s.substr(0, colon)] = std::stod(s.substr(colon + 1));
        }
        p["norms"] = n;
    }
    if (c.normalized) p["normalized"] = true;
    json& o = j["options"];
    if (o.is_null()) o = json::object();
    for (const auto& kv : c.set_options) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw mspec::CommandError("options are key=value", "cli-report", "options");
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        json v = json::parse(val, nullptr, false);
        o[key] = v.is_discarded() ? json(val) : v;
    }
    return j;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-s,--scenario", c.scenario, "scenario JSON file ('-' for stdin)");
    sub->add_option("-m,--matrix", c.matrix, "matrix as '1,0,1;0,1,1' or a file holding that text");
    sub->add_option("--blocks", c.blocks, "block dimensions, e.g. '1,2,1'");
    sub->add_option("-z,--zeros", c.zeros, "vanishing blocks, e.g. '1,2'");
    sub->add_option("--norms", c.norms, "block norms at the point, e.g. '3:2.5'");
    sub->add_flag("--normalized", c.normalized, "all nonzero block norms equal 1");
    sub->add_option("-f,--format", c.format, "text, json or latex (default from MSPEC_FORMAT, else text)");
    sub->add_option("-o,--opt", c.set_options, "command option key=value (value read as JSON when possible)");
}

int run_fixtures(const std::string& dir, const std::string& filter, bool as_json) {
    const auto cases = mspec::filter_fixtures(mspec::load_fixtures(dir), filter);
    if (cases.empty()) {
        std::cerr << "warning: no fixtures match '" << filter << "' in " << dir << "\n";
        return 0;
    }
    int failed = 0;
    json out = json::array();
    for (const auto& c : cases) {
        const auto r = mspec::run_fixture(c);
        if (!r.ok) ++failed;
        if (as_json) {
            json checks = json::array();
            for (const auto& k : r.checks)
                checks.push_back({{"path", k.path}, {"kind", k.kind}, {"ok", k.ok}, {"detail", k.detail}});
            out.push_back({{"name", r.name}, {"group", r.group}, {"ok", r.ok}, {"error", r.error}, {"checks", checks}});
            continue;
        }
        std::cout << (r.ok ? "ok   " : "FAIL ") << r.group << "/" << r.name << "\n";
        if (!r.error.empty()) std::cout << "     " << r.error << "\n";
        for (const auto& k : r.checks)
            if (!k.ok) std::cout << "     " << k.path << " (" << k.kind << "): " << k.detail << "\n";
    }
    if (as_json) std::cout << out.dump(2) << "\n";
    else std::cout << cases.size() - failed << "/" << cases.size() << " fixtures passed\n";
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multispecialization toolkit: monomial semigroups, level functions, multicones and asymptotics"};
    app.require_subcommand(1);

    Common common;
    std::map<std::string, CLI::App*> subs;
    const std::map<std::string, std::string> help = {
        {"analyze", "pipeline, levels, multicone and expansion together"},
        {"model", "rank data and derived monomials"},
        {"pipeline", "generator sets through every elimination stage"},
        {"levels", "level functions (-o hat=true adds the order-independent family)"},
        {"multicone", "multicone system (-o eps_mode=per-pair, -o one_sided=true)"},
        {"closure", "closed system (-o cap=N, -o point=[..] -o eps=..)"},
        {"project", "drop blocks from the one-sided system (-o drop=k, -o zero=true)"},
        {"restrict", "restriction check for an extra row (-o beta=[..])"},
        {"probe", "normal-cone oracle (-o set='x3 = x1*x2', -o seed=.., -o samples=..)"},
        {"expand", "index sets, App template and remainder (-o N=[..], -o function='z1*z2')"},
        {"map-check", "compatibility of a polynomial map (-o target=.., -o map=[..])"},
        {"classify2", "two-manifold catalog lookup"},
        {"verify", "numeric estimate check (-o function=.., -o N=[..], -o seed=..)"},
    };
    for (const auto& name : mspec::command_names()) {
        auto it = help.find(name);
        auto* sub = app.add_subcommand(name, it == help.end() ? "" : it->second);
        add_common(sub, common);
        subs[name] = sub;
    }

    std::string fixture_dir = mspec::default_fixture_dir(), filter;
    bool fixtures_json = false;
    auto* fx = app.add_subcommand("fixtures", "run the fixture corpus");
    fx->add_option("filter", filter, "group name or name substring");
    fx->add_option("--dir", fixture_dir, "fixture directory");
    fx->add_flag("--json", fixtures_json, "machine-readable results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (fx->parsed()) {
        try {
            return run_fixtures(fixture_dir, filter, fixtures_json);
        } catch (const mspec::InputError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;

    std::string fmt_name = common.format;
    if (fmt_name.empty()) {
        const char* env = std::getenv("MSPEC_FORMAT");
        fmt_name = env && *env ? env : "text";
    }
    mspec::Format fmt = mspec::Format::Text;
    try {
        fmt = mspec::parse_format(fmt_name);
    } catch (const mspec::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        const json j = build_scenario(common);
        const mspec::Scenario sc = [&] {
            try {
                return mspec::scenario_from_json(j);
            } catch (const mspec::InputError& e) {
                throw mspec::CommandError(e.what(), "deformation-model", e.where.empty() ? "input" : e.where);
            }
        }();
        std::cout << mspec::render(mspec::run_command(command, sc), fmt);
        return 0;
    } catch (const json::parse_error& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const mspec::CommandError& e) {
        if (fmt == mspec::Format::Json) std::cout << mspec::error_json(e).dump(2) << "\n";
        else std::cerr << "error [" << e.module << "/" << e.rule << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error [exact-monomials/number]: " << e.what() << "\n";
        return 1;
    } catch (const mspec::InputError& e) {
        mspec::CommandError ce(e.what(), "cli-report", e.where.empty() ? "input" : e.where);
        if (fmt == mspec::Format::Json) std::cout << mspec::error_json(ce).dump(2) << "\n";
        else std::cerr << "error [" << ce.module << "/" << ce.rule << "]: " << e.what() << "\n";
        return 1;
    }
}
