#include "CLI11.hpp"
#include "flatlab/error.hpp"
#include "flatlab/scenario.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

using nlohmann::json;
namespace sc = flatlab::scenario;

namespace {

struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> grid;
    std::string out;
    std::string format = "json";
};

std::string render(const sc::Report& r, const std::string& format) {
    if (format == "csv") return r.to_csv();
    return r.to_json().dump(2) + "\n";
}

// Payload files may be bare payloads or complete scenarios.
json wrap(const std::string& kind, const std::string& path, const std::string& mode) {
    json j = sc::load_json_file(path);
    if (j.is_object() && j.contains("kind") && j.contains("payload")) {
        if (j.at("kind") != kind) throw flatlab::Error(flatlab::ErrorKind::Schema, "scenario kind is not " + kind);
    } else {
        if (kind == "theta" && j.is_object() && j.contains("Z")) {
            const json origin(j.at("Z").size(), 0.0);
            j = {{"params", j}, {"eval", {{"points", {origin}}, {"evenness", 10}}}, {"quasi", {{"random", 20}}}};
        }
        j = {{"schema_version", sc::kSchemaVersion}, {"kind", kind}, {"name", kind + ":" + path}, {"payload", j}};
    }
    if (!mode.empty()) j["mode"] = mode;
    return j;
}

int emit(const std::vector<json>& scenarios, const Flags& f) {
    sc::RunOptions opt{f.seed, f.tol, f.grid, {}};
    std::vector<std::future<sc::Report>> jobs;
    for (const json& s : scenarios) jobs.push_back(std::async(std::launch::async, [&opt, s] { return sc::run_scenario(s, opt); }));
    std::vector<sc::Report> reports;
    for (auto& j : jobs) reports.push_back(j.get());
    bool pass = true;
    std::string body;
    for (const sc::Report& r : reports) {
        pass = pass && r.all_pass();
        if (reports.size() > 1 && f.format == "json") continue;
        body += render(r, f.format);
    }
    if (reports.size() > 1 && f.format == "json") {
        json arr = json::array();
        for (const sc::Report& r : reports) arr.push_back(r.to_json());
        body = arr.dump(2) + "\n";
    }
    if (f.out.empty()) {
        std::cout << body;
    } else {
        std::ofstream o(f.out, std::ios::binary);
        if (!o) throw flatlab::Error(flatlab::ErrorKind::Parse, "cannot write '" + f.out + "'");
        o << body;
        for (const sc::Report& r : reports) std::cout << r.summary();
    }
    return pass ? 0 : 1;
}

void add_flags(CLI::App* app, Flags& f) {
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--tol", f.tol, "override tolerance thresholds");
    app->add_option("--grid", f.grid, "override grid resolution");
    app->add_option("--out", f.out, "report file");
    app->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatlab: rank-one local systems, theta transitions and weighted dbar experiments"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::string> refs;
    std::string path, mode;

    auto* run = app.add_subcommand("run", "run scenario files or catalog names");
    run->add_option("scenario", refs, "scenario file or catalog name")->required();
    add_flags(run, f);

    auto* list = app.add_subcommand("list", "list shipped scenarios");

    auto* cech = app.add_subcommand("cech", "twisted Cech cohomology of a nerve");
    cech->add_option("payload", path)->required();
    add_flags(cech, f);

    auto* jump = app.add_subcommand("jump", "jump ideal and torsion zero set");
    jump->add_option("payload", path)->required();
    add_flags(jump, f);

    auto* theta = app.add_subcommand("theta", "theta evaluation, quasi-periodicity, triples and ratio fits");
    theta->add_option("mode", mode)->required()->check(CLI::IsMember({"eval", "quasi", "triple", "fit"}));
    theta->add_option("payload", path)->required();
    add_flags(theta, f);

    auto* family = app.add_subcommand("family", "flat family identities and curvature");
    family->add_option("payload", path)->required();
    add_flags(family, f);

    auto* dbar = app.add_subcommand("dbar", "weighted dbar experiments on the punctured disk");
    dbar->add_option("op", mode)->required()->check(
        CLI::IsMember({"cutoff", "pushforward", "solve", "ot-constant", "ot-extend", "curvature", "two-weight"}));
    dbar->add_option("payload", path)->required();
    add_flags(dbar, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const std::string dir = sc::examples_dir();
        if (list->parsed()) {
            for (const sc::CatalogEntry& e : sc::list_examples(dir)) std::cout << e.name << "\t" << e.kind << "\t" << e.description << "\n";
            return 0;
        }
        std::vector<json> scenarios;
        if (run->parsed())
            for (const std::string& r : refs) scenarios.push_back(sc::load_scenario(r, dir));
        else if (cech->parsed()) scenarios.push_back(wrap("cech", path, ""));
        else if (jump->parsed()) scenarios.push_back(wrap("jumploci", path, ""));
        else if (theta->parsed()) scenarios.push_back(wrap("theta", path, mode));
        else if (family->parsed()) scenarios.push_back(wrap("family", path, ""));
        else if (dbar->parsed()) scenarios.push_back(wrap("dbar", path, mode));
        return emit(scenarios, f);
    } catch (const flatlab::Error& e) {
        std::cerr << e.what() << "\n";
    } catch (const json::parse_error& e) {
        std::cerr << "ParseError: " << e.what() << "\n";
    } catch (const json::exception& e) {
        std::cerr << "SchemaError: " << e.what() << "\n";
    }
    return 2;
}
