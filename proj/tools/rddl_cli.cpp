#include "rddl/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace rddl;

namespace {

struct Overrides {
    std::string manifest;
    std::string preset;
    std::string profile;
    std::string task;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool deterministic = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--manifest", o.manifest, "Run manifest (JSON)");
    cmd->add_option("--preset", o.preset, "desk or paper");
    cmd->add_option("--profile", o.profile, "baseline, rddl or both");
    cmd->add_option("--task", o.task, "task name or all");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--deterministic", o.deterministic, "single-threaded, bit-reproducible run");
}

pipe::RunManifest build_manifest(const Overrides& o) {
    if (!o.manifest.empty() && !o.preset.empty()) throw pipe::ValidationError("--manifest and --preset are exclusive");
    pipe::RunManifest m = o.manifest.empty() ? pipe::preset(o.preset.empty() ? "desk" : o.preset)
                                             : pipe::load_manifest(o.manifest);
    if (!o.profile.empty()) {
        if (o.profile == "both") m.profiles = {onto::ProfileName::baseline, onto::ProfileName::rddl};
        else if (o.profile == "baseline") m.profiles = {onto::ProfileName::baseline};
        else if (o.profile == "rddl") m.profiles = {onto::ProfileName::rddl};
        else throw pipe::ValidationError("unknown profile '" + o.profile + "'");
    }
    if (!o.task.empty()) {
        if (o.task == "all") m.tasks.clear();
        else m.tasks = {o.task};
    }
    if (o.seed) m.seed = *o.seed;
    if (!o.out.empty()) m.out = o.out;
    if (o.deterministic) m.deterministic = true;
    m.validate();
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lineage link prediction over relational-to-graph conversions"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<std::pair<CLI::App*, std::optional<pipe::Stage>>> commands;
    for (auto s : pipe::all_stages()) {
        auto* cmd = app.add_subcommand(std::string(pipe::to_string(s)), "run the " + std::string(pipe::to_string(s)) + " stage");
        add_common(cmd, o);
        commands.emplace_back(cmd, s);
    }
    auto* run = app.add_subcommand("run", "run every stage in order");
    add_common(run, o);
    commands.emplace_back(run, std::nullopt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    pipe::RunManifest m;
    try {
        m = build_manifest(o);
    } catch (const pipe::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }

    try {
        pipe::Pipeline p(m);
        p.set_logger([](const pipe::StageLog& l) {
            std::cerr << "[" << l.stage << "] " << l.unit << (l.ran ? " done" : " up to date, skipped") << "\n";
        });
        for (const auto& [cmd, stage] : commands) {
            if (!cmd->parsed()) continue;
            if (stage) {
                p.run_stage(*stage);
            } else {
                p.run_all();
                std::cout << pipe::read_file(p.report_path());
                std::cerr << "results: " << p.results_path().string() << "\n";
            }
        }
    } catch (const pipe::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const pipe::StageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
