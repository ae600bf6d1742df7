#pragma once
// End-to-end experiment driver: manifest, presets, and resumable stages.
//
// Layout under `out`:
//   scenarios/                    suite manifest, lineage, per-task databases
//   kg/<task>/<profile>/          train.nt, test.nt, train_resolved.nt, ground_truth.csv,
//                                 samples, model, scores, result.tsv
//   results.tsv, report.txt, report.tsv

#include "rddl/eval.hpp"
#include "rddl/ontology.hpp"
#include "rddl/paths.hpp"
#include "rddl/scenario.hpp"
#include "rddl/siamese.hpp"

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::pipe {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause)
        : std::runtime_error("stage " + stage + " failed: " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct EvalConfig {
    std::size_t negatives = 4000;
    double threshold = 0.5;
    std::size_t hits_k = 10;
};

struct RunManifest {
    std::uint64_t seed = 0;
    std::vector<onto::ProfileName> profiles{onto::ProfileName::baseline, onto::ProfileName::rddl};
    std::vector<std::string> tasks;  // empty means all nine
    std::size_t rows_per_table = 50;
    std::size_t scenarios_per_task = 20;
    std::size_t transformations = 4;
    std::size_t train_scenarios = 17;
    std::size_t test_scenarios = 3;
    paths::SamplerConfig sampler;
    nn::ModelConfig model;  // vocab_size and relation_count are filled per graph
    EvalConfig eval;
    std::filesystem::path out = "out";
    bool deterministic = true;

    // Throws ValidationError.
    void validate() const;
    std::vector<scn::Task> task_list() const;
};

// "desk" or "paper".
RunManifest preset(std::string_view name);

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& json_text);
RunManifest load_manifest(const std::filesystem::path& path);

enum class Stage { gen_scenarios, build_kg, resolve_lineage, sample_paths, train, evaluate, report };
std::string_view to_string(Stage s);
std::vector<Stage> all_stages();

struct StageLog {
    std::string stage;
    std::string unit;  // "<task>/<profile>", or "-" for whole-run stages
    bool ran = false;
};

class Pipeline {
public:
    explicit Pipeline(RunManifest manifest);

    // Runs one stage for every unit; units whose recorded checksums match
    // are skipped unless an upstream unit ran in this process.
    void run_stage(Stage stage);
    void run_all();

    const RunManifest& manifest() const { return m_; }
    const std::vector<StageLog>& log() const { return log_; }
    void set_logger(std::function<void(const StageLog&)> fn) { logger_ = std::move(fn); }

    std::filesystem::path unit_dir(scn::Task task, onto::ProfileName profile) const;
    std::filesystem::path results_path() const { return m_.out / "results.tsv"; }
    std::filesystem::path report_path() const { return m_.out / "report.txt"; }

private:
    void gen_scenarios();
    void build_kg(scn::Task task, onto::ProfileName p);
    void resolve(scn::Task task, onto::ProfileName p);
    void sample(scn::Task task, onto::ProfileName p);
    void train(scn::Task task, onto::ProfileName p);
    void evaluate(scn::Task task, onto::ProfileName p);
    void report();

    // Returns true if the unit ran.
    bool unit(Stage stage, const std::string& key, const std::filesystem::path& dir,
              const std::vector<std::filesystem::path>& inputs, const std::vector<std::string>& outputs,
              const std::string& config, const std::function<void()>& body);

    RunManifest m_;
    std::vector<StageLog> log_;
    std::vector<std::string> dirty_;  // units that ran in this process
    std::function<void(const StageLog&)> logger_;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t file_checksum(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace rddl::pipe
