#include "rddl/pipeline.hpp"

#include "rddl/convert.hpp"
#include "rddl/csv.hpp"
#include "rddl/reldb.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rddl::pipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Directories hash their sorted relative file names and contents.
std::uint64_t file_checksum(const fs::path& path) {
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(path)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        std::uint64_t h = fnv1a("dir");
        for (const auto& f : files) {
            h = fnv1a(fs::relative(f, path).generic_string(), h);
            h = fnv1a(read_file(f), h);
        }
        return h;
    }
    return fnv1a(read_file(path));
}

// ---------------------------------------------------------------------------
// Manifest

void RunManifest::validate() const {
    if (profiles.empty()) throw ValidationError("no ontology profile selected");
    std::set<onto::ProfileName> seen(profiles.begin(), profiles.end());
    if (seen.size() != profiles.size()) throw ValidationError("duplicate profile");
    for (const auto& t : tasks) {
        if (!scn::parse_task(t)) throw ValidationError("unknown task '" + t + "'");
    }
    if (rows_per_table < 2) throw ValidationError("rows_per_table must be at least 2");
    if (transformations < 1) throw ValidationError("transformations must be positive");
    if (train_scenarios < 1 || test_scenarios < 1) throw ValidationError("train and test scenario counts must be positive");
    if (train_scenarios + test_scenarios > scenarios_per_task) {
        throw ValidationError("train + test scenarios exceed scenarios_per_task");
    }
    if (sampler.num_paths < 1 || sampler.max_length < 1 || sampler.walk_budget < 1) {
        throw ValidationError("sampler sizes must be positive");
    }
    if (sampler.restart_probability < 0.0 || sampler.restart_probability >= 1.0) {
        throw ValidationError("restart_probability must lie in [0, 1)");
    }
    if (sampler.num_paths != model.num_paths) throw ValidationError("sampler and model disagree on num_paths");
    if (eval.negatives < 1) throw ValidationError("eval negatives must be positive");
    if (eval.hits_k < 1) throw ValidationError("hits_k must be positive");
    nn::ModelConfig probe = model;
    probe.vocab_size = 2;
    probe.relation_count = 1;
    try {
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
}

std::vector<scn::Task> RunManifest::task_list() const {
    if (tasks.empty()) return scn::all_tasks();
    std::vector<scn::Task> out;
    for (const auto& t : tasks) {
        auto task = scn::parse_task(t);
        if (!task) throw ValidationError("unknown task '" + t + "'");
        out.push_back(*task);
    }
    return out;
}

RunManifest preset(std::string_view name) {
    RunManifest m;
    if (name == "desk") {
        m.rows_per_table = 10;
        m.train_scenarios = 5;
        m.test_scenarios = 2;
        m.eval.negatives = 200;
        m.out = "out/desk";
    } else if (name == "paper") {
        m.rows_per_table = 50;
        m.train_scenarios = 17;
        m.test_scenarios = 3;
        m.eval.negatives = 4000;
        m.out = "out/paper";
    } else {
        throw ValidationError("unknown preset '" + std::string(name) + "'");
    }
    return m;
}

std::string manifest_json(const RunManifest& m) {
    json j;
    j["seed"] = m.seed;
    std::vector<std::string> profiles;
    for (auto p : m.profiles) profiles.emplace_back(onto::to_string(p));
    j["profiles"] = profiles;
    j["tasks"] = m.tasks;
    j["rows_per_table"] = m.rows_per_table;
    j["scenarios_per_task"] = m.scenarios_per_task;
    j["transformations"] = m.transformations;
    j["train_scenarios"] = m.train_scenarios;
    j["test_scenarios"] = m.test_scenarios;
    const auto& s = m.sampler;
    j["sampler"] = {{"num_paths", s.num_paths},
                    {"max_length", s.max_length},
                    {"walk_budget", s.walk_budget},
                    {"restart_probability", s.restart_probability},
                    {"shortest_first", s.shortest_first},
                    {"negatives_per_triple", s.negatives_per_triple},
                    {"negative_strategy", std::string(paths::to_string(s.negative_strategy))},
                    {"excluded_relations", s.excluded_relations}};
    const auto& c = m.model;
    j["model"] = {{"num_paths", c.num_paths},   {"embed_dim", c.embed_dim},         {"hidden_dim", c.hidden_dim},
                  {"layers", c.layers},         {"fusion_dim", c.fusion_dim},       {"learning_rate", c.learning_rate},
                  {"batch_size", c.batch_size}, {"epochs", c.epochs}};
    j["eval"] = {{"negatives", m.eval.negatives}, {"threshold", m.eval.threshold}, {"hits_k", m.eval.hits_k}};
    j["out"] = m.out.generic_string();
    j["deterministic"] = m.deterministic;
    return j.dump(2) + "\n";
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end()) {
            throw ValidationError("unknown manifest key '" + where + k + "'");
        }
    }
}

template <typename T>
void take(const json& j, const char* key, T& dst, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("manifest key '" + where + key + "' has the wrong type");
    }
}

}  // namespace

RunManifest parse_manifest(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"seed", "profiles", "tasks", "rows_per_table", "scenarios_per_task", "transformations", "train_scenarios",
                "test_scenarios", "sampler", "model", "eval", "out", "deterministic"},
               "");
    RunManifest m;
    take(j, "seed", m.seed, "");
    if (j.contains("profiles")) {
        std::vector<std::string> names;
        take(j, "profiles", names, "");
        m.profiles.clear();
        for (const auto& n : names) {
            try {
                m.profiles.push_back(onto::parse_profile_name(n));
            } catch (const std::exception&) {
                throw ValidationError("unknown profile '" + n + "'");
            }
        }
    }
    take(j, "tasks", m.tasks, "");
    take(j, "rows_per_table", m.rows_per_table, "");
    take(j, "scenarios_per_task", m.scenarios_per_task, "");
    take(j, "transformations", m.transformations, "");
    take(j, "train_scenarios", m.train_scenarios, "");
    take(j, "test_scenarios", m.test_scenarios, "");
    if (j.contains("sampler")) {
        const auto& s = j["sampler"];
        check_keys(s,
                   {"num_paths", "max_length", "walk_budget", "restart_probability", "shortest_first",
                    "negatives_per_triple", "negative_strategy", "excluded_relations"},
                   "sampler.");
        take(s, "num_paths", m.sampler.num_paths, "sampler.");
        take(s, "max_length", m.sampler.max_length, "sampler.");
        take(s, "walk_budget", m.sampler.walk_budget, "sampler.");
        take(s, "restart_probability", m.sampler.restart_probability, "sampler.");
        take(s, "shortest_first", m.sampler.shortest_first, "sampler.");
        take(s, "negatives_per_triple", m.sampler.negatives_per_triple, "sampler.");
        take(s, "excluded_relations", m.sampler.excluded_relations, "sampler.");
        if (s.contains("negative_strategy")) {
            std::string name;
            take(s, "negative_strategy", name, "sampler.");
            try {
                m.sampler.negative_strategy = paths::parse_negative_strategy(name);
            } catch (const std::exception&) {
                throw ValidationError("unknown negative strategy '" + name + "'");
            }
        }
    }
    if (j.contains("model")) {
        const auto& c = j["model"];
        check_keys(c, {"num_paths", "embed_dim", "hidden_dim", "layers", "fusion_dim", "learning_rate", "batch_size", "epochs"},
                   "model.");
        take(c, "num_paths", m.model.num_paths, "model.");
        take(c, "embed_dim", m.model.embed_dim, "model.");
        take(c, "hidden_dim", m.model.hidden_dim, "model.");
        take(c, "layers", m.model.layers, "model.");
        take(c, "fusion_dim", m.model.fusion_dim, "model.");
        take(c, "learning_rate", m.model.learning_rate, "model.");
        take(c, "batch_size", m.model.batch_size, "model.");
        take(c, "epochs", m.model.epochs, "model.");
    }
    if (j.contains("eval")) {
        const auto& e = j["eval"];
        check_keys(e, {"negatives", "threshold", "hits_k"}, "eval.");
        take(e, "negatives", m.eval.negatives, "eval.");
        take(e, "threshold", m.eval.threshold, "eval.");
        take(e, "hits_k", m.eval.hits_k, "eval.");
    }
    if (j.contains("out")) {
        std::string out;
        take(j, "out", out, "");
        m.out = out;
    }
    take(j, "deterministic", m.deterministic, "");
    m.validate();
    return m;
}

RunManifest load_manifest(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
    return parse_manifest(text);
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::gen_scenarios: return "gen-scenarios";
        case Stage::build_kg: return "build-kg";
        case Stage::resolve_lineage: return "resolve-lineage";
        case Stage::sample_paths: return "sample-paths";
        case Stage::train: return "train";
        case Stage::evaluate: return "evaluate";
        case Stage::report: return "report";
    }
    return "?";
}

std::vector<Stage> all_stages() {
    return {Stage::gen_scenarios, Stage::build_kg, Stage::resolve_lineage, Stage::sample_paths,
            Stage::train,         Stage::evaluate, Stage::report};
}

// ---------------------------------------------------------------------------
// Stages

Pipeline::Pipeline(RunManifest manifest) : m_(std::move(manifest)) { m_.validate(); }

fs::path Pipeline::unit_dir(scn::Task task, onto::ProfileName profile) const {
    return m_.out / "kg" / scn::task_name(task) / std::string(onto::to_string(profile));
}

namespace {

std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

kg::KnowledgeGraph load_graph(const fs::path& path, onto::ProfileName p) {
    return kg::parse_ntriples(read_file(path), onto::vocabulary(p).relation_names());
}

std::vector<std::pair<kg::NodeId, kg::NodeId>> load_ground_truth(const kg::KnowledgeGraph& g, const fs::path& path) {
    const auto rows = csv::parse(read_file(path));
    std::vector<std::pair<kg::NodeId, kg::NodeId>> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2 || !rows[i][0] || !rows[i][1]) {
            throw std::runtime_error("ground truth row " + std::to_string(i) + " is malformed");
        }
        auto src = g.find_node(*rows[i][0]);
        auto dst = g.find_node(*rows[i][1]);
        if (!src || !dst) throw std::runtime_error("ground truth names a node absent from the test graph");
        out.emplace_back(*dst, *src);
    }
    return out;
}

std::string scores_text(const std::vector<double>& scores) {
    std::string out;
    char buf[40];
    for (double s : scores) {
        std::snprintf(buf, sizeof buf, "%.17g\n", s);
        out += buf;
    }
    return out;
}

}  // namespace

bool Pipeline::unit(Stage stage, const std::string& key, const fs::path& dir, const std::vector<fs::path>& inputs,
                    const std::vector<std::string>& outputs, const std::string& config,
                    const std::function<void()>& body) {
    const std::string name(to_string(stage));
    const fs::path done = dir / ("." + name + ".done");
    for (const auto& in : inputs) {
        if (!fs::exists(in)) throw StageError(name, "missing input " + in.string() + " (run the upstream stage first)");
    }
    std::string header = "config " + hex(fnv1a(config)) + "\n";
    bool upstream_ran = false;
    for (const auto& in : inputs) {
        header += "input " + fs::relative(in, m_.out).generic_string() + " " + hex(file_checksum(in)) + "\n";
        const auto s = fs::weakly_canonical(in).string();
        if (std::find(dirty_.begin(), dirty_.end(), s) != dirty_.end()) upstream_ran = true;
    }

    bool fresh = !upstream_ran && fs::exists(done);
    if (fresh) {
        const auto recorded = read_file(done);
        fresh = recorded.starts_with(header);
        if (fresh) {
            std::string expect = header;
            for (const auto& o : outputs) {
                if (!fs::exists(dir / o)) {
                    fresh = false;
                    break;
                }
                expect += "output " + o + " " + hex(file_checksum(dir / o)) + "\n";
            }
            fresh = fresh && recorded == expect;
        }
    }
    StageLog entry{name, key, !fresh};
    if (!fresh) {
        fs::create_directories(dir);
        fs::remove(done);
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, key + ": " + e.what());
        }
        std::string record = header;
        for (const auto& o : outputs) {
            if (!fs::exists(dir / o)) throw StageError(name, key + ": did not produce " + o);
            record += "output " + o + " " + hex(file_checksum(dir / o)) + "\n";
            dirty_.push_back(fs::weakly_canonical(dir / o).string());
        }
        write_file(done, record);
    }
    log_.push_back(entry);
    if (logger_) logger_(entry);
    return entry.ran;
}

void Pipeline::gen_scenarios() {
    const auto dir = m_.out / "scenarios";
    std::vector<std::string> outputs{"suite"};
    for (auto t : m_.task_list()) outputs.push_back(scn::task_name(t));
    json cfg = {{"seed", m_.seed},
                {"rows", m_.rows_per_table},
                {"per_task", m_.scenarios_per_task},
                {"transformations", m_.transformations},
                {"train", m_.train_scenarios},
                {"test", m_.test_scenarios},
                {"tasks", outputs}};
    unit(Stage::gen_scenarios, "-", dir, {}, outputs, cfg.dump(), [&] {
        const auto base = db::northwind_fixture({m_.rows_per_table, m_.seed});
        scn::SuiteConfig sc;
        sc.scenarios_per_task = m_.scenarios_per_task;
        sc.transformations = m_.transformations;
        const auto suite = scn::generate_suite(base, m_.seed, sc);
        fs::remove_all(dir / "suite");
        scn::write_suite(suite, dir / "suite");
        for (auto task : m_.task_list()) {
            const auto scenarios = suite.of_task(task);
            std::vector<const scn::Scenario*> train(scenarios.begin(),
                                                    scenarios.begin() + static_cast<std::ptrdiff_t>(m_.train_scenarios));
            std::vector<const scn::Scenario*> test(scenarios.end() - static_cast<std::ptrdiff_t>(m_.test_scenarios),
                                                   scenarios.end());
            const auto tdir = dir / scn::task_name(task);
            fs::remove_all(tdir);
            for (const auto& [name, list] : {std::pair{"train", &train}, std::pair{"test", &test}}) {
                db::export_database(scn::materialize(suite.base, *list), tdir / (std::string(name) + "_db"));
                std::vector<scn::LineageTuple> lineage;
                for (const auto* sc2 : *list) {
                    for (const auto& step : sc2->steps) lineage.insert(lineage.end(), step.lineage.begin(), step.lineage.end());
                }
                write_file(tdir / (std::string(name) + "_lineage.csv"), scn::lineage_csv(lineage));
            }
        }
    });
}

void Pipeline::build_kg(scn::Task task, onto::ProfileName p) {
    const auto sdir = m_.out / "scenarios" / scn::task_name(task);
    const auto dir = unit_dir(task, p);
    const std::string key = scn::task_name(task) + "/" + std::string(onto::to_string(p));
    unit(Stage::build_kg, key, dir, {sdir / "train_db", sdir / "test_db"}, {"train.nt", "test.nt", "population.txt"},
         std::string(onto::to_string(p)), [&] {
             std::string report;
             for (const char* name : {"train", "test"}) {
                 const auto database = db::load_database(sdir / (std::string(name) + "_db"));
                 conv::ConvertConfig cc;
                 cc.profile = p;
                 cc.ns = name;
                 auto g = conv::empty_graph(p);
                 const auto pop = conv::populate_kg(g, database, cc);
                 write_file(dir / (std::string(name) + ".nt"), kg::serialize_ntriples(g));
                 report += std::string("[") + name + "]\n" + pop.text();
             }
             write_file(dir / "population.txt", report);
         });
}

void Pipeline::resolve(scn::Task task, onto::ProfileName p) {
    const auto sdir = m_.out / "scenarios" / scn::task_name(task);
    const auto dir = unit_dir(task, p);
    const std::string key = scn::task_name(task) + "/" + std::string(onto::to_string(p));
    unit(Stage::resolve_lineage, key, dir,
         {dir / "train.nt", dir / "test.nt", sdir / "train_lineage.csv", sdir / "test_lineage.csv"},
         {"train_resolved.nt", "ground_truth.csv", "lineage_counts.txt"}, std::string(onto::to_string(p)), [&] {
             conv::ConvertConfig cc;
             cc.profile = p;
             cc.ns = "train";
             auto train = load_graph(dir / "train.nt", p);
             const auto counts = conv::resolve_lineage(train, cc, scn::parse_lineage_csv(read_file(sdir / "train_lineage.csv")));
             write_file(dir / "train_resolved.nt", kg::serialize_ntriples(train));

             // Test lineage only feeds the ground truth; the test graph stays lineage-free.
             cc.ns = "test";
             const auto test = load_graph(dir / "test.nt", p);
             auto resolved = test;
             conv::resolve_lineage(resolved, cc, scn::parse_lineage_csv(read_file(sdir / "test_lineage.csv")));
             const auto row_rel = resolved.relation("rowDerivedFrom");
             std::vector<std::pair<kg::NodeId, kg::NodeId>> gt;
             for (const auto& t : resolved.triples()) {
                 if (t.relation == row_rel && !test.contains(t)) gt.emplace_back(t.subject, std::get<kg::NodeId>(t.object));
             }
             if (gt.empty()) throw std::runtime_error("test lineage resolves to no rowDerivedFrom edge");
             write_file(dir / "ground_truth.csv", conv::ground_truth_csv(test, gt));
             write_file(dir / "lineage_counts.txt",
                        "row_edges=" + std::to_string(counts.row_edges) + "\ncolumn_edges=" +
                            std::to_string(counts.column_edges) + "\nvalue_edges=" + std::to_string(counts.value_edges) +
                            "\ntable_edges=" + std::to_string(counts.table_edges) + "\n");
         });
}

void Pipeline::sample(scn::Task task, onto::ProfileName p) {
    const auto dir = unit_dir(task, p);
    const std::string key = scn::task_name(task) + "/" + std::string(onto::to_string(p));
    json cfg = json::parse(manifest_json(m_));
    cfg = {{"seed", m_.seed}, {"sampler", cfg["sampler"]}, {"negatives", m_.eval.negatives}};
    unit(Stage::sample_paths, key, dir, {dir / "train_resolved.nt", dir / "test.nt", dir / "ground_truth.csv"},
         {"train_samples.txt", "eval_positives.txt", "eval_negatives.txt", "vocabulary.txt"}, cfg.dump(), [&] {
             auto sc = m_.sampler;
             sc.seed = m_.seed;
             const auto train = load_graph(dir / "train_resolved.nt", p);
             write_file(dir / "train_samples.txt", paths::samples_text(paths::build_training_set(train, sc)));
             const auto test = load_graph(dir / "test.nt", p);
             const auto gt = load_ground_truth(test, dir / "ground_truth.csv");
             const auto es = paths::build_eval_set(test, gt, sc, m_.eval.negatives);
             write_file(dir / "eval_positives.txt", paths::samples_text(es.positives));
             write_file(dir / "eval_negatives.txt", paths::samples_text(es.negatives));
             write_file(dir / "vocabulary.txt", paths::vocabulary_text(onto::vocabulary(p).relation_names()));
         });
}

void Pipeline::train(scn::Task task, onto::ProfileName p) {
    const auto dir = unit_dir(task, p);
    const std::string key = scn::task_name(task) + "/" + std::string(onto::to_string(p));
    json cfg = json::parse(manifest_json(m_));
    cfg = {{"seed", m_.seed}, {"model", cfg["model"]}, {"sampler", cfg["sampler"]}};
    unit(Stage::train, key, dir, {dir / "train_samples.txt"}, {"model.ckpt", "train_log.tsv"}, cfg.dump(), [&] {
        auto mc = m_.model;
        mc.seed = m_.seed;
        mc.relation_count = onto::vocabulary(p).relation_names().size();
        mc.vocab_size = paths::vocab_size(mc.relation_count);
        const auto samples = paths::parse_samples(read_file(dir / "train_samples.txt"), m_.sampler.num_paths,
                                                  m_.sampler.max_length);
        nn::Model model(mc);
        model.initialize();
        const auto result = nn::train(model, samples);
        nn::save_checkpoint(model, dir / "model.ckpt");
        std::string log = "epoch\tmean_loss\n";
        char buf[64];
        for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", e + 1, result.epoch_loss[e]);
            log += buf;
        }
        write_file(dir / "train_log.tsv", log);
    });
}

void Pipeline::evaluate(scn::Task task, onto::ProfileName p) {
    const auto dir = unit_dir(task, p);
    const std::string key = scn::task_name(task) + "/" + std::string(onto::to_string(p));
    json cfg = {{"seed", m_.seed}, {"threshold", m_.eval.threshold}, {"hits_k", m_.eval.hits_k}};
    unit(Stage::evaluate, key, dir, {dir / "model.ckpt", dir / "eval_positives.txt", dir / "eval_negatives.txt"},
         {"scores_positive.txt", "scores_negative.txt", "result.tsv"}, cfg.dump(), [&] {
             const auto model = nn::load_checkpoint(dir / "model.ckpt");
             const auto L = m_.sampler.max_length;
             const auto n = m_.sampler.num_paths;
             const auto pos = nn::predict(model, paths::parse_samples(read_file(dir / "eval_positives.txt"), n, L));
             const auto neg = nn::predict(model, paths::parse_samples(read_file(dir / "eval_negatives.txt"), n, L));
             write_file(dir / "scores_positive.txt", scores_text(pos));
             write_file(dir / "scores_negative.txt", scores_text(neg));
             const auto labeled = eval::label_scores(pos, neg);
             const auto pr = eval::precision_recall(labeled, m_.eval.threshold);
             eval::TaskResult r;
             r.task = scn::task_name(task);
             r.profile = std::string(onto::to_string(p));
             r.precision = pr.precision;
             r.recall = pr.recall;
             r.pr_auc = eval::pr_auc(labeled);
             r.hits_at_10 = eval::hits_at_k(pos, neg, m_.eval.hits_k);
             r.positives = pos.size();
             r.negatives = neg.size();
             r.seed = m_.seed;
             write_file(dir / "result.tsv", eval::results_tsv({r}));
         });
}

void Pipeline::report() {
    std::vector<fs::path> inputs;
    for (auto t : m_.task_list()) {
        for (auto p : m_.profiles) inputs.push_back(unit_dir(t, p) / "result.tsv");
    }
    unit(Stage::report, "-", m_.out, inputs, {"results.tsv", "report.txt", "report.tsv"}, "report", [&] {
        std::vector<eval::TaskResult> all;
        for (const auto& in : inputs) {
            auto rs = eval::parse_results(read_file(in));
            all.insert(all.end(), rs.begin(), rs.end());
        }
        write_file(m_.out / "results.tsv", eval::results_tsv(all));
        if (m_.profiles.size() == 2) {
            const auto rep = eval::report(all);
            write_file(m_.out / "report.txt", rep.text);
            write_file(m_.out / "report.tsv", rep.tsv);
        } else {
            // Nothing to compare against; list the rows as they are.
            std::string text;
            char buf[160];
            for (const auto& r : all) {
                std::snprintf(buf, sizeof buf, "%-24s %-8s P=%.2f R=%.2f AUC=%.2f Hits@10=%.2f\n", r.task.c_str(),
                              r.profile.c_str(), r.precision, r.recall, r.pr_auc, r.hits_at_10);
                text += buf;
            }
            write_file(m_.out / "report.txt", text);
            write_file(m_.out / "report.tsv", eval::results_tsv(all));
        }
    });
}

void Pipeline::run_stage(Stage stage) {
    if (stage == Stage::gen_scenarios) return gen_scenarios();
    if (stage == Stage::report) return report();
    for (auto t : m_.task_list()) {
        for (auto p : m_.profiles) {
            switch (stage) {
                case Stage::build_kg: build_kg(t, p); break;
                case Stage::resolve_lineage: resolve(t, p); break;
                case Stage::sample_paths: sample(t, p); break;
                case Stage::train: train(t, p); break;
                case Stage::evaluate: evaluate(t, p); break;
                default: break;
            }
        }
    }
}

void Pipeline::run_all() {
    fs::create_directories(m_.out);
    write_file(m_.out / "manifest.json", manifest_json(m_));
    for (auto s : all_stages()) run_stage(s);
}

}  // namespace rddl::pipe
