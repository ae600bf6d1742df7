#pragma once
// Threshold, ranking and curve metrics over scored samples, plus the
// baseline-versus-rddl comparison table.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rddl::eval {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scored {
    double score = 0.0;
    int label = 0;
};

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

// Score >= threshold predicts positive.
PrecisionRecall precision_recall(const std::vector<Scored>& scores, double threshold = 0.5);
double pr_auc(const std::vector<Scored>& scores);
// Ties rank the positive after equal-scored negatives.
double hits_at_k(const std::vector<double>& positives, const std::vector<double>& negatives, std::size_t k = 10);

std::vector<Scored> label_scores(const std::vector<double>& positives, const std::vector<double>& negatives);

struct TaskResult {
    std::string task;
    std::string profile;
    double precision = 0.0;
    double recall = 0.0;
    double pr_auc = 0.0;
    double hits_at_10 = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::uint64_t seed = 0;
    bool operator==(const TaskResult&) const = default;
};

TaskResult evaluate(const std::string& task, const std::string& profile, std::uint64_t seed,
                    const std::vector<double>& positives, const std::vector<double>& negatives);

std::string results_header();
std::string result_line(const TaskResult& r);
std::string results_tsv(const std::vector<TaskResult>& results);
std::vector<TaskResult> parse_results(const std::string& text);

// "+0.03", "-0.02", or "-" when the two-decimal delta is zero.
std::string format_delta(double delta);

struct Report {
    std::string text;  // aligned table
    std::string tsv;
};

// One baseline and one rddl row per task, rddl rows carry deltas; last row is
// the mean of per-task deltas.
Report report(const std::vector<TaskResult>& results);

}  // namespace rddl::eval
