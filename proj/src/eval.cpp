#include "rddl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace rddl::eval {

namespace {

std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

}  // namespace

PrecisionRecall precision_recall(const std::vector<Scored>& scores, double threshold) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& s : scores) {
        const bool predicted = s.score >= threshold;
        if (s.label) (predicted ? tp : fn)++;
        else if (predicted) ++fp;
    }
    if (tp + fn == 0) throw EvalError("precision/recall needs at least one positive");
    PrecisionRecall pr;
    pr.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    pr.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return pr;
}

double pr_auc(const std::vector<Scored>& scores) {
    std::size_t pos = 0;
    for (const auto& s : scores) pos += s.label ? 1 : 0;
    if (pos == 0 || pos == scores.size()) throw EvalError("pr_auc needs both positive and negative labels");
    std::vector<Scored> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    double area = 0.0, prev_recall = 0.0;
    std::size_t tp = 0, seen = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].score == sorted[i].score) {
            tp += sorted[j].label ? 1 : 0;
            ++j;
        }
        seen = j;
        const double recall = static_cast<double>(tp) / static_cast<double>(pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

double hits_at_k(const std::vector<double>& positives, const std::vector<double>& negatives, std::size_t k) {
    if (negatives.empty()) throw EvalError("hits_at_k needs a non-empty negative pool");
    if (positives.empty()) return 0.0;
    std::vector<double> neg = negatives;
    std::sort(neg.begin(), neg.end());
    std::size_t hits = 0;
    for (double p : positives) {
        // Negatives scoring >= p rank ahead of it.
        const auto ahead = static_cast<std::size_t>(neg.end() - std::lower_bound(neg.begin(), neg.end(), p));
        if (ahead + 1 <= k) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(positives.size());
}

std::vector<Scored> label_scores(const std::vector<double>& positives, const std::vector<double>& negatives) {
    std::vector<Scored> out;
    out.reserve(positives.size() + negatives.size());
    for (double p : positives) out.push_back({p, 1});
    for (double n : negatives) out.push_back({n, 0});
    return out;
}

TaskResult evaluate(const std::string& task, const std::string& profile, std::uint64_t seed,
                    const std::vector<double>& positives, const std::vector<double>& negatives) {
    const auto labeled = label_scores(positives, negatives);
    const auto pr = precision_recall(labeled);
    TaskResult r;
    r.task = task;
    r.profile = profile;
    r.precision = pr.precision;
    r.recall = pr.recall;
    r.pr_auc = pr_auc(labeled);
    r.hits_at_10 = hits_at_k(positives, negatives, 10);
    r.positives = positives.size();
    r.negatives = negatives.size();
    r.seed = seed;
    return r;
}

std::string results_header() { return "task\tprofile\tprecision\trecall\tpr_auc\thits_at_10\tpositives\tnegatives\tseed"; }

std::string result_line(const TaskResult& r) {
    return r.task + '\t' + r.profile + '\t' + full(r.precision) + '\t' + full(r.recall) + '\t' + full(r.pr_auc) + '\t' +
           full(r.hits_at_10) + '\t' + std::to_string(r.positives) + '\t' + std::to_string(r.negatives) + '\t' +
           std::to_string(r.seed);
}

std::string results_tsv(const std::vector<TaskResult>& results) {
    std::string out = results_header() + '\n';
    for (const auto& r : results) out += result_line(r) + '\n';
    return out;
}

std::vector<TaskResult> parse_results(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<TaskResult> out;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        if (n == 1) {
            if (line != results_header()) throw EvalError("results file has an unexpected header");
            continue;
        }
        const auto f = split_tabs(line);
        if (f.size() != 9) throw EvalError("results line " + std::to_string(n) + " has " + std::to_string(f.size()) + " fields");
        try {
            TaskResult r;
            r.task = f[0];
            r.profile = f[1];
            r.precision = std::stod(f[2]);
            r.recall = std::stod(f[3]);
            r.pr_auc = std::stod(f[4]);
            r.hits_at_10 = std::stod(f[5]);
            r.positives = std::stoull(f[6]);
            r.negatives = std::stoull(f[7]);
            r.seed = std::stoull(f[8]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw EvalError("results line " + std::to_string(n) + " has a malformed number");
        }
    }
    return out;
}

std::string format_delta(double delta) {
    const double rounded = std::round(delta * 100.0) / 100.0;
    if (rounded == 0.0) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f", rounded);
    return buf;
}

Report report(const std::vector<TaskResult>& results) {
    // Keep first-appearance task order.
    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, const TaskResult*>> by_task;
    for (const auto& r : results) {
        if (r.profile != "baseline" && r.profile != "rddl") throw EvalError("unknown profile '" + r.profile + "'");
        auto& slot = by_task[r.task];
        if (slot.empty()) order.push_back(r.task);
        if (slot.count(r.profile)) throw EvalError("duplicate result for " + r.task + "/" + r.profile);
        slot[r.profile] = &r;
    }
    for (const auto& t : order) {
        if (by_task[t].size() != 2) throw EvalError("task '" + t + "' lacks a baseline/rddl pair");
    }

    auto metrics = [](const TaskResult& r) {
        return std::vector<double>{r.precision, r.recall, r.pr_auc, r.hits_at_10};
    };
    std::vector<std::vector<std::string>> rows;
    std::string tsv = "task\tontology\tprecision\trecall\tauc\thits_at_10\td_precision\td_recall\td_auc\td_hits_at_10\n";
    std::vector<double> sum(4, 0.0);
    for (const auto& t : order) {
        const auto& b = *by_task[t]["baseline"];
        const auto& d = *by_task[t]["rddl"];
        const auto mb = metrics(b), md = metrics(d);
        std::vector<std::string> brow{t, "baseline"}, drow{t, "RDDL"};
        std::string btsv = t + "\tbaseline", dtsv = t + "\trddl";
        std::string deltas;
        for (std::size_t i = 0; i < 4; ++i) {
            const double delta = md[i] - mb[i];
            sum[i] += delta;
            brow.push_back(fixed(mb[i]));
            drow.push_back(fixed(md[i]) + "(" + format_delta(delta) + ")");
            btsv += '\t' + fixed(mb[i], 4);
            dtsv += '\t' + fixed(md[i], 4);
            deltas += '\t' + fixed(delta, 4);
        }
        rows.push_back(brow);
        rows.push_back(drow);
        tsv += btsv + "\t\t\t\t\n" + dtsv + deltas + '\n';
    }
    std::vector<std::string> avg{"Average improvement", ""};
    std::string avg_tsv = "average\timprovement\t\t\t\t";
    const double n = order.empty() ? 1.0 : static_cast<double>(order.size());
    for (std::size_t i = 0; i < 4; ++i) {
        avg.push_back(fixed(sum[i] / n));
        avg_tsv += '\t' + fixed(sum[i] / n, 4);
    }
    tsv += avg_tsv + '\n';

    std::vector<std::vector<std::string>> table{{"Task", "Ontology", "Precision", "Recall", "AUC", "Hits@10"}};
    table.insert(table.end(), rows.begin(), rows.end());
    table.push_back(avg);
    std::vector<std::size_t> width(6, 0);
    for (const auto& r : table) {
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::string text;
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (k == 1 || k + 1 == table.size()) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            text += std::string(total - 2, '-') + '\n';
        }
        std::string line;
        for (std::size_t i = 0; i < table[k].size(); ++i) {
            line += table[k][i];
            if (i + 1 < table[k].size()) line += std::string(width[i] - table[k][i].size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        text += line + '\n';
    }
    return {text, tsv};
}

}  // namespace rddl::eval
