#pragma once

#include "selectqa/ambiguity.hpp"
#include "selectqa/backend.hpp"
#include "selectqa/confidence.hpp"
#include "selectqa/metrics.hpp"
#include "selectqa/prompting.hpp"
#include "selectqa/qa_data.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace selectqa {

struct RunConfig {
    std::string dataset_path;
    std::string pool_path; // exemplar pool, same record format as datasets

    std::string backend_kind = "mock"; // mock | remote
    std::string endpoint;              // host:port[/path] when remote
    std::string mock_config_path;      // mock distributions when mock
    std::string model_id = "mock";

    PromptStyle style = PromptStyle::Qa;
    int num_exemplars = 0; // 0 = style default
    int num_samples = 10;
    double t_greedy = 0.0;
    double t_sample = 0.5;
    int max_tokens = 64;
    uint64_t seed = 0;
    std::vector<std::string> stop_markers = {"\n\n"};
    Markers markers;

    std::vector<Scorer> scorers = {Scorer::Likelihood, Scorer::Repetition, Scorer::Diversity};
    std::vector<AmbiguityMethod> methods = {
        AmbiguityMethod::GreedyDisambig,  AmbiguityMethod::VotingDisambig, AmbiguityMethod::NumDisagreements,
        AmbiguityMethod::NumAnswers,      AmbiguityMethod::GreedyDirect,   AmbiguityMethod::VotingDirect,
    };
    std::vector<double> target_accs = {50.0, 80.0, 90.0};
    int bins = 10;

    std::string cache_dir; // empty disables the cache
    std::string out_dir = "out";
    int parallelism = 1;

    int max_retries = 3;
    int backoff_initial_ms = 200;
    int timeout_seconds = 60;
};

struct CovAtTarget {
    double target = 0.0;
    double coverage = 0.0;
};

struct ScorerSummary {
    Scorer scorer = Scorer::Repetition;
    double em = 0.0;
    std::optional<double> roc_auc; // unset when labels are one-class
    double ece = 0.0;
    std::vector<CovAtTarget> cov;
    std::vector<ReliabilityBin> bins;
    std::vector<CoveragePoint> coverage_curve;
};

// One persisted line of records.jsonl: the question's normalized greedy
// answer, its correctness, and each configured scorer's confidence.
struct QuestionRow {
    std::string question_id;
    std::string answer;
    bool correct = false;
    std::vector<std::pair<Scorer, double>> scores; // configured scorer order
};

// Everything a run produced. Summary numbers are recomputable from the
// per-question rows; `verify` checks exactly that.
struct MetricsReport {
    RunConfig config;
    double em = 0.0;
    std::vector<QuestionRow> rows; // dataset order
    std::vector<ScorerSummary> summaries;
};

// The (score, correct) view of one scorer's column, in row order.
std::vector<ScoredPrediction> predictions_for(const MetricsReport& report, Scorer scorer);

struct MethodCurve {
    AmbiguityMethod method = AmbiguityMethod::GreedyDisambig;
    std::vector<PrPoint> points;
};

struct AmbiguityReport {
    RunConfig config;
    double ambiguous_fraction = 0.0; // label base rate
    std::vector<AmbiguityScore> scores; // question-major, method-minor
    std::vector<MethodCurve> curves;
};

// Builds the backend stack described by the config (mock or remote, wrapped
// in a disk cache when cache_dir is set).
class BackendStack {
public:
    explicit BackendStack(const RunConfig& config);
    Backend& active() { return *active_; }

private:
    std::unique_ptr<Backend> base_;
    std::unique_ptr<Backend> caching_;
    Backend* active_ = nullptr;
};

// Runs the full evaluation: per question, build the prompt, collect the
// sample set, score with every configured scorer, judge correctness, then
// aggregate all metrics. Deterministic given (config, cache contents).
// A question-level backend failure aborts the run; completed work stays in
// the cache, so a rerun resumes from there.
MetricsReport run_eval(const RunConfig& config, Backend& backend);
MetricsReport run_eval(const RunConfig& config);

// Same pipeline for the ambiguity predictors, over records carrying an
// ambiguity label. Throws config_error when no record is labeled.
AmbiguityReport run_ambiguity(const RunConfig& config, Backend& backend);
AmbiguityReport run_ambiguity(const RunConfig& config);

// Writes summary.json, records.jsonl, reliability_<scorer>.csv and
// coverage_<scorer>.csv. Identical reports produce identical bytes.
void render_report(const MetricsReport& report, const std::string& out_dir);

// Writes ambiguity_summary.json, ambiguity_records.jsonl and pr_<method>.csv.
void render_ambiguity_report(const AmbiguityReport& report, const std::string& out_dir);

// Recomputes every summary number from the persisted per-question records in
// run_dir and returns one line per mismatch (empty means verified). Checks
// eval and ambiguity artifacts, whichever are present.
std::vector<std::string> verify_run_dir(const std::string& run_dir);

// Rebuilds a report from persisted records (used by the `report` subcommand).
MetricsReport rebuild_report(const std::string& run_dir);

} // namespace selectqa
