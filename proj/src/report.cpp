#include "selectqa/report.hpp"

#include "selectqa/error.hpp"
#include "selectqa/http_backend.hpp"
#include "selectqa/mock_model.hpp"
#include "selectqa/normalize.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

namespace selectqa {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void parallel_for(size_t count, int parallelism, const std::function<void(size_t)>& body) {
    const int workers = std::max(1, std::min<int>(parallelism, int(count)));
    if (workers == 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

CompletionRequest base_request(const RunConfig& config, std::string prompt) {
    CompletionRequest req;
    req.model_id = config.model_id;
    req.prompt = std::move(prompt);
    req.max_tokens = config.max_tokens;
    req.want_logprobs = true;
    req.stop_markers = config.stop_markers;
    req.seed = config.seed;
    return req;
}

PromptSpec prompt_spec(const RunConfig& config, PromptStyle style) {
    PromptSpec spec;
    spec.style = style;
    spec.num_exemplars = config.num_exemplars;
    spec.seed = config.seed;
    spec.markers = config.markers;
    return spec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["dataset"] = c.dataset_path;
    j["pool"] = c.pool_path;
    j["backend"] = c.backend_kind;
    j["endpoint"] = c.endpoint;
    j["model"] = c.model_id;
    j["style"] = to_string(c.style);
    j["num_exemplars"] = c.num_exemplars > 0 ? c.num_exemplars : default_num_exemplars(c.style);
    j["num_samples"] = c.num_samples;
    j["t_greedy"] = c.t_greedy;
    j["t_sample"] = c.t_sample;
    j["max_tokens"] = c.max_tokens;
    j["seed"] = c.seed;
    j["stop"] = c.stop_markers;
    ordered_json scorers = ordered_json::array();
    for (Scorer s : c.scorers) scorers.push_back(to_string(s));
    j["scorers"] = std::move(scorers);
    ordered_json methods = ordered_json::array();
    for (AmbiguityMethod m : c.methods) methods.push_back(to_string(m));
    j["methods"] = std::move(methods);
    j["target_accs"] = c.target_accs;
    j["bins"] = c.bins;
    j["markers"] = {{"question", c.markers.question},
                    {"interpretation", c.markers.interpretation},
                    {"answer", c.markers.answer},
                    {"long_answer", c.markers.long_answer}};
    return j;
}

ScorerSummary summarize(Scorer scorer, const std::vector<ScoredPrediction>& preds, const RunConfig& config) {
    ScorerSummary s;
    s.scorer = scorer;
    s.em = exact_match_rate(preds);
    int correct = 0;
    for (const auto& p : preds) correct += p.correct ? 1 : 0;
    if (correct > 0 && correct < std::ssize(preds)) s.roc_auc = roc_auc(preds);
    s.ece = ece(preds, config.bins);
    s.bins = reliability_bins(preds, config.bins);
    for (double target : config.target_accs) s.cov.push_back({target, cov_at_acc(preds, target)});
    s.coverage_curve = coverage_accuracy_curve(preds);
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write " + path.string());
    out.write(content.data(), std::streamsize(content.size()));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

BackendStack::BackendStack(const RunConfig& config) {
    if (config.backend_kind == "mock") {
        if (config.mock_config_path.empty()) throw config_error("mock backend requires --mock-config");
        base_ = std::make_unique<MockModel>(MockModel::from_json_file(config.mock_config_path, config.markers));
    } else if (config.backend_kind == "remote") {
        if (config.endpoint.empty()) throw config_error("remote backend requires --endpoint");
        HttpBackendOptions opts;
        opts.max_retries = config.max_retries;
        opts.backoff_initial_ms = config.backoff_initial_ms;
        opts.timeout_seconds = config.timeout_seconds;
        base_ = std::make_unique<HttpBackend>(parse_endpoint(config.endpoint, opts));
    } else {
        throw config_error("backend must be mock or remote, got: " + config.backend_kind);
    }
    active_ = base_.get();
    if (!config.cache_dir.empty()) {
        caching_ = std::make_unique<CachingBackend>(*base_, DiskCache(config.cache_dir));
        active_ = caching_.get();
    }
}

std::vector<ScoredPrediction> predictions_for(const MetricsReport& report, Scorer scorer) {
    std::vector<ScoredPrediction> preds;
    preds.reserve(report.rows.size());
    for (const auto& row : report.rows)
        for (const auto& [s, score] : row.scores)
            if (s == scorer) preds.push_back({row.question_id, row.answer, score, s, row.correct});
    return preds;
}

MetricsReport run_eval(const RunConfig& config, Backend& backend) {
    const std::vector<QuestionRecord> records = load_dataset(config.dataset_path);
    if (records.empty()) throw config_error("empty dataset: " + config.dataset_path);
    const std::vector<Exemplar> pool =
        config.pool_path.empty() ? std::vector<Exemplar>{} : make_exemplar_pool(load_dataset(config.pool_path));

    std::vector<QuestionRow> rows(records.size());
    try {
        parallel_for(records.size(), config.parallelism, [&](size_t i) {
            const QuestionRecord& rec = records[i];
            CompletionRequest base =
                base_request(config, build_prompt(prompt_spec(config, config.style), pool, rec.question));
            const SampleSet set = sample_set(backend, base, config.num_samples, config.t_greedy, config.t_sample);

            const ParsedGeneration greedy = parse_generation(set.greedy.text, config.markers);
            QuestionRow row;
            row.question_id = rec.id;
            row.answer = normalize(greedy.answer);
            row.correct = is_correct(greedy.answer, rec);

            for (Scorer scorer : config.scorers) {
                double score = 0.0;
                switch (scorer) {
                case Scorer::Likelihood: score = likelihood_score(set); break;
                case Scorer::Repetition: score = repetition_score(set, config.markers); break;
                case Scorer::Diversity: score = diversity_score(set, config.markers); break;
                case Scorer::Verification:
                    score = verification_score(backend, rec.question, set, base, config.markers);
                    break;
                }
                row.scores.emplace_back(scorer, score);
            }
            rows[i] = std::move(row);
        });
    } catch (const backend_error& e) {
        throw backend_error(std::string(e.what()) +
                            " (run aborted; cached completions are kept, rerun to resume)");
    }

    MetricsReport report;
    report.config = config;
    report.rows = std::move(rows);
    int correct = 0;
    for (const auto& row : report.rows) correct += row.correct ? 1 : 0;
    report.em = double(correct) / double(report.rows.size());
    for (Scorer scorer : config.scorers)
        report.summaries.push_back(summarize(scorer, predictions_for(report, scorer), config));
    return report;
}

MetricsReport run_eval(const RunConfig& config) {
    BackendStack stack(config);
    return run_eval(config, stack.active());
}

AmbiguityReport run_ambiguity(const RunConfig& config, Backend& backend) {
    std::vector<QuestionRecord> records;
    for (auto& rec : load_dataset(config.dataset_path))
        if (rec.ambiguous) records.push_back(std::move(rec));
    if (records.empty()) throw config_error("dataset has no ambiguity labels: " + config.dataset_path);
    if (config.methods.empty()) throw config_error("no ambiguity methods configured");
    const std::vector<Exemplar> pool =
        config.pool_path.empty() ? std::vector<Exemplar>{} : make_exemplar_pool(load_dataset(config.pool_path));

    const bool wants_direct = std::any_of(config.methods.begin(), config.methods.end(), [](AmbiguityMethod m) {
        return m == AmbiguityMethod::GreedyDirect || m == AmbiguityMethod::VotingDirect;
    });
    const bool wants_disambig = std::any_of(config.methods.begin(), config.methods.end(), [](AmbiguityMethod m) {
        return m != AmbiguityMethod::GreedyDirect && m != AmbiguityMethod::VotingDirect;
    });

    std::vector<std::vector<AmbiguityScore>> per_question(records.size());
    try {
        parallel_for(records.size(), config.parallelism, [&](size_t i) {
            const QuestionRecord& rec = records[i];
            std::optional<SampleSet> disambig_set, direct_set;
            if (wants_disambig) {
                CompletionRequest base = base_request(
                    config, build_prompt(prompt_spec(config, PromptStyle::Disambig), pool, rec.question));
                disambig_set = sample_set(backend, base, config.num_samples, config.t_greedy, config.t_sample);
            }
            if (wants_direct) {
                CompletionRequest base = base_request(
                    config, build_prompt(prompt_spec(config, PromptStyle::DirectAmbiguity), pool, rec.question));
                direct_set = sample_set(backend, base, config.num_samples, config.t_greedy, config.t_sample);
            }
            for (AmbiguityMethod method : config.methods) {
                double score = 0.0;
                switch (method) {
                case AmbiguityMethod::GreedyDisambig: score = greedy_disambig(*disambig_set, config.markers); break;
                case AmbiguityMethod::VotingDisambig: score = voting_disambig(*disambig_set, config.markers); break;
                case AmbiguityMethod::NumDisagreements:
                    score = num_disagreements(*disambig_set, config.markers);
                    break;
                case AmbiguityMethod::NumAnswers: score = num_answers(*disambig_set, config.markers); break;
                case AmbiguityMethod::GreedyDirect:
                    score = direct_prediction(*direct_set, DirectMode::Greedy, config.markers);
                    break;
                case AmbiguityMethod::VotingDirect:
                    score = direct_prediction(*direct_set, DirectMode::Voting, config.markers);
                    break;
                }
                per_question[i].push_back({rec.id, method, score, rec.ambiguous});
            }
        });
    } catch (const backend_error& e) {
        throw backend_error(std::string(e.what()) +
                            " (run aborted; cached completions are kept, rerun to resume)");
    }

    AmbiguityReport report;
    report.config = config;
    int ambiguous = 0;
    for (const auto& rec : records) ambiguous += *rec.ambiguous ? 1 : 0;
    report.ambiguous_fraction = double(ambiguous) / double(records.size());
    for (auto& scores : per_question)
        for (auto& s : scores) report.scores.push_back(std::move(s));
    for (AmbiguityMethod method : config.methods) {
        std::vector<AmbiguityScore> scores;
        for (const auto& s : report.scores)
            if (s.method == method) scores.push_back(s);
        report.curves.push_back({method, precision_recall_curve(scores, config.num_samples)});
    }
    return report;
}

AmbiguityReport run_ambiguity(const RunConfig& config) {
    BackendStack stack(config);
    return run_ambiguity(config, stack.active());
}

void render_report(const MetricsReport& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw config_error("cannot create output directory " + out_dir + ": " + ec.message());

    ordered_json summary;
    summary["config"] = config_json(report.config);
    summary["num_questions"] = report.rows.size();
    summary["em"] = report.em;
    ordered_json scorers = ordered_json::object();
    for (const auto& s : report.summaries) {
        ordered_json js;
        js["em"] = s.em;
        if (s.roc_auc) js["roc_auc"] = *s.roc_auc;
        else js["roc_auc"] = nullptr;
        js["ece"] = s.ece;
        ordered_json cov = ordered_json::array();
        for (const auto& c : s.cov) cov.push_back({{"target", c.target}, {"coverage", c.coverage}});
        js["cov_at_acc"] = std::move(cov);
        scorers[to_string(s.scorer)] = std::move(js);
    }
    summary["scorers"] = std::move(scorers);
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

    std::ostringstream records;
    for (const auto& row : report.rows) {
        ordered_json j;
        j["question_id"] = row.question_id;
        j["answer"] = row.answer;
        j["correct"] = row.correct;
        ordered_json scores = ordered_json::object();
        for (const auto& [scorer, score] : row.scores) scores[to_string(scorer)] = score;
        j["scores"] = std::move(scores);
        records << j.dump() << '\n';
    }
    write_file(fs::path(out_dir) / "records.jsonl", records.str());

    for (const auto& s : report.summaries) {
        std::ostringstream rel;
        rel << "bin_index,mean_confidence,accuracy,count\n";
        for (const auto& b : s.bins)
            rel << b.bin_index << ',' << format_double(b.mean_confidence) << ',' << format_double(b.accuracy)
                << ',' << b.count << '\n';
        write_file(fs::path(out_dir) / ("reliability_" + to_string(s.scorer) + ".csv"), rel.str());

        std::ostringstream cov;
        cov << "coverage,accuracy\n";
        for (const auto& p : s.coverage_curve)
            cov << format_double(p.coverage) << ',' << format_double(p.accuracy) << '\n';
        write_file(fs::path(out_dir) / ("coverage_" + to_string(s.scorer) + ".csv"), cov.str());
    }
}

void render_ambiguity_report(const AmbiguityReport& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw config_error("cannot create output directory " + out_dir + ": " + ec.message());

    ordered_json summary;
    summary["config"] = config_json(report.config);
    summary["ambiguous_fraction"] = report.ambiguous_fraction;
    summary["num_questions"] =
        report.config.methods.empty() ? 0 : report.scores.size() / report.config.methods.size();
    write_file(fs::path(out_dir) / "ambiguity_summary.json", summary.dump(2) + "\n");

    std::ostringstream records;
    for (const auto& s : report.scores) {
        ordered_json j;
        j["question_id"] = s.question_id;
        j["method"] = to_string(s.method);
        j["score"] = s.score;
        j["label"] = *s.label;
        records << j.dump() << '\n';
    }
    write_file(fs::path(out_dir) / "ambiguity_records.jsonl", records.str());

    for (const auto& curve : report.curves) {
        std::ostringstream out;
        out << "threshold,precision,recall\n";
        for (const auto& p : curve.points)
            out << format_double(p.threshold) << ',' << format_double(p.precision) << ','
                << format_double(p.recall) << '\n';
        write_file(fs::path(out_dir) / ("pr_" + to_string(curve.method) + ".csv"), out.str());
    }
}

namespace {

std::vector<QuestionRow> load_rows(const fs::path& path) {
    std::vector<QuestionRow> rows;
    std::istringstream in(read_file(path));
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            throw config_error(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
        QuestionRow row;
        row.question_id = j.at("question_id").get<std::string>();
        row.answer = j.at("answer").get<std::string>();
        row.correct = j.at("correct").get<bool>();
        for (const auto& [name, score] : j.at("scores").items())
            row.scores.emplace_back(scorer_from_string(name), score.get<double>());
        rows.push_back(std::move(row));
    }
    return rows;
}

RunConfig config_from_summary(const ordered_json& summary) {
    RunConfig config;
    const auto& jc = summary.at("config");
    config.dataset_path = jc.at("dataset").get<std::string>();
    config.pool_path = jc.at("pool").get<std::string>();
    config.backend_kind = jc.at("backend").get<std::string>();
    config.endpoint = jc.at("endpoint").get<std::string>();
    config.model_id = jc.at("model").get<std::string>();
    config.style = prompt_style_from_string(jc.at("style").get<std::string>());
    config.num_exemplars = jc.at("num_exemplars").get<int>();
    config.num_samples = jc.at("num_samples").get<int>();
    config.t_greedy = jc.at("t_greedy").get<double>();
    config.t_sample = jc.at("t_sample").get<double>();
    config.max_tokens = jc.at("max_tokens").get<int>();
    config.seed = jc.at("seed").get<uint64_t>();
    config.stop_markers = jc.at("stop").get<std::vector<std::string>>();
    config.scorers.clear();
    for (const auto& s : jc.at("scorers")) config.scorers.push_back(scorer_from_string(s.get<std::string>()));
    config.methods.clear();
    for (const auto& m : jc.at("methods")) config.methods.push_back(ambiguity_method_from_string(m.get<std::string>()));
    config.target_accs = jc.at("target_accs").get<std::vector<double>>();
    config.bins = jc.at("bins").get<int>();
    const auto& jm = jc.at("markers");
    config.markers.question = jm.at("question").get<std::string>();
    config.markers.interpretation = jm.at("interpretation").get<std::string>();
    config.markers.answer = jm.at("answer").get<std::string>();
    config.markers.long_answer = jm.at("long_answer").get<std::string>();
    return config;
}

void verify_eval(const fs::path& dir, std::vector<std::string>& mismatches) {
    const ordered_json summary = ordered_json::parse(read_file(dir / "summary.json"));
    const RunConfig config = config_from_summary(summary);

    MetricsReport persisted;
    persisted.config = config;
    persisted.rows = load_rows(dir / "records.jsonl");
    if (persisted.rows.empty()) {
        mismatches.push_back("records.jsonl holds no rows");
        return;
    }
    int correct = 0;
    for (const auto& row : persisted.rows) correct += row.correct ? 1 : 0;
    const double em = double(correct) / double(persisted.rows.size());
    if (summary.at("em").get<double>() != em)
        mismatches.push_back("em reported " + summary.at("em").dump() + " recomputed " + format_double(em));

    for (Scorer scorer : config.scorers) {
        const std::vector<ScoredPrediction> preds = predictions_for(persisted, scorer);
        const std::string name = to_string(scorer);
        if (preds.empty()) {
            mismatches.push_back("scorer " + name + ": no records");
            continue;
        }
        const auto& js = summary.at("scorers").at(name);
        auto check = [&](const std::string& metric, double recomputed, const ordered_json& reported) {
            if (reported.is_null() || reported.get<double>() != recomputed)
                mismatches.push_back("scorer " + name + ": " + metric + " reported " + reported.dump() +
                                     " recomputed " + format_double(recomputed));
        };
        check("em", exact_match_rate(preds), js.at("em"));
        check("ece", ece(preds, config.bins), js.at("ece"));
        int scorer_correct = 0;
        for (const auto& p : preds) scorer_correct += p.correct ? 1 : 0;
        if (scorer_correct > 0 && scorer_correct < std::ssize(preds))
            check("roc_auc", roc_auc(preds), js.at("roc_auc"));
        else if (!js.at("roc_auc").is_null())
            mismatches.push_back("scorer " + name + ": roc_auc reported for one-class labels");
        const auto& cov = js.at("cov_at_acc");
        if (cov.size() != config.target_accs.size()) {
            mismatches.push_back("scorer " + name + ": cov_at_acc arity mismatch");
        } else {
            for (size_t i = 0; i < config.target_accs.size(); ++i)
                check("cov@" + format_double(config.target_accs[i]), cov_at_acc(preds, config.target_accs[i]),
                      cov[i].at("coverage"));
        }
    }
}

void verify_ambiguity(const fs::path& dir, std::vector<std::string>& mismatches) {
    const ordered_json summary = ordered_json::parse(read_file(dir / "ambiguity_summary.json"));
    const RunConfig config = config_from_summary(summary);

    std::vector<AmbiguityScore> all;
    std::istringstream in(read_file(dir / "ambiguity_records.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = ordered_json::parse(line);
        all.push_back({j.at("question_id").get<std::string>(),
                       ambiguity_method_from_string(j.at("method").get<std::string>()),
                       j.at("score").get<double>(), j.at("label").get<bool>()});
    }

    for (AmbiguityMethod method : config.methods) {
        std::vector<AmbiguityScore> scores;
        for (const auto& s : all)
            if (s.method == method) scores.push_back(s);
        const std::string name = to_string(method);
        if (scores.empty()) {
            mismatches.push_back("method " + name + ": no records");
            continue;
        }
        const std::vector<PrPoint> recomputed = precision_recall_curve(scores, config.num_samples);
        std::ostringstream expected;
        expected << "threshold,precision,recall\n";
        for (const auto& p : recomputed)
            expected << format_double(p.threshold) << ',' << format_double(p.precision) << ','
                     << format_double(p.recall) << '\n';
        const std::string persisted = read_file(dir / ("pr_" + name + ".csv"));
        if (persisted != expected.str()) mismatches.push_back("method " + name + ": pr curve mismatch");
    }
}

} // namespace

std::vector<std::string> verify_run_dir(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const bool has_eval = fs::exists(dir / "summary.json");
    const bool has_ambiguity = fs::exists(dir / "ambiguity_summary.json");
    if (!has_eval && !has_ambiguity)
        throw config_error("no summary.json or ambiguity_summary.json under " + run_dir);
    std::vector<std::string> mismatches;
    if (has_eval) verify_eval(dir, mismatches);
    if (has_ambiguity) verify_ambiguity(dir, mismatches);
    return mismatches;
}

MetricsReport rebuild_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const ordered_json summary = ordered_json::parse(read_file(dir / "summary.json"));
    MetricsReport report;
    report.config = config_from_summary(summary);
    report.rows = load_rows(dir / "records.jsonl");
    if (report.rows.empty()) throw config_error("records.jsonl holds no rows under " + run_dir);
    int correct = 0;
    for (const auto& row : report.rows) correct += row.correct ? 1 : 0;
    report.em = double(correct) / double(report.rows.size());
    for (Scorer scorer : report.config.scorers) {
        const std::vector<ScoredPrediction> preds = predictions_for(report, scorer);
        if (preds.empty()) throw config_error("no records for scorer " + to_string(scorer));
        report.summaries.push_back(summarize(scorer, preds, report.config));
    }
    return report;
}

} // namespace selectqa
