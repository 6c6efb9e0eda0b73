#include "selectqa/error.hpp"
#include "selectqa/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace selectqa;

void add_run_flags(CLI::App& cmd, RunConfig& config, std::vector<std::string>& scorer_names,
                   std::vector<std::string>& method_names, std::string& style_name) {
    cmd.add_option("--dataset", config.dataset_path, "evaluation dataset (one JSON record per line)")->required();
    cmd.add_option("--pool", config.pool_path, "exemplar pool (same record format)");
    cmd.add_option("--backend", config.backend_kind, "mock | remote")->check(CLI::IsMember({"mock", "remote"}));
    cmd.add_option("--endpoint", config.endpoint, "completion endpoint, host:port[/path]");
    cmd.add_option("--mock-config", config.mock_config_path, "mock model distributions (JSON)");
    cmd.add_option("--model", config.model_id, "model id sent to the backend");
    cmd.add_option("--style", style_name, "qa | disambig | direct_ambiguity | unknown | cot_short_long | cot_long_short");
    cmd.add_option("--num-exemplars", config.num_exemplars, "exemplars per prompt (0 = style default)");
    cmd.add_option("--num-samples", config.num_samples, "sampled generations per question");
    cmd.add_option("--t-greedy", config.t_greedy, "greedy temperature");
    cmd.add_option("--t-sample", config.t_sample, "sampling temperature");
    cmd.add_option("--max-tokens", config.max_tokens, "max tokens to decode");
    cmd.add_option("--seed", config.seed, "run seed");
    cmd.add_option("--scorers", scorer_names, "likelihood | repetition | diversity | verification");
    cmd.add_option("--methods", method_names, "ambiguity methods to run");
    cmd.add_option("--target-acc", config.target_accs, "Cov@Acc targets (percent)");
    cmd.add_option("--bins", config.bins, "reliability bins");
    cmd.add_option("--cache-dir", config.cache_dir, "completion cache directory");
    cmd.add_option("--out", config.out_dir, "output directory");
    cmd.add_option("--parallelism", config.parallelism, "concurrent question workers");
    cmd.add_option("--max-retries", config.max_retries, "retries per request");
    cmd.add_option("--backoff-ms", config.backoff_initial_ms, "initial retry backoff");
    cmd.add_option("--timeout", config.timeout_seconds, "request timeout seconds");
    cmd.add_option("--stop", config.stop_markers, "stop markers");
    cmd.add_option("--marker-question", config.markers.question, "question marker");
    cmd.add_option("--marker-interpretation", config.markers.interpretation, "interpretation marker");
    cmd.add_option("--marker-answer", config.markers.answer, "answer marker");
    cmd.add_option("--marker-long-answer", config.markers.long_answer, "long answer marker");
}

void finalize_config(RunConfig& config, const std::vector<std::string>& scorer_names,
                     const std::vector<std::string>& method_names, const std::string& style_name) {
    config.style = prompt_style_from_string(style_name);
    if (!scorer_names.empty()) {
        config.scorers.clear();
        for (const auto& name : scorer_names) config.scorers.push_back(scorer_from_string(name));
    }
    if (!method_names.empty()) {
        config.methods.clear();
        for (const auto& name : method_names) config.methods.push_back(ambiguity_method_from_string(name));
    }
    if (config.num_samples < 1) throw config_error("--num-samples must be >= 1");
    if (config.bins < 1) throw config_error("--bins must be >= 1");
    if (config.parallelism < 1) throw config_error("--parallelism must be >= 1");
    for (double t : config.target_accs)
        if (!(t > 0.0 && t <= 100.0)) throw config_error("--target-acc values must lie in (0, 100]");
    if (!config.markers.answer_aliases.empty() && config.markers.answer != config.markers.answer_aliases.front())
        config.markers.answer_aliases.insert(config.markers.answer_aliases.begin(), config.markers.answer);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling-based confidence estimation and selective answering for free-form QA"};
    app.require_subcommand(1);

    RunConfig config;
    std::vector<std::string> scorer_names, method_names;
    std::string style_name = "qa";

    CLI::App* eval = app.add_subcommand("eval", "run a calibration evaluation");
    add_run_flags(*eval, config, scorer_names, method_names, style_name);

    CLI::App* ambiguity = app.add_subcommand("ambiguity", "run the ambiguity predictors");
    add_run_flags(*ambiguity, config, scorer_names, method_names, style_name);

    std::string verify_dir;
    CLI::App* verify = app.add_subcommand("verify", "recompute summary metrics from persisted records");
    verify->add_option("--dir", verify_dir, "run directory to verify")->required();

    std::string report_dir, report_out;
    CLI::App* report = app.add_subcommand("report", "re-render report files from persisted records");
    report->add_option("--dir", report_dir, "run directory holding records.jsonl + summary.json")->required();
    report->add_option("--out", report_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (eval->parsed()) {
            finalize_config(config, scorer_names, method_names, style_name);
            MetricsReport result = run_eval(config);
            render_report(result, config.out_dir);
            std::cout << "wrote " << config.out_dir << "/summary.json\n";
        } else if (ambiguity->parsed()) {
            finalize_config(config, scorer_names, method_names, style_name);
            AmbiguityReport result = run_ambiguity(config);
            render_ambiguity_report(result, config.out_dir);
            std::cout << "wrote " << config.out_dir << "/ambiguity_summary.json\n";
        } else if (verify->parsed()) {
            const std::vector<std::string> mismatches = verify_run_dir(verify_dir);
            if (!mismatches.empty()) {
                for (const auto& m : mismatches) std::cerr << "mismatch: " << m << "\n";
                return 3;
            }
            std::cout << "verified: summary metrics match the persisted records\n";
        } else if (report->parsed()) {
            render_report(rebuild_report(report_dir), report_out);
            std::cout << "wrote " << report_out << "/summary.json\n";
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const backend_error& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
