#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hdlt/debias.hpp"
#include "hdlt/error.hpp"
#include "hdlt/harness.hpp"
#include "hdlt/hypothesis.hpp"
#include "hdlt/io.hpp"

namespace hdlt::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_compute = 1;
inline constexpr int exit_usage = 2;

struct CommonFlags
{
    double lambda_const = 1.0;
    std::optional<double> lambda;
    std::size_t grid_size = 50;
    double kappa0 = 0.0;
    double kappa1 = 0.5;
    bool split = false;
    bool omega_identity = false;
    std::string link = "logistic";
    std::uint64_t seed = 1;
    std::size_t workers = 0; // 0: one per hardware thread
    std::string output;

    InferenceOptions options() const
    {
        InferenceOptions o;
        o.lambda_const = lambda_const;
        o.lambda = lambda;
        o.grid_size = grid_size;
        o.kappa0 = kappa0;
        o.kappa1 = kappa1;
        o.sample_split = split;
        o.omega_identity = omega_identity;
        o.link = LinkFunction::parse(link);
        o.validate();
        return o;
    }

    std::size_t resolved_workers() const
    {
        return workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
    }
};

namespace detail {

inline void add_inference_flags(CLI::App& cmd, CommonFlags& f)
{
    cmd.add_option("--lambda-const", f.lambda_const, "initial lambda = c * sqrt(log p / n)")->capture_default_str();
    cmd.add_option("--lambda", f.lambda, "explicit initial lambda (overrides --lambda-const)");
    cmd.add_option("--grid-size", f.grid_size, "node-wise lambda grid size")->capture_default_str();
    cmd.add_option("--kappa0", f.kappa0, "tau slack in score selection")->capture_default_str();
    cmd.add_option("--kappa1", f.kappa1, "zeta slack in score selection")->capture_default_str();
    cmd.add_flag("--split,!--no-split", f.split, "fit on the first half, debias on the second");
    cmd.add_flag("--omega-identity", f.omega_identity, "score vectors W^{-1} x_j without node-wise regressions");
    cmd.add_option("--link", f.link, "logistic | probit | glogistic:A | tanh:A,B")->capture_default_str();
}

inline void add_run_flags(CLI::App& cmd, CommonFlags& f)
{
    cmd.add_option("--seed", f.seed, "random seed")->capture_default_str();
    cmd.add_option("--workers", f.workers, "worker threads (0 = all cores)")->capture_default_str();
    cmd.add_option("-o,--output", f.output, "write JSON here instead of stdout");
}

inline CsvData load_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open '" + path + "'");
    try {
        return read_csv(in);
    } catch (const parse_error& e) {
        throw parse_error(e.row(), e.column(), path + ": " + std::string(e.what()));
    } catch (const invalid_input& e) {
        throw invalid_input(path + ": " + e.what());
    }
}

inline json vector_json(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json index_json(const std::vector<Index>& idx)
{
    json a = json::array();
    for (const Index i : idx) a.push_back(i + 1);
    return a;
}

inline json names_json(const std::vector<std::string>& names)
{
    json a = json::array();
    for (const auto& s : names) a.push_back(s);
    return a;
}

inline json inference_json(const InferenceResult& r, const std::vector<std::string>& names)
{
    json j;
    j["names"] = names_json(names);
    j["lambda"] = r.initial.lambda;
    j["lasso"] = json{{"converged", r.initial.converged},
                      {"iterations", r.initial.iterations},
                      {"kkt_residual", r.initial.kkt_residual}};
    j["fit_samples"] = r.fit_samples;
    j["debias_samples"] = r.debias_samples;
    j["nonconverged_nodewise"] = r.nonconverged_nodewise;
    j["clamped_weights"] = r.fit.clamped_weights;
    j["beta_hat"] = vector_json(r.initial.beta_hat);
    j["beta_check"] = vector_json(r.fit.beta_check);
    j["tau"] = vector_json(r.fit.tau);
    j["M"] = vector_json(r.fit.m_stats);
    json lambdas = json::array();
    for (const auto& s : r.scores) lambdas.push_back(s.lambda_j);
    j["lambda_j"] = std::move(lambdas);
    return j;
}

inline json global_json(const GlobalTestResult& g)
{
    json j;
    j["statistic"] = g.statistic;
    j["threshold"] = g.threshold;
    j["q_alpha"] = g.q_alpha;
    j["alpha"] = g.alpha;
    j["p_value"] = g.p_value;
    j["reject"] = g.reject;
    j["argmax"] = g.argmax + 1;
    return j;
}

inline json multiple_json(const MultipleTestResult& m)
{
    json j;
    j["mode"] = m.mode == MultipleMode::fdr ? "fdr" : "fdv";
    j["target"] = m.target;
    j["threshold"] = m.threshold;
    j["fallback_used"] = m.fallback_used;
    if (m.mode == MultipleMode::fdr) j["search_bound"] = m.search_bound;
    j["rejected"] = index_json(m.rejected);
    return j;
}

inline json resolved_config(const std::string& command, const CommonFlags& f, const InferenceOptions& o)
{
    json j;
    j["command"] = command;
    j["seed"] = f.seed;
    j["inference"] = to_json(o);
    return j;
}

/// Parses "1,5,9" into zero-based indices.
inline std::vector<Index> parse_group(const std::string& text, Index p)
{
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) throw invalid_input("empty entry in --group '" + text + "'");
        item = item.substr(b, e - b + 1);
        Index v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw invalid_input("--group entry '" + item + "' is not an integer");
        }
        if (v < 1 || v > p) throw invalid_input("--group index " + item + " outside 1.." + std::to_string(p));
        out.push_back(v - 1);
    }
    if (out.empty()) throw invalid_input("--group is empty");
    return out;
}

inline void emit(const json& doc, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << doc.dump(2) << '\n';
        return;
    }
    std::ofstream file(path);
    if (!file) throw invalid_input("cannot write '" + path + "'");
    file << doc.dump(2) << '\n';
}

inline json header(const char* command)
{
    json j;
    j["schema_version"] = schema_version;
    j["command"] = command;
    return j;
}

} // namespace detail

/// Entry point of the command-line tool; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Global and multiple testing for high-dimensional logistic regression"};
    app.name("hdlt");
    app.require_subcommand(1);
    CommonFlags f;

    std::string csv, csv2, config_path, records_csv, group;
    double alpha = 0.05;
    std::optional<double> fdr, fdv;
    bool timing = false;

    auto* fit = app.add_subcommand("fit", "fit, debias and print per-coordinate statistics");
    fit->add_option("csv", csv, "data file (first column y)")->required();
    detail::add_inference_flags(*fit, f);
    detail::add_run_flags(*fit, f);

    auto* gt = app.add_subcommand("global-test", "max-type test of beta = 0 (or beta_G = 0)");
    gt->add_option("csv", csv, "data file (first column y)")->required();
    gt->add_option("--alpha", alpha, "significance level")->capture_default_str();
    gt->add_option("--group", group, "1-based coordinates to test, e.g. \"1,5,9\"");
    detail::add_inference_flags(*gt, f);
    detail::add_run_flags(*gt, f);

    auto* mt = app.add_subcommand("multi-test", "coordinate-wise tests with FDR or FDV control");
    mt->add_option("csv", csv, "data file (first column y)")->required();
    auto* mt_fdr = mt->add_option("--fdr", fdr, "target false discovery rate");
    auto* mt_fdv = mt->add_option("--fdv", fdv, "tolerated expected number of false rejections");
    mt_fdr->excludes(mt_fdv);
    detail::add_inference_flags(*mt, f);
    detail::add_run_flags(*mt, f);

    auto* ts = app.add_subcommand("two-sample", "compare two samples coordinate by coordinate");
    ts->add_option("csv1", csv, "first data file")->required();
    ts->add_option("csv2", csv2, "second data file")->required();
    ts->add_option("--alpha", alpha, "global test level")->capture_default_str();
    auto* ts_fdr = ts->add_option("--fdr", fdr, "also run FDR-controlled tests at this level");
    auto* ts_fdv = ts->add_option("--fdv", fdv, "also run FDV-controlled tests with this r");
    ts_fdr->excludes(ts_fdv);
    detail::add_inference_flags(*ts, f);
    detail::add_run_flags(*ts, f);

    auto* sim = app.add_subcommand("simulate", "run simulation scenarios from a JSON config");
    sim->add_option("config", config_path, "scenario JSON")->required();
    auto* sim_seed = sim->add_option("--seed", f.seed, "override the config seed");
    sim->add_option("--workers", f.workers, "worker threads (0 = all cores)")->capture_default_str();
    sim->add_option("-o,--output", f.output, "write JSON here instead of stdout");
    sim->add_option("--records-csv", records_csv, "also write per-replication records as CSV");
    sim->add_flag("--timing", timing, "include wall-clock time in the report");

    Index rn = 0, rp = 0, rk = 0;
    double ralpha = 0.05, rdelta = 0.05;
    auto* rad = app.add_subcommand("radius", "separation radius of the global test");
    rad->add_option("--n", rn, "sample size")->required();
    rad->add_option("--p", rp, "dimension")->required();
    rad->add_option("--k", rk, "sparsity")->required();
    rad->add_option("--alpha", ralpha, "type I error")->capture_default_str();
    rad->add_option("--delta", rdelta, "type II error")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (rad->parsed()) {
            const double r = separation_radius(rn, rp, rk, ralpha, rdelta);
            std::ostringstream s;
            s.precision(17);
            s << r;
            out << s.str() << '\n';
            return exit_ok;
        }

        if (sim->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw invalid_input("cannot open '" + config_path + "'");
            auto configs = parse_scenarios(in);
            if (sim_seed->count() > 0) {
                for (auto& c : configs) c.seed = f.seed;
            }
            const auto entries = sweep(configs, f.resolved_workers());
            json doc = detail::header("simulate");
            json reports = json::array();
            bool aborted = false;
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (entries[i].report) {
                    reports.push_back(to_json(*entries[i].report, timing));
                } else {
                    aborted = true;
                    reports.push_back(json{{"config", to_json(configs[i])}, {"error", entries[i].error}});
                }
            }
            doc["reports"] = std::move(reports);
            detail::emit(doc, f.output, out);
            if (!records_csv.empty()) {
                std::ofstream rc(records_csv);
                if (!rc) throw invalid_input("cannot write '" + records_csv + "'");
                for (const auto& e : entries) {
                    if (e.report) write_records_csv(rc, *e.report);
                }
            }
            if (aborted) {
                for (const auto& e : entries) {
                    if (!e.report) err << "hdlt: " << e.error << '\n';
                }
                return exit_compute;
            }
            return exit_ok;
        }

        const InferenceOptions options = f.options();
        const std::size_t workers = f.resolved_workers();

        if (ts->parsed()) {
            const CsvData a = detail::load_csv(csv);
            const CsvData b = detail::load_csv(csv2);
            if (a.data.p() != b.data.p()) throw invalid_input("the two files have different numbers of covariates");
            if (a.data.p() < min_test_dimension) {
                throw unsupported_dimension("two-sample tests need at least 3 covariates");
            }
            const InferenceResult r1 = run_inference(a.data, options, workers);
            const InferenceResult r2 = run_inference(b.data, options, workers);
            const Vector t = two_sample_stats(r1.fit, r2.fit);
            json doc = detail::header("two-sample");
            json cfg = detail::resolved_config("two-sample", f, options);
            cfg["inputs"] = json::array({csv, csv2});
            cfg["alpha"] = alpha;
            if (fdr) cfg["fdr"] = *fdr;
            if (fdv) cfg["fdv"] = *fdv;
            doc["config"] = std::move(cfg);
            doc["global"] = detail::global_json(two_sample_global(t, alpha));
            if (fdr) doc["multiple"] = detail::multiple_json(two_sample_lmt(t, *fdr));
            if (fdv) doc["multiple"] = detail::multiple_json(two_sample_fdv(t, *fdv));
            doc["names"] = detail::names_json(a.names);
            doc["T"] = detail::vector_json(t);
            doc["sample1"] = detail::inference_json(r1, a.names);
            doc["sample2"] = detail::inference_json(r2, b.names);
            detail::emit(doc, f.output, out);
            return exit_ok;
        }

        const CsvData input = detail::load_csv(csv);
        const Index p = input.data.p();
        std::vector<Index> group_idx;
        if (gt->parsed() && !group.empty()) group_idx = detail::parse_group(group, p);
        if (mt->parsed() && !fdr && !fdv) throw CLI::RequiredError("exactly one of --fdr or --fdv");
        if ((gt->parsed() || mt->parsed()) && p < min_test_dimension && group_idx.empty()) {
            throw unsupported_dimension("testing needs at least " + std::to_string(min_test_dimension) +
                                        " covariates, the file has " + std::to_string(p));
        }
        if (gt->parsed() && !(alpha > 0.0 && alpha < 1.0)) throw invalid_input("--alpha must lie in (0,1)");
        if (fdr && !(*fdr > 0.0 && *fdr < 1.0)) throw invalid_input("--fdr must lie in (0,1)");
        if (fdv && !(*fdv > 0.0 && *fdv < static_cast<double>(p))) throw invalid_input("--fdv must lie in (0, p)");
        if (!group_idx.empty() && static_cast<Index>(group_idx.size()) < min_test_dimension) {
            throw unsupported_dimension("group tests need at least " + std::to_string(min_test_dimension) +
                                        " coordinates");
        }

        const InferenceResult r = run_inference(input.data, options, workers);
        const char* command = fit->parsed() ? "fit" : gt->parsed() ? "global-test" : "multi-test";
        json doc = detail::header(command);
        json cfg = detail::resolved_config(command, f, options);
        cfg["input"] = csv;
        if (gt->parsed()) {
            cfg["alpha"] = alpha;
            if (!group_idx.empty()) cfg["group"] = detail::index_json(group_idx);
        }
        if (fdr) cfg["fdr"] = *fdr;
        if (fdv) cfg["fdv"] = *fdv;
        doc["config"] = std::move(cfg);
        if (gt->parsed()) {
            const GlobalTestResult g =
                group_idx.empty() ? global_test(r.fit.m_stats, alpha) : group_global_test(r.fit.m_stats, group_idx, alpha);
            doc["test"] = detail::global_json(g);
        }
        if (mt->parsed()) {
            doc["test"] = detail::multiple_json(fdr ? lmt_fdr(r.fit.m_stats, *fdr) : lmt_fdv(r.fit.m_stats, *fdv));
        }
        doc["fit"] = detail::inference_json(r, input.names);
        detail::emit(doc, f.output, out);
        return exit_ok;
    } catch (const CLI::Error& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    } catch (const invalid_input& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    } catch (const unsupported_dimension& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    } catch (const parse_error& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    } catch (const schema_error& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "hdlt: " << e.what() << '\n';
        return exit_compute;
    }
}

} // namespace hdlt::cli
