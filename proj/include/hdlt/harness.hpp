#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdlt/debias.hpp"
#include "hdlt/error.hpp"
#include "hdlt/hypothesis.hpp"
#include "hdlt/parallel.hpp"
#include "hdlt/rng.hpp"
#include "hdlt/simgen.hpp"

namespace hdlt {

enum class ProcedureKind
{
    global,
    lmt,
    lmt_fdv,
    two_sample_global,
    two_sample_lmt,
    two_sample_fdv
};

/// A testing procedure and its level: alpha for the global and FDR
/// procedures, the tolerated false-rejection count r for the FDV ones.
struct Procedure
{
    ProcedureKind kind = ProcedureKind::global;
    double level = 0.05;

    bool two_sample() const noexcept
    {
        return kind == ProcedureKind::two_sample_global || kind == ProcedureKind::two_sample_lmt ||
               kind == ProcedureKind::two_sample_fdv;
    }
    bool is_global() const noexcept
    {
        return kind == ProcedureKind::global || kind == ProcedureKind::two_sample_global;
    }
    bool operator==(const Procedure&) const = default;
};

inline const char* procedure_name(ProcedureKind kind)
{
    switch (kind) {
    case ProcedureKind::global: return "global";
    case ProcedureKind::lmt: return "lmt";
    case ProcedureKind::lmt_fdv: return "lmt_fdv";
    case ProcedureKind::two_sample_global: return "two_sample_global";
    case ProcedureKind::two_sample_lmt: return "two_sample_lmt";
    case ProcedureKind::two_sample_fdv: return "two_sample_fdv";
    }
    return "?";
}

/// Second sample of a two-sample scenario. Without its own coefficient spec
/// the second sample shares the first one's coefficients (the null).
struct TwoSampleSpec
{
    Index n = 0;
    std::optional<CoefficientSpec> coefficients;
};

struct ScenarioConfig
{
    std::string name;
    DesignSpec design;
    CoefficientSpec coefficients;
    std::vector<Procedure> procedures;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    InferenceOptions inference;
    std::optional<TwoSampleSpec> two_sample;
    std::optional<Index> record_coordinate; // zero-based; its statistic is kept per replication

    Index p() const noexcept { return design.covariance.p; }

    void validate() const
    {
        if (replications < 1) throw invalid_input("replications must be at least 1");
        if (procedures.empty()) throw invalid_input("scenario lists no procedure");
        if (coefficients.p != p()) throw invalid_input("coefficient dimension does not match the covariance");
        if (p() < min_test_dimension) {
            throw unsupported_dimension("scenarios need at least " + std::to_string(min_test_dimension) + " coordinates");
        }
        if (design.n < 2) throw invalid_input("design needs at least 2 samples");
        inference.validate();
        const bool paired = two_sample.has_value();
        for (const auto& proc : procedures) {
            if (proc.two_sample() != paired) {
                throw invalid_input(std::string("procedure ") + procedure_name(proc.kind) +
                                    (paired ? " is one-sample but the scenario is two-sample"
                                            : " needs a two_sample section"));
            }
            if (proc.kind == ProcedureKind::lmt_fdv || proc.kind == ProcedureKind::two_sample_fdv) {
                if (!(proc.level > 0.0 && proc.level < static_cast<double>(p()))) {
                    throw invalid_input("FDV target r must lie in (0, p)");
                }
            } else if (!(proc.level > 0.0 && proc.level < 1.0)) {
                throw invalid_input("procedure level must lie in (0,1)");
            }
        }
        if (paired) {
            if (two_sample->n < 2) throw invalid_input("second sample needs at least 2 samples");
            if (two_sample->coefficients && two_sample->coefficients->p != p()) {
                throw invalid_input("second coefficient dimension does not match the covariance");
            }
        }
        if (record_coordinate && (*record_coordinate < 0 || *record_coordinate >= p())) {
            throw invalid_input("recorded coordinate out of range");
        }
    }
};

/// Outcome of one procedure in one replication.
struct ProcedureOutcome
{
    std::optional<double> statistic; // global procedures only
    double threshold = 0.0;
    bool reject = false;
    bool fallback_used = false;
    std::size_t num_rejected = 0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    double fdp = 0.0;
};

struct ReplicationRecord
{
    std::size_t replication = 0;
    bool failed = false;
    std::string failure;
    std::size_t num_signals = 0;     // |H1|
    bool lasso_converged = true;
    std::size_t nonconverged_nodewise = 0;
    std::optional<double> recorded_statistic;
    std::vector<ProcedureOutcome> outcomes; // one per procedure, config order
};

struct ProcedureSummary
{
    Procedure procedure;
    std::size_t completed = 0;
    double rejection_rate = 0.0; // share of replications with a rejection
    double rejection_rate_se = 0.0;
    std::optional<double> empirical_size;  // global procedure, every hypothesis null
    std::optional<double> empirical_power; // global: rejection rate under an alternative; else discovery power
    double discovery_power = 0.0;          // mean |R cap H1| / max(|H1|, 1)
    double discovery_power_se = 0.0;
    double fdr = 0.0;
    double fdr_se = 0.0;
    double fdp_q50 = 0.0;
    double fdp_q90 = 0.0;
    double fdp_q95 = 0.0;
    double fdv = 0.0;
    double fdv_se = 0.0;
    double fwer = 0.0;
    double fwer_se = 0.0;
};

struct Timing
{
    double wall_seconds = 0.0;
};

struct SimulationReport
{
    ScenarioConfig config;
    std::vector<ReplicationRecord> records;
    std::vector<ProcedureSummary> summaries;
    std::size_t failed = 0;
    std::size_t nonconverged_lasso = 0;
    std::size_t nonconverged_nodewise = 0;
    Timing timing; // excluded from comparisons
};

/// Replaces generate -> fit -> debias with a user-supplied statistic vector.
/// Arguments: replication index, first and second coefficient vectors (equal
/// in one-sample scenarios).
using StatisticsHook = std::function<Vector(std::size_t, const Vector&, const Vector&)>;

struct ScenarioHooks
{
    StatisticsHook statistics;
};

/// Share of failed replications above which a scenario is abandoned.
inline constexpr double max_failure_share = 0.01;

namespace detail {

inline double mean_of(const std::vector<double>& values)
{
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

inline double standard_error(const std::vector<double>& values)
{
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

inline double proportion_se(double q, std::size_t n)
{
    return n == 0 ? 0.0 : std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

/// Linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double q)
{
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline ProcedureOutcome score_outcome(const Procedure& proc, const Vector& stats, const std::vector<bool>& is_null)
{
    ProcedureOutcome out;
    std::vector<Index> rejected;
    switch (proc.kind) {
    case ProcedureKind::global:
    case ProcedureKind::two_sample_global: {
        const auto g = global_test(stats, proc.level);
        out.statistic = g.statistic;
        out.threshold = g.threshold;
        out.reject = g.reject;
        if (g.reject) {
            for (Index j = 0; j < stats.size(); ++j) {
                if (stats[j] * stats[j] >= g.threshold) rejected.push_back(j);
            }
        }
        break;
    }
    case ProcedureKind::lmt:
    case ProcedureKind::two_sample_lmt:
    case ProcedureKind::lmt_fdv:
    case ProcedureKind::two_sample_fdv: {
        const bool fdv = proc.kind == ProcedureKind::lmt_fdv || proc.kind == ProcedureKind::two_sample_fdv;
        const auto m = fdv ? lmt_fdv(stats, proc.level) : lmt_fdr(stats, proc.level);
        out.threshold = m.threshold;
        out.fallback_used = m.fallback_used;
        rejected = m.rejected;
        out.reject = !rejected.empty();
        break;
    }
    }
    out.num_rejected = rejected.size();
    for (const Index j : rejected) {
        if (is_null[static_cast<std::size_t>(j)]) {
            ++out.false_positives;
        } else {
            ++out.true_positives;
        }
    }
    out.fdp = static_cast<double>(out.false_positives) / static_cast<double>(std::max<std::size_t>(out.num_rejected, 1));
    return out;
}

} // namespace detail

/// Folds per-replication records into per-procedure aggregates, in
/// replication order. Failed replications are left out.
inline std::vector<ProcedureSummary> summarize(const std::vector<Procedure>& procedures,
                                               const std::vector<ReplicationRecord>& records)
{
    std::vector<ProcedureSummary> out;
    for (std::size_t k = 0; k < procedures.size(); ++k) {
        ProcedureSummary s;
        s.procedure = procedures[k];
        std::vector<double> fdp, power, fv;
        std::size_t rejections = 0, any_false = 0;
        bool all_null = true;
        for (const auto& rec : records) {
            if (rec.failed) continue;
            const auto& o = rec.outcomes[k];
            ++s.completed;
            if (o.reject) ++rejections;
            if (o.false_positives > 0) ++any_false;
            if (rec.num_signals > 0) all_null = false;
            fdp.push_back(o.fdp);
            power.push_back(static_cast<double>(o.true_positives) /
                            static_cast<double>(std::max<std::size_t>(rec.num_signals, 1)));
            fv.push_back(static_cast<double>(o.false_positives));
        }
        const std::size_t n = s.completed;
        if (n > 0) {
            s.rejection_rate = static_cast<double>(rejections) / static_cast<double>(n);
            s.fwer = static_cast<double>(any_false) / static_cast<double>(n);
        }
        s.rejection_rate_se = detail::proportion_se(s.rejection_rate, n);
        s.fwer_se = detail::proportion_se(s.fwer, n);
        s.fdr = detail::mean_of(fdp);
        s.fdr_se = detail::standard_error(fdp);
        s.fdp_q50 = detail::quantile(fdp, 0.5);
        s.fdp_q90 = detail::quantile(fdp, 0.9);
        s.fdp_q95 = detail::quantile(fdp, 0.95);
        s.discovery_power = detail::mean_of(power);
        s.discovery_power_se = detail::standard_error(power);
        s.fdv = detail::mean_of(fv);
        s.fdv_se = detail::standard_error(fv);
        if (s.procedure.is_global()) {
            if (all_null) {
                s.empirical_size = s.rejection_rate;
            } else {
                s.empirical_power = s.rejection_rate;
            }
        } else {
            s.empirical_power = s.discovery_power;
        }
        out.push_back(s);
    }
    return out;
}

/// Checks a report against its own records: bounds and aggregates.
inline void audit(const SimulationReport& report)
{
    const auto recomputed = summarize(report.config.procedures, report.records);
    if (recomputed.size() != report.summaries.size()) throw error("report audit: summary count mismatch");
    std::size_t failed = 0;
    for (const auto& rec : report.records) {
        if (rec.failed) {
            ++failed;
            continue;
        }
        if (rec.outcomes.size() != report.config.procedures.size()) throw error("report audit: outcome count mismatch");
        for (const auto& o : rec.outcomes) {
            if (o.true_positives + o.false_positives != o.num_rejected) {
                throw error("report audit: confusion counts do not add up");
            }
            if (!(o.fdp >= 0.0 && o.fdp <= 1.0)) throw error("report audit: FDP outside [0,1]");
        }
    }
    if (failed != report.failed) throw error("report audit: failure count mismatch");
    const double p = static_cast<double>(report.config.p());
    for (std::size_t k = 0; k < recomputed.size(); ++k) {
        const auto& a = recomputed[k];
        const auto& b = report.summaries[k];
        if (a.completed != b.completed || a.rejection_rate != b.rejection_rate || a.fdr != b.fdr ||
            a.fdv != b.fdv || a.fwer != b.fwer || a.discovery_power != b.discovery_power) {
            throw error("report audit: aggregates do not match the records");
        }
        if (!(b.fdr >= 0.0 && b.fdr <= 1.0) || !(b.fwer >= 0.0 && b.fwer <= 1.0) || !(b.fdv >= 0.0 && b.fdv <= p) ||
            !(b.rejection_rate >= 0.0 && b.rejection_rate <= 1.0)) {
            throw error("report audit: aggregate out of range");
        }
    }
}

/// Runs every replication of a scenario: draw coefficients and data, fit,
/// debias, apply each procedure. Replication r draws from streams keyed by
/// (seed, r, label), so results do not depend on the worker count.
inline SimulationReport run_scenario(const ScenarioConfig& config, std::size_t workers = 1,
                                     const ScenarioHooks& hooks = {})
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Index p = config.p();

    std::optional<DesignSampler> sampler1, sampler2;
    if (!hooks.statistics) {
        sampler1.emplace(config.design);
        if (config.two_sample) {
            DesignSpec second = config.design;
            second.n = config.two_sample->n;
            sampler2.emplace(second);
        }
    }

    SimulationReport report;
    report.config = config;
    report.records.resize(config.replications);

    parallel_for(config.replications, workers, [&](std::size_t r) {
        ReplicationRecord& rec = report.records[r];
        rec.replication = r;
        Stream coef_rng(config.seed, r, "coefficients");
        const Vector beta1 = gen_coefficients(config.coefficients, coef_rng);
        Vector beta2 = beta1;
        if (config.two_sample && config.two_sample->coefficients) {
            Stream coef2_rng(config.seed, r, "coefficients2");
            beta2 = gen_coefficients(*config.two_sample->coefficients, coef2_rng);
        }
        std::vector<bool> is_null(static_cast<std::size_t>(p));
        for (Index j = 0; j < p; ++j) {
            is_null[static_cast<std::size_t>(j)] = config.two_sample ? beta1[j] == beta2[j] : beta1[j] == 0.0;
            if (!is_null[static_cast<std::size_t>(j)]) ++rec.num_signals;
        }

        Vector stats;
        try {
            if (hooks.statistics) {
                stats = hooks.statistics(r, beta1, beta2);
                if (stats.size() != p) throw invalid_input("statistics hook returned the wrong length");
            } else {
                Stream design_rng(config.seed, r, "design");
                const Dataset data = sampler1->draw(beta1, design_rng);
                const InferenceResult first = run_inference(data, config.inference);
                rec.lasso_converged = first.initial.converged;
                rec.nonconverged_nodewise = first.nonconverged_nodewise;
                if (config.two_sample) {
                    Stream design2_rng(config.seed, r, "design2");
                    const Dataset data2 = sampler2->draw(beta2, design2_rng);
                    const InferenceResult second = run_inference(data2, config.inference);
                    rec.lasso_converged = rec.lasso_converged && second.initial.converged;
                    rec.nonconverged_nodewise += second.nonconverged_nodewise;
                    stats = two_sample_stats(first.fit, second.fit);
                } else {
                    stats = first.fit.m_stats;
                }
            }
        } catch (const degenerate_coordinate& e) {
            rec.failed = true;
            rec.failure = e.what();
            return;
        }
        if (config.record_coordinate) rec.recorded_statistic = stats[*config.record_coordinate];
        for (const auto& proc : config.procedures) rec.outcomes.push_back(detail::score_outcome(proc, stats, is_null));
    });

    for (const auto& rec : report.records) {
        if (rec.failed) ++report.failed;
        if (!rec.lasso_converged) ++report.nonconverged_lasso;
        report.nonconverged_nodewise += rec.nonconverged_nodewise;
    }
    if (static_cast<double>(report.failed) > max_failure_share * static_cast<double>(config.replications)) {
        std::string first_failure;
        for (const auto& rec : report.records) {
            if (rec.failed) {
                first_failure = "replication " + std::to_string(rec.replication) + ": " + rec.failure;
                break;
            }
        }
        throw scenario_aborted("scenario '" + config.name + "' aborted: " + std::to_string(report.failed) + " of " +
                               std::to_string(config.replications) + " replications failed (first: " + first_failure +
                               ")");
    }
    report.summaries = summarize(config.procedures, report.records);
    audit(report);
    report.timing.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// Result of one scenario inside a sweep: a report or the reason it aborted.
struct SweepEntry
{
    std::optional<SimulationReport> report;
    std::string error;
};

/// Runs scenarios in input order; an aborted scenario is reported and the
/// rest still run.
inline std::vector<SweepEntry> sweep(const std::vector<ScenarioConfig>& configs, std::size_t workers = 1,
                                     const ScenarioHooks& hooks = {})
{
    if (configs.empty()) throw invalid_input("sweep needs at least one scenario");
    std::vector<SweepEntry> out(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        try {
            out[i].report = run_scenario(configs[i], workers, hooks);
        } catch (const error& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

} // namespace hdlt
