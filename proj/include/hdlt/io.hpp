#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdlt/error.hpp"
#include "hdlt/harness.hpp"

namespace hdlt {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "hdlt/1";

// ---------------------------------------------------------------------------
// CSV datasets: header row, first column `y`, comma separated, '.' decimals.

struct CsvData
{
    Dataset data;
    std::vector<std::string> names; // covariate names, CSV order
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& c : cells) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t");
        c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t column)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        throw parse_error(row, column, "'" + cell + "' is not a number");
    }
    if (!std::isfinite(v)) throw parse_error(row, column, "non-finite value '" + cell + "'");
    return v;
}

} // namespace detail

inline CsvData read_csv(std::istream& in)
{
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        header = detail::split_csv_line(line);
    }
    if (header.empty()) throw parse_error(row, 0, "missing header row");
    if (header.front() != "y") throw parse_error(row, 1, "first column must be named 'y', found '" + header.front() + "'");
    if (header.size() < 2) throw parse_error(row, 0, "no covariate columns");
    const std::size_t width = header.size();

    std::vector<double> ys, xs;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != width) {
            throw parse_error(row, std::min(cells.size(), width) + 1,
                              "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
        }
        const double y = detail::parse_cell(cells[0], row, 1);
        if (y != 0.0 && y != 1.0) throw parse_error(row, 1, "response must be 0 or 1, found '" + cells[0] + "'");
        ys.push_back(y);
        for (std::size_t c = 1; c < width; ++c) xs.push_back(detail::parse_cell(cells[c], row, c + 1));
    }
    const auto n = static_cast<Index>(ys.size());
    const auto p = static_cast<Index>(width - 1);
    if (n < 2) throw parse_error(row, 0, "need at least 2 data rows");
    Matrix X(n, p);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = ys[static_cast<std::size_t>(i)];
        for (Index j = 0; j < p; ++j) X(i, j) = xs[static_cast<std::size_t>(i * p + j)];
    }
    return {Dataset(std::move(X), std::move(y)), std::vector<std::string>(header.begin() + 1, header.end())};
}

// ---------------------------------------------------------------------------
// Scenario configuration JSON. Coordinates are 1-based in JSON.

namespace detail {

class JsonReader
{
public:
    JsonReader(const json& node, std::string pointer) : node_(node), pointer_(std::move(pointer))
    {
        if (!node_.is_object()) throw schema_error(pointer_, "expected an object");
    }

    /// Rejects keys that were never asked for.
    void finish() const
    {
        for (const auto& item : node_.items()) {
            if (!seen_.contains(item.key())) throw schema_error(child(item.key()), "unknown field");
        }
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json& at(const std::string& key)
    {
        if (!has(key)) throw schema_error(child(key), "required field missing");
        return node_.at(key);
    }

    std::string child(const std::string& key) const { return pointer_ + "/" + key; }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw schema_error(child(key), "required field missing");
        }
        const json& v = node_.at(key);
        if (!v.is_number()) throw schema_error(child(key), "expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw schema_error(child(key), "required field missing");
        }
        const json& v = node_.at(key);
        if (!v.is_number_integer()) throw schema_error(child(key), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_unsigned()) throw schema_error(child(key), "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw schema_error(child(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw schema_error(child(key), "required field missing");
        }
        const json& v = node_.at(key);
        if (!v.is_string()) throw schema_error(child(key), "expected a string");
        return v.get<std::string>();
    }

private:
    const json& node_;
    std::string pointer_;
    std::set<std::string> seen_;
};

inline Index positive_index(std::int64_t v, const std::string& pointer, const char* what)
{
    if (v < 1) throw schema_error(pointer, std::string(what) + " must be at least 1");
    return static_cast<Index>(v);
}

inline CovarianceSpec parse_covariance(const json& node, const std::string& pointer)
{
    JsonReader r(node, pointer);
    const std::string kind = r.string("kind");
    CovarianceSpec spec;
    if (kind == "custom") {
        const json& m = r.at("matrix");
        const std::string mp = r.child("matrix");
        if (!m.is_array() || m.empty()) throw schema_error(mp, "expected a nonempty array of rows");
        const auto p = static_cast<Index>(m.size());
        Matrix sigma(p, p);
        for (Index i = 0; i < p; ++i) {
            const json& row = m[static_cast<std::size_t>(i)];
            const std::string rp = mp + "/" + std::to_string(i);
            if (!row.is_array() || static_cast<Index>(row.size()) != p) {
                throw schema_error(rp, "expected a row of " + std::to_string(p) + " numbers");
            }
            for (Index j = 0; j < p; ++j) {
                const json& v = row[static_cast<std::size_t>(j)];
                if (!v.is_number()) throw schema_error(rp + "/" + std::to_string(j), "expected a number");
                sigma(i, j) = v.get<double>();
            }
        }
        if (r.has("p") && r.integer("p") != p) throw schema_error(r.child("p"), "does not match the matrix size");
        spec = CovarianceSpec::custom(std::move(sigma));
    } else {
        const Index p = positive_index(r.integer("p"), r.child("p"), "p");
        if (kind == "identity") {
            spec = CovarianceSpec::identity(p);
        } else if (kind == "block") {
            spec = CovarianceSpec::block(p, r.number("value", 0.7),
                                         positive_index(r.integer("num_blocks", 10), r.child("num_blocks"), "num_blocks"));
        } else if (kind == "toeplitz_block") {
            spec = CovarianceSpec::toeplitz_block(
                p, positive_index(r.integer("num_blocks", 10), r.child("num_blocks"), "num_blocks"),
                r.number("scale", 1.0));
        } else {
            throw schema_error(r.child("kind"), "unknown covariance kind '" + kind + "'");
        }
    }
    r.finish();
    return spec;
}

inline CoefficientSpec parse_coefficients(const json& node, const std::string& pointer, Index p)
{
    JsonReader r(node, pointer);
    CoefficientSpec spec;
    spec.p = p;
    const std::int64_t k = r.integer("k");
    if (k < 0 || k > p) throw schema_error(r.child("k"), "must lie in [0, p]");
    spec.k = static_cast<Index>(k);
    spec.rho = r.number("rho", 0.0);
    if (r.has("support")) {
        const json& s = r.at("support");
        const std::string sp = r.child("support");
        if (!s.is_array()) throw schema_error(sp, "expected an array of 1-based indices");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string ip = sp + "/" + std::to_string(i);
            if (!s[i].is_number_integer()) throw schema_error(ip, "expected an integer");
            const auto v = s[i].get<std::int64_t>();
            if (v < 1 || v > p) throw schema_error(ip, "index outside 1.." + std::to_string(p));
            spec.fixed_support.push_back(static_cast<Index>(v - 1));
        }
        if (static_cast<Index>(spec.fixed_support.size()) != spec.k) {
            throw schema_error(sp, "must list exactly k indices");
        }
    }
    r.finish();
    return spec;
}

inline Procedure parse_procedure(const json& node, const std::string& pointer)
{
    JsonReader r(node, pointer);
    const std::string kind = r.string("kind");
    Procedure proc;
    if (kind == "global") {
        proc.kind = ProcedureKind::global;
    } else if (kind == "lmt") {
        proc.kind = ProcedureKind::lmt;
    } else if (kind == "lmt_fdv") {
        proc.kind = ProcedureKind::lmt_fdv;
    } else if (kind == "two_sample_global") {
        proc.kind = ProcedureKind::two_sample_global;
    } else if (kind == "two_sample_lmt") {
        proc.kind = ProcedureKind::two_sample_lmt;
    } else if (kind == "two_sample_fdv") {
        proc.kind = ProcedureKind::two_sample_fdv;
    } else {
        throw schema_error(r.child("kind"), "unknown procedure '" + kind + "'");
    }
    const bool fdv = proc.kind == ProcedureKind::lmt_fdv || proc.kind == ProcedureKind::two_sample_fdv;
    const std::string key = fdv ? "r" : "alpha";
    proc.level = r.number(key);
    if (fdv ? !(proc.level > 0.0) : !(proc.level > 0.0 && proc.level < 1.0)) {
        throw schema_error(r.child(key), fdv ? "must be positive" : "must lie in (0,1)");
    }
    r.finish();
    return proc;
}

inline InferenceOptions parse_inference(const json& node, const std::string& pointer)
{
    JsonReader r(node, pointer);
    InferenceOptions o;
    o.lambda_const = r.number("lambda_const", o.lambda_const);
    if (r.has("lambda")) o.lambda = r.number("lambda");
    o.grid_size = static_cast<std::size_t>(r.unsigned_integer("grid_size", o.grid_size));
    o.grid_ratio = r.number("grid_ratio", o.grid_ratio);
    o.kappa0 = r.number("kappa0", o.kappa0);
    o.kappa1 = r.number("kappa1", o.kappa1);
    if (r.has("zeta_star")) o.zeta_star = r.number("zeta_star");
    o.sample_split = r.boolean("sample_split", o.sample_split);
    o.omega_identity = r.boolean("omega_identity", o.omega_identity);
    o.tol = r.number("tol", o.tol);
    o.max_iter = static_cast<std::size_t>(r.unsigned_integer("max_iter", o.max_iter));
    if (r.has("link")) {
        try {
            o.link = LinkFunction::parse(r.string("link"));
        } catch (const invalid_input& e) {
            throw schema_error(r.child("link"), e.what());
        }
    }
    r.finish();
    try {
        o.validate();
    } catch (const invalid_input& e) {
        throw schema_error(pointer, e.what());
    }
    return o;
}

} // namespace detail

/// Parses one scenario object. Errors name the offending field by JSON
/// pointer, relative to `pointer`.
inline ScenarioConfig parse_scenario(const json& node, const std::string& pointer = "")
{
    detail::JsonReader r(node, pointer);
    ScenarioConfig c;
    c.name = r.string("name", "scenario");
    c.seed = r.unsigned_integer("seed", c.seed);
    c.replications = static_cast<std::size_t>(r.unsigned_integer("replications", 1));
    if (c.replications < 1) throw schema_error(r.child("replications"), "must be at least 1");

    {
        detail::JsonReader d(r.at("design"), r.child("design"));
        c.design.covariance = detail::parse_covariance(d.at("covariance"), d.child("covariance"));
        c.design.n = detail::positive_index(d.integer("n"), d.child("n"), "n");
        if (c.design.n < 2) throw schema_error(d.child("n"), "must be at least 2");
        const std::string mode = d.string("mode", "gaussian");
        if (mode == "gaussian") {
            c.design.mode = DesignMode::gaussian;
        } else if (mode == "truncated") {
            c.design.mode = DesignMode::truncated;
        } else if (mode == "bounded") {
            c.design.mode = DesignMode::bounded;
        } else {
            throw schema_error(d.child("mode"), "unknown design mode '" + mode + "'");
        }
        c.design.bound = d.number("bound", 3.0);
        if (!(c.design.bound > 0.0)) throw schema_error(d.child("bound"), "must be positive");
        if (d.has("link")) {
            try {
                c.design.link = LinkFunction::parse(d.string("link"));
            } catch (const invalid_input& e) {
                throw schema_error(d.child("link"), e.what());
            }
        }
        d.finish();
    }
    const Index p = c.p();
    c.coefficients = detail::parse_coefficients(r.at("coefficients"), r.child("coefficients"), p);

    const bool single = r.has("procedure");
    const bool many = r.has("procedures");
    if (single == many) throw schema_error(pointer, "give exactly one of 'procedure' or 'procedures'");
    if (single) {
        c.procedures.push_back(detail::parse_procedure(r.at("procedure"), r.child("procedure")));
    } else {
        const json& list = r.at("procedures");
        if (!list.is_array() || list.empty()) throw schema_error(r.child("procedures"), "expected a nonempty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            c.procedures.push_back(detail::parse_procedure(list[i], r.child("procedures") + "/" + std::to_string(i)));
        }
    }

    if (r.has("inference")) c.inference = detail::parse_inference(r.at("inference"), r.child("inference"));
    if (r.has("two_sample")) {
        detail::JsonReader t(r.at("two_sample"), r.child("two_sample"));
        TwoSampleSpec ts;
        ts.n = detail::positive_index(t.integer("n"), t.child("n"), "n");
        if (t.has("coefficients")) {
            ts.coefficients = detail::parse_coefficients(t.at("coefficients"), t.child("coefficients"), p);
        }
        t.finish();
        c.two_sample = ts;
    }
    if (r.has("record_coordinate")) {
        const auto j = r.integer("record_coordinate");
        if (j < 1 || j > p) throw schema_error(r.child("record_coordinate"), "index outside 1.." + std::to_string(p));
        c.record_coordinate = static_cast<Index>(j - 1);
    }
    r.finish();
    try {
        c.validate();
    } catch (const invalid_input& e) {
        throw schema_error(pointer, e.what());
    } catch (const unsupported_dimension& e) {
        throw schema_error(pointer, e.what());
    }
    return c;
}

/// A config document is either one scenario object or {"scenarios": [...]}.
inline std::vector<ScenarioConfig> parse_scenarios(const json& doc)
{
    if (doc.is_object() && doc.contains("scenarios")) {
        detail::JsonReader r(doc, "");
        const json& list = r.at("scenarios");
        r.finish();
        if (!list.is_array() || list.empty()) throw schema_error("/scenarios", "expected a nonempty array");
        std::vector<ScenarioConfig> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            out.push_back(parse_scenario(list[i], "/scenarios/" + std::to_string(i)));
        }
        return out;
    }
    return {parse_scenario(doc)};
}

inline std::vector<ScenarioConfig> parse_scenarios(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw schema_error("", std::string("not valid JSON: ") + e.what());
    }
    return parse_scenarios(doc);
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const LinkFunction& link) { return link.name(); }

inline json to_json(const CovarianceSpec& spec)
{
    json j;
    switch (spec.kind) {
    case CovarianceKind::identity:
        j["kind"] = "identity";
        j["p"] = spec.p;
        break;
    case CovarianceKind::block:
        j["kind"] = "block";
        j["p"] = spec.p;
        j["value"] = spec.value;
        j["num_blocks"] = spec.num_blocks;
        break;
    case CovarianceKind::toeplitz_block:
        j["kind"] = "toeplitz_block";
        j["p"] = spec.p;
        j["num_blocks"] = spec.num_blocks;
        j["scale"] = spec.scale;
        break;
    case CovarianceKind::custom: {
        j["kind"] = "custom";
        json rows = json::array();
        for (Index i = 0; i < spec.matrix.rows(); ++i) {
            json row = json::array();
            for (Index c = 0; c < spec.matrix.cols(); ++c) row.push_back(spec.matrix(i, c));
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
        break;
    }
    }
    return j;
}

inline json to_json(const CoefficientSpec& spec)
{
    json j;
    j["k"] = spec.k;
    j["rho"] = spec.rho;
    if (!spec.fixed_support.empty()) {
        json s = json::array();
        for (const Index i : spec.fixed_support) s.push_back(i + 1);
        j["support"] = std::move(s);
    }
    return j;
}

inline json to_json(const Procedure& proc)
{
    json j;
    j["kind"] = procedure_name(proc.kind);
    const bool fdv = proc.kind == ProcedureKind::lmt_fdv || proc.kind == ProcedureKind::two_sample_fdv;
    j[fdv ? "r" : "alpha"] = proc.level;
    return j;
}

inline json to_json(const InferenceOptions& o)
{
    json j;
    j["lambda_const"] = o.lambda_const;
    if (o.lambda) j["lambda"] = *o.lambda;
    j["grid_size"] = o.grid_size;
    j["grid_ratio"] = o.grid_ratio;
    j["kappa0"] = o.kappa0;
    j["kappa1"] = o.kappa1;
    if (o.zeta_star) j["zeta_star"] = *o.zeta_star;
    j["sample_split"] = o.sample_split;
    j["omega_identity"] = o.omega_identity;
    j["tol"] = o.tol;
    j["max_iter"] = o.max_iter;
    j["link"] = to_json(o.link);
    return j;
}

inline json to_json(const ScenarioConfig& c)
{
    json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["replications"] = c.replications;
    json design;
    design["n"] = c.design.n;
    design["mode"] = c.design.mode == DesignMode::gaussian    ? "gaussian"
                     : c.design.mode == DesignMode::truncated ? "truncated"
                                                              : "bounded";
    design["bound"] = c.design.bound;
    design["link"] = to_json(c.design.link);
    design["covariance"] = to_json(c.design.covariance);
    j["design"] = std::move(design);
    j["coefficients"] = to_json(c.coefficients);
    json procs = json::array();
    for (const auto& proc : c.procedures) procs.push_back(to_json(proc));
    j["procedures"] = std::move(procs);
    j["inference"] = to_json(c.inference);
    if (c.two_sample) {
        json t;
        t["n"] = c.two_sample->n;
        if (c.two_sample->coefficients) t["coefficients"] = to_json(*c.two_sample->coefficients);
        j["two_sample"] = std::move(t);
    }
    if (c.record_coordinate) j["record_coordinate"] = *c.record_coordinate + 1;
    return j;
}

namespace detail {

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace detail

inline json to_json(const ProcedureSummary& s)
{
    json j;
    j["procedure"] = to_json(s.procedure);
    j["completed"] = s.completed;
    j["rejection_rate"] = s.rejection_rate;
    j["rejection_rate_se"] = s.rejection_rate_se;
    j["empirical_size"] = detail::optional_number(s.empirical_size);
    j["empirical_power"] = detail::optional_number(s.empirical_power);
    j["discovery_power"] = s.discovery_power;
    j["discovery_power_se"] = s.discovery_power_se;
    j["empirical_FDR"] = s.fdr;
    j["empirical_FDR_se"] = s.fdr_se;
    j["fdp_quantiles"] = json{{"0.5", s.fdp_q50}, {"0.9", s.fdp_q90}, {"0.95", s.fdp_q95}};
    j["empirical_FDV"] = s.fdv;
    j["empirical_FDV_se"] = s.fdv_se;
    j["empirical_FWER"] = s.fwer;
    j["empirical_FWER_se"] = s.fwer_se;
    return j;
}

inline json to_json(const ReplicationRecord& rec)
{
    json j;
    j["replication"] = rec.replication;
    j["status"] = rec.failed ? "failed" : "ok";
    if (rec.failed) j["failure"] = rec.failure;
    j["num_signals"] = rec.num_signals;
    j["lasso_converged"] = rec.lasso_converged;
    j["nonconverged_nodewise"] = rec.nonconverged_nodewise;
    if (rec.recorded_statistic) j["recorded_statistic"] = *rec.recorded_statistic;
    json outs = json::array();
    for (const auto& o : rec.outcomes) {
        json oj;
        oj["statistic"] = detail::optional_number(o.statistic);
        oj["threshold"] = o.threshold;
        oj["reject"] = o.reject;
        oj["fallback_used"] = o.fallback_used;
        oj["num_rejected"] = o.num_rejected;
        oj["true_positives"] = o.true_positives;
        oj["false_positives"] = o.false_positives;
        oj["fdp"] = o.fdp;
        outs.push_back(std::move(oj));
    }
    j["outcomes"] = std::move(outs);
    return j;
}

/// Report document. The writer audits the report against its records first.
/// Wall-clock time is left out unless asked for, so equal runs serialize to
/// equal bytes.
inline json to_json(const SimulationReport& report, bool include_timing = false, bool include_records = true)
{
    audit(report);
    json j;
    j["schema_version"] = schema_version;
    j["config"] = to_json(report.config);
    j["replications"] = report.config.replications;
    j["failed"] = report.failed;
    j["nonconverged_lasso"] = report.nonconverged_lasso;
    j["nonconverged_nodewise"] = report.nonconverged_nodewise;
    json sums = json::array();
    for (const auto& s : report.summaries) sums.push_back(to_json(s));
    j["summaries"] = std::move(sums);
    if (include_records) {
        json recs = json::array();
        for (const auto& rec : report.records) recs.push_back(to_json(rec));
        j["records"] = std::move(recs);
    }
    if (include_timing) j["timing"] = json{{"wall_seconds", report.timing.wall_seconds}};
    return j;
}

/// One row per (replication, procedure).
inline void write_records_csv(std::ostream& out, const SimulationReport& report)
{
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    out << "replication,status,procedure,statistic,threshold,reject,num_rejected,true_positives,false_positives,fdp,"
           "recorded_statistic\n";
    for (const auto& rec : report.records) {
        const std::string recorded = rec.recorded_statistic ? num(*rec.recorded_statistic) : "";
        if (rec.failed) {
            out << rec.replication << ",failed,,,,,,,,," << recorded << '\n';
            continue;
        }
        for (std::size_t k = 0; k < rec.outcomes.size(); ++k) {
            const auto& o = rec.outcomes[k];
            out << rec.replication << ",ok," << procedure_name(report.config.procedures[k].kind) << ','
                << (o.statistic ? num(*o.statistic) : "") << ',' << num(o.threshold) << ',' << (o.reject ? 1 : 0) << ','
                << o.num_rejected << ',' << o.true_positives << ',' << o.false_positives << ',' << num(o.fdp) << ','
                << recorded << '\n';
        }
    }
}

} // namespace hdlt
