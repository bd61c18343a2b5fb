#include "core/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/errors.hpp"
#include "json.hpp"

namespace mlbicgstabt {

namespace {

using nlohmann::json;

json encode_number(double v) {
    if (std::isnan(v)) {
        return "NaN";
    }
    if (std::isinf(v)) {
        return v > 0 ? "Infinity" : "-Infinity";
    }
    return v;
}

double decode_number(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "NaN") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        if (s == "Infinity") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-Infinity") {
            return -std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument("report: bad number '" + s + "'");
    }
    return j.get<double>();
}

json encode_counters(const OpCounters& c) {
    return json{{"matvec_a", c.matvec_a},           {"matvec_ah", c.matvec_ah},
                {"precond_solves", c.precond_solves}, {"dot_products", c.dot_products},
                {"saxpys", c.saxpys},               {"scalings", c.scalings}};
}

OpCounters decode_counters(const json& j) {
    OpCounters c;
    c.matvec_a = j.at("matvec_a").get<std::uint64_t>();
    c.matvec_ah = j.at("matvec_ah").get<std::uint64_t>();
    c.precond_solves = j.at("precond_solves").get<std::uint64_t>();
    c.dot_products = j.at("dot_products").get<std::uint64_t>();
    c.saxpys = j.at("saxpys").get<std::uint64_t>();
    c.scalings = j.at("scalings").get<std::uint64_t>();
    return c;
}

json encode_series(const std::vector<double>& v) {
    json arr = json::array();
    for (double d : v) {
        arr.push_back(encode_number(d));
    }
    return arr;
}

std::vector<double> decode_series(const json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        out.push_back(decode_number(e));
    }
    return out;
}

Termination termination_from(std::string_view name) {
    if (name == "converged") {
        return Termination::Converged;
    }
    if (name == "max_iterations") {
        return Termination::MaxIterations;
    }
    if (name == "breakdown") {
        return Termination::Breakdown;
    }
    throw std::invalid_argument("report: unknown flag '" + std::string(name) + "'");
}

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") {
        return ReportFormat::Csv;
    }
    if (name == "json") {
        return ReportFormat::Json;
    }
    throw std::invalid_argument("report format must be csv or json, got '" + std::string(name) + "'");
}

std::string report_to_csv(const ConvergenceReport& report) {
    const bool with_true = !report.true_error_history.empty();
    std::string out = with_true ? "k,relative_residual,true_error\n" : "k,relative_residual\n";
    for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        append_g17(out, report.residual_history[k]);
        if (with_true) {
            out += ',';
            if (k < report.true_error_history.size()) {
                append_g17(out, report.true_error_history[k]);
            }
        }
        out += '\n';
    }
    return out;
}

std::string report_to_json(const ConvergenceReport& report) {
    json omegas = json::array();
    for (const auto& w : report.omega_history) {
        omegas.push_back(json::array({encode_number(w.real()), encode_number(w.imag())}));
    }
    const json doc = {
        {"method", report.method},
        {"n", report.n},
        {"flag", termination_name(report.flag)},
        {"flag_code", flag_code(report.flag)},
        {"breakdown_site", report.breakdown_site},
        {"iterations", report.iterations},
        {"tol", encode_number(report.tol)},
        {"true_error", encode_number(report.true_error)},
        {"residual_gap", encode_number(report.residual_gap)},
        {"counters", encode_counters(report.counters)},
        {"setup_counters", encode_counters(report.setup_counters)},
        {"residual_history", encode_series(report.residual_history)},
        {"true_error_history", encode_series(report.true_error_history)},
        {"omega_history", omegas},
    };
    return doc.dump(2) + "\n";
}

ConvergenceReport report_from_json(std::string_view text) {
    const json doc = json::parse(text);
    ConvergenceReport r;
    r.method = doc.at("method").get<std::string>();
    r.n = doc.at("n").get<Index>();
    r.flag = termination_from(doc.at("flag").get<std::string>());
    r.breakdown_site = doc.at("breakdown_site").get<std::string>();
    r.iterations = doc.at("iterations").get<Index>();
    r.tol = decode_number(doc.at("tol"));
    r.true_error = decode_number(doc.at("true_error"));
    r.residual_gap = decode_number(doc.at("residual_gap"));
    r.counters = decode_counters(doc.at("counters"));
    r.setup_counters = decode_counters(doc.at("setup_counters"));
    r.residual_history = decode_series(doc.at("residual_history"));
    r.true_error_history = decode_series(doc.at("true_error_history"));
    for (const auto& w : doc.at("omega_history")) {
        r.omega_history.emplace_back(decode_number(w.at(0)), decode_number(w.at(1)));
    }
    return r;
}

std::string format_report(const ConvergenceReport& report, ReportFormat format) {
    return format == ReportFormat::Csv ? report_to_csv(report) : report_to_json(report);
}

void write_report(const ConvergenceReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << format_report(report, format);
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace mlbicgstabt
