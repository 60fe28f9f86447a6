// Copyright 2026 The qillum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qillum/illumination.hpp"

namespace qi {

namespace {

const std::vector<std::string> kExtraOutputs = {"qb2", "qb3", "qbCoherent", "chernoff3"};

void assign(qillum::IlluminationScenario &scn, SweepParam p, double x) {
    switch (p) {
        case SweepParam::NS:
            scn.nS = x;
            break;
        case SweepParam::NB:
            scn.nB = x;
            break;
        case SweepParam::Kappa:
            scn.kappa = x;
            break;
        case SweepParam::Copies:
            scn.copies = static_cast<std::int64_t>(std::llround(x));
            break;
    }
}

struct PointResult {
    std::vector<double> row;
    std::string diagnostic;
};

PointResult evaluate_point(const SweepSpec &spec, double x) {
    qillum::IlluminationScenario scn = spec.fixed;
    assign(scn, spec.param, x);

    PointResult out;
    double g2 = qillum::gamma2(scn.nS);
    double g3 = qillum::gamma3(scn.nS);
    double ratio = g2 > 0.0 ? g3 / g2 : std::numeric_limits<double>::quiet_NaN();
    out.row = {scn.nS, g2, g3, ratio};
    if (spec.param != SweepParam::NS) {
        out.row.push_back(spec.param == SweepParam::Copies ? static_cast<double>(scn.copies) : x);
    }

    std::vector<std::string> notes;
    auto two = scn;
    auto three = scn;
    if (!spec.explicitC) {
        two.c = qillum::cq2(scn.nS);
        three.c = qillum::solve_cq3(scn.nS);
    }
    for (const auto &name : spec.outputs) {
        if (name == "qb2") {
            out.row.push_back(qillum::evaluate_scenario(two, qillum::Model::TwoMode, false).bhattacharyya.value);
        } else if (name == "qb3" || name == "chernoff3") {
            bool chernoff = name == "chernoff3";
            auto r = qillum::evaluate_scenario(three, qillum::Model::ThreeMode, chernoff);
            out.row.push_back(chernoff ? r.chernoff->value : r.bhattacharyya.value);
            if (r.analyticFallback) {
                notes.push_back(name + ": numeric Williamson fallback (" + r.fallbackReason + ")");
            }
        } else if (name == "qbCoherent") {
            out.row.push_back(qillum::evaluate_scenario(scn, qillum::Model::Coherent, false).bhattacharyya.value);
        }
    }
    for (std::size_t i = 0; i < notes.size(); ++i) {
        out.diagnostic += (i ? "; " : "") + notes[i];
    }
    return out;
}

}  // namespace

SweepParam parse_sweep_param(const std::string &name) {
    if (name == "nS" || name == "ns") return SweepParam::NS;
    if (name == "nB" || name == "nb") return SweepParam::NB;
    if (name == "kappa") return SweepParam::Kappa;
    if (name == "M" || name == "copies") return SweepParam::Copies;
    throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected nS, nB, kappa or M)");
}

std::string sweep_param_name(SweepParam p) {
    switch (p) {
        case SweepParam::NS:
            return "nS";
        case SweepParam::NB:
            return "nB";
        case SweepParam::Kappa:
            return "kappa";
        case SweepParam::Copies:
            return "M";
    }
    return "";
}

std::string sweep_param_column(SweepParam p) {
    switch (p) {
        case SweepParam::NS:
            return "n_s";
        case SweepParam::NB:
            return "n_b";
        case SweepParam::Kappa:
            return "kappa";
        case SweepParam::Copies:
            return "copies";
    }
    return "";
}

void validate(const SweepSpec &spec) {
    if (spec.count < 2) {
        throw std::invalid_argument("sweep needs at least 2 points");
    }
    if (!(spec.start < spec.stop)) {
        throw std::invalid_argument("sweep start must be below stop");
    }
    if (spec.logSpacing && !(spec.start > 0.0)) {
        throw std::invalid_argument("log spacing needs a positive start");
    }
    if (spec.param == SweepParam::Copies && spec.start < 1.0) {
        throw std::invalid_argument("copies sweep must start at 1 or above");
    }
    for (const auto &name : spec.outputs) {
        if (std::find(kExtraOutputs.begin(), kExtraOutputs.end(), name) == kExtraOutputs.end()) {
            throw std::invalid_argument("unknown output '" + name + "' (expected qb2, qb3, qbCoherent, chernoff3)");
        }
    }
}

std::vector<double> sweep_grid(const SweepSpec &spec) {
    validate(spec);
    std::vector<double> grid(static_cast<std::size_t>(spec.count));
    double last = spec.count - 1;
    for (int i = 0; i < spec.count; ++i) {
        double t = i / last;
        if (spec.logSpacing) {
            double la = std::log(spec.start);
            double lb = std::log(spec.stop);
            grid[i] = std::exp(la + (lb - la) * t);
        } else {
            grid[i] = spec.start + (spec.stop - spec.start) * t;
        }
    }
    // Pin the endpoints so they print exactly as requested.
    grid.front() = spec.start;
    grid.back() = spec.stop;
    return grid;
}

RunReport run_sweep(const SweepSpec &spec, unsigned threads) {
    auto grid = sweep_grid(spec);
    std::vector<PointResult> results(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                results[i] = evaluate_point(spec, grid[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(grid.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }

    RunReport report;
    report.command = "sweep";
    report.columns = {"n_s", "gamma2", "gamma3", "ratio"};
    if (spec.param != SweepParam::NS) {
        report.columns.push_back(sweep_param_column(spec.param));
    }
    for (const auto &name : spec.outputs) {
        report.columns.push_back(name);
    }
    for (auto &r : results) {
        report.rows.push_back(std::move(r.row));
        report.rowDiagnostics.push_back(std::move(r.diagnostic));
    }
    return report;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
    return std::string(buf, res.ptr);
}

std::string to_csv(const RunReport &report) {
    std::string out;
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        out += (i ? "," : "") + report.columns[i];
    }
    out += '\n';
    for (const auto &row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const RunReport &report) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSchemaVersion;
    doc["version"] = kToolVersion;
    doc["command"] = report.command;
    doc["config"] = report.config;
    doc["columns"] = report.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto &row : report.rows) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) {
            if (std::isfinite(v)) {
                r.push_back(v);
            } else {
                r.push_back(nullptr);
            }
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    doc["diagnostics"] = report.rowDiagnostics;
    return doc.dump(2) + "\n";
}

namespace {

// Round-number tick positions covering [lo, hi], roughly `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target) {
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

std::string fmt_coord(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string fmt_label(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string render_ratio_svg(const std::vector<double> &nS, const std::vector<double> &ratio,
                             std::optional<double> crossover) {
    if (nS.size() != ratio.size() || nS.size() < 2) {
        throw std::invalid_argument("plot needs at least two matching points");
    }
    const double left = 80, right = 770, top = 40, bottom = 540;
    double xlo = nS.front(), xhi = nS.back();
    double ylo = 1.0, yhi = 1.0;
    for (double r : ratio) {
        if (std::isfinite(r)) {
            ylo = std::min(ylo, r);
            yhi = std::max(yhi, r);
        }
    }
    double pad = 0.05 * (yhi - ylo + 1e-12);
    ylo -= pad;
    yhi += pad;
    auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * (right - left); };
    auto py = [&](double y) { return bottom - (y - ylo) / (yhi - ylo) * (bottom - top); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    s << "<g stroke=\"black\" stroke-width=\"1\">\n";
    s << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom << "\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom << "\"/>\n";
    for (double t : nice_ticks(xlo, xhi, 8)) {
        s << "<line x1=\"" << fmt_coord(px(t)) << "\" y1=\"" << bottom << "\" x2=\"" << fmt_coord(px(t))
          << "\" y2=\"" << bottom + 6 << "\"/>\n";
    }
    for (double t : nice_ticks(ylo, yhi, 6)) {
        s << "<line x1=\"" << left - 6 << "\" y1=\"" << fmt_coord(py(t)) << "\" x2=\"" << left << "\" y2=\""
          << fmt_coord(py(t)) << "\"/>\n";
    }
    s << "</g>\n";
    s << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
    for (double t : nice_ticks(xlo, xhi, 8)) {
        s << "<text x=\"" << fmt_coord(px(t)) << "\" y=\"" << bottom + 20 << "\" text-anchor=\"middle\">"
          << fmt_label(t) << "</text>\n";
    }
    for (double t : nice_ticks(ylo, yhi, 6)) {
        s << "<text x=\"" << left - 10 << "\" y=\"" << fmt_coord(py(t) + 4) << "\" text-anchor=\"end\">"
          << fmt_label(t) << "</text>\n";
    }
    s << "<text x=\"425\" y=\"580\" text-anchor=\"middle\">N_S</text>\n";
    s << "<text x=\"20\" y=\"290\" text-anchor=\"middle\" transform=\"rotate(-90 20 290)\">gamma3 / gamma2</text>\n";
    s << "</g>\n";

    s << "<line x1=\"" << left << "\" y1=\"" << fmt_coord(py(1.0)) << "\" x2=\"" << right << "\" y2=\""
      << fmt_coord(py(1.0)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    if (crossover && *crossover >= xlo && *crossover <= xhi) {
        s << "<line x1=\"" << fmt_coord(px(*crossover)) << "\" y1=\"" << top << "\" x2=\""
          << fmt_coord(px(*crossover)) << "\" y2=\"" << bottom << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    }

    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < nS.size(); ++i) {
        if (!std::isfinite(ratio[i])) continue;
        s << (first ? "" : " ") << fmt_coord(px(nS[i])) << "," << fmt_coord(py(ratio[i]));
        first = false;
    }
    s << "\"/>\n</svg>\n";
    return s.str();
}

}  // namespace qi
