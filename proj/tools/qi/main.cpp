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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "report.hpp"

#include "qillum/bounds.hpp"
#include "qillum/fock.hpp"
#include "qillum/illumination.hpp"
#include "qillum/symplectic.hpp"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kInvalid = 2, kIo = 3, kCap = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string &s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineNo) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::optional<std::string> find_config_path(int argc, char **argv) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    if (const char *env = std::getenv("QI_CONFIG")) return std::string(env);
    return std::nullopt;
}

std::string env_name(const std::string &flag) {
    std::string out = "QI_";
    for (char ch : flag) {
        out += ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    return out;
}

template <typename T>
bool parse_value(const std::string &text, T &out) {
    return CLI::detail::lexical_cast(text, out);
}

template <typename T>
bool parse_value(const std::string &text, std::vector<T> &out) {
    std::vector<T> parsed;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        T v{};
        if (!CLI::detail::lexical_cast(trim(item), v)) return false;
        parsed.push_back(v);
    }
    out = std::move(parsed);
    return true;
}

// Registers options so that config-file values act as defaults; environment
// and then flags override them during parsing.
class Binder {
   public:
    explicit Binder(std::map<std::string, std::string> config) : config_(std::move(config)) {}

    template <typename T>
    CLI::Option *add(CLI::App *app, const std::string &name, T &var, const std::string &desc) {
        if (auto it = config_.find(name); it != config_.end()) {
            if (!parse_value(it->second, var)) {
                throw std::invalid_argument("config: bad value '" + it->second + "' for " + name);
            }
            used_.insert(name);
        }
        auto *opt = app->add_option("--" + name, var, desc)->envname(env_name(name));
        return opt->capture_default_str();
    }

    void check_unused() const {
        for (const auto &[key, value] : config_) {
            if (!used_.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }

   private:
    std::map<std::string, std::string> config_;
    std::set<std::string> used_;
};

struct Settings {
    double nS = 0.01;
    double nB = 100.0;
    double kappa = 0.01;
    std::int64_t copies = 1;
    std::optional<double> c;
    std::string model = "three-mode";
    std::string format;
    std::string out;
    std::string plot;
    std::string config;
    unsigned threads = 0;

    std::string param = "nS";
    double start = 0.01;
    double stop = 1.0;
    int count = 100;
    std::string spacing = "log";
    std::vector<std::string> outputs;

    std::string state = "rho";

    int cutoff = 30;
    std::vector<double> sGrid = {0.25, 0.5, 0.75};
};

qillum::Model parse_model(const std::string &m) {
    if (m == "two-mode") return qillum::Model::TwoMode;
    if (m == "three-mode") return qillum::Model::ThreeMode;
    if (m == "coherent") return qillum::Model::Coherent;
    throw std::invalid_argument("unknown model '" + m + "' (expected two-mode, three-mode or coherent)");
}

qillum::IlluminationScenario scenario(const Settings &st, qillum::Model model) {
    qillum::IlluminationScenario scn{st.nS, st.nB, st.kappa, st.copies, 0.0};
    if (!(std::isfinite(st.nS) && st.nS >= 0.0)) throw std::invalid_argument("--ns must be finite and >= 0");
    switch (model) {
        case qillum::Model::TwoMode:
            scn.c = st.c.value_or(qillum::cq2(st.nS));
            qillum::validate_two_mode(scn);
            break;
        case qillum::Model::ThreeMode:
            scn.c = st.c.value_or(qillum::solve_cq3(st.nS));
            qillum::validate_three_mode(scn);
            break;
        case qillum::Model::Coherent:
            qillum::validate_two_mode(scn);
            break;
    }
    return scn;
}

nlohmann::ordered_json common_config(const Settings &st) {
    nlohmann::ordered_json j;
    j["ns"] = st.nS;
    j["nb"] = st.nB;
    j["kappa"] = st.kappa;
    j["copies"] = st.copies;
    if (st.c) {
        j["c"] = *st.c;
    } else {
        j["c"] = nullptr;
    }
    j["model"] = st.model;
    return j;
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

// Writes the report to --out (or stdout when no human summary exists).
void emit(const Settings &st, const qi::RunReport &report, const std::string &summary) {
    std::string fmt = st.format.empty() ? "csv" : st.format;
    std::string body = fmt == "json" ? qi::to_json(report) : qi::to_csv(report);
    if (!st.out.empty()) {
        write_file(st.out, body);
        std::cout << summary;
    } else if (summary.empty() || !st.format.empty()) {
        std::cout << body;
    } else {
        std::cout << summary;
    }
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_bounds(const Settings &st) {
    auto model = parse_model(st.model);
    auto scn = scenario(st, model);
    auto res = qillum::evaluate_scenario(scn, model, true);
    auto coh = qillum::evaluate_scenario(scn, qillum::Model::Coherent, false);

    double m = static_cast<double>(scn.copies);
    double expQb = res.bhattacharyya.exponent() / m;
    double expQc = res.chernoff->exponent() / m;
    double expCoh = coh.bhattacharyya.exponent() / m;
    double advantage = expCoh > 0.0 ? expQb / expCoh : std::nan("");

    qi::RunReport report;
    report.command = "bounds";
    report.config = common_config(st);
    report.config["c_resolved"] = scn.c;
    report.columns = {"n_s",         "n_b",         "kappa",           "copies",        "c",
                      "p_qb",        "p_qc",        "s_opt",           "exponent_qb",   "exponent_qc",
                      "asymptotic_rate", "exponent_qb_coherent", "advantage_over_coherent"};
    report.rows.push_back({scn.nS, scn.nB, scn.kappa, m, scn.c, res.bhattacharyya.value, res.chernoff->value,
                           res.chernoff->sUsed, expQb, expQc, res.asymptoticRate, expCoh, advantage});
    report.rowDiagnostics.push_back(res.analyticFallback ? "numeric Williamson fallback: " + res.fallbackReason
                                                         : "");

    std::ostringstream s;
    s << "model                " << st.model << "\n";
    s << "c                    " << qi::format_double(scn.c) << "\n";
    s << "P_QB                 " << qi::format_double(res.bhattacharyya.value) << "\n";
    s << "P_QC                 " << qi::format_double(res.chernoff->value) << "\n";
    s << "s_opt                " << qi::format_double(res.chernoff->sUsed) << "\n";
    s << "exponent QB / M      " << qi::format_double(expQb) << "\n";
    s << "exponent QC / M      " << qi::format_double(expQc) << "\n";
    s << "asymptotic rate      " << qi::format_double(res.asymptoticRate) << "\n";
    s << "coherent QB / M      " << qi::format_double(expCoh) << "\n";
    s << "ratio to coherent    " << qi::format_double(advantage) << "\n";
    if (res.analyticFallback) s << "note: numeric Williamson fallback (" << res.fallbackReason << ")\n";
    emit(st, report, s.str());
    return kOk;
}

int cmd_sweep(const Settings &st) {
    qi::SweepSpec spec;
    spec.param = qi::parse_sweep_param(st.param);
    spec.start = st.start;
    spec.stop = st.stop;
    spec.count = st.count;
    if (st.spacing != "log" && st.spacing != "linear") {
        throw std::invalid_argument("--spacing must be log or linear");
    }
    spec.logSpacing = st.spacing == "log";
    spec.fixed = {st.nS, st.nB, st.kappa, st.copies, st.c.value_or(0.0)};
    spec.explicitC = st.c.has_value();
    spec.outputs = st.outputs;
    qi::validate(spec);
    if (!st.plot.empty() && spec.param != qi::SweepParam::NS) {
        throw std::invalid_argument("--plot needs an nS sweep");
    }

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned threads = st.threads ? std::min(st.threads, hw) : hw;
    auto report = qi::run_sweep(spec, threads);

    report.config = common_config(st);
    report.config["param"] = qi::sweep_param_name(spec.param);
    report.config["start"] = spec.start;
    report.config["stop"] = spec.stop;
    report.config["count"] = spec.count;
    report.config["spacing"] = st.spacing;
    report.config["outputs"] = spec.outputs;

    if (!st.plot.empty()) {
        std::vector<double> xs, ys;
        for (const auto &row : report.rows) {
            xs.push_back(row[0]);
            ys.push_back(row[3]);
        }
        write_file(st.plot, qi::render_ratio_svg(xs, ys, qillum::find_crossover()));
    }
    emit(st, report, "");
    return kOk;
}

int cmd_crossover(const Settings &st) {
    double x = qillum::find_crossover();
    double residual = qillum::gamma3(x) - qillum::gamma2(x);
    qi::RunReport report;
    report.command = "crossover";
    report.columns = {"n_s_star", "residual"};
    report.rows.push_back({x, residual});
    report.rowDiagnostics.push_back("");
    std::string summary = "N_S* = " + fixed(x, 6) + "\nresidual gamma3 - gamma2 = " + qi::format_double(residual) + "\n";
    emit(st, report, summary);
    return kOk;
}

int cmd_state_info(const Settings &st) {
    auto scn = scenario(st, qillum::Model::ThreeMode);
    std::optional<qillum::CovarianceMatrix> cov;
    if (st.state == "initial3") {
        cov = qillum::three_mode_cov(scn.nS, scn.c);
    } else if (st.state == "rho") {
        cov = qillum::rho_cov(scn);
    } else if (st.state == "sigma") {
        cov = qillum::sigma_cov(scn);
    } else {
        throw std::invalid_argument("--state must be initial3, rho or sigma");
    }
    auto nu = qillum::symplectic_eigenvalues(*cov);
    bool pure = qillum::is_pure(*cov);
    double cq3 = qillum::solve_cq3(scn.nS);
    double cc3 = qillum::cc3(scn.nS);
    std::vector<double> en;
    for (std::size_t k = 0; k < 3; ++k) {
        en.push_back(qillum::log_negativity(*cov, qillum::Bipartition({k}, 3)));
    }

    qi::RunReport report;
    report.command = "state-info";
    report.config = common_config(st);
    report.config["state"] = st.state;
    report.config["c_resolved"] = scn.c;
    std::vector<double> row;
    for (int k = 0; k < 3; ++k) {
        report.columns.push_back("nu_" + std::to_string(k + 1));
        row.push_back(nu[k]);
    }
    report.columns.insert(report.columns.end(), {"pure", "cq3", "cc3", "en_mode0", "en_mode1", "en_mode2"});
    row.insert(row.end(), {pure ? 1.0 : 0.0, cq3, cc3, en[0], en[1], en[2]});
    const auto &m = cov->matrix();
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            report.columns.push_back("cov_" + std::to_string(i) + "_" + std::to_string(j));
            row.push_back(m(i, j));
        }
    }
    report.rows.push_back(row);
    report.rowDiagnostics.push_back("");

    std::ostringstream s;
    s << "state " << st.state << " (modes 0, 1, 2)\ncovariance\n";
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) s << (j ? " " : "  ") << std::setw(19) << qi::format_double(m(i, j));
        s << "\n";
    }
    s << "symplectic eigenvalues";
    for (double v : nu) s << " " << qi::format_double(v);
    s << "\npure " << (pure ? "true" : "false") << "\n";
    s << "C_q3 " << qi::format_double(cq3) << "\nC_c3 " << qi::format_double(cc3) << "\n";
    s << "log negativity 0|12 " << qi::format_double(en[0]) << "\n";
    s << "log negativity 1|02 " << qi::format_double(en[1]) << "\n";
    s << "log negativity 2|01 " << qi::format_double(en[2]) << "\n";
    emit(st, report, s.str());
    return kOk;
}

int cmd_oracle_check(const Settings &st) {
    auto scn = scenario(st, qillum::Model::TwoMode);
    if (st.sGrid.empty()) throw std::invalid_argument("--s-grid is empty");
    for (double s : st.sGrid) {
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("--s-grid values must lie in (0, 1)");
    }
    if (st.cutoff < 1) throw std::invalid_argument("--cutoff must be positive");
    if (st.c && std::abs(*st.c - qillum::cq2(st.nS)) > 1e-12 * std::max(1.0, *st.c)) {
        throw std::invalid_argument("oracle-check compares the two-mode squeezed vacuum; --c must be omitted");
    }

    qillum::GaussianState absent(qillum::rho2_cov(scn));
    qillum::GaussianState present(qillum::sigma2_cov(scn));
    auto oracle = qillum::fock::oracle_qs_two_mode(scn.nS, scn.nB, scn.kappa, st.sGrid, st.cutoff);

    qi::RunReport report;
    report.command = "oracle-check";
    report.config = common_config(st);
    report.config["cutoff"] = st.cutoff;
    report.config["s_grid"] = st.sGrid;
    report.columns = {"s", "gaussian", "oracle", "relative_gap", "budget", "flag"};
    std::ostringstream s;
    s << "           s          gaussian            oracle      relative gap            budget  flag\n";
    for (std::size_t i = 0; i < st.sGrid.size(); ++i) {
        double g = qillum::q_s(absent, present, st.sGrid[i]).value;
        double o = oracle[i].value;
        double gap = std::abs(g - o) / std::abs(g);
        double budget = oracle[i].truncationBudget;
        // Double rounding alone accounts for ~1e-12; below that no budget can be resolved.
        bool flag = gap > 10.0 * budget + 1e-12;
        report.rows.push_back({st.sGrid[i], g, o, gap, budget, flag ? 1.0 : 0.0});
        report.rowDiagnostics.push_back(flag ? "gap exceeds 10x truncation budget" : "");
        s << std::setw(18) << qi::format_double(st.sGrid[i]) << std::setw(18) << qi::format_double(g)
          << std::setw(18) << qi::format_double(o) << std::setw(18) << qi::format_double(gap) << std::setw(18)
          << qi::format_double(budget) << "  " << (flag ? "FLAG" : "ok") << "\n";
    }
    emit(st, report, s.str());
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    std::map<std::string, std::string> config;
    try {
        if (auto path = find_config_path(argc, argv)) config = read_config(*path);
    } catch (const IoError &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kInvalid;
    }

    Settings st;
    CLI::App app{"Gaussian quantum illumination bounds", "qi"};
    app.set_version_flag("--version", qi::kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Binder bind(config);
    try {
        bind.add(&app, "ns", st.nS, "mean signal photons");
        bind.add(&app, "nb", st.nB, "mean background photons");
        bind.add(&app, "kappa", st.kappa, "target reflectivity");
        bind.add(&app, "copies", st.copies, "number of copies M");
        bind.add(&app, "c", st.c, "correlation amplitude (default: maximal for the model)");
        bind.add(&app, "model", st.model, "two-mode | three-mode | coherent")
            ->check(CLI::IsMember({"two-mode", "three-mode", "coherent"}));
        bind.add(&app, "format", st.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        bind.add(&app, "out", st.out, "report output path");
        bind.add(&app, "plot", st.plot, "SVG plot path (sweep over nS)");
        bind.add(&app, "threads", st.threads, "worker cap (0: all cores)");
        app.add_option("--config", st.config, "key=value defaults file")->envname("QI_CONFIG");

        auto *bounds = app.add_subcommand("bounds", "Bhattacharyya and Chernoff bounds for one scenario");
        auto *sweep = app.add_subcommand("sweep", "exponent ratio over a parameter grid");
        bind.add(sweep, "param", st.param, "swept parameter: nS | nB | kappa | M");
        bind.add(sweep, "start", st.start, "grid start");
        bind.add(sweep, "stop", st.stop, "grid stop");
        bind.add(sweep, "count", st.count, "grid points");
        bind.add(sweep, "spacing", st.spacing, "log | linear");
        bind.add(sweep, "outputs", st.outputs, "extra columns: qb2, qb3, qbCoherent, chernoff3")->delimiter(',');
        auto *crossover = app.add_subcommand("crossover", "N_S where gamma3 equals gamma2");
        auto *info = app.add_subcommand("state-info", "covariance, spectrum and entanglement of a state");
        bind.add(info, "state", st.state, "initial3 | rho | sigma");
        auto *oracle = app.add_subcommand("oracle-check", "Gaussian overlap vs truncated Fock computation");
        bind.add(oracle, "cutoff", st.cutoff, "photon cutoff per mode");
        bind.add(oracle, "s-grid", st.sGrid, "comma separated s values")->delimiter(',');
        bind.check_unused();

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError &e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
            std::cerr << "qi: error: " << e.what() << "\n";
            return kInvalid;
        }

        if (bounds->parsed()) return cmd_bounds(st);
        if (sweep->parsed()) return cmd_sweep(st);
        if (crossover->parsed()) return cmd_crossover(st);
        if (info->parsed()) return cmd_state_info(st);
        if (oracle->parsed()) return cmd_oracle_check(st);
        return kInvalid;
    } catch (const IoError &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kIo;
    } catch (const qillum::fock::ResourceCapExceeded &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kCap;
    } catch (const qillum::fock::TruncationBudgetExceeded &e) {
        std::cerr << "qi: error: " << e.what() << " (raise --cutoff)\n";
        return kInvalid;
    } catch (const std::invalid_argument &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::domain_error &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception &e) {
        std::cerr << "qi: error: " << e.what() << "\n";
        return kOther;
    }
}
