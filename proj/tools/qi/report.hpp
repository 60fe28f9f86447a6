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

#ifndef QI_REPORT_HPP
#define QI_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qillum/bounds.hpp"

namespace qi {

inline constexpr const char *kToolVersion = "qi 1.0.0";
inline constexpr int kSchemaVersion = 1;

enum class SweepParam { NS, NB, Kappa, Copies };

SweepParam parse_sweep_param(const std::string &name);
std::string sweep_param_name(SweepParam p);
/// CSV column name of a swept parameter ("n_s", "n_b", "kappa", "copies").
std::string sweep_param_column(SweepParam p);

struct SweepSpec {
    SweepParam param = SweepParam::NS;
    double start = 0.01;
    double stop = 1.0;
    int count = 100;
    bool logSpacing = true;
    /// Values of the non-swept fields. `c` applies only when `explicitC`;
    /// otherwise each model uses its maximal correlation.
    qillum::IlluminationScenario fixed{0.01, 100.0, 0.01, 1, 0.0};
    bool explicitC = false;
    /// Extra columns, any of qb2, qb3, qbCoherent, chernoff3.
    std::vector<std::string> outputs;
};

/// Throws std::invalid_argument on count < 2, start >= stop, log spacing
/// with start <= 0 or an unknown output name.
void validate(const SweepSpec &spec);
std::vector<double> sweep_grid(const SweepSpec &spec);

struct RunReport {
    std::string command;
    nlohmann::ordered_json config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// One entry per row; empty string when the row has nothing to report.
    std::vector<std::string> rowDiagnostics;
};

/// Evaluates every grid point, distributing points over `threads` workers.
/// Rows come back in grid order regardless of scheduling.
RunReport run_sweep(const SweepSpec &spec, unsigned threads);

/// 12 significant digits, scientific, locale independent; "nan"/"inf" for
/// non-finite values.
std::string format_double(double v);

/// Header line plus one line per row, LF endings.
std::string to_csv(const RunReport &report);
/// Versioned JSON document (top-level "schema": 1) with the configuration
/// echo, columns, rows and per-row diagnostics. Non-finite numbers become
/// null.
std::string to_json(const RunReport &report);

/// Ratio gamma3/gamma2 against nS on a fixed 800x600 canvas with a dashed
/// guide at ratio 1 and, when given and inside the range, a dashed vertical
/// guide at the crossover.
std::string render_ratio_svg(const std::vector<double> &nS, const std::vector<double> &ratio,
                             std::optional<double> crossover);

}  // namespace qi

#endif
