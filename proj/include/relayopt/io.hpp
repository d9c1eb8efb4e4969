// SPDX-License-Identifier: Apache-2.0
//
// relayopt - robust transceiver design for multi-hop AF MIMO relay chains
// Copyright (C) 2026 The relayopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Text output. Numbers go through std::to_chars, which ignores the locale.

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "linalg.hpp"
#include "montecarlo.hpp"

namespace relayopt {

inline constexpr int kCsvDigits = 12;

inline constexpr std::string_view kSweepCsvHeader =
    "axis,objective,design,weighted_mse,sum_rate,max_mse,ber,stderr_wmse,stderr_rate,stderr_maxmse,stderr_ber,trials";

/// %.12g rendering with a '.' decimal point.
inline std::string format_number(double x)
{
    char buf[64];
    x += 0.0; // -0 prints as 0
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, kCsvDigits);
    return std::string(buf, res.ptr);
}

/// The `axis` column holds the grid value of each point.
inline void write_sweep_csv(std::ostream& os, std::string_view objective, const std::vector<SweepPoint>& points)
{
    os << kSweepCsvHeader << '\n';
    for (const auto& p : points) {
        for (int d = 0; d < 2; ++d) {
            const AggregateMetrics& m = d == 0 ? p.robust : p.nonrobust;
            os << format_number(p.value) << ',' << objective << ',' << (d == 0 ? "robust" : "nonrobust") << ','
               << format_number(m.weighted_mse.mean) << ',' << format_number(m.sum_rate.mean) << ','
               << format_number(m.max_mse.mean) << ',' << format_number(m.ber.mean) << ','
               << format_number(m.weighted_mse.std_error) << ',' << format_number(m.sum_rate.std_error) << ','
               << format_number(m.max_mse.std_error) << ',' << format_number(m.ber.std_error) << ','
               << m.trials_used << '\n';
        }
    }
}

/// `# name rows cols`, then one line per row of space-separated `re,im` pairs.
inline void write_matrix_block(std::ostream& os, std::string_view name, const ComplexMatrix& a)
{
    os << "# " << name << ' ' << a.rows() << ' ' << a.cols() << '\n';
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (j > 0)
                os << ' ';
            os << format_number(a(i, j).real()) << ',' << format_number(a(i, j).imag());
        }
        os << '\n';
    }
}

} // namespace relayopt
