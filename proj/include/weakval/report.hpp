// Copyright 2026 The weakval Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weakval {

enum class RowStatus { Pass, Fail, Info };

std::string to_string(RowStatus s);

enum class Tolerance {
    Relative,  // |computed - expected| <= tol * |expected|
    Absolute,  // |computed - expected| <= tol
    Factor,    // expected / tol <= computed <= expected * tol
    AtLeast,   // computed >= tol
};

std::string to_string(Tolerance t);

/// One compared quantity. Info rows carry values without a pass/fail judgement.
struct ReportRow {
    std::string section;
    std::string id;
    std::string quantity;
    double expected = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
    Tolerance mode = Tolerance::Relative;
    RowStatus status = RowStatus::Info;
    std::string note;
};

struct Inconsistency {
    std::string id;
    std::string printed;
    std::string resolution;
};

struct Report {
    std::vector<ReportRow> rows;
    std::vector<Inconsistency> inconsistencies;
    std::uint64_t seed = 0;

    std::size_t count(RowStatus s) const;
};

/// Default seed for the sampled rows of the report.
inline constexpr std::uint64_t kReportSeed = 20260101;

/// Runs every builtin scenario and compares against the reference values.
Report build_report(std::uint64_t seed = kReportSeed);

std::string report_to_json(const Report& r);
std::string report_to_markdown(const Report& r);

}  // namespace weakval
