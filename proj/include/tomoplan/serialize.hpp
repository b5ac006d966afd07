// Copyright 2026 The tomoplan Authors
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
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tomoplan/highdim_strategies.hpp"
#include "tomoplan/knowledge.hpp"
#include "tomoplan/qubit_strategies.hpp"
#include "tomoplan/simulate.hpp"

namespace tomoplan::io {

using Json = nlohmann::ordered_json;

/// {dim, re, im}, row-major.
Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const KnowledgeReport& r);
Json to_json(const qubit::QubitOptimum& opt);
Json to_json(const qubit::NumericOptimum& opt, Mode mode);
Json to_json(const highdim::StrategyMetrics& m);
Json to_json(const highdim::PairSchedule& s);
Json to_json(const sim::TrialResult& t, bool with_trajectory = false);
Json to_json(const sim::EnsembleStats& s);
Json to_json(const sim::EscalationResult& r);

/// First line: {"seed", "dim", "observables": [{id, outcomes: [{label,
/// projector}]}]}; then one {"observable", "label"} object per entry.
std::string record_to_jsonl(const MeasurementRecord& record);
MeasurementRecord record_from_jsonl(std::string_view text);

/// Shortest round-trip decimal, independent of the C locale.
std::string format_double(double x);

/// Comma-separated, '.' decimal, header row first.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  void end_row();
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t x);

std::string git_describe();

/// Run manifest: command, git describe, seeds and an FNV-1a hash of the
/// canonical config dump. No timestamps, so identical runs give identical
/// manifests.
Json run_manifest(std::string_view command, const Json& config,
                  const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& outputs);

void write_file(const std::string& path, std::string_view content);

}  // namespace tomoplan::io
