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

#include "tomoplan/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef TOMOPLAN_GIT_DESCRIBE
#define TOMOPLAN_GIT_DESCRIBE "unknown"
#endif

namespace tomoplan::io {

namespace {

Json vec_json(const Eigen::Ref<const RealVector>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json axes_json(const std::vector<Vec3>& axes) {
  Json a = Json::array();
  for (const auto& c : axes) a.push_back(vec_json(c));
  return a;
}

}  // namespace

Json to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    throw Error(ErrorCode::InvalidArgument, "matrix JSON needs dim, re, im");
  }
  const auto d = j.at("dim").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (d < 1 || re.size() != static_cast<std::size_t>(d * d) || im.size() != re.size()) {
    throw Error(ErrorCode::DimMismatch, "matrix JSON arrays do not match dim");
  }
  ComplexMatrix m(d, d);
  for (Eigen::Index k = 0; k < d * d; ++k) {
    m(k / d, k % d) = Complex(re[static_cast<std::size_t>(k)].get<double>(),
                              im[static_cast<std::size_t>(k)].get<double>());
  }
  return m;
}

Json to_json(const KnowledgeReport& r) {
  return Json{{"det_M", r.det_M}, {"volume", r.volume}, {"tr_M_inv", r.tr_M_inv},
              {"shannon", r.shannon}};
}

Json to_json(const qubit::QubitOptimum& opt) {
  return Json{{"mode", std::string(mode_name(opt.mode))},
              {"axes", axes_json(opt.config.axes)},
              {"weights", opt.config.weights},
              {"n", opt.config.total},
              {"value", opt.value},
              {"eigenvalues", vec_json(opt.eigenvalues)}};
}

Json to_json(const qubit::NumericOptimum& opt, Mode mode) {
  return Json{{"mode", std::string(mode_name(mode))},
              {"axes", axes_json(opt.config.axes)},
              {"weights", opt.config.weights},
              {"n", opt.config.total},
              {"value", opt.value},
              {"best_restart", opt.best_restart},
              {"restarts", opt.restart_values.size()}};
}

Json to_json(const highdim::StrategyMetrics& m) {
  return Json{{"strategy", m.strategy}, {"mode", std::string(mode_name(m.mode))},
              {"det_M", m.det_M},       {"log_det_M", m.log_det_M},
              {"tr_M_inv", m.tr_M_inv}, {"splits", m.splits}};
}

Json to_json(const highdim::PairSchedule& s) {
  Json rounds = Json::array();
  std::size_t pairs = 0;
  for (const auto& round : s.rounds) {
    Json r = Json::array();
    for (auto [a, b] : round) r.push_back(Json::array({a, b}));
    pairs += round.size();
    rounds.push_back(std::move(r));
  }
  return Json{{"d", s.dim},
              {"rounds", std::move(rounds)},
              {"round_count", s.rounds.size()},
              {"pair_count", pairs},
              {"covers_all_pairs", highdim::covers_all_pairs(s)}};
}

Json to_json(const sim::TrialResult& t, bool with_trajectory) {
  Json j{{"seed", t.seed},
         {"n_used", t.n_used},
         {"squared_error", t.squared_error},
         {"bloch_squared_error", t.bloch_squared_error ? Json(*t.bloch_squared_error) : Json()},
         {"estimate", to_json(t.estimate.matrix())}};
  if (with_trajectory) {
    Json traj = Json::array();
    for (const auto& s : t.trajectory) {
      Json snap{{"n_before", s.n_before}, {"counts", s.counts}, {"axes", axes_json(s.axes)}};
      if (s.estimate.dim() == 2) snap["estimate_bloch"] = vec_json(density_to_bloch(s.estimate));
      traj.push_back(std::move(snap));
    }
    j["trajectory"] = std::move(traj);
  }
  return j;
}

Json to_json(const sim::EnsembleStats& s) {
  return Json{{"trials", s.trials},
              {"n", s.n},
              {"mode", s.mode},
              {"mean_sq_error", s.mean_sq_error},
              {"stderr", s.std_error}};
}

Json to_json(const sim::EscalationResult& r) {
  return Json{{"d_eff", r.d_eff},         {"n0", r.n0},
              {"first_hit", r.first_hit}, {"required_run", r.required_run},
              {"kept", r.kept},           {"rejected", r.rejected}};
}

std::string record_to_jsonl(const MeasurementRecord& record) {
  Json observables = Json::array();
  for (std::size_t k = 0; k < record.observable_count(); ++k) {
    Json outcomes = Json::array();
    for (const auto& o : record.observable(k).outcomes()) {
      outcomes.push_back(Json{{"label", o.label}, {"projector", to_json(o.projector)}});
    }
    observables.push_back(Json{{"id", record.id(k)}, {"outcomes", std::move(outcomes)}});
  }
  std::string out =
      Json{{"seed", record.seed()}, {"dim", record.dim()}, {"observables", std::move(observables)}}
          .dump();
  out += '\n';
  for (const auto& e : record.entries()) {
    out += Json{{"observable", record.id(e.observable)}, {"label", record.label(e)}}.dump();
    out += '\n';
  }
  return out;
}

MeasurementRecord record_from_jsonl(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty record");
  try {
    const Json header = Json::parse(line);
    MeasurementRecord record(header.at("seed").get<std::uint64_t>());
    for (const auto& obs : header.at("observables")) {
      std::vector<Outcome> outcomes;
      for (const auto& o : obs.at("outcomes")) {
        outcomes.push_back({o.at("label").get<double>(), matrix_from_json(o.at("projector"))});
      }
      record.add_observable(obs.at("id").get<std::string>(), ObservableSpec(std::move(outcomes)));
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json e = Json::parse(line);
      record.append(e.at("observable").get<std::string>(), e.at("label").get<double>());
    }
    return record;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed record: ") + ex.what());
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (in_row_ > 0) out_ += ',';
  if (text.find_first_of(",\"\n") != std::string_view::npos) {
    out_ += '"';
    for (char c : text) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  } else {
    out_ += text;
  }
  ++in_row_;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_double(x))); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(std::to_string(x))); }

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw Error(ErrorCode::InvalidArgument, "CSV row has " + std::to_string(in_row_) +
                                                " cells, header has " + std::to_string(columns_));
  }
  out_ += '\n';
  in_row_ = 0;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, x, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string git_describe() { return TOMOPLAN_GIT_DESCRIBE; }

Json run_manifest(std::string_view command, const Json& config,
                  const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& outputs) {
  return Json{{"command", std::string(command)},
              {"git_describe", git_describe()},
              {"config", config},
              {"config_hash", hex64(fnv1a(config.dump()))},
              {"seeds", seeds},
              {"outputs", outputs}};
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to " + path + " failed");
}

}  // namespace tomoplan::io
