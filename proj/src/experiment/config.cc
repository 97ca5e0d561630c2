// Copyright 2026 The dpdmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "dpdmpc/consensus.h"
#include "dpdmpc/errors.h"
#include "dpdmpc/experiment.h"
#include "dpdmpc/network.h"
#include "json.hpp"

namespace dpdmpc {
namespace {

using nlohmann::json;

class Reader {
 public:
  void Error(const std::string& path, const std::string& what) {
    errors_.push_back(path + ": " + what);
  }
  bool ok() const { return errors_.empty(); }
  const std::vector<std::string>& errors() const { return errors_; }

  const json* Field(const json& obj, const std::string& key,
                    const std::string& path, bool required = true) {
    if (!obj.is_object()) {
      Error(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) Error(Join(path, key), "missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> Number(const json& obj, const std::string& key,
                               const std::string& path, bool required = true) {
    const json* v = Field(obj, key, path, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      Error(Join(path, key), "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<long long> Integer(const json& obj, const std::string& key,
                                   const std::string& path,
                                   bool required = true) {
    const json* v = Field(obj, key, path, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) {
      Error(Join(path, key), "expected an integer");
      return std::nullopt;
    }
    return v->get<long long>();
  }

  std::optional<Vector> Vec(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
      Error(path, "expected a nonempty array of numbers");
      return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        Error(path + "[" + std::to_string(i) + "]", "expected a number");
        return std::nullopt;
      }
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  std::optional<Matrix> Mat(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
      Error(path, "expected a nonempty array of rows");
      return std::nullopt;
    }
    const size_t cols = v[0].size();
    Matrix out(static_cast<Eigen::Index>(v.size()),
               static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < v.size(); ++r) {
      const std::string row_path = path + "[" + std::to_string(r) + "]";
      if (!v[r].is_array() || v[r].size() != cols) {
        Error(row_path, "rows must all have " + std::to_string(cols) +
                            " entries");
        return std::nullopt;
      }
      for (size_t c = 0; c < cols; ++c) {
        if (!v[r][c].is_number()) {
          Error(row_path + "[" + std::to_string(c) + "]", "expected a number");
          return std::nullopt;
        }
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            v[r][c].get<double>();
      }
    }
    return out;
  }

  std::optional<Matrix> MatField(const json& obj, const std::string& key,
                                 const std::string& path) {
    const json* v = Field(obj, key, path);
    if (v == nullptr) return std::nullopt;
    return Mat(*v, Join(path, key));
  }

  // {"lower": [...], "upper": [...]} or {"G": [[...]], "h": [...]}.
  std::optional<Polytope> Set(const json& obj, const std::string& key,
                              const std::string& path) {
    const json* v = Field(obj, key, path);
    if (v == nullptr) return std::nullopt;
    const std::string p = Join(path, key);
    if (!v->is_object()) {
      Error(p, "expected an object with lower/upper or G/h");
      return std::nullopt;
    }
    try {
      if (v->contains("lower") || v->contains("upper")) {
        auto lo = Vec(v->value("lower", json()), Join(p, "lower"));
        auto hi = Vec(v->value("upper", json()), Join(p, "upper"));
        if (!lo || !hi) return std::nullopt;
        return Polytope::FromBox(*lo, *hi);
      }
      auto g = Mat(v->value("G", json()), Join(p, "G"));
      auto h = Vec(v->value("h", json()), Join(p, "h"));
      if (!g || !h) return std::nullopt;
      return Polytope::FromInequalities(*g, *h);
    } catch (const ValidationError& e) {
      Error(p, e.what());
      return std::nullopt;
    }
  }

  static std::string Join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  [[noreturn]] void Fail(const std::string& source) const {
    std::ostringstream out;
    out << source << ": invalid configuration";
    for (const std::string& e : errors_) out << "\n  " << e;
    throw ValidationError(out.str());
  }

 private:
  std::vector<std::string> errors_;
};

struct RawSubsystem {
  Matrix a, b, q, r, psi_x, psi_u;
  Polytope state_set, input_set, terminal_set;
  Vector x0;
};

}  // namespace

Mode ParseMode(const std::string& name) {
  if (name == "plain") return Mode::kPlain;
  if (name == "private") return Mode::kPrivate;
  if (name == "compare") return Mode::kCompare;
  if (name == "budget") return Mode::kBudget;
  throw ValidationError("mode must be plain, private, compare or budget");
}

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kPlain: return "plain";
    case Mode::kPrivate: return "private";
    case Mode::kCompare: return "compare";
    case Mode::kBudget: return "budget";
  }
  return "unknown";
}

ExperimentConfig ParseConfigText(const std::string& text,
                                 const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": malformed JSON: " + e.what());
  }
  Reader rd;
  ExperimentConfig cfg;
  cfg.name = root.is_object() ? root.value("name", std::string()) : "";

  const auto horizon = rd.Integer(root, "horizon", "");
  const auto epsilon = rd.Number(root, "epsilon", "");
  if (horizon && *horizon < 1) rd.Error("horizon", "must be >= 1");

  std::vector<RawSubsystem> raw;
  if (const json* subs = rd.Field(root, "subsystems", "")) {
    if (!subs->is_array() || subs->empty()) {
      rd.Error("subsystems", "expected a nonempty array");
    } else {
      for (size_t i = 0; i < subs->size(); ++i) {
        const std::string p = "subsystems[" + std::to_string(i) + "]";
        const json& s = (*subs)[i];
        auto a = rd.MatField(s, "A", p);
        auto b = rd.MatField(s, "B", p);
        auto q = rd.MatField(s, "Q", p);
        auto r = rd.MatField(s, "R", p);
        auto px = rd.MatField(s, "psi_x", p);
        auto pu = rd.MatField(s, "psi_u", p);
        auto xs = rd.Set(s, "state_set", p);
        auto us = rd.Set(s, "input_set", p);
        auto xf = rd.Set(s, "terminal_set", p);
        std::optional<Vector> x0;
        if (const json* v = rd.Field(s, "x0", p)) {
          x0 = rd.Vec(*v, p + ".x0");
        }
        if (a && b && q && r && px && pu && xs && us && xf && x0) {
          raw.push_back({*a, *b, *q, *r, *px, *pu, *xs, *us, *xf, *x0});
        }
      }
    }
  }

  std::optional<Matrix> weights;
  if (const json* w = rd.Field(root, "weights", "")) {
    weights = rd.Mat(*w, "weights");
  }

  if (const json* s = rd.Field(root, "schedule", "")) {
    const json* chi = rd.Field(*s, "chi", "schedule");
    const json* gamma = rd.Field(*s, "gamma", "schedule");
    const json* nu = rd.Field(*s, "nu", "schedule");
    auto num = [&](const json* obj, const char* key, const char* path,
                   double* out) {
      if (obj == nullptr) return;
      if (auto v = rd.Number(*obj, key, path)) *out = *v;
    };
    num(chi, "c1", "schedule.chi", &cfg.schedule.c1);
    num(chi, "c2", "schedule.chi", &cfg.schedule.c2);
    num(chi, "c3", "schedule.chi", &cfg.schedule.c3);
    num(gamma, "c4", "schedule.gamma", &cfg.schedule.c4);
    num(gamma, "c5", "schedule.gamma", &cfg.schedule.c5);
    num(nu, "d1", "schedule.nu", &cfg.schedule.d1);
    num(nu, "d2", "schedule.nu", &cfg.schedule.d2);
    num(nu, "d3", "schedule.nu", &cfg.schedule.d3);
  }

  if (const json* s = rd.Field(root, "solver", "", false)) {
    if (auto v = rd.Integer(*s, "iterations", "solver", false)) {
      cfg.iterations = static_cast<int>(*v);
      if (*v < 0) rd.Error("solver.iterations", "must be >= 0");
    }
  }
  if (const json* c = rd.Field(root, "consensus", "", false)) {
    if (auto v = rd.Number(*c, "tol", "consensus", false)) {
      cfg.consensus_tol = *v;
      if (!(*v > 0.0)) rd.Error("consensus.tol", "must be > 0");
    }
    if (auto v = rd.Integer(*c, "max_rounds", "consensus", false)) {
      cfg.consensus_max_rounds = static_cast<int>(*v);
      if (*v < 1) rd.Error("consensus.max_rounds", "must be >= 1");
    }
    if (auto v = rd.Number(*c, "spread", "consensus", false)) {
      cfg.decompose_spread = *v;
      if (*v < 0.0) rd.Error("consensus.spread", "must be >= 0");
    }
    if (auto v = rd.Number(*c, "iota", "consensus", false)) {
      cfg.consensus_iota = *v;
    }
  }
  if (const json* e = rd.Field(root, "experiment", "", false)) {
    if (auto v = rd.Integer(*e, "steps", "experiment", false)) {
      cfg.steps = static_cast<int>(*v);
      if (*v < 0) rd.Error("experiment.steps", "must be >= 0");
    }
    if (auto v = rd.Integer(*e, "runs", "experiment", false)) {
      cfg.runs = static_cast<int>(*v);
      if (*v < 1) rd.Error("experiment.runs", "must be >= 1");
    }
    if (auto v = rd.Integer(*e, "seed", "experiment", false)) {
      if (*v < 0) rd.Error("experiment.seed", "must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(*v);
    }
    if (const json* m = rd.Field(*e, "mode", "experiment", false)) {
      try {
        cfg.mode = ParseMode(m->is_string() ? m->get<std::string>() : "");
      } catch (const ValidationError& err) {
        rd.Error("experiment.mode", err.what());
      }
    }
  }
  if (const json* p = rd.Field(root, "privacy", "", false)) {
    if (auto v = rd.Number(*p, "adjacency_constant", "privacy", false)) {
      cfg.adjacency_constant = *v;
      if (!(*v > 0.0)) rd.Error("privacy.adjacency_constant", "must be > 0");
    }
    if (auto v = rd.Integer(*p, "budget_horizon", "privacy", false)) {
      cfg.budget_horizon = static_cast<int>(*v);
      if (*v < 1) rd.Error("privacy.budget_horizon", "must be >= 1");
    }
  }
  if (!rd.ok()) rd.Fail(source);

  // Semantic validation.
  std::vector<Subsystem> subsystems;
  GlobalCoupling coupling;
  coupling.p = static_cast<int>(raw.front().psi_x.rows());
  for (size_t i = 0; i < raw.size(); ++i) {
    const std::string p = "subsystems[" + std::to_string(i) + "]";
    RawSubsystem& r = raw[i];
    try {
      subsystems.push_back(MakeSubsystem(r.a, r.b, r.q, r.r, r.state_set,
                                         r.input_set, r.terminal_set));
    } catch (const std::exception& e) {
      rd.Error(p, e.what());
      continue;
    }
    if (r.x0.size() != r.a.rows()) {
      rd.Error(p + ".x0", "dimension differs from A");
    } else if (!r.state_set.Contains(r.x0)) {
      rd.Error(p + ".x0", "initial state outside state_set");
    }
    coupling.psi_x.push_back(r.psi_x);
    coupling.psi_u.push_back(r.psi_u);
    cfg.x0.push_back(r.x0);
  }
  if (rd.ok()) {
    try {
      cfg.problem = BuildProblem(std::move(subsystems), std::move(coupling),
                                 static_cast<int>(*horizon), *epsilon);
    } catch (const ValidationError& e) {
      rd.Error("epsilon/subsystems", e.what());
    }
  }
  if (rd.ok()) {
    const TerminalSetReport t = ValidateTerminalSet(cfg.problem);
    auto report = [&](const char* what, const ConditionCheck& c) {
      if (!c.pass) {
        rd.Error("subsystems[*].terminal_set",
                 std::string(what) + " fails (worst margin " +
                     std::to_string(c.worst_margin) + ")");
      }
    };
    report("K x in input_set", t.input_admissible);
    report("invariance under A + BK", t.invariant);
    report("coupled terminal bound", t.coupled);
    report("terminal_set inside state_set", t.inside_state_set);
  }

  const WeightMatrixReport wr = ValidateWeightMatrix(*weights);
  if (!wr.ok()) {
    rd.Error("weights", wr.Describe());
  } else if (weights->rows() != static_cast<Eigen::Index>(raw.size())) {
    rd.Error("weights", "size differs from the number of subsystems");
  }

  const ScheduleReport sr = ValidateSchedule(cfg.schedule);
  if (!sr.converges) {
    for (const std::string& reason : sr.reasons) {
      rd.Error("schedule", reason);
    }
  }
  if (!rd.ok()) rd.Fail(source);

  cfg.weights = *weights;
  if (cfg.consensus_iota) {
    const WeightMatrix w(cfg.weights);
    ConsensusParams params = DefaultConsensusParams(w);
    params.iota = *cfg.consensus_iota;
    try {
      ValidateConsensusParams(params, w.adjacency());
    } catch (const ValidationError& e) {
      rd.Error("consensus.iota", e.what());
      rd.Fail(source);
    }
  }
  return cfg;
}

ExperimentConfig ParseConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str(), path.string());
}

}  // namespace dpdmpc
