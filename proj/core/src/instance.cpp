#include "hjfbio/instance.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hjfbio/errors.hpp"
#include "hjfbio/toy_problem.hpp"

namespace hjfbio {

using nlohmann::json;

HyperParams ProblemInstance::suggested_hyperparams() const {
  HyperParams hp;
  hp.r_v = r_v;
  hp.r_h = r_h;
  hp.mu = mu;
  hp.l_g = l_g;
  return hp;
}

ProblemInstance make_toy_instance() {
  ProblemInstance inst;
  inst.kind = "toy";
  inst.oracle = std::make_shared<ToyProblem>();
  inst.initial = ToyProblem::initial_state();
  inst.regularizer = ToyProblem::regularizer();
  inst.constants = ToyProblem::constants();
  inst.mu = inst.constants->mu;
  inst.l_g = inst.constants->l_g;
  inst.r_v = inst.constants->default_r_v();
  inst.r_h = inst.r_v * inst.constants->l_g;
  return inst;
}

ProblemInstance make_plgame_instance(PLGameProblem problem) {
  ProblemInstance inst;
  inst.kind = "plgame";
  auto data = std::make_shared<const PLGameProblem>(std::move(problem));
  auto oracle = std::make_shared<PLGameOracle>(*data);
  inst.initial.x = data->x0;
  inst.initial.y = data->y0;
  inst.initial.v = Vector::Zero(data->params.d);
  inst.regularizer = Regularizer::zero();
  inst.mu = std::min(oracle->min_nonzero_q_eigenvalue(), data->params.mu);
  inst.l_g = std::max(oracle->lower_smoothness(), *inst.mu);
  inst.r_v = 10.0;
  inst.r_h = inst.r_v * *inst.l_g;
  inst.plgame = std::move(data);
  inst.oracle = std::move(oracle);
  return inst;
}

ProblemInstance make_plgame_instance(const PLGameParams& params) {
  return make_plgame_instance(gen_plgame(params));
}

ProblemInstance make_matsense_instance(MatrixSensingProblem problem) {
  ProblemInstance inst;
  inst.kind = "matsense";
  auto data = std::make_shared<const MatrixSensingProblem>(std::move(problem));
  inst.oracle = std::make_shared<MatrixSensingOracle>(*data);
  inst.initial.x = data->upper_part(data->U0);
  inst.initial.y = data->lower_part(data->U0);
  inst.initial.v = Vector::Zero(data->d());
  inst.regularizer = Regularizer::zero();
  inst.r_v = 10.0;
  inst.r_h = 100.0;
  inst.callbacks.extra_columns = {"loss", "distance"};
  inst.callbacks.on_row = [data](const SolverState& state, TraceRow& row) {
    const SensingMetrics m = sensing_metrics(*data, data->assemble(state.x, state.y));
    row.extras.push_back(m.loss);
    row.extras.push_back(m.distance);
  };
  inst.matsense = std::move(data);
  return inst;
}

ProblemInstance make_matsense_instance(const MatrixSensingParams& params) {
  return make_matsense_instance(gen_matsense(params));
}

namespace {

json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    throw InvalidArgument("snapshot: matrix data length does not match its shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

SymMatrix sym_from_json(const json& j) { return SymMatrix::from_upper(matrix_from_json(j)); }

}  // namespace

std::string snapshot_json(const ProblemInstance& inst) {
  json doc;
  doc["format"] = "hjfbio-problem";
  doc["version"] = kSnapshotVersion;
  doc["kind"] = inst.kind;
  if (inst.kind == "toy") {
    doc["params"] = json::object();
  } else if (inst.kind == "plgame") {
    const PLGameProblem& p = *inst.plgame;
    doc["params"] = {{"d", p.params.d},
                     {"l", p.params.l},
                     {"n", p.params.samples()},
                     {"mu", p.params.mu},
                     {"L", p.params.L},
                     {"seed", p.params.seed},
                     {"project_coupling", p.params.project_coupling}};
    doc["P"] = matrix_to_json(p.P.dense());
    doc["Q"] = matrix_to_json(p.Q.dense());
    doc["R1"] = matrix_to_json(p.R1.dense());
    doc["R2"] = matrix_to_json(p.R2.dense());
    doc["x0"] = vector_to_json(p.x0);
    doc["y0"] = vector_to_json(p.y0);
  } else if (inst.kind == "matsense") {
    const MatrixSensingProblem& p = *inst.matsense;
    doc["params"] = {{"d", p.params.d},
                     {"r", p.params.r},
                     {"n", p.params.samples()},
                     {"seed", p.params.seed},
                     {"init_scale", p.params.init_scale}};
    json sensing = json::array();
    for (const Matrix& c : p.C) sensing.push_back(matrix_to_json(c));
    doc["C"] = std::move(sensing);
    doc["o"] = vector_to_json(p.o);
    doc["U_star"] = matrix_to_json(p.U_star);
    doc["train"] = p.train;
    doc["val"] = p.val;
    doc["U0"] = matrix_to_json(p.U0);
  } else {
    throw InvalidArgument("snapshot: unknown problem kind '" + inst.kind + "'");
  }
  return doc.dump();
}

ProblemInstance instance_from_snapshot_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("snapshot: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "hjfbio-problem") {
      throw InvalidArgument("snapshot: not an hjfbio problem file");
    }
    if (doc.at("version").get<int>() != kSnapshotVersion) {
      throw InvalidArgument("snapshot: unsupported version " + doc.at("version").dump());
    }
    const auto kind = doc.at("kind").get<std::string>();
    const json& params = doc.at("params");
    if (kind == "toy") return make_toy_instance();
    if (kind == "plgame") {
      PLGameProblem p;
      p.params.d = params.at("d").get<Index>();
      p.params.l = params.at("l").get<Index>();
      p.params.n = params.at("n").get<Index>();
      p.params.mu = params.at("mu").get<double>();
      p.params.L = params.at("L").get<double>();
      p.params.seed = params.at("seed").get<std::uint64_t>();
      p.params.project_coupling = params.at("project_coupling").get<bool>();
      p.P = sym_from_json(doc.at("P"));
      p.Q = sym_from_json(doc.at("Q"));
      p.R1 = sym_from_json(doc.at("R1"));
      p.R2 = sym_from_json(doc.at("R2"));
      p.x0 = vector_from_json(doc.at("x0"));
      p.y0 = vector_from_json(doc.at("y0"));
      const Index d = p.params.d;
      if (p.P.size() != d || p.Q.size() != d || p.R1.size() != d || p.R2.size() != d ||
          p.x0.size() != d || p.y0.size() != d) {
        throw InvalidArgument("snapshot: plgame matrices do not match d");
      }
      return make_plgame_instance(std::move(p));
    }
    if (kind == "matsense") {
      MatrixSensingProblem p;
      p.params.d = params.at("d").get<Index>();
      p.params.r = params.at("r").get<Index>();
      p.params.n = params.at("n").get<Index>();
      p.params.seed = params.at("seed").get<std::uint64_t>();
      p.params.init_scale = params.at("init_scale").get<double>();
      for (const json& c : doc.at("C")) p.C.push_back(matrix_from_json(c));
      p.o = vector_from_json(doc.at("o"));
      p.U_star = matrix_from_json(doc.at("U_star"));
      p.H_star = p.U_star * p.U_star.transpose();
      p.train = doc.at("train").get<std::vector<Index>>();
      p.val = doc.at("val").get<std::vector<Index>>();
      p.U0 = matrix_from_json(doc.at("U0"));
      const Index d = p.params.d;
      const Index n = static_cast<Index>(p.C.size());
      if (n != p.params.n || p.o.size() != n || p.U_star.rows() != d ||
          p.U_star.cols() != p.params.r || p.U0.rows() != d || p.U0.cols() != p.params.r ||
          static_cast<Index>(p.train.size() + p.val.size()) != n) {
        throw InvalidArgument("snapshot: matsense arrays do not match their parameters");
      }
      for (const Matrix& c : p.C) {
        if (c.rows() != d || c.cols() != d) {
          throw InvalidArgument("snapshot: sensing matrix has the wrong shape");
        }
      }
      for (Index i : p.train) {
        if (i < 0 || i >= n) throw InvalidArgument("snapshot: split index out of range");
      }
      for (Index i : p.val) {
        if (i < 0 || i >= n) throw InvalidArgument("snapshot: split index out of range");
      }
      return make_matsense_instance(std::move(p));
    }
    throw InvalidArgument("snapshot: unknown problem kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const ProblemInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("snapshot: cannot open '" + path.string() + "' for writing");
  out << snapshot_json(instance) << '\n';
  if (!out) throw Error("snapshot: write to '" + path.string() + "' failed");
}

ProblemInstance load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("snapshot: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_snapshot_json(buffer.str());
}

}  // namespace hjfbio
