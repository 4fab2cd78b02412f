#include "resq/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace resq {

namespace {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw Error("state file: matrix must be a nonempty array");
  const Index n = static_cast<Index>(rows.size());
  ComplexMatrix m(n, static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (static_cast<Index>(row.size()) != m.cols())
      throw Error("state file: ragged matrix");
    for (Index j = 0; j < m.cols(); ++j) {
      const auto& cell = row[j];
      if (!cell.is_array() || cell.size() != 2)
        throw Error("state file: entries must be [re, im] pairs");
      m(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

}  // namespace

std::string state_to_json(const ComplexMatrix& m,
                          const std::vector<Index>& dims) {
  json j;
  j["dims"] = dims;
  j["matrix"] = matrix_to_json(m);
  return j.dump(2) + "\n";
}

StateFile state_from_json(const std::string& text) {
  json j = json::parse(text);
  StateFile out;
  if (!j.contains("dims") || !j.contains("matrix"))
    throw Error("state file: needs dims and matrix");
  for (const auto& d : j["dims"]) out.dims.push_back(d.get<Index>());
  out.matrix = matrix_from_json(j["matrix"]);
  Index prod = 1;
  for (Index d : out.dims) prod *= d;
  if (prod != out.matrix.rows() || out.matrix.rows() != out.matrix.cols())
    throw Error("state file: dims do not match the matrix");
  return out;
}

void save_state(const std::string& path, const ComplexMatrix& m,
                const std::vector<Index>& dims) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << state_to_json(m, dims);
}

StateFile load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return state_from_json(ss.str());
}

std::string ensemble_to_json(const std::vector<ComplexMatrix>& unitaries,
                             const RealVector& weights) {
  json j;
  j["weights"] = std::vector<double>(weights.data(),
                                     weights.data() + weights.size());
  json us = json::array();
  for (const auto& u : unitaries) us.push_back(matrix_to_json(u));
  j["unitaries"] = std::move(us);
  return j.dump(2) + "\n";
}

void ensemble_from_json(const std::string& text,
                        std::vector<ComplexMatrix>& unitaries,
                        RealVector& weights) {
  json j = json::parse(text);
  unitaries.clear();
  for (const auto& u : j["unitaries"])
    unitaries.push_back(matrix_from_json(u));
  const auto& w = j["weights"];
  weights.resize(static_cast<Index>(w.size()));
  for (Index i = 0; i < weights.size(); ++i) weights[i] = w[i].get<double>();
}

}  // namespace resq
