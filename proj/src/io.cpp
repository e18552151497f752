#include "relent/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace relent {

namespace {

void require_field(const Json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw SchemaError(std::string(where) + ": missing field '" + key + "'");
}

std::vector<std::vector<double>> real_part_rows(const Matrix& m, bool imag) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row;
    row.reserve(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["re"] = real_part_rows(m, false);
  j["im"] = real_part_rows(m, true);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  require_field(j, "rows", "matrix");
  require_field(j, "cols", "matrix");
  require_field(j, "re", "matrix");
  require_field(j, "im", "matrix");
  const auto rows = j["rows"].get<Eigen::Index>();
  const auto cols = j["cols"].get<Eigen::Index>();
  if (rows <= 0 || cols <= 0) throw SchemaError("matrix: invalid dimensions");
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (!re.is_array() || !im.is_array() ||
      re.size() != static_cast<std::size_t>(rows) ||
      im.size() != static_cast<std::size_t>(rows))
    throw SchemaError("matrix: re/im row count mismatch");

  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& re_row = re[static_cast<std::size_t>(i)];
    const auto& im_row = im[static_cast<std::size_t>(i)];
    if (re_row.size() != static_cast<std::size_t>(cols) ||
        im_row.size() != static_cast<std::size_t>(cols))
      throw SchemaError("matrix: re/im column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const double real = re_row[static_cast<std::size_t>(k)].get<double>();
      const double imag = im_row[static_cast<std::size_t>(k)].get<double>();
      if (!std::isfinite(real) || !std::isfinite(imag))
        throw SchemaError("matrix: non-finite entry");
      m(i, k) = Complex(real, imag);
    }
  }
  return m;
}

Json state_to_json(const DensityOperator& rho, const StateMetadata& meta) {
  Json j = matrix_to_json(rho.mat());
  j["kind"] = "density";
  if (meta.seed) j["seed"] = *meta.seed;
  if (meta.rank) j["rank"] = *meta.rank;
  return j;
}

DensityOperator state_from_json(const Json& j) {
  if (j.contains("kind") && j["kind"].get<std::string>() != "density")
    throw SchemaError("state: kind must be 'density'");
  return DensityOperator(matrix_from_json(j));
}

Json channel_to_json(const QuantumChannel& c) {
  Json j;
  Json kraus = Json::array();
  for (const Matrix& k : c.kraus()) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  j["d_in"] = c.d_in();
  j["d_out"] = c.d_out();
  return j;
}

QuantumChannel channel_from_json(const Json& j) {
  require_field(j, "kraus", "channel");
  if (!j["kraus"].is_array() || j["kraus"].empty())
    throw SchemaError("channel: kraus must be a non-empty array");
  std::vector<Matrix> kraus;
  for (const auto& jk : j["kraus"]) kraus.push_back(matrix_from_json(jk));
  QuantumChannel c = QuantumChannel::from_kraus(std::move(kraus));
  if (j.contains("d_in") && j["d_in"].get<int>() != c.d_in())
    throw SchemaError("channel: d_in does not match the Kraus operators");
  if (j.contains("d_out") && j["d_out"].get<int>() != c.d_out())
    throw SchemaError("channel: d_out does not match the Kraus operators");
  return c;
}

Json form_to_json(const PositiveForm& form) {
  Json j = matrix_to_json(form.gram());
  j["basis"] = "matrix-units";
  j["space_dim"] = form.dim();
  return j;
}

PositiveForm form_from_json(const Json& j) {
  if (j.contains("basis") && j["basis"].get<std::string>() != "matrix-units")
    throw SchemaError("form: unsupported basis tag");
  PositiveForm form(matrix_from_json(j));
  if (j.contains("space_dim") && j["space_dim"].get<int>() != form.dim())
    throw SchemaError("form: space_dim does not match the Gram matrix");
  return form;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
}

DensityOperator load_state(const std::string& path) {
  return state_from_json(load_json_file(path));
}

QuantumChannel load_channel(const std::string& path) {
  return channel_from_json(load_json_file(path));
}

std::string jensen_table_csv(const std::vector<JensenTrialRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "x,lhs,rhs,violation\n";
  for (const JensenTrialRow& r : rows)
    os << r.x << ',' << r.lhs << ',' << r.rhs << ',' << (r.violation ? 1 : 0)
       << '\n';
  return os.str();
}

std::string interpolation_trace_csv(const EntropyFormResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "t,quotient,running_inf\n";
  for (std::size_t i = 0; i < result.t_used.size(); ++i)
    os << result.t_used[i] << ',' << result.quotients[i] << ','
       << result.running_inf[i] << '\n';
  return os.str();
}

std::string inputs_hash(const std::vector<const Matrix*>& matrices) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix_double = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (const Matrix* m : matrices) {
    mix_double(static_cast<double>(m->rows()));
    for (Eigen::Index j = 0; j < m->cols(); ++j)
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        mix_double((*m)(i, j).real());
        mix_double((*m)(i, j).imag());
      }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Json chain_link_to_json(const ChainLink& link) {
  Json j;
  j["name"] = link.name;
  j["lhs"] = link.lhs;
  j["rhs"] = link.rhs;
  j["gap"] = link.gap;
  j["equality"] = link.equality;
  j["ok"] = link.ok;
  return j;
}

}  // namespace relent
