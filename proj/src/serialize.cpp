#include "fbq/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbq {

namespace {

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd complex_matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("expected a matrix array");
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXcd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != nc) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < nc; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      m(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return m;
}

}  // namespace

json density_to_json(const DensityMatrix& rho) {
  json j;
  j["dim"] = rho.qudit_dim();
  j["elements"] = complex_matrix_to_json(rho.matrix());
  return j;
}

DensityMatrix density_from_json(const json& j) {
  Eigen::MatrixXcd m = complex_matrix_from_json(j.at("elements"));
  DensityMatrix rho(std::move(m));
  if (rho.qudit_dim() != j.at("dim").get<int>()) {
    throw std::invalid_argument("density_from_json: dim field mismatch");
  }
  return rho;
}

json state_to_json(const BipartiteStateVector& psi) {
  json j;
  j["dim"] = psi.dim();
  j["coefficients"] = complex_matrix_to_json(psi.coefficients());
  return j;
}

BipartiteStateVector state_from_json(const json& j) {
  BipartiteStateVector psi(complex_matrix_from_json(j.at("coefficients")));
  if (psi.dim() != j.at("dim").get<int>()) {
    throw std::invalid_argument("state_from_json: dim field mismatch");
  }
  return psi;
}

json counts_to_json(const std::vector<CountRecord>& records) {
  json j;
  j["schema"] = counts_schema_version;
  json arr = json::array();
  for (const auto& r : records) {
    json rec;
    rec["projector_id"] = r.projector_id;
    rec["raw_counts"] = r.raw_counts;
    rec["background_counts"] = r.background_counts;
    rec["integration_time_s"] = r.integration_time;
    arr.push_back(std::move(rec));
  }
  j["records"] = std::move(arr);
  return j;
}

std::vector<CountRecord> counts_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != counts_schema_version) {
    throw std::invalid_argument("counts_from_json: unknown schema version");
  }
  std::vector<CountRecord> out;
  for (const auto& rec : j.at("records")) {
    CountRecord r;
    r.projector_id = rec.at("projector_id").get<std::string>();
    r.raw_counts = rec.at("raw_counts").get<std::int64_t>();
    r.background_counts = rec.at("background_counts").get<std::int64_t>();
    r.integration_time = rec.at("integration_time_s").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string counts_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream os;
  os << "# schema: " << counts_schema_version << "\n";
  os << "projector_id,raw_counts,background_counts,integration_time_s\n";
  for (const auto& r : records) {
    os << r.projector_id << ',' << r.raw_counts << ',' << r.background_counts << ','
       << format_double(r.integration_time) << "\n";
  }
  return os.str();
}

std::vector<CountRecord> counts_from_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::vector<CountRecord> out;
  bool schema_seen = false;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# schema:", 0) == 0) {
      if (line.find(counts_schema_version) == std::string::npos) {
        throw std::invalid_argument("counts_from_csv: unknown schema version");
      }
      schema_seen = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string id, raw, bg, time;
    if (!std::getline(ls, id, ',') || !std::getline(ls, raw, ',') || !std::getline(ls, bg, ',') ||
        !std::getline(ls, time, ',')) {
      throw std::invalid_argument("counts_from_csv: malformed row: " + line);
    }
    CountRecord r;
    r.projector_id = id;
    r.raw_counts = std::stoll(raw);
    r.background_counts = std::stoll(bg);
    r.integration_time = std::stod(time);
    out.push_back(std::move(r));
  }
  if (!schema_seen) throw std::invalid_argument("counts_from_csv: missing schema header");
  return out;
}

std::string schmidt_to_csv(const SchmidtReport& report) {
  std::ostringstream os;
  os << "index,singular_value\n";
  for (Eigen::Index k = 0; k < report.singular_values.size(); ++k) {
    os << k << ',' << format_double(report.singular_values(k)) << "\n";
  }
  return os.str();
}

std::string jsa_to_csv(const JsaGrid& grid) {
  std::ostringstream os;
  os << "omega_i,omega_s,re,im\n";
  for (Eigen::Index i = 0; i < grid.axis_i.size(); ++i) {
    for (Eigen::Index s = 0; s < grid.axis_s.size(); ++s) {
      os << format_double(grid.axis_i(i)) << ',' << format_double(grid.axis_s(s)) << ','
         << format_double(grid.values(i, s).real()) << ','
         << format_double(grid.values(i, s).imag()) << "\n";
    }
  }
  return os.str();
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << format_double(m(r, c));
    }
    os << "\n";
  }
  return os.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("atomic_write_file: cannot open " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("atomic_write_file: write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fbq
