#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fockcat/linalg.hpp"
#include "fockcat/tomography.hpp"

namespace fockcat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// "0.09+0.01j", "-0.01j", "0", "1e-3-2e-3i". The split point is the last sign
// that is not the leading one and does not follow an exponent marker.
Complex parse_entry(const std::string& raw, int line) {
  std::string s;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  auto fail = [&]() -> Complex {
    throw ParseError("line " + std::to_string(line) + ": cannot parse matrix entry '" + raw + "'");
  };
  if (s.empty()) return fail();
  auto to_double = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != t.size()) fail();
    return v;
  };
  const char last = s.back();
  if (last != 'j' && last != 'i') return {to_double(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, to_double(body)};
  return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

}  // namespace

CMatrix parse_complex_matrix(const std::string& text) {
  std::vector<std::vector<Complex>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    if (t.find('&') != std::string::npos) {
      std::string field;
      std::istringstream fs(t);
      while (std::getline(fs, field, '&')) fields.push_back(field);
    } else {
      std::istringstream fs(t);
      std::string field;
      while (fs >> field) fields.push_back(field);
    }
    std::vector<Complex> row;
    for (const auto& f : fields) row.push_back(parse_entry(f, line_no));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ParseError("matrix text contains no rows");
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw DimensionError("matrix is not square: row " + std::to_string(i + 1) + " has " +
                           std::to_string(rows[static_cast<std::size_t>(i)].size()) + " entries, expected " +
                           std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

IngestReport ingest_density_matrix(const std::string& text, std::optional<int> truncation) {
  const CMatrix raw = parse_complex_matrix(text);
  const auto n = static_cast<int>(raw.rows());
  const int target = truncation.value_or(n - 1);
  if (target < n - 1) {
    throw TruncationError("ingest: matrix of dimension " + std::to_string(n) + " exceeds truncation " +
                          std::to_string(target));
  }

  const CMatrix herm = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const RVector& ev = es.eigenvalues();
  RVector floored = ev.cwiseMax(0.0);

  CMatrix fixed = es.eigenvectors() * floored.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  CMatrix padded = CMatrix::Zero(target + 1, target + 1);
  padded.topLeftCorner(n, n) = fixed;

  IngestReport report{DensityMatrix(CMatrix::Identity(target + 1, target + 1) / double(target + 1), 1, target)};
  report.state = DensityMatrix(std::move(padded), 1, target).normalized();
  report.source_dim = n;
  report.raw_trace = raw.trace().real();
  report.hermiticity_deviation = linalg::hermiticity_deviation(raw);
  report.min_raw_eigenvalue = ev.minCoeff();
  report.max_eigenvalue_adjustment = (floored - ev).maxCoeff();
  report.eigenvalues_floored = static_cast<int>((ev.array() < 0.0).count());
  return report;
}

IngestReport ingest_density_matrix_file(const std::string& path, std::optional<int> truncation) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open density-matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_density_matrix(buf.str(), truncation);
}

}  // namespace fockcat
