#include "kinlna/observation.hpp"

#include <cmath>
#include <sstream>

#include "kinlna/errors.hpp"
#include "kinlna/linalg.hpp"

namespace kinlna {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

bool ObservationModel::has_zero_row() const {
  for (int i = 0; i < P.rows(); ++i)
    if (P.row(i).isZero()) return true;
  return false;
}

void ObservationModel::validate() const {
  if (P.rows() < 1)
    throw Error(ErrorKind::UsageError, "observation dimension must be >= 1");
  if (V.rows() != P.rows() || V.cols() != P.rows())
    throw Error(ErrorKind::UsageError, "V dimension mismatch");
  if (mu0.size() != P.cols() || sigma0.rows() != P.cols() ||
      sigma0.cols() != P.cols())
    throw Error(ErrorKind::UsageError, "prior dimension mismatch");
  auto check_psd = [](const Matrix& m, const char* name) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() >
        1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::UsageError, std::string(name) + " not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, std::abs(m.trace())))
      throw Error(ErrorKind::UsageError, std::string(name) + " not PSD");
  };
  check_psd(V, "V");
  check_psd(sigma0, "Sigma0");
}

void ObservationSeries::validate(int obs_dim) const {
  if (times.size() != observations.size())
    throw Error(ErrorKind::UsageError, "times/observations length mismatch");
  if (times.size() < 2)
    throw Error(ErrorKind::UsageError, "series needs at least two observations");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw Error(ErrorKind::UsageError, "non-finite observation time");
    if (i > 0 && times[i] <= times[i - 1])
      throw Error(ErrorKind::UsageError, "observation times must be strictly increasing");
    if (observations[i].size() != obs_dim || !observations[i].allFinite())
      throw Error(ErrorKind::UsageError,
                  "bad observation row " + std::to_string(i));
  }
}

namespace {

std::vector<double> parse_reals(std::istringstream& in, const std::string& key) {
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof())
    throw Error(ErrorKind::SyntaxError, "malformed numbers after '" + key + "'");
  return out;
}

} // namespace

ObservationModel parse_observation_model(const std::string& text, int n_species) {
  int d = -1;
  std::vector<Vector> p_rows;
  std::vector<double> vdiag, mu0, sigma0diag;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "obs_dim") {
      if (!(ls >> d) || d < 1)
        throw Error(ErrorKind::SyntaxError, "obs_dim needs a positive integer");
    } else if (key == "P") {
      auto row = parse_reals(ls, key);
      if (static_cast<int>(row.size()) != n_species)
        throw Error(ErrorKind::SyntaxError,
                    "P row must have " + std::to_string(n_species) + " entries");
      p_rows.push_back(Eigen::Map<Vector>(row.data(), n_species));
    } else if (key == "Vdiag") {
      vdiag = parse_reals(ls, key);
    } else if (key == "mu0") {
      mu0 = parse_reals(ls, key);
    } else if (key == "Sigma0diag") {
      sigma0diag = parse_reals(ls, key);
    } else {
      throw Error(ErrorKind::SyntaxError,
                  "unknown observation-model key '" + key + "'");
    }
  }
  if (d < 1)
    throw Error(ErrorKind::SyntaxError, "missing obs_dim");
  if (static_cast<int>(p_rows.size()) != d)
    throw Error(ErrorKind::SyntaxError,
                "expected " + std::to_string(d) + " P rows");
  if (static_cast<int>(vdiag.size()) != d)
    throw Error(ErrorKind::SyntaxError, "Vdiag needs d entries");
  if (static_cast<int>(mu0.size()) != n_species ||
      static_cast<int>(sigma0diag.size()) != n_species)
    throw Error(ErrorKind::SyntaxError, "mu0/Sigma0diag need n_s entries");

  ObservationModel m;
  m.P.resize(d, n_species);
  for (int i = 0; i < d; ++i) m.P.row(i) = p_rows[static_cast<size_t>(i)];
  m.V = Eigen::Map<Vector>(vdiag.data(), d).asDiagonal();
  m.mu0 = Eigen::Map<Vector>(mu0.data(), n_species);
  m.sigma0 = Eigen::Map<Vector>(sigma0diag.data(), n_species).asDiagonal();
  m.validate();
  return m;
}

std::string serialize_observation_model(const ObservationModel& m) {
  std::ostringstream out;
  out << "obs_dim " << m.obs_dim() << '\n';
  for (int i = 0; i < m.P.rows(); ++i) {
    out << "P";
    for (int j = 0; j < m.P.cols(); ++j) out << ' ' << format_double(m.P(i, j));
    out << '\n';
  }
  out << "Vdiag";
  for (int i = 0; i < m.V.rows(); ++i) out << ' ' << format_double(m.V(i, i));
  out << "\nmu0";
  for (int i = 0; i < m.mu0.size(); ++i) out << ' ' << format_double(m.mu0[i]);
  out << "\nSigma0diag";
  for (int i = 0; i < m.sigma0.rows(); ++i)
    out << ' ' << format_double(m.sigma0(i, i));
  out << '\n';
  return out.str();
}

ObservationSeries read_observation_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::SyntaxError, "empty observation CSV");
  if (line.rfind("time", 0) != 0)
    throw Error(ErrorKind::SyntaxError, "observation CSV must start with a 'time,...' header");
  int cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  int d = cols - 1;
  if (d < 1)
    throw Error(ErrorKind::SyntaxError, "observation CSV needs data columns");

  ObservationSeries series;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t pos = 0;
        vals.push_back(std::stod(cell, &pos));
      } catch (const std::exception&) {
        throw Error(ErrorKind::SyntaxError,
                    "bad number '" + cell + "' on CSV line " +
                        std::to_string(lineno));
      }
    }
    if (static_cast<int>(vals.size()) != cols)
      throw Error(ErrorKind::SyntaxError,
                  "wrong column count on CSV line " + std::to_string(lineno));
    series.times.push_back(vals[0]);
    series.observations.push_back(
        Eigen::Map<Vector>(vals.data() + 1, d));
  }
  try {
    series.validate(d);
  } catch (const Error& e) {
    throw Error(ErrorKind::SyntaxError, e.what());
  }
  return series;
}

std::string write_observation_csv(const ObservationSeries& series,
                                  const std::vector<std::string>& col_names) {
  std::ostringstream out;
  out << "time";
  for (const auto& n : col_names) out << ',' << n;
  out << '\n';
  for (size_t i = 0; i < series.times.size(); ++i) {
    out << format_double(series.times[i]);
    const Vector& y = series.observations[i];
    for (int j = 0; j < y.size(); ++j) out << ',' << format_double(y[j]);
    out << '\n';
  }
  return out.str();
}

} // namespace kinlna
