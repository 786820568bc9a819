#ifndef KINLNA_OBSERVATION_HPP
#define KINLNA_OBSERVATION_HPP

#include <string>
#include <vector>

#include "kinlna/network.hpp"

namespace kinlna {

/// Linear-Gaussian observation model y = P x + N(0, V), with a Gaussian
/// prior N(mu0, sigma0) on the initial state.
struct ObservationModel {
  Matrix P;      // d x n_s
  Matrix V;      // d x d, symmetric PSD
  Vector mu0;    // n_s
  Matrix sigma0; // n_s x n_s, symmetric PSD

  int obs_dim() const { return static_cast<int>(P.rows()); }
  int state_dim() const { return static_cast<int>(P.cols()); }
  bool has_zero_row() const;
  void validate() const;
};

struct ObservationSeries {
  std::vector<double> times;       // strictly increasing, length n+1
  std::vector<Vector> observations; // d-vectors

  void validate(int obs_dim) const;
  int count() const { return static_cast<int>(times.size()); }
};

/// Parses the key-value observation-model spec format:
///   obs_dim <d> ; P <row> (d lines) ; Vdiag <d reals> ;
///   mu0 <n_s reals> ; Sigma0diag <n_s reals>.
ObservationModel parse_observation_model(const std::string& text, int n_species);

std::string serialize_observation_model(const ObservationModel& m);

/// CSV with header `time,<y1..yd>`, strictly increasing times.
ObservationSeries read_observation_csv(const std::string& csv_text);
std::string write_observation_csv(const ObservationSeries& series,
                                  const std::vector<std::string>& col_names);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

} // namespace kinlna

#endif
