#ifndef KINLNA_DATASETS_HPP
#define KINLNA_DATASETS_HPP

#include "kinlna/observation.hpp"

namespace kinlna {

/// The 29 inter-removal times (days) of the Abakaliki smallpox outbreak
/// in a community of 120 individuals.
const std::vector<int>& smallpox_interremoval_times();

/// Daily observation series derived from the inter-removal times.
/// Time origin is the first removal (day 0). The observation on day d is
/// y_d = population - cumulative removals by end of day d, i.e. the number
/// still susceptible or infected (X1 + X2). One individual remains infected
/// just after the first removal, so y_0 = 119 with (X1, X2) = (1, 118).
/// tail_days constant rows are appended after the final removal.
ObservationSeries smallpox_series(int tail_days = 10, int population = 120);

} // namespace kinlna

#endif
