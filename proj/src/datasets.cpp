#include "kinlna/datasets.hpp"

#include "kinlna/errors.hpp"

namespace kinlna {

const std::vector<int>& smallpox_interremoval_times() {
  static const std::vector<int> gaps = {13, 7, 2, 3, 0, 0, 1, 4, 5, 3,
                                        2,  0, 2, 0, 5, 3, 1, 4, 0, 1,
                                        1,  1, 2, 0, 1, 5, 0, 5, 5};
  return gaps;
}

ObservationSeries smallpox_series(int tail_days, int population) {
  if (tail_days < 0)
    throw Error(ErrorKind::UsageError, "tail_days must be nonnegative");

  const auto& gaps = smallpox_interremoval_times();
  // 29 gaps between 30 consecutive removals; day 0 is the first removal.
  std::vector<int> removal_days;
  int day = 0;
  removal_days.push_back(0);
  for (int g : gaps) {
    day += g;
    removal_days.push_back(day);
  }
  int last_day = removal_days.back();

  ObservationSeries series;
  size_t next = 0;
  int removed = 0;
  for (int d = 0; d <= last_day + tail_days; ++d) {
    while (next < removal_days.size() && removal_days[next] <= d) {
      ++removed;
      ++next;
    }
    Vector y(1);
    y[0] = static_cast<double>(population - removed);
    series.times.push_back(static_cast<double>(d));
    series.observations.push_back(y);
  }
  return series;
}

} // namespace kinlna
