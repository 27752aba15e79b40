#pragma once

/**
 * Forecast data ingestion.
 *
 * Input is delimiter-separated text (comma, semicolon, tab, or spaces;
 * sniffed from the header). The header row declares the horizon: after the
 * step column come H forecast-P values, H forecast-Q values, and H outcome
 * values. Rows must carry strictly increasing step indices. Lines starting
 * with '#' and blank lines are ignored.
 *
 *     step,p1,...,pH,q1,...,qH,y1,...,yH
 *     1,410.0,395.5,...
 *
 * Successive outcome rows describe overlapping stretches of one underlying
 * series shifted by one step; ingestion measures how well that holds and
 * reports the worst mismatch, but leaves the data untouched.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include "eselect/score.hpp"

namespace eselect {

struct Dataset {
  std::vector<ForecastTriple> triples;
  int horizon = 0;
  /// Worst |y_t[k+1] - y_{t+1}[k]| over consecutive rows; 0 for a perfectly
  /// shifted export, larger when rows do not overlap as declared.
  double max_shift_mismatch = 0.0;
};

/// Parses a dataset file. Throws DataError with the offending row number on
/// ragged rows, non-numeric cells, or non-monotone step indices.
Dataset ingest(const std::string& path);

/// Stream variant used by tests and tooling.
Dataset ingest(std::istream& in, const std::string& name = "<stream>");

}  // namespace eselect
