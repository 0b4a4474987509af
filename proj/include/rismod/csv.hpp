#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rismod/modulation.hpp"
#include "rismod/montecarlo.hpp"

namespace rismod {

// Two flat schemas. Files start with '#' comment lines, then the column row,
// then data rows; '\n' line endings, no quoting (no field contains a comma).
//
//   constellation  label,l,l1,l2,v,re,im
//                  l is set for APSK, l1/l2 for QAPSK, v for both; the
//                  others are empty. PSK rows carry only label, re, im.
//   sweep          snr_db,metric,value,stderr,trials,channels
//                  one row per (metric, grid point), grouped by metric in
//                  grid order. stderr is empty when the metric has none.
//
// Numbers use the shortest text that parses back to the same double.

inline constexpr std::string_view kConstellationColumns = "label,l,l1,l2,v,re,im";
inline constexpr std::string_view kSweepColumns = "snr_db,metric,value,stderr,trials,channels";

std::string format_double(double x);

/// Header lines without the leading "# ".
void write_header(std::ostream& os, const std::vector<std::string>& lines);
void write_constellation_csv(std::ostream& os, const ConstellationSet& cs,
                             const std::vector<std::string>& header = {});
void write_sweep_csv(std::ostream& os, const SweepResult& r, const std::vector<Metric>& metrics,
                     const std::vector<std::string>& header = {});

struct ConstellationRow {
    int label = 0;
    std::optional<int> l, l1, l2, v;
    double re = 0.0;
    double im = 0.0;
};

struct SweepRow {
    double snr_db = 0.0;
    std::string metric;
    double value = 0.0;
    std::optional<double> stderr_;
    std::uint64_t trials = 0;
    std::uint32_t channels = 0;
};

template <class Row>
struct CsvFile {
    std::vector<std::string> header;  // comment lines, "# " stripped
    std::vector<Row> rows;
};

/// Parsers check the column row and every field; a violation throws
/// ConfigError naming the line and column. An empty body is an error.
CsvFile<ConstellationRow> read_constellation_csv(std::istream& is);
CsvFile<SweepRow> read_sweep_csv(std::istream& is);

} // namespace rismod
