#pragma once

#include <string>
#include <utility>
#include <vector>

#include "igflow/errors.hpp"

namespace igflow::report {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Writes rows with format_double; one header line, comma separated, '\n' endings.
void write_csv(const std::string& path, const Table& table);

Table read_csv(const std::string& path);

enum class PlotMode { LogLog, SemiLogY };

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (t, value)
};

// Self-contained SVG line plot; no external renderer involved. Non-positive
// values are clamped to the floor of the log axis.
void write_svg(const std::string& path, const std::string& title, PlotMode mode,
               const std::vector<PlotSeries>& series);

// Companion gnuplot script plotting the same columns from the emitted CSVs.
void write_gnuplot(const std::string& path, const std::string& title, PlotMode mode,
                   const std::vector<std::string>& csv_names, const std::string& column);

}  // namespace igflow::report
