#include "igflow/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace igflow::report {

namespace {

constexpr double kLogFloor = 1e-18;  // plot floor for nonpositive values

double log10_clamped(double v) { return std::log10(std::max(v, kLogFloor)); }

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#e377c2",
                          "#9467bd", "#8c564b", "#ff7f0e", "#17becf",
                          "#bcbd22", "#7f7f7f"};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV '" + path + "'");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) {
      double v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) throw Error("bad numeric cell '" + cell + "' in " + path);
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw Error("ragged CSV row in '" + path + "'");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_svg(const std::string& path, const std::string& title, PlotMode mode,
               const std::vector<PlotSeries>& series) {
  const double width = 860, height = 620;
  const double ml = 70, mr = 180, mt = 46, mb = 54;  // margins; legend on the right
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& [t, v] : s.points) {
      const double x = mode == PlotMode::LogLog ? log10_clamped(t) : t;
      const double y = log10_clamped(v);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
  if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << ml << "\" y=\"24\" font-family=\"monospace\" font-size=\"15\">"
      << title << "</text>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  auto tick_label = [&](double sx, double sy, const std::string& text, bool xaxis) {
    out << "<text x=\"" << sx << "\" y=\"" << sy
        << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\""
        << (xaxis ? "middle" : "end") << "\">" << text << "</text>\n";
  };

  // x ticks: decades in loglog mode, ~6 even ticks otherwise
  if (mode == PlotMode::LogLog) {
    for (int d = static_cast<int>(std::ceil(xmin)); d <= std::floor(xmax); ++d) {
      const double sx = px(d);
      out << "<line x1=\"" << sx << "\" y1=\"" << mt + ph << "\" x2=\"" << sx
          << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
      tick_label(sx, mt + ph + 20, "1e" + std::to_string(d), true);
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double x = xmin + (xmax - xmin) * i / 5.0;
      const double sx = px(x);
      out << "<line x1=\"" << sx << "\" y1=\"" << mt + ph << "\" x2=\"" << sx
          << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
      std::ostringstream lbl;
      lbl.precision(4);
      lbl << x;
      tick_label(sx, mt + ph + 20, lbl.str(), true);
    }
  }
  // y ticks: decades (the y axis is logarithmic in both modes)
  {
    const int lo = static_cast<int>(std::ceil(ymin));
    const int hi = static_cast<int>(std::floor(ymax));
    const int step = std::max(1, (hi - lo) / 8);
    for (int d = lo; d <= hi; d += step) {
      const double sy = py(d);
      out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy << "\" x2=\"" << ml
          << "\" y2=\"" << sy << "\" stroke=\"black\"/>\n";
      tick_label(ml - 8, sy + 4, "1e" + std::to_string(d), false);
    }
  }

  int color = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[color % 10]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [t, v] : s.points) {
      const double x = mode == PlotMode::LogLog ? log10_clamped(t) : t;
      out << px(x) << ',' << py(log10_clamped(v)) << ' ';
    }
    out << "\"/>\n";
    const double ly = mt + 16 + 18 * color;
    out << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
        << ml + pw + 36 << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[color % 10]
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << ml + pw + 42 << "\" y=\"" << ly + 4
        << "\" font-family=\"monospace\" font-size=\"11\">" << s.name << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
}

void write_gnuplot(const std::string& path, const std::string& title, PlotMode mode,
                   const std::vector<std::string>& csv_names, const std::string& column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "# gnuplot script; run from the directory holding the CSV files\n"
      << "set datafile separator ','\n"
      << "set key outside right\n"
      << "set title '" << title << "'\n"
      << (mode == PlotMode::LogLog ? "set logscale xy\n" : "set logscale y\n")
      << "set xlabel 't'\nset ylabel '" << column << "'\n"
      << "plot ";
  for (std::size_t i = 0; i < csv_names.size(); ++i) {
    if (i) out << ", \\\n     ";
    out << "'" << csv_names[i] << ".csv' using 't':'" << column << "' with lines title '"
        << csv_names[i] << "'";
  }
  out << '\n';
}

}  // namespace igflow::report
