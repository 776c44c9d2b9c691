#include "plot.hpp"

#include "oops/errors.hpp"
#include "oops/harness.hpp"
#include "oops/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace oops::plot {

namespace fs = std::filesystem;

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("csv has no column `" + name + "`");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  for (const auto& row : rows) {
    const std::string& cell = row[c];
    if (cell.empty()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (*end != '\0') throw DataError("csv cell `" + cell + "` in column " + name + " is not a number");
    out.push_back(v);
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DataError(path.string() + ": missing header");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw DataError(path.string() + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.rows.empty()) throw DataError(path.string() + ": no data rows");
  return t;
}

namespace {

struct Series {
  std::vector<double> x, y;
  std::string color;
  std::string label;
  bool points = false;
};

struct Band {
  std::vector<double> x, lo, hi;
  std::string color;
};

class Svg {
 public:
  Svg(std::string title, std::string xlabel, std::string ylabel, bool logx = false)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), logx_(logx) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void add(Band b) { bands_.push_back(std::move(b)); }
  void hline(double y, std::string color, std::string label) { hlines_.push_back({y, std::move(color), std::move(label)}); }

  std::string render() const {
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    const auto grow_x = [&](double v) {
      if (std::isfinite(v)) x0 = std::min(x0, tx(v)), x1 = std::max(x1, tx(v));
    };
    const auto grow_y = [&](double v) {
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    };
    for (const Series& s : series_) {
      for (double v : s.x) grow_x(v);
      for (double v : s.y) grow_y(v);
    }
    for (const Band& b : bands_) {
      for (double v : b.x) grow_x(v);
      for (double v : b.lo) grow_y(v);
      for (double v : b.hi) grow_y(v);
    }
    for (const auto& h : hlines_) grow_y(h.y);
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x0 == x1) x0 -= 0.5, x1 += 0.5;
    if (y0 == y1) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const auto px = [&](double v) { return kLeft + (tx(v) - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
    const auto py = [&](double v) { return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";

    // Axes and ticks.
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = x0 + (x1 - x0) * k / 4.0;
      const double xv = logx_ ? std::pow(10.0, fx) : fx;
      const double X = kLeft + (kWidth - kLeft - kRight) * k / 4.0;
      out << "<line x1=\"" << X << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << X << "\" y2=\""
          << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << X << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">"
          << format_number(round_tick(xv)) << "</text>\n";
      const double yv = y0 + (y1 - y0) * k / 4.0;
      const double Y = py(yv);
      out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y << "\" x2=\"" << kLeft << "\" y2=\"" << Y
          << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
          << format_number(round_tick(yv)) << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 8
        << "\" text-anchor=\"middle\">" << xlabel_ << "</text>\n";
    out << "<text transform=\"translate(16," << (kTop + kHeight - kBottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel_ << "</text>\n";

    for (const Band& b : bands_) {
      out << "<polygon fill=\"" << b.color << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < b.x.size(); ++i) out << px(b.x[i]) << ',' << py(b.hi[i]) << ' ';
      for (std::size_t i = b.x.size(); i-- > 0;) out << px(b.x[i]) << ',' << py(b.lo[i]) << ' ';
      out << "\"/>\n";
    }
    int legend = 0;
    for (const auto& h : hlines_) {
      out << "<line x1=\"" << kLeft << "\" y1=\"" << py(h.y) << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << py(h.y)
          << "\" stroke=\"" << h.color << "\" stroke-dasharray=\"6,4\"/>\n";
      out << legend_entry(legend++, h.color, h.label);
    }
    for (const Series& s : series_) {
      if (s.points) {
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (std::isfinite(s.y[i]))
            out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3.5\" fill=\"" << s.color
                << "\"/>\n";
      } else {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (std::isfinite(s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n";
      }
      if (!s.label.empty()) out << legend_entry(legend++, s.color, s.label);
    }
    out << "</svg>\n";
    return out.str();
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 35, kBottom = 50;

  struct HLine {
    double y;
    std::string color, label;
  };

  double tx(double v) const { return logx_ ? std::log10(v) : v; }

  static double round_tick(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double scale = std::pow(10.0, std::floor(std::log10(std::abs(v))) - 2);
    return std::round(v / scale) * scale;
  }

  static std::string legend_entry(int k, const std::string& color, const std::string& label) {
    std::ostringstream out;
    const int y = kTop + 8 + 16 * k;
    out << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 135 << "\" y=\"" << y + 1 << "\">" << label << "</text>\n";
    return out.str();
  }

  std::string title_, xlabel_, ylabel_;
  bool logx_;
  std::vector<Series> series_;
  std::vector<Band> bands_;
  std::vector<HLine> hlines_;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string learning_curve(const std::vector<CsvTable>& runs) {
  const std::vector<double> steps = runs.front().numbers("step");
  std::vector<std::vector<double>> returns;
  for (const CsvTable& t : runs) {
    if (t.numbers("step") != steps) throw DataError("metrics files have different evaluation steps");
    returns.push_back(t.numbers("true_return_mean"));
  }
  Svg svg(runs.size() > 1 ? "learning curve (" + std::to_string(runs.size()) + " runs)" : "learning curve", "step",
          "true_return_mean");
  std::vector<double> mu(steps.size()), lo(steps.size()), hi(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::vector<double> at;
    for (const auto& r : returns) at.push_back(r[i]);
    mu[i] = mean(at);
    const double sd = stddev(at);
    lo[i] = mu[i] - sd;
    hi[i] = mu[i] + sd;
  }
  if (runs.size() > 1) svg.add(Band{steps, lo, hi, kPalette[0]});
  svg.add(Series{steps, mu, kPalette[0], runs.size() > 1 ? "mean +- 1 std" : "true return", false});
  return svg.render();
}

std::string calibration_scatter(const std::vector<CsvTable>& tables) {
  Svg svg("calibration", "true_return_mean", "proxy_return_mean");
  for (std::size_t k = 0; k < tables.size(); ++k)
    svg.add(Series{tables[k].numbers("true_return_mean"), tables[k].numbers("proxy_return_mean"),
                   kPalette[k % 6], tables.size() > 1 ? "file " + std::to_string(k + 1) : "", true});
  return svg.render();
}

std::string sweep_lines(const std::vector<CsvTable>& tables) {
  Svg svg("solver sweep", "lambda", "mean_distance", true);
  int color = 0;
  for (const CsvTable& t : tables) {
    const std::size_t solver = t.column("solver");
    const std::vector<double> lambda = t.numbers("lambda"), dist = t.numbers("mean_distance");
    Series sk{{}, {}, kPalette[color++ % 6], "sinkhorn", false};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const std::string& name = t.rows[i][solver];
      if (name == "sinkhorn" && std::isfinite(lambda[i]) && lambda[i] > 0.0) {
        sk.x.push_back(lambda[i]);
        sk.y.push_back(dist[i]);
      } else if (name != "sinkhorn") {
        svg.hline(dist[i], kPalette[color++ % 6], name);
      }
    }
    svg.add(std::move(sk));
  }
  return svg.render();
}

bool has_header(const CsvTable& t, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (std::find(t.header.begin(), t.header.end(), n) == t.header.end()) return false;
  return true;
}

}  // namespace

std::vector<fs::path> plot_files(const std::vector<fs::path>& inputs, const fs::path& out_dir) {
  if (inputs.empty()) throw DataError("no input files to plot");
  std::map<std::string, std::vector<CsvTable>> groups;
  for (const fs::path& p : inputs) {
    CsvTable t = read_csv(p);
    if (has_header(t, {"step", "true_return_mean"}))
      groups["learning_curve"].push_back(std::move(t));
    else if (has_header(t, {"noise_std", "true_return_mean", "proxy_return_mean"}))
      groups["calibration"].push_back(std::move(t));
    else if (has_header(t, {"solver", "lambda", "mean_distance"}))
      groups["solver_sweep"].push_back(std::move(t));
    else
      throw DataError(p.string() + ": unrecognised csv header");
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& [name, tables] : groups) {
    const fs::path path = out_dir / (name + ".svg");
    if (name == "learning_curve") write_text(path, learning_curve(tables));
    if (name == "calibration") write_text(path, calibration_scatter(tables));
    if (name == "solver_sweep") write_text(path, sweep_lines(tables));
    written.push_back(path);
  }
  return written;
}

}  // namespace oops::plot
