#include "franson/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

namespace franson::report {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error(fmt::format("row has {} cells, table has {} columns", row.size(), columns.size()));
  rows.push_back(std::move(row));
}

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

namespace {

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "1" : "0"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

}  // namespace

std::string to_csv(const Table& table, const std::optional<std::string>& timestamp) {
  std::string out;
  if (timestamp) out += fmt::format("# generated {}\n", *timestamp);
  out += fmt::format("{}\n", fmt::join(table.columns, ","));
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table, const std::optional<std::string>& timestamp) {
  nlohmann::ordered_json doc;
  if (timestamp) doc["generated"] = *timestamp;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five ticks at 1, 2 or 5 times a power of ten.
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string to_svg(const PhasePlot& plot) {
  constexpr double W = 720, H = 440, left = 70, right = 20, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;

  double x0 = 0, x1 = 1, y0 = -plot.threshold, y1 = plot.threshold;
  bool first = true;
  for (const auto* series : {&plot.curve, &plot.markers})
    for (const auto& p : *series) {
      if (first) {
        x0 = x1 = p.x;
        first = false;
      }
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  if (x1 == x0) {
    x0 -= 1;
    x1 += 1;
  }
  const double pad = 0.08 * (y1 - y0 > 0 ? y1 - y0 : 1.0);
  y0 -= pad;
  y1 += pad;

  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::string s;
  s += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", W, H, W,
                   H);
  s += "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>)",
                   W / 2, escape(plot.title));
  s += '\n';

  // Corridor |phi| <= threshold.
  s += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="#cfe8cf" opacity="0.7"/>)",
                   left, sy(plot.threshold), pw, sy(-plot.threshold) - sy(plot.threshold));
  s += '\n';
  s += fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="#888" stroke-dasharray="4 3"/>)",
                   left, sy(0), left + pw, sy(0));
  s += '\n';

  // Axes, ticks and labels.
  s += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", left, top, pw, ph);
  s += '\n';
  const double dx = tick_step(x1 - x0);
  for (double t = std::ceil(x0 / dx) * dx; t <= x1 + 1e-9 * dx; t += dx) {
    s += fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="black"/>)", sx(t), top + ph,
                     top + ph + 5);
    s += fmt::format(R"(<text x="{:.2f}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{:g}</text>)",
                     sx(t), top + ph + 18, t);
    s += '\n';
  }
  const double dy = tick_step(y1 - y0);
  for (double t = std::ceil(y0 / dy) * dy; t <= y1 + 1e-9 * dy; t += dy) {
    const double v = std::abs(t) < 1e-12 * dy ? 0.0 : t;
    s += fmt::format(R"(<line x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}" stroke="black"/>)", left - 5, sy(v), left);
    s += fmt::format(R"(<text x="{}" y="{:.2f}" font-family="sans-serif" font-size="11" text-anchor="end">{:g}</text>)",
                     left - 8, sy(v) + 4, v);
    s += '\n';
  }
  s += fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>)",
                   left + pw / 2, H - 12, escape(plot.x_label));
  s += '\n';
  s += fmt::format(
      R"svg(<text x="16" y="{0}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>)svg",
      top + ph / 2, escape(plot.y_label));
  s += '\n';

  if (!plot.curve.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : plot.curve) s += fmt::format("{:.2f},{:.2f} ", sx(p.x), sy(p.y));
    s += "\"/>\n";
  }
  for (const auto& p : plot.markers)
    s += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)", sx(p.x), sy(p.y),
                     p.pass ? "#2a7f2a" : "#c0392b") +
         "\n";
  s += "</svg>\n";
  return s;
}

}  // namespace franson::report
