#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gocf/core/csv.hpp"
#include "gocf/core/digest.hpp"
#include "gocf/stats/panel.hpp"

namespace gocf {

struct ChartRow {
  std::string label;
  double x = 0.0;
  double effect = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ChartSeries {
  std::string title;
  std::string y_label = "fixed effect";
  std::vector<ChartRow> rows;  // ascending x
  std::optional<double> cutoff_x;
  std::optional<double> baseline_x;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Roughly 5 ticks at 1/2/5 multiples.
inline std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) t.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return t;
}

}  // namespace svg_detail

// Static line chart: CI band, effect line, one circle per period, baseline
// marker, and a vertical rule at the cutoff. The data table is embedded as
// CSV inside <metadata>. Output depends only on the input.
inline std::string render_trend_svg(const ChartSeries& s) {
  using svg_detail::num;
  constexpr double W = 720, H = 400, L = 70, R = 20, T = 40, B = 60;
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"400\" viewBox=\"0 0 720 400\">\n";
  o += "<metadata><![CDATA[\nperiod,effect,ci_low,ci_high\n";
  for (const auto& r : s.rows)
    o += r.label + "," + csv::fmt(r.effect, 8) + "," + csv::fmt(r.ci_low, 8) + "," + csv::fmt(r.ci_high, 8) + "\n";
  o += "]]></metadata>\n";
  o += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"400\" fill=\"white\"/>\n";
  o += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       svg_detail::escape(s.title) + "</text>\n";

  if (s.rows.empty()) {
    o += "<rect x=\"70\" y=\"40\" width=\"630\" height=\"300\" fill=\"none\" stroke=\"#888\"/>\n";
    o += "<text class=\"no-data\" x=\"385\" y=\"195\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"18\" fill=\"#888\">no data</text>\n";
    o += "</svg>\n";
    return o;
  }

  double x0 = s.rows.front().x, x1 = s.rows.back().x;
  if (s.cutoff_x) x0 = std::min(x0, *s.cutoff_x), x1 = std::max(x1, *s.cutoff_x);
  if (x1 == x0) x0 -= 1, x1 += 1;
  double y0 = 0.0, y1 = 0.0;
  for (const auto& r : s.rows) {
    y0 = std::min({y0, r.ci_low, r.effect});
    y1 = std::max({y1, r.ci_high, r.effect});
  }
  if (y1 == y0) y0 -= 1, y1 += 1;
  const double pad = (y1 - y0) * 0.05;
  y0 -= pad, y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return T + (y1 - y) / (y1 - y0) * (H - T - B); };

  o += "<g class=\"axes\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<line x1=\"" + num(L) + "\" y1=\"" + num(H - B) + "\" x2=\"" + num(W - R) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + num(L) + "\" y1=\"" + num(T) + "\" x2=\"" + num(L) + "\" y2=\"" + num(H - B) +
       "\" stroke=\"black\"/>\n";
  for (double t : svg_detail::nice_ticks(y0, y1)) {
    char lab[32];
    std::snprintf(lab, sizeof lab, "%g", t);
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(t) + 4) + "\" text-anchor=\"end\">" + lab + "</text>\n";
  }
  const std::size_t every = std::max<std::size_t>(1, s.rows.size() / 10);
  for (std::size_t i = 0; i < s.rows.size(); i += every)
    o += "<text x=\"" + num(px(s.rows[i].x)) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" +
         svg_detail::escape(s.rows[i].label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + num((T + H - B) / 2) + "\" transform=\"rotate(-90 16 " + num((T + H - B) / 2) +
       ")\" text-anchor=\"middle\">" + svg_detail::escape(s.y_label) + "</text>\n";
  o += "</g>\n";

  o += "<line class=\"zero\" x1=\"" + num(L) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(W - R) + "\" y2=\"" +
       num(py(0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";

  std::string band = "M";
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    band += (i ? " L" : "") + num(px(s.rows[i].x)) + "," + num(py(s.rows[i].ci_high));
  for (std::size_t i = s.rows.size(); i-- > 0;) band += " L" + num(px(s.rows[i].x)) + "," + num(py(s.rows[i].ci_low));
  band += " Z";
  o += "<path class=\"ci-band\" d=\"" + band + "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";

  std::string line;
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    line += (i ? " " : "") + num(px(s.rows[i].x)) + "," + num(py(s.rows[i].effect));
  o += "<polyline class=\"effect\" points=\"" + line + "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
  for (const auto& r : s.rows)
    o += "<circle class=\"point\" cx=\"" + num(px(r.x)) + "\" cy=\"" + num(py(r.effect)) +
         "\" r=\"3\" fill=\"#08519c\"><title>" + svg_detail::escape(r.label) + ": " + csv::fmt(r.effect, 4) +
         "</title></circle>\n";

  if (s.baseline_x)
    o += "<rect class=\"baseline\" x=\"" + num(px(*s.baseline_x) - 5) + "\" y=\"" + num(py(0) - 5) +
         "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\"#d95f0e\" stroke-width=\"1.5\"/>\n";
  if (s.cutoff_x)
    o += "<line class=\"cutoff\" x1=\"" + num(px(*s.cutoff_x)) + "\" y1=\"" + num(T) + "\" x2=\"" +
         num(px(*s.cutoff_x)) + "\" y2=\"" + num(H - B) + "\" stroke=\"#c00\" stroke-dasharray=\"6,4\"/>\n";
  o += "</svg>\n";
  return o;
}

// Builds a chart from a trend CSV (period, effect, ci_low, ci_high). Month
// periods are placed at fractional years so the cutoff rule lines up.
inline ChartSeries chart_from_trend_csv(const csv::Table& t, std::string title, std::optional<Date> cutoff) {
  const auto c_p = t.col("period"), c_e = t.col("effect"), c_lo = t.col("ci_low"), c_hi = t.col("ci_high");
  ChartSeries s;
  s.title = std::move(title);
  for (const auto& r : t.rows) {
    ChartRow row;
    row.label = r[c_p];
    const bool monthly = row.label.size() > 4;
    const int code = stats::parse_period_label(row.label, monthly ? stats::PeriodKind::Month : stats::PeriodKind::Year);
    row.x = monthly ? code / 12.0 : code;
    row.effect = csv::to_double(r[c_e]);
    row.ci_low = csv::to_double(r[c_lo]);
    row.ci_high = csv::to_double(r[c_hi]);
    if (!s.baseline_x && row.effect == 0.0 && row.ci_low == 0.0 && row.ci_high == 0.0) s.baseline_x = row.x;
    s.rows.push_back(std::move(row));
  }
  std::stable_sort(s.rows.begin(), s.rows.end(), [](const ChartRow& a, const ChartRow& b) { return a.x < b.x; });
  if (cutoff && !s.rows.empty()) {
    const bool monthly = s.rows.front().label.size() > 4;
    s.cutoff_x = monthly ? stats::period_of(*cutoff, stats::PeriodKind::Month) / 12.0
                         : static_cast<double>(stats::period_of(*cutoff, stats::PeriodKind::Year));
  }
  return s;
}

inline std::string series_summary(const std::string& name, const ChartSeries& s) {
  std::string out = name + ": ";
  if (s.rows.empty()) return out + "no data\n";
  const auto hi = std::max_element(s.rows.begin(), s.rows.end(),
                                   [](const ChartRow& a, const ChartRow& b) { return a.effect < b.effect; });
  const auto lo = std::min_element(s.rows.begin(), s.rows.end(),
                                   [](const ChartRow& a, const ChartRow& b) { return a.effect < b.effect; });
  double mean_after = 0.0, mean_before = 0.0;
  int n_after = 0, n_before = 0;
  for (const auto& r : s.rows) {
    if (s.cutoff_x && r.x >= *s.cutoff_x - 1e-9)
      mean_after += r.effect, ++n_after;
    else
      mean_before += r.effect, ++n_before;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu periods %s..%s; max %s at %s; min %s at %s", s.rows.size(),
                s.rows.front().label.c_str(), s.rows.back().label.c_str(), csv::fmt(hi->effect, 4).c_str(),
                hi->label.c_str(), csv::fmt(lo->effect, 4).c_str(), lo->label.c_str());
  out += buf;
  if (n_before && n_after) {
    std::snprintf(buf, sizeof buf, "; mean effect before cutoff %s, from cutoff %s",
                  csv::fmt(mean_before / n_before, 4).c_str(), csv::fmt(mean_after / n_after, 4).c_str());
    out += buf;
  }
  return out + "\n";
}

// Renders every trend_*.csv under `results` to <stem>.svg under `out` and
// writes summary.txt (series summaries, then any table1_*.csv verbatim).
// Returns the written files in name order.
inline std::vector<std::filesystem::path> render_report(const std::filesystem::path& results,
                                                        const std::filesystem::path& out, std::optional<Date> cutoff) {
  namespace fs = std::filesystem;
  std::vector<fs::path> trends, tables;
  for (const auto& e : fs::directory_iterator(results)) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() != ".csv") continue;
    if (name.rfind("trend_", 0) == 0) trends.push_back(e.path());
    else if (name.rfind("table1", 0) == 0) tables.push_back(e.path());
  }
  if (trends.empty() && tables.empty()) throw std::runtime_error("report: no trend or table1 CSVs in " + results.string());
  std::sort(trends.begin(), trends.end());
  std::sort(tables.begin(), tables.end());
  fs::create_directories(out);
  std::vector<fs::path> written;
  std::string summary;
  if (cutoff) summary += "After-AI cutoff: " + cutoff->to_string() + "\n\n";
  for (const auto& p : trends) {
    const std::string stem = p.stem().string();
    ChartSeries s = chart_from_trend_csv(csv::load(p), stem, cutoff);
    const fs::path svg = out / (stem + ".svg");
    write_file(svg, render_trend_svg(s));
    written.push_back(svg);
    summary += series_summary(stem, s);
  }
  for (const auto& p : tables) {
    summary += "\n" + p.filename().string() + "\n";
    std::string text = read_file(p);
    text.erase(std::remove(text.begin(), text.end(), '\r'), text.end());
    summary += text;
  }
  write_file(out / "summary.txt", summary);
  written.push_back(out / "summary.txt");
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace gocf
