#ifndef PMLE_SVG_HPP
#define PMLE_SVG_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "pmle/config.hpp"
#include "pmle/rules.hpp"

namespace pmle {

struct SvgStyle {
  double spacing = 48.0;
  double radius = 9.0;
  double margin = 30.0;
};

/// Counts of what render_svg drew; handy for tests.
struct SvgStats {
  int nodes = 0;
  int arrows = 0;      // directed edges
  int dashed = 0;      // undirected edges
  int conflicts = 0;   // out/out edges
  int sinks = 0;
};

namespace detail {

inline std::pair<double, double> svg_point(const Cell& c, const SvgStyle& st) {
  return {st.spacing * (c.q + 0.5 * c.r), -st.spacing * (std::sqrt(3.0) / 2.0) * c.r};
}

inline std::string num(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace detail

inline SvgStats render_svg(const Configuration& c, std::ostream& out, const SvgStyle& st = {}) {
  const Support& s = c.support();
  SvgStats stats;
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Cell& cell : s.cells()) {
    const auto [x, y] = detail::svg_point(cell, st);
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  const double ox = st.margin - x0, oy = st.margin - y0;
  const double w = x1 - x0 + 2 * st.margin, h = y1 - y0 + 2 * st.margin;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::num(w) << "\" height=\""
      << detail::num(h) << "\" viewBox=\"0 0 " << detail::num(w) << ' ' << detail::num(h) << "\">\n"
      << "<defs>\n"
      << "<marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
         "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#333\"/></marker>\n"
      << "<marker id=\"tail\" markerWidth=\"8\" markerHeight=\"8\" refX=\"1\" refY=\"4\" orient=\"auto\">"
         "<path d=\"M8,0 L0,4 L8,8 z\" fill=\"#c00\"/></marker>\n"
      << "<marker id=\"headc\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
         "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#c00\"/></marker>\n"
      << "</defs>\n";

  for (const auto& [a, b] : s.edges()) {
    const EdgeOrientation o = orientation(c, a, b);
    int from = a, to = b;
    if (o == EdgeOrientation::BtoA) std::swap(from, to);
    auto [xa, ya] = detail::svg_point(s.cell(from), st);
    auto [xb, yb] = detail::svg_point(s.cell(to), st);
    const double dx = xb - xa, dy = yb - ya, len = std::hypot(dx, dy);
    const double trim = st.radius + 2;
    xa += dx / len * trim + ox;
    ya += dy / len * trim + oy;
    xb -= dx / len * trim - ox;
    yb -= dy / len * trim - oy;
    out << "<line class=\"edge-" << to_string(o) << "\" x1=\"" << detail::num(xa) << "\" y1=\"" << detail::num(ya)
        << "\" x2=\"" << detail::num(xb) << "\" y2=\"" << detail::num(yb) << "\"";
    switch (o) {
      case EdgeOrientation::AtoB:
      case EdgeOrientation::BtoA:
        out << " stroke=\"#333\" stroke-width=\"2\" marker-end=\"url(#head)\"";
        ++stats.arrows;
        break;
      case EdgeOrientation::Undirected:
        out << " stroke=\"#888\" stroke-width=\"2\" stroke-dasharray=\"5,4\"";
        ++stats.dashed;
        break;
      case EdgeOrientation::Conflict:
        out << " stroke=\"#c00\" stroke-width=\"2\" marker-start=\"url(#tail)\" marker-end=\"url(#headc)\"";
        ++stats.conflicts;
        break;
    }
    out << "/>\n";
  }

  const auto sink_list = sinks(c);
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    const auto [x, y] = detail::svg_point(s.cell(i), st);
    const bool sink = std::find(sink_list.begin(), sink_list.end(), s.cell(i)) != sink_list.end();
    out << "<circle class=\"" << (sink ? "node sink" : "node") << "\" cx=\"" << detail::num(x + ox) << "\" cy=\""
        << detail::num(y + oy) << "\" r=\"" << detail::num(st.radius) << "\" fill=\"" << (sink ? "#f5b800" : "#fff")
        << "\" stroke=\"#000\" stroke-width=\"" << (sink ? 3 : 1.5) << "\"/>\n";
    ++stats.nodes;
    stats.sinks += sink;
  }
  out << "</svg>\n";
  return stats;
}

}  // namespace pmle

#endif  // PMLE_SVG_HPP
