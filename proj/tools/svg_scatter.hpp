#pragma once
// Minimal scatter-plot SVG writer for point clouds in the plane (Julia
// clouds, periodic orbit sets).  Self-contained, deterministic output.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace juliadyn_cli {

struct SvgScatter {
  std::string title;
  std::vector<std::complex<double>> points;
  double point_radius = 1.2;
  int canvas = 720;  // square canvas in px
  bool unit_circle = true;

  std::string render() const {
    double extent = 1.0;
    for (const auto& z : points)
      extent = std::max({extent, std::abs(z.real()), std::abs(z.imag())});
    extent *= 1.08;
    const double half = canvas / 2.0;
    const double scale = half / extent;
    auto px = [&](double x) { return half + scale * x; };
    auto py = [&](double y) { return half - scale * y; };

    std::string out;
    out.reserve(128 * points.size() / 2 + 1024);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                  "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                  canvas, canvas, canvas, canvas);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"12\" y=\"24\" font-family=\"monospace\" "
                    "font-size=\"14\">%s</text>\n",
                    title.c_str());
      out += buf;
    }
    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"0\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" "
                  "stroke=\"#ccc\"/>\n<line x1=\"%.1f\" y1=\"0\" x2=\"%.1f\" "
                  "y2=\"%d\" stroke=\"#ccc\"/>\n",
                  half, canvas, half, half, half, canvas);
    out += buf;
    if (unit_circle) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.2f\" fill=\"none\" "
                    "stroke=\"#e0e0e0\" stroke-dasharray=\"4 3\"/>\n",
                    half, half, scale);
      out += buf;
    }
    for (const auto& z : points) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" "
                    "fill=\"#1f4e8c\" fill-opacity=\"0.7\"/>\n",
                    px(z.real()), py(z.imag()), point_radius);
      out += buf;
    }
    out += "</svg>\n";
    return out;
  }

  void write(const std::string& path) const {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open SVG output: " + path);
    const std::string body = render();
    std::fwrite(body.data(), 1, body.size(), f);
    std::fclose(f);
  }
};

}  // namespace juliadyn_cli
