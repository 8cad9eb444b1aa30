// Copyright 2026 The rpzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <png.h>

#include "core/error.hpp"

namespace rpzeno {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 150.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

std::string esc(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

std::string fmt(double v, const char* f = "%.4g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0, pixel_hi = 1.0;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    const double t = b == a ? 0.5 : (x - a) / (b - a);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int a = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      const int b = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      const int step = std::max(1, (b - a) / 8 + 1);
      for (int e = a; e <= b; e += step) out.push_back(std::pow(10.0, e));
    } else {
      for (int i = 0; i <= 4; ++i) out.push_back(lo + (hi - lo) * i / 4.0);
    }
    return out;
  }

  std::string label(double v) const {
    if (log) return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(v))));
    return fmt(v, "%.3g");
  }
};

void axis_svg(std::ostringstream& os, const Scale& x, const Scale& y, const std::string& x_label,
              const std::string& y_label, const std::string& title) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
     << y0 - y1 << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (const double t : x.ticks()) {
    const double px = x.map(t);
    os << "<line x1=\"" << fmt(px) << "\" y1=\"" << y0 << "\" x2=\"" << fmt(px) << "\" y2=\""
       << y0 + 6 << "\" stroke=\"#000\"/>\n"
       << "<text x=\"" << fmt(px) << "\" y=\"" << y0 + 22
       << "\" text-anchor=\"middle\" font-size=\"13\">" << esc(x.label(t)) << "</text>\n";
  }
  for (const double t : y.ticks()) {
    const double py = y.map(t);
    os << "<line x1=\"" << x0 - 6 << "\" y1=\"" << fmt(py) << "\" x2=\"" << x0 << "\" y2=\""
       << fmt(py) << "\" stroke=\"#000\"/>\n"
       << "<text x=\"" << x0 - 10 << "\" y=\"" << fmt(py + 4)
       << "\" text-anchor=\"end\" font-size=\"13\">" << esc(y.label(t)) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 20
     << "\" text-anchor=\"middle\" font-size=\"15\">" << esc(x_label) << "</text>\n"
     << "<text x=\"24\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"15\" "
     << "transform=\"rotate(-90 24 " << (y0 + y1) / 2 << ")\">" << esc(y_label) << "</text>\n"
     << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">"
     << esc(title) << "</text>\n";
}

// Cell edges in axis units: geometric or arithmetic midpoints.
std::vector<double> edges(const std::vector<double>& v, bool log) {
  std::vector<double> e(v.size() + 1);
  if (v.size() == 1) {
    e[0] = log ? v[0] / 1.5 : v[0] - 0.5;
    e[1] = log ? v[0] * 1.5 : v[0] + 0.5;
    return e;
  }
  for (std::size_t i = 1; i < v.size(); ++i)
    e[i] = log ? std::sqrt(v[i - 1] * v[i]) : 0.5 * (v[i - 1] + v[i]);
  e[0] = log ? v[0] * v[0] / e[1] : 2 * v[0] - e[1];
  e.back() = log ? v.back() * v.back() / e[v.size() - 1] : 2 * v.back() - e[v.size() - 1];
  return e;
}

void check_heatmap(const Heatmap& m) {
  if (m.x.empty() || m.y.empty() || m.values.size() != m.x.size() * m.y.size() ||
      m.valid.size() != m.values.size())
    throw Error(ErrorKind::InvalidArgument, "heatmap data has inconsistent dimensions");
}

double unit_value(const Heatmap& m, std::size_t i) {
  if (!(m.normalization > 0.0)) return 0.0;
  return std::clamp(m.values[i] / m.normalization, 0.0, 1.0);
}

}  // namespace

void colormap(double t, unsigned char rgb[3]) {
  // Perceptually ordered dark-blue -> teal -> yellow ramp.
  static const double anchors[][3] = {{68, 1, 84},    {72, 40, 120},  {62, 74, 137},
                                      {49, 104, 142}, {38, 130, 142}, {31, 158, 137},
                                      {53, 183, 121}, {110, 206, 88}, {181, 222, 43},
                                      {253, 231, 37}};
  constexpr int n = 10;
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * (n - 1);
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double f = pos - i;
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<unsigned char>(
        std::lround(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c])));
}

std::string render_heatmap_svg(const Heatmap& m) {
  check_heatmap(m);
  const auto ex = edges(m.x, m.x_log);
  const auto ey = edges(m.y, m.y_log);
  const Scale sx{ex.front(), ex.back(), m.x_log, kLeft, kWidth - kRight};
  const Scale sy{ey.front(), ey.back(), m.y_log, kHeight - kBottom, kTop};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t j = 0; j < m.y.size(); ++j) {
    const double ya = sy.map(ey[j + 1]), yb = sy.map(ey[j]);
    for (std::size_t i = 0; i < m.x.size(); ++i) {
      const std::size_t k = j * m.x.size() + i;
      const double xa = sx.map(ex[i]), xb = sx.map(ex[i + 1]);
      char color[8] = "#bbbbbb";
      if (m.valid[k]) {
        unsigned char rgb[3];
        colormap(unit_value(m, k), rgb);
        std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
      }
      os << "<rect x=\"" << fmt(xa) << "\" y=\"" << fmt(ya) << "\" width=\"" << fmt(xb - xa + 0.3)
         << "\" height=\"" << fmt(yb - ya + 0.3) << "\" fill=\"" << color << "\"/>\n";
    }
  }
  os << "</g>\n";
  axis_svg(os, sx, sy, m.x_label, m.y_label, m.title);
  // Colorbar with the normalization value on top.
  const double cx = kWidth - kRight + 30, top = kTop, bottom = kHeight - kBottom;
  const int steps = 64;
  for (int s = 0; s < steps; ++s) {
    unsigned char rgb[3];
    colormap((s + 0.5) / steps, rgb);
    const double y = bottom - (s + 1) * (bottom - top) / steps;
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    os << "<rect x=\"" << cx << "\" y=\"" << fmt(y) << "\" width=\"20\" height=\""
       << fmt((bottom - top) / steps + 0.3) << "\" fill=\"" << color << "\"/>\n";
  }
  os << "<rect x=\"" << cx << "\" y=\"" << top << "\" width=\"20\" height=\"" << bottom - top
     << "\" fill=\"none\" stroke=\"#000\"/>\n"
     << "<text x=\"" << cx + 26 << "\" y=\"" << top + 5 << "\" font-size=\"12\">1</text>\n"
     << "<text x=\"" << cx + 26 << "\" y=\"" << bottom + 4 << "\" font-size=\"12\">0</text>\n";
  if (!m.annotation.empty())
    os << "<text x=\"" << kWidth - 10 << "\" y=\"" << kHeight - 20
       << "\" text-anchor=\"end\" font-size=\"13\">" << esc(m.annotation) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_heatmap_png(const Heatmap& m) {
  check_heatmap(m);
  const int nx = static_cast<int>(m.x.size());
  const int ny = static_cast<int>(m.y.size());
  const int cell = std::max(1, 600 / std::max(nx, ny));
  const int bar = 24, gap = 12;
  const int width = nx * cell + gap + bar;
  const int height = ny * cell;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width * height * 3), 255);
  auto put = [&](int x, int y, const unsigned char rgb[3]) {
    const std::size_t k = static_cast<std::size_t>((y * width + x) * 3);
    pixels[k] = rgb[0];
    pixels[k + 1] = rgb[1];
    pixels[k + 2] = rgb[2];
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j * nx + i);
      unsigned char rgb[3] = {187, 187, 187};
      if (m.valid[k]) colormap(unit_value(m, k), rgb);
      // Row 0 of the image is the largest y.
      for (int py = 0; py < cell; ++py)
        for (int px = 0; px < cell; ++px) put(i * cell + px, (ny - 1 - j) * cell + py, rgb);
    }
  for (int y = 0; y < height; ++y) {
    unsigned char rgb[3];
    colormap(1.0 - (y + 0.5) / height, rgb);
    for (int x = 0; x < bar; ++x) put(nx * cell + gap + x, y, rgb);
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::Io, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "libpng initialization failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, pixels.data() + static_cast<std::size_t>(y * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::string render_lines_svg(const LinePlot& plot) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.x_log || x > 0) && (!plot.y_log || y > 0);
  };
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (!(xlo <= xhi)) {
    xlo = plot.x_log ? 1.0 : 0.0;
    xhi = plot.x_log ? 10.0 : 1.0;
    ylo = xlo;
    yhi = xhi;
  }
  if (xlo == xhi) xhi = plot.x_log ? xlo * 10 : xlo + 1;
  if (ylo == yhi) {
    ylo = plot.y_log ? ylo / 10 : ylo - 0.5;
    yhi = plot.y_log ? yhi * 10 : yhi + 0.5;
  }
  if (plot.y_log) {
    ylo = std::pow(10.0, std::floor(std::log10(ylo)));
    yhi = std::pow(10.0, std::ceil(std::log10(yhi)));
  } else {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  const Scale sx{xlo, xhi, plot.x_log, kLeft, kWidth - kRight};
  const Scale sy{ylo, yhi, plot.y_log, kHeight - kBottom, kTop};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  axis_svg(os, sx, sy, plot.x_label, plot.y_label, plot.title);
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = palette[k % 8];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + fmt(sx.map(s.x[i]), "%.2f") + " " +
              fmt(sy.map(s.y[i]), "%.2f");
      pen_down = true;
    }
    if (!path.empty())
      os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\"/>\n";
    if (!s.name.empty() && plot.series.size() <= 16) {
      const double ly = kTop + 16 + 18 * static_cast<double>(k);
      const double lx = kWidth - kRight + 12;
      os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 18 << "\" y2=\""
         << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
         << "<text x=\"" << lx + 24 << "\" y=\"" << ly << "\" font-size=\"12\">" << esc(s.name)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rpzeno
