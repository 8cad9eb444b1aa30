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

#pragma once

// Figures derived from the CSV data: SVG heatmaps and line plots, PNG
// heatmap rasters. Fixed colormap, linear color scale normalized to the
// panel maximum.

#include <string>
#include <vector>

namespace rpzeno {

struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;  // fast index
  std::vector<double> y;  // slow index
  bool x_log = false;
  bool y_log = false;
  std::vector<double> values;  // y.size() * x.size(), row = y index
  std::vector<bool> valid;
  double normalization = 1.0;  // value mapped to the top of the colormap
  std::string annotation;
};

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log = false;
  bool y_log = false;
  std::vector<LineSeries> series;
};

/// RGB in [0, 255] for t in [0, 1].
void colormap(double t, unsigned char rgb[3]);

std::string render_heatmap_svg(const Heatmap& map);
/// PNG file bytes.
std::string render_heatmap_png(const Heatmap& map);
std::string render_lines_svg(const LinePlot& plot);

}  // namespace rpzeno
