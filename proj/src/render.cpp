#include "viewstack/render.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace viewstack {

namespace {

const std::vector<std::string> kDefaultPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

struct Rgb {
  unsigned char r = 0, g = 0, b = 0;
};

Rgb parse_color(const std::string& hex) {
  unsigned r = 0, g = 0, b = 0;
  if (hex.size() != 7 || hex[0] != '#' || std::sscanf(hex.c_str() + 1, "%2x%2x%2x", &r, &g, &b) != 3) {
    throw std::invalid_argument("bad colour '" + hex + "', expected #rrggbb");
  }
  return {static_cast<unsigned char>(r), static_cast<unsigned char>(g), static_cast<unsigned char>(b)};
}

// 5x7 glyphs; lowercase letters render as capitals.
const std::map<char, std::array<const char*, 7>>& font() {
  static const std::map<char, std::array<const char*, 7>> glyphs = {
      {'A', {"01110", "10001", "10001", "11111", "10001", "10001", "10001"}},
      {'B', {"11110", "10001", "10001", "11110", "10001", "10001", "11110"}},
      {'C', {"01110", "10001", "10000", "10000", "10000", "10001", "01110"}},
      {'D', {"11110", "10001", "10001", "10001", "10001", "10001", "11110"}},
      {'E', {"11111", "10000", "10000", "11110", "10000", "10000", "11111"}},
      {'F', {"11111", "10000", "10000", "11110", "10000", "10000", "10000"}},
      {'G', {"01110", "10001", "10000", "10111", "10001", "10001", "01111"}},
      {'H', {"10001", "10001", "10001", "11111", "10001", "10001", "10001"}},
      {'I', {"01110", "00100", "00100", "00100", "00100", "00100", "01110"}},
      {'J', {"00111", "00010", "00010", "00010", "00010", "10010", "01100"}},
      {'K', {"10001", "10010", "10100", "11000", "10100", "10010", "10001"}},
      {'L', {"10000", "10000", "10000", "10000", "10000", "10000", "11111"}},
      {'M', {"10001", "11011", "10101", "10101", "10001", "10001", "10001"}},
      {'N', {"10001", "10001", "11001", "10101", "10011", "10001", "10001"}},
      {'O', {"01110", "10001", "10001", "10001", "10001", "10001", "01110"}},
      {'P', {"11110", "10001", "10001", "11110", "10000", "10000", "10000"}},
      {'Q', {"01110", "10001", "10001", "10001", "10101", "10010", "01101"}},
      {'R', {"11110", "10001", "10001", "11110", "10100", "10010", "10001"}},
      {'S', {"01111", "10000", "10000", "01110", "00001", "00001", "11110"}},
      {'T', {"11111", "00100", "00100", "00100", "00100", "00100", "00100"}},
      {'U', {"10001", "10001", "10001", "10001", "10001", "10001", "01110"}},
      {'V', {"10001", "10001", "10001", "10001", "10001", "01010", "00100"}},
      {'W', {"10001", "10001", "10001", "10101", "10101", "10101", "01010"}},
      {'X', {"10001", "10001", "01010", "00100", "01010", "10001", "10001"}},
      {'Y', {"10001", "10001", "01010", "00100", "00100", "00100", "00100"}},
      {'Z', {"11111", "00001", "00010", "00100", "01000", "10000", "11111"}},
      {'0', {"01110", "10001", "10011", "10101", "11001", "10001", "01110"}},
      {'1', {"00100", "01100", "00100", "00100", "00100", "00100", "01110"}},
      {'2', {"01110", "10001", "00001", "00010", "00100", "01000", "11111"}},
      {'3', {"11111", "00010", "00100", "00010", "00001", "10001", "01110"}},
      {'4', {"00010", "00110", "01010", "10010", "11111", "00010", "00010"}},
      {'5', {"11111", "10000", "11110", "00001", "00001", "10001", "01110"}},
      {'6', {"00110", "01000", "10000", "11110", "10001", "10001", "01110"}},
      {'7', {"11111", "00001", "00010", "00100", "01000", "01000", "01000"}},
      {'8', {"01110", "10001", "10001", "01110", "10001", "10001", "01110"}},
      {'9', {"01110", "10001", "10001", "01111", "00001", "00010", "01100"}},
      {'_', {"00000", "00000", "00000", "00000", "00000", "00000", "11111"}},
      {'-', {"00000", "00000", "00000", "11111", "00000", "00000", "00000"}},
      {'.', {"00000", "00000", "00000", "00000", "00000", "01100", "01100"}},
      {'#', {"01010", "01010", "11111", "01010", "11111", "01010", "01010"}},
  };
  return glyphs;
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 255) {}

  void fill(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = std::max(0, y0); y < std::min(h_, y1); ++y) {
      for (int x = std::max(0, x0); x < std::min(w_, x1); ++x) set(x, y, c);
    }
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  void text(int x, int y, const std::string& s, Rgb c) {
    for (char ch : s) {
      auto it = font().find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
      if (it != font().end()) {
        for (int row = 0; row < 7; ++row) {
          for (int col = 0; col < 5; ++col) {
            if (it->second[row][col] == '1') set(x + col, y + row, c);
          }
        }
      }
      x += 6;
    }
  }

  std::string encode_png() const {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png: cannot create writer");
    png_infop info = png_create_info_struct(png);
    std::string out;
    if (!info || setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, info ? &info : nullptr);
      throw std::runtime_error("png: encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t len) {
          static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
        },
        [](png_structp) {});
    png_set_IHDR(png, info, w_, h_, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 9);
    png_write_info(png, info);
    for (int y = 0; y < h_; ++y) {
      png_write_row(png, const_cast<png_bytep>(&px_[static_cast<std::size_t>(y) * w_ * 3]));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
  }

 private:
  int w_, h_;
  std::vector<unsigned char> px_;
};

std::vector<std::size_t> legend_entries(const ViewLandscape& l) {
  std::vector<std::size_t> counts(l.labels.size(), 0);
  for (auto c : l.cells) ++counts[c];
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < l.labels.size(); ++i) {
    const bool view = i < l.fallback_label();
    if (view || i == l.fallback_label() || counts[i] > 0) out.push_back(i);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
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

constexpr int kLegendWidth = 170;
constexpr int kLegendRow = 14;

}  // namespace

std::optional<ImageFormat> image_format_from_string(std::string_view name) {
  if (name == "png") return ImageFormat::png;
  if (name == "svg") return ImageFormat::svg;
  return std::nullopt;
}

std::string label_color(const ViewLandscape& l, std::size_t index, const std::vector<std::string>& palette) {
  if (index == l.fallback_label()) return kFallbackColor;
  if (index == l.error_label()) return kErrorColor;
  const auto& p = palette.empty() ? kDefaultPalette : palette;
  return p[index % p.size()];
}

std::string render_landscape(const ViewLandscape& l, ImageFormat format, const RenderOptions& options) {
  const int s = std::max(1, options.cell_px);
  const int plot_w = static_cast<int>(l.cols) * s;
  const int plot_h = static_cast<int>(l.rows) * s;
  const auto entries = legend_entries(l);
  const int width = plot_w + kLegendWidth;
  const int height = std::max(plot_h, 8 + static_cast<int>(entries.size()) * kLegendRow);
  // Pixel position of a (width, height) point; image y grows downward.
  auto to_px = [&](Point p) {
    return Point{(p.x - l.region.w_min) / l.region.step * s, plot_h - (p.y - l.region.h_min) / l.region.step * s};
  };

  if (format == ImageFormat::png) {
    Canvas canvas(width, height);
    std::vector<Rgb> colors;
    for (std::size_t i = 0; i < l.labels.size(); ++i) colors.push_back(parse_color(label_color(l, i, options.palette)));
    for (std::size_t r = 0; r < l.rows; ++r) {
      for (std::size_t c = 0; c < l.cols; ++c) {
        const int x = static_cast<int>(c) * s;
        const int y = plot_h - static_cast<int>(r + 1) * s;
        canvas.fill(x, y, x + s, y + s, colors[l.at(c, r)]);
      }
    }
    int ly = 6;
    for (std::size_t i : entries) {
      canvas.fill(plot_w + 8, ly, plot_w + 18, ly + 10, colors[i]);
      canvas.text(plot_w + 24, ly + 2, l.labels[i], {0, 0, 0});
      ly += kLegendRow;
    }
    if (options.marker) {
      const Point m = to_px(*options.marker);
      const int mx = static_cast<int>(std::lround(m.x));
      const int my = static_cast<int>(std::lround(m.y));
      for (int d = -6; d <= 6; ++d) {
        canvas.set(mx + d, my, {0, 0, 0});
        canvas.set(mx, my + d, {0, 0, 0});
      }
    }
    return canvas.encode_png();
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
  svg << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < l.rows; ++r) {
    std::size_t c = 0;
    while (c < l.cols) {
      std::size_t end = c;
      while (end < l.cols && l.at(end, r) == l.at(c, r)) ++end;
      svg << "<rect x=\"" << c * s << "\" y=\"" << plot_h - static_cast<int>(r + 1) * s << "\" width=\""
          << (end - c) * s << "\" height=\"" << s << "\" fill=\"" << label_color(l, l.at(c, r), options.palette)
          << "\"/>\n";
      c = end;
    }
  }
  svg << "</g>\n";
  if (options.breakpoints) {
    for (const auto& b : extract_breakpoints(l).boundaries) {
      for (const auto& line : b.polylines) {
        svg << "<polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"4 3\" points=\"";
        for (std::size_t k = 0; k < line.size(); ++k) {
          const Point p = to_px(line[k]);
          svg << (k ? " " : "") << fmt(p.x) << ',' << fmt(p.y);
        }
        svg << "\"/>\n";
      }
    }
  }
  int ly = 6;
  for (std::size_t i : entries) {
    svg << "<rect x=\"" << plot_w + 8 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
        << label_color(l, i, options.palette) << "\"/>\n";
    svg << "<text x=\"" << plot_w + 24 << "\" y=\"" << ly + 9
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(l.labels[i]) << "</text>\n";
    ly += kLegendRow;
  }
  if (options.marker) {
    const Point m = to_px(*options.marker);
    svg << "<circle cx=\"" << fmt(m.x) << "\" cy=\"" << fmt(m.y)
        << "\" r=\"5\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace viewstack
