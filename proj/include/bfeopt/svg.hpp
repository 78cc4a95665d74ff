#pragma once

// Minimal deterministic SVG writer: fixed-precision number formatting and a
// small set of shape elements, so charts are emitted without an external
// plotting dependency and rerenders are byte-identical.

#include <string>
#include <utility>
#include <vector>

namespace bfeopt {

// Fixed "%.6g" rendering used for all SVG coordinates.
std::string svg_num(double v);

class SvgDocument {
  public:
    SvgDocument(int width, int height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width);
    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                  double stroke_width);
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke);
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& content, int font_size,
              const std::string& fill, const std::string& anchor);

    std::string str() const;
    void save(const std::string& path) const;  // throws std::runtime_error on I/O failure

  private:
    int width_;
    int height_;
    std::string body_;
};

}  // namespace bfeopt
