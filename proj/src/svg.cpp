#include "bfeopt/svg.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bfeopt {

std::string svg_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

}  // namespace

SvgDocument::SvgDocument(int width, int height) : width_(width), height_(height) {}

void SvgDocument::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                       double stroke_width) {
    body_ += "<line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" + svg_num(x2) +
             "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             svg_num(stroke_width) + "\"/>\n";
}

void SvgDocument::polyline(const std::vector<std::pair<double, double>>& points,
                           const std::string& stroke, double stroke_width) {
    body_ += "<polyline points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) body_ += " ";
        body_ += svg_num(points[i].first) + "," + svg_num(points[i].second);
    }
    body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + svg_num(stroke_width) +
             "\"/>\n";
}

void SvgDocument::rect(double x, double y, double w, double h, const std::string& fill,
                       const std::string& stroke) {
    body_ += "<rect x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" width=\"" + svg_num(w) +
             "\" height=\"" + svg_num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
             "\"/>\n";
}

void SvgDocument::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + svg_num(cx) + "\" cy=\"" + svg_num(cy) + "\" r=\"" + svg_num(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgDocument::text(double x, double y, const std::string& content, int font_size,
                       const std::string& fill, const std::string& anchor) {
    body_ += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" font-size=\"" +
             std::to_string(font_size) +
             "\" font-family=\"Helvetica, Arial, sans-serif\" fill=\"" + fill +
             "\" text-anchor=\"" + anchor + "\">" + escape_text(content) + "</text>\n";
}

std::string SvgDocument::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
                      "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
                      std::to_string(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) + "\" height=\"" +
           std::to_string(height_) + "\" fill=\"#ffffff\" stroke=\"none\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

void SvgDocument::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("SvgDocument::save: cannot open " + path);
    out << str();
    if (!out) throw std::runtime_error("SvgDocument::save: write failed for " + path);
}

}  // namespace bfeopt
