#pragma once

// Tiny deterministic SVG plotter: polylines, markers, a shaded vertical
// band (for analyticity strips) and linear axes with ticks. No external
// plotting dependency.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sikf/errors.hpp"
#include "sikf/io.hpp"

namespace sikf {

class SvgFigure {
public:
    SvgFigure(double xmin, double xmax, double ymin, double ymax,
              int width = 640, int height = 480)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax),
          width_(width), height_(height) {
        if (!(xmax > xmin) || !(ymax > ymin))
            throw input_error("SvgFigure: empty data range");
    }

    /// Expand a data range by a small margin; convenience for callers.
    static std::pair<double, double> padded(double lo, double hi) {
        const double span = hi > lo ? hi - lo : 1.0;
        return {lo - 0.05 * span, hi + 0.05 * span};
    }

    void band_x(double x0, double x1, const std::string& fill,
                double opacity = 0.15) {
        body_ << "<rect x=\"" << fmt(px(x0)) << "\" y=\"" << fmt(margin_)
              << "\" width=\"" << fmt(std::max(0.0, px(x1) - px(x0)))
              << "\" height=\"" << fmt(height_ - 2.0 * margin_) << "\" fill=\""
              << fill << "\" fill-opacity=\"" << fmt(opacity) << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double width = 1.5) {
        if (pts.size() < 2) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke
              << "\" stroke-width=\"" << fmt(width) << "\" points=\"";
        for (const auto& [x, y] : pts)
            body_ << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        body_ << "\"/>\n";
    }

    void scatter(const std::vector<std::pair<double, double>>& pts,
                 const std::string& fill, double radius = 3.0) {
        for (const auto& [x, y] : pts)
            body_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
                  << "\" r=\"" << fmt(radius) << "\" fill=\"" << fill << "\"/>\n";
    }

    void cross(double x, double y, const std::string& stroke, double size = 5.0) {
        const double cx = px(x), cy = py(y);
        body_ << "<path d=\"M" << fmt(cx - size) << ' ' << fmt(cy - size) << " L"
              << fmt(cx + size) << ' ' << fmt(cy + size) << " M" << fmt(cx - size)
              << ' ' << fmt(cy + size) << " L" << fmt(cx + size) << ' '
              << fmt(cy - size) << "\" stroke=\"" << stroke
              << "\" stroke-width=\"1.5\"/>\n";
    }

    void title(const std::string& text) { title_ = text; }

    std::string render(const std::string& xlabel = "",
                       const std::string& ylabel = "") const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
           << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' '
           << height_ << "\">\n";
        os << "<rect width=\"" << width_ << "\" height=\"" << height_
           << "\" fill=\"white\"/>\n";
        axes(os, xlabel, ylabel);
        os << body_.str();
        if (!title_.empty())
            os << "<text x=\"" << width_ / 2 << "\" y=\"16\" font-size=\"13\" "
               << "font-family=\"sans-serif\" text-anchor=\"middle\">" << title_
               << "</text>\n";
        os << "</svg>\n";
        return os.str();
    }

private:
    static std::string fmt(double v) {
        // two decimals are plenty for pixel coordinates and keep files small
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }

    double px(double x) const {
        return margin_ + (x - xmin_) / (xmax_ - xmin_) * (width_ - 2.0 * margin_);
    }
    double py(double y) const {
        return height_ - margin_ -
               (y - ymin_) / (ymax_ - ymin_) * (height_ - 2.0 * margin_);
    }

    void axes(std::ostringstream& os, const std::string& xlabel,
              const std::string& ylabel) const {
        os << "<rect x=\"" << fmt(margin_) << "\" y=\"" << fmt(margin_)
           << "\" width=\"" << fmt(width_ - 2.0 * margin_) << "\" height=\""
           << fmt(height_ - 2.0 * margin_)
           << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double fx = xmin_ + (xmax_ - xmin_) * i / 5.0;
            const double fy = ymin_ + (ymax_ - ymin_) * i / 5.0;
            os << "<line x1=\"" << fmt(px(fx)) << "\" y1=\""
               << fmt(height_ - margin_) << "\" x2=\"" << fmt(px(fx)) << "\" y2=\""
               << fmt(height_ - margin_ + 4) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(px(fx)) << "\" y=\""
               << fmt(height_ - margin_ + 16)
               << "\" font-size=\"10\" font-family=\"sans-serif\" "
               << "text-anchor=\"middle\">" << tick(fx) << "</text>\n";
            os << "<line x1=\"" << fmt(margin_ - 4) << "\" y1=\"" << fmt(py(fy))
               << "\" x2=\"" << fmt(margin_) << "\" y2=\"" << fmt(py(fy))
               << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(margin_ - 6) << "\" y=\"" << fmt(py(fy) + 3)
               << "\" font-size=\"10\" font-family=\"sans-serif\" "
               << "text-anchor=\"end\">" << tick(fy) << "</text>\n";
        }
        if (!xlabel.empty())
            os << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 6
               << "\" font-size=\"12\" font-family=\"sans-serif\" "
               << "text-anchor=\"middle\">" << xlabel << "</text>\n";
        if (!ylabel.empty())
            os << "<text x=\"14\" y=\"" << height_ / 2
               << "\" font-size=\"12\" font-family=\"sans-serif\" "
               << "text-anchor=\"middle\" transform=\"rotate(-90 14 "
               << height_ / 2 << ")\">" << ylabel << "</text>\n";
    }

    static std::string tick(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    double xmin_, xmax_, ymin_, ymax_;
    int width_, height_;
    double margin_ = 48.0;
    std::ostringstream body_;
    std::string title_;
};

} // namespace sikf
