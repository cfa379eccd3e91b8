#include "stepreg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stepreg {

SvgPlot::SvgPlot(int width, int height) : width_(width), height_(height) {}

void SvgPlot::set_log_axes(bool log_x, bool log_y) {
    log_x_ = log_x;
    log_y_ = log_y;
}

void SvgPlot::add_series(std::vector<double> x, std::vector<double> y, const std::string& color,
                         const std::string& label) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("SvgPlot: series must be nonempty and matched in length");
    series_.push_back(Series{std::move(x), std::move(y), color, label});
}

std::string SvgPlot::render() const {
    const double ml = 50, mr = 15, mt = 15, mb = 35;
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;

    auto tf_x = [&](double v) { return log_x_ ? std::log10(v) : v; };
    auto tf_y = [&](double v) { return log_y_ ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tf_x(s.x[i]));
            xmax = std::max(xmax, tf_x(s.x[i]));
            ymin = std::min(ymin, tf_y(s.y[i]));
            ymax = std::max(ymax, tf_y(s.y[i]));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return ml + (tf_x(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (tf_y(v) - ymin) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // Four tick labels per axis, in data units.
    out.setf(std::ios::fixed);
    for (int t = 0; t <= 3; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 3.0;
        const double fy = ymin + (ymax - ymin) * t / 3.0;
        const double vx = log_x_ ? std::pow(10.0, fx) : fx;
        const double vy = log_y_ ? std::pow(10.0, fy) : fy;
        const double gx = ml + pw * t / 3.0;
        const double gy = mt + ph - ph * t / 3.0;
        out.precision(3);
        out << "<text x=\"" << gx << "\" y=\"" << (height_ - 12)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << vx << "</text>\n";
        out << "<text x=\"" << (ml - 6) << "\" y=\"" << (gy + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << vy << "</text>\n";
    }

    int li = 0;
    for (const Series& s : series_) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        out.precision(2);
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<text x=\"" << (ml + 10) << "\" y=\"" << (mt + 16 + 14 * li)
                << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
            ++li;
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace stepreg
