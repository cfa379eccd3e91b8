#ifndef STEPREG_SVG_HPP
#define STEPREG_SVG_HPP

#include <string>
#include <vector>

namespace stepreg {

// Minimal self-contained line-plot writer; no external processes.
class SvgPlot {
public:
    SvgPlot(int width = 640, int height = 420);

    void set_log_axes(bool log_x, bool log_y);
    void add_series(std::vector<double> x, std::vector<double> y, const std::string& color,
                    const std::string& label = "");
    std::string render() const;

private:
    int width_, height_;
    bool log_x_ = false, log_y_ = false;
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
    };
    std::vector<Series> series_;
};

}  // namespace stepreg

#endif
