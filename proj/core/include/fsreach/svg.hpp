#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fsreach::svg {

using Eigen::MatrixXd;
using Eigen::Vector2d;

// Minimal SVG scatter/contour canvas with a fixed world-to-page transform.
class Figure {
 public:
  Figure(double xmin, double xmax, double ymin, double ymax, int width = 640,
         int height = 640);

  void polyline(const MatrixXd& pts2xk, const std::string& color,
                double stroke_width = 1.0, bool closed = false);
  void polygon_fill(const MatrixXd& pts2xk, const std::string& fill,
                    double opacity, const std::string& stroke = "none");
  void circle(const Vector2d& c, double world_radius, const std::string& color,
              bool filled = false);
  void dot(const Vector2d& c, const std::string& color, double px_radius = 2.0);
  void cell(const Vector2d& lo, const Vector2d& hi, const std::string& fill,
            double opacity);
  void text(const Vector2d& at, const std::string& s, int px_size = 12);
  void write(const std::string& path) const;

 private:
  Vector2d to_page(const Vector2d& w) const;
  double xmin_, xmax_, ymin_, ymax_;
  int width_, height_;
  std::vector<std::string> elems_;
};

}  // namespace fsreach::svg
