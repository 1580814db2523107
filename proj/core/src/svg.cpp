#include "fsreach/svg.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsreach::svg {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

Figure::Figure(double xmin, double xmax, double ymin, double ymax, int width,
               int height)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax),
      width_(width), height_(height) {
  if (!(xmax > xmin && ymax > ymin))
    throw std::invalid_argument("Figure: empty world window");
}

Vector2d Figure::to_page(const Vector2d& w) const {
  const double px = (w(0) - xmin_) / (xmax_ - xmin_) * width_;
  const double py = height_ - (w(1) - ymin_) / (ymax_ - ymin_) * height_;
  return {px, py};
}

void Figure::polyline(const MatrixXd& pts, const std::string& color,
                      double stroke_width, bool closed) {
  if (pts.rows() != 2 || pts.cols() < 2) return;
  std::ostringstream os;
  os << (closed ? "<polygon" : "<polyline") << " points=\"";
  for (int k = 0; k < pts.cols(); ++k) {
    const Vector2d p = to_page(pts.col(k));
    os << fmt(p(0)) << "," << fmt(p(1)) << (k + 1 < pts.cols() ? " " : "");
  }
  os << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << stroke_width << "\"/>";
  elems_.push_back(os.str());
}

void Figure::polygon_fill(const MatrixXd& pts, const std::string& fill,
                          double opacity, const std::string& stroke) {
  if (pts.rows() != 2 || pts.cols() < 3) return;
  std::ostringstream os;
  os << "<polygon points=\"";
  for (int k = 0; k < pts.cols(); ++k) {
    const Vector2d p = to_page(pts.col(k));
    os << fmt(p(0)) << "," << fmt(p(1)) << (k + 1 < pts.cols() ? " " : "");
  }
  os << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\""
     << stroke << "\"/>";
  elems_.push_back(os.str());
}

void Figure::circle(const Vector2d& c, double world_radius,
                    const std::string& color, bool filled) {
  const Vector2d p = to_page(c);
  const double rx = world_radius / (xmax_ - xmin_) * width_;
  const double ry = world_radius / (ymax_ - ymin_) * height_;
  std::ostringstream os;
  os << "<ellipse cx=\"" << fmt(p(0)) << "\" cy=\"" << fmt(p(1)) << "\" rx=\""
     << fmt(rx) << "\" ry=\"" << fmt(ry) << "\" fill=\""
     << (filled ? color : std::string("none")) << "\" stroke=\"" << color
     << "\"/>";
  elems_.push_back(os.str());
}

void Figure::dot(const Vector2d& c, const std::string& color, double px_radius) {
  const Vector2d p = to_page(c);
  std::ostringstream os;
  os << "<circle cx=\"" << fmt(p(0)) << "\" cy=\"" << fmt(p(1)) << "\" r=\""
     << px_radius << "\" fill=\"" << color << "\"/>";
  elems_.push_back(os.str());
}

void Figure::cell(const Vector2d& lo, const Vector2d& hi, const std::string& fill,
                  double opacity) {
  const Vector2d a = to_page(Vector2d(lo(0), hi(1)));
  const Vector2d b = to_page(Vector2d(hi(0), lo(1)));
  std::ostringstream os;
  os << "<rect x=\"" << fmt(a(0)) << "\" y=\"" << fmt(a(1)) << "\" width=\""
     << fmt(b(0) - a(0)) << "\" height=\"" << fmt(b(1) - a(1)) << "\" fill=\""
     << fill << "\" fill-opacity=\"" << opacity << "\"/>";
  elems_.push_back(os.str());
}

void Figure::text(const Vector2d& at, const std::string& s, int px_size) {
  const Vector2d p = to_page(at);
  std::ostringstream os;
  os << "<text x=\"" << fmt(p(0)) << "\" y=\"" << fmt(p(1)) << "\" font-size=\""
     << px_size << "\" font-family=\"sans-serif\">" << s << "</text>";
  elems_.push_back(os.str());
}

void Figure::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Figure::write: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width_ << "\" height=\"" << height_
      << "\" fill=\"white\"/>\n";
  for (const auto& e : elems_) out << e << "\n";
  out << "</svg>\n";
}

}  // namespace fsreach::svg
